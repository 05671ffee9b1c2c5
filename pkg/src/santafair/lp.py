"""Exact rational linear programming via two-phase simplex with Bland's rule.

Self-contained dense solver for desk-scale problems.  Returns exact primal
and dual solutions (strong duality holds as an equality of rationals), an
improving ray when unbounded, and a row-combination certificate when
infeasible.  Deterministic: identical problems yield identical outcomes.

Internally the solver runs a revised simplex (explicit basis inverse) over
gmpy2.mpq when that package is importable, falling back to
fractions.Fraction otherwise; both are exact, so results are identical
either way.  The public API speaks Fraction only.

Dual convention, for a problem with rows ``a_i . x (rel_i) b_i`` and
variables bounded below (default 0; ``None`` marks a free variable):

* sense = max: duals satisfy ``y_i >= 0`` for ``<=`` rows, ``y_i <= 0`` for
  ``>=`` rows, free for ``=``; columns satisfy ``(A^T y)_j >= c_j``
  (equality for free variables); and ``c.x* = y.b'`` where
  ``b'_i = b_i - a_i . lb`` plus the constant ``c . lb``.
* sense = min: all three conditions flip direction on the inequalities.

The infeasibility certificate is a vector ``cert`` over rows with
``cert_i >= 0`` on ``>=`` rows, ``cert_i <= 0`` on ``<=`` rows, such that
the aggregated column combination ``u = A^T cert`` has ``u_j <= 0`` for
every lower-bounded variable and ``u_j = 0`` for free ones, while
``cert . b > u . lb``: no point of the domain can satisfy all rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

try:  # exact fast rationals; semantics identical to Fraction
    from gmpy2 import mpq as _scalar
except ImportError:  # pragma: no cover - environment without gmpy2
    _scalar = Fraction

Relation = Literal["<=", ">=", "=="]
Sense = Literal["max", "min"]

RELATIONS = ("<=", ">=", "==")


class LpError(ValueError):
    """Structurally invalid problem or mismatched vector arities."""


def _to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction


@dataclass(frozen=True)
class LpProblem:
    """Dense LP: optimize ``objective . x`` subject to rows and lower bounds.

    ``lower_bounds`` is per-variable: a Fraction bound (default 0 when the
    whole field is None) or None for a free variable.
    """

    sense: Sense
    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    lower_bounds: tuple[Fraction | None, ...] | None = None

    def __post_init__(self) -> None:
        if self.sense not in ("max", "min"):
            raise LpError(f"unknown sense {self.sense!r}")
        n = len(self.objective)
        for c in self.constraints:
            if len(c.coeffs) != n:
                raise LpError(
                    f"constraint arity {len(c.coeffs)} != objective arity {n}"
                )
            if c.relation not in RELATIONS:
                raise LpError(f"unknown relation {c.relation!r}")
        if self.lower_bounds is not None and len(self.lower_bounds) != n:
            raise LpError("lower_bounds arity mismatch")

    @property
    def nvars(self) -> int:
        return len(self.objective)

    def bounds(self) -> tuple[Fraction | None, ...]:
        if self.lower_bounds is None:
            return tuple(Fraction(0) for _ in range(self.nvars))
        return self.lower_bounds


def maximize(objective, constraints, lower_bounds=None) -> LpProblem:
    return _make("max", objective, constraints, lower_bounds)


def minimize(objective, constraints, lower_bounds=None) -> LpProblem:
    return _make("min", objective, constraints, lower_bounds)


def _make(sense, objective, constraints, lower_bounds) -> LpProblem:
    rows = tuple(
        Constraint(tuple(Fraction(v) for v in coeffs), rel, Fraction(rhs))
        for coeffs, rel, rhs in constraints
    )
    lbs = None
    if lower_bounds is not None:
        lbs = tuple(None if b is None else Fraction(b) for b in lower_bounds)
    return LpProblem(
        sense=sense,
        objective=tuple(Fraction(v) for v in objective),
        constraints=rows,
        lower_bounds=lbs,
    )


@dataclass(frozen=True)
class LpOutcome:
    status: Literal["optimal", "infeasible", "unbounded"]
    objective_value: Fraction | None = None
    primal: tuple[Fraction, ...] | None = None
    dual: tuple[Fraction, ...] | None = None
    ray: tuple[Fraction, ...] | None = None
    certificate: tuple[Fraction, ...] | None = None
    pivots: int = 0


@dataclass
class CheckResult:
    ok: bool
    reasons: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# standardized internal form
# ---------------------------------------------------------------------------


class _Standard:
    """Equality form ``A x = b, x >= 0`` assembled from an LpProblem.

    Free user variables are split into a positive pair; finite lower bounds
    are shifted away.  Rows with negative right-hand side are negated
    (recorded in ``flips``) after slack columns are attached, and one
    artificial column per row is appended for phase one.
    """

    def __init__(self, problem: LpProblem) -> None:
        self.problem = problem
        zero = _scalar(0)
        one = _scalar(1)
        m = len(problem.constraints)
        self.m = m
        bounds = problem.bounds()

        # column plan: structural columns first, then slacks, then artificials
        self.var_cols: list[tuple[int, ...]] = []  # user var -> internal cols
        self.shift = [b if b is not None else Fraction(0) for b in bounds]
        ncols = 0
        for b in bounds:
            if b is None:
                self.var_cols.append((ncols, ncols + 1))  # x = pos - neg
                ncols += 2
            else:
                self.var_cols.append((ncols,))
                ncols += 1
        self.nstruct = ncols
        self.slack_col = [-1] * m
        for r, row in enumerate(problem.constraints):
            if row.relation in ("<=", ">="):
                self.slack_col[r] = ncols
                ncols += 1
        self.nreal = ncols  # structural + slack
        self.art_col = list(range(ncols, ncols + m))
        self.ncols = ncols + m

        # rhs after shifting lower bounds out of the rows
        rhs = []
        for row in problem.constraints:
            adj = _scalar(row.rhs)
            for j, cf in enumerate(row.coeffs):
                if self.shift[j]:
                    adj -= _scalar(cf) * _scalar(self.shift[j])
            rhs.append(adj)

        self.flips = [1] * m
        for r in range(m):
            if rhs[r] < zero:
                self.flips[r] = -1
                rhs[r] = -rhs[r]
        self.b = rhs

        # dense columns (length m each)
        cols = [[zero] * m for _ in range(self.ncols)]
        for r, row in enumerate(problem.constraints):
            f = self.flips[r]
            for j, cf in enumerate(row.coeffs):
                if cf == 0:
                    continue
                v = _scalar(cf) if f == 1 else -_scalar(cf)
                tcols = self.var_cols[j]
                cols[tcols[0]][r] = v
                if len(tcols) == 2:
                    cols[tcols[1]][r] = -v
            if row.relation in ("<=", ">="):
                s = one if row.relation == "<=" else -one
                cols[self.slack_col[r]][r] = s if f == 1 else -s
            cols[self.art_col[r]][r] = one
        self.cols = cols

        # phase-2 cost: internal sense is always min
        csign = -1 if problem.sense == "max" else 1
        cost = [zero] * self.ncols
        for j, cf in enumerate(problem.objective):
            if cf == 0:
                continue
            v = _scalar(cf) if csign == 1 else -_scalar(cf)
            tcols = self.var_cols[j]
            cost[tcols[0]] = v
            if len(tcols) == 2:
                cost[tcols[1]] = -v
        self.cost = cost


class _Simplex:
    """Revised simplex core with an explicit exact basis inverse."""

    def __init__(self, std: _Standard) -> None:
        self.std = std
        self.m = std.m
        self.rows = list(range(std.m))  # surviving original row indices
        self.basis = list(std.art_col)
        zero = _scalar(0)
        one = _scalar(1)
        self.binv = [
            [one if i == r else zero for i in range(std.m)] for r in range(std.m)
        ]
        self.xb = list(std.b)
        self.pivots = 0

    def _column(self, j: int) -> list:
        col = self.std.cols[j]
        return [col[r] for r in self.rows]

    def _apply_binv(self, vec: list) -> list:
        return [
            sum((row[i] * vec[i] for i in range(len(vec)) if vec[i]), _scalar(0))
            for row in self.binv
        ]

    def _duals(self, cost: list) -> list:
        m = len(self.rows)
        cb = [cost[self.basis[r]] for r in range(m)]
        return [
            sum((cb[r] * self.binv[r][i] for r in range(m) if cb[r]), _scalar(0))
            for i in range(m)
        ]

    def _pivot(self, entering: int, direction: list, leave: int) -> None:
        piv = direction[leave]
        m = len(self.rows)
        lrow = self.binv[leave]
        if piv != 1:
            inv = _scalar(1) / piv
            self.binv[leave] = lrow = [v * inv for v in lrow]
            self.xb[leave] = self.xb[leave] * inv
        for r in range(m):
            if r == leave:
                continue
            f = direction[r]
            if f:
                brow = self.binv[r]
                self.binv[r] = [brow[i] - f * lrow[i] for i in range(m)]
                self.xb[r] = self.xb[r] - f * self.xb[leave]
        self.basis[leave] = entering
        self.pivots += 1

    def run(self, cost: list, allowed: Sequence[int]):
        """Minimize ``cost`` with Bland's rule over ``allowed`` columns.

        Returns ("optimal", None) or ("unbounded", (entering, direction)).
        """
        zero = _scalar(0)
        m = len(self.rows)
        while True:
            y = self._duals(cost)
            in_basis = set(self.basis)
            entering = -1
            for j in allowed:  # ascending index: Bland's entering rule
                if j in in_basis:
                    continue
                col = self.std.cols[j]
                red = cost[j] - sum(
                    (y[i] * col[self.rows[i]] for i in range(m) if col[self.rows[i]]),
                    zero,
                )
                if red < zero:
                    entering = j
                    break
            if entering < 0:
                return "optimal", None
            direction = self._apply_binv(self._column(entering))
            leave = -1
            best = None
            for r in range(m):
                if direction[r] > zero:
                    key = (self.xb[r] / direction[r], self.basis[r])
                    if best is None or key < best:
                        best = key
                        leave = r
            if leave < 0:
                return "unbounded", (entering, direction)
            self._pivot(entering, direction, leave)

    def drop_redundant_rows(self, redundant: list[int]) -> None:
        """Remove rows whose artificial stayed basic at zero with no pivot."""
        keep = [r for r in range(len(self.rows)) if r not in set(redundant)]
        self.rows = [self.rows[r] for r in keep]
        self.basis = [self.basis[r] for r in keep]
        self.xb = None  # rebuilt below
        m = len(self.rows)
        matrix = [
            [self.std.cols[self.basis[c]][self.rows[r]] for c in range(m)]
            for r in range(m)
        ]
        self.binv = _invert(matrix)
        b = [self.std.b[r] for r in self.rows]
        self.xb = self._apply_binv(b)


def _invert(matrix: list[list]) -> list[list]:
    """Exact Gauss-Jordan inverse of a nonsingular square matrix."""
    m = len(matrix)
    zero = _scalar(0)
    one = _scalar(1)
    a = [list(row) for row in matrix]
    inv = [[one if i == r else zero for i in range(m)] for r in range(m)]
    for c in range(m):
        p = next(r for r in range(c, m) if a[r][c] != zero)
        a[c], a[p] = a[p], a[c]
        inv[c], inv[p] = inv[p], inv[c]
        piv = a[c][c]
        if piv != one:
            f = one / piv
            a[c] = [v * f for v in a[c]]
            inv[c] = [v * f for v in inv[c]]
        for r in range(m):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [a[r][i] - f * a[c][i] for i in range(m)]
                inv[r] = [inv[r][i] - f * inv[c][i] for i in range(m)]
    return inv


def solve_lp(problem: LpProblem) -> LpOutcome:
    """Solve exactly; see module docstring for the outcome contracts."""
    std = _Standard(problem)
    n = problem.nvars

    if std.m == 0:
        return _solve_unconstrained(problem, std)

    sx = _Simplex(std)
    real_cols = list(range(std.nreal))

    # phase 1: minimize the sum of artificials
    zero = _scalar(0)
    one = _scalar(1)
    c1 = [zero] * std.ncols
    for j in std.art_col:
        c1[j] = one
    status, _ = sx.run(c1, real_cols)
    assert status == "optimal"  # phase 1 is bounded below by 0
    infeas = sum(
        (sx.xb[r] for r in range(len(sx.rows)) if sx.basis[r] in set(std.art_col)),
        zero,
    )
    if infeas > zero:
        y1 = sx._duals(c1)
        cert = [Fraction(0)] * std.m
        for i, r in enumerate(sx.rows):
            cert[r] = _to_fraction(std.flips[r] * y1[i])
        return LpOutcome(
            status="infeasible", certificate=tuple(cert), pivots=sx.pivots
        )

    _purge_artificials(sx, real_cols)

    # phase 2: original costs, artificial columns banned
    status, info = sx.run(std.cost, real_cols)
    if status == "unbounded":
        entering, direction = info
        ray = _extract_ray(std, sx, entering, direction)
        return LpOutcome(status="unbounded", ray=ray, pivots=sx.pivots)

    primal = _extract_primal(std, sx)
    dual = _extract_dual(std, sx)
    value = sum(
        (problem.objective[j] * primal[j] for j in range(n)), Fraction(0)
    )
    return LpOutcome(
        status="optimal",
        objective_value=value,
        primal=tuple(primal),
        dual=tuple(dual),
        pivots=sx.pivots,
    )


def _solve_unconstrained(problem: LpProblem, std: _Standard) -> LpOutcome:
    """No rows: optimum sits at the lower bounds unless a cost improves."""
    n = problem.nvars
    bounds = problem.bounds()
    ismax = problem.sense == "max"
    for j in range(n):
        cf = problem.objective[j]
        if cf == 0:
            continue
        improves_up = (cf > 0) == ismax
        if improves_up or bounds[j] is None:
            ray = [Fraction(0)] * n
            ray[j] = Fraction(1) if improves_up else Fraction(-1)
            return LpOutcome(status="unbounded", ray=tuple(ray))
    primal = tuple(b if b is not None else Fraction(0) for b in bounds)
    value = sum(
        (problem.objective[j] * primal[j] for j in range(n)), Fraction(0)
    )
    return LpOutcome(
        status="optimal", objective_value=value, primal=primal, dual=()
    )


def _purge_artificials(sx: _Simplex, real_cols: list[int]) -> None:
    """Pivot basic artificials out; drop rows that prove redundant."""
    zero = _scalar(0)
    art = set(sx.std.art_col)
    redundant: list[int] = []
    for r in range(len(sx.rows)):
        if sx.basis[r] not in art:
            continue
        entering = -1
        direction = None
        in_basis = set(sx.basis)
        for j in real_cols:
            if j in in_basis:
                continue
            d = sx._apply_binv(sx._column(j))
            if d[r] != zero:
                entering = j
                direction = d
                break
        if entering >= 0:
            sx._pivot(entering, direction, r)
        else:
            redundant.append(r)
    if redundant:
        sx.drop_redundant_rows(redundant)


def _extract_primal(std: _Standard, sx: _Simplex) -> list[Fraction]:
    vals = {sx.basis[r]: sx.xb[r] for r in range(len(sx.rows))}
    out = []
    for j in range(std.problem.nvars):
        tcols = std.var_cols[j]
        x = vals.get(tcols[0], _scalar(0))
        if len(tcols) == 2:
            x = x - vals.get(tcols[1], _scalar(0))
        out.append(_to_fraction(x) + std.shift[j])
    return out


def _extract_dual(std: _Standard, sx: _Simplex) -> list[Fraction]:
    y = sx._duals(std.cost)
    sgn = -1 if std.problem.sense == "max" else 1
    dual = [Fraction(0)] * std.m
    for i, r in enumerate(sx.rows):
        dual[r] = _to_fraction(sgn * std.flips[r] * y[i])
    return dual


def _extract_ray(
    std: _Standard, sx: _Simplex, entering: int, direction: list
) -> tuple[Fraction, ...]:
    delta = {entering: _scalar(1)}
    for r in range(len(sx.rows)):
        if direction[r]:
            delta[sx.basis[r]] = -direction[r]
    out = []
    for j in range(std.problem.nvars):
        tcols = std.var_cols[j]
        d = delta.get(tcols[0], _scalar(0))
        if len(tcols) == 2:
            d = d - delta.get(tcols[1], _scalar(0))
        out.append(_to_fraction(d))
    return tuple(out)


def check_solution(
    problem: LpProblem,
    primal: Sequence[Fraction],
    dual: Sequence[Fraction],
) -> CheckResult:
    """Exact certificate check: primal feasible, dual feasible, objectives equal.

    Never raises on bad vectors; every violation is reported as a reason.
    """
    res = CheckResult(ok=True)

    def fail(msg: str) -> None:
        res.ok = False
        res.reasons.append(msg)

    n = problem.nvars
    m = len(problem.constraints)
    if len(primal) != n:
        fail(f"primal arity {len(primal)} != {n}")
        return res
    if len(dual) != m:
        fail(f"dual arity {len(dual)} != {m}")
        return res

    bounds = problem.bounds()
    for j in range(n):
        if bounds[j] is not None and primal[j] < bounds[j]:
            fail(f"x[{j}] = {primal[j]} below lower bound {bounds[j]}")

    shifted_rhs = []
    for i, row in enumerate(problem.constraints):
        lhs = sum((row.coeffs[j] * primal[j] for j in range(n)), Fraction(0))
        if row.relation == "<=" and not lhs <= row.rhs:
            fail(f"row {i}: {lhs} <= {row.rhs} violated")
        if row.relation == ">=" and not lhs >= row.rhs:
            fail(f"row {i}: {lhs} >= {row.rhs} violated")
        if row.relation == "==" and lhs != row.rhs:
            fail(f"row {i}: {lhs} == {row.rhs} violated")
        adj = row.rhs - sum(
            (
                row.coeffs[j] * bounds[j]
                for j in range(n)
                if bounds[j] is not None and bounds[j] != 0
            ),
            Fraction(0),
        )
        shifted_rhs.append(adj)

    ismax = problem.sense == "max"
    for i, row in enumerate(problem.constraints):
        if row.relation == "<=" and (dual[i] < 0) == ismax and dual[i] != 0:
            fail(f"dual[{i}] sign invalid for <= row: {dual[i]}")
        if row.relation == ">=" and (dual[i] > 0) == ismax and dual[i] != 0:
            fail(f"dual[{i}] sign invalid for >= row: {dual[i]}")

    for j in range(n):
        aty = sum(
            (problem.constraints[i].coeffs[j] * dual[i] for i in range(m)),
            Fraction(0),
        )
        cj = problem.objective[j]
        if bounds[j] is None:
            if aty != cj:
                fail(f"dual column {j}: {aty} != {cj} (free variable)")
        elif ismax and not aty >= cj:
            fail(f"dual column {j}: {aty} >= {cj} violated")
        elif not ismax and not aty <= cj:
            fail(f"dual column {j}: {aty} <= {cj} violated")

    pobj = sum((problem.objective[j] * primal[j] for j in range(n)), Fraction(0))
    dobj = sum((shifted_rhs[i] * dual[i] for i in range(m)), Fraction(0)) + sum(
        (
            problem.objective[j] * bounds[j]
            for j in range(n)
            if bounds[j] is not None and bounds[j] != 0
        ),
        Fraction(0),
    )
    if pobj != dobj:
        fail(f"objective gap: primal {pobj} != dual {dobj}")
    return res
