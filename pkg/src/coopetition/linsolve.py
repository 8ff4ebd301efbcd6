"""Dense two-phase primal simplex for small linear programs.

Problems here come from payoff tables with human-scale entries, so a dense
tableau with fixed absolute tolerances is adequate. Free and bounded
variables are mapped onto non-negative columns before the tableau is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
OPT_TOL = 1e-9

RELATIONS = ("<=", "=", ">=")
DIRECTIONS = ("maximize", "minimize", "feasibility")


class DegenerateLPError(RuntimeError):
    """The simplex iterations broke down numerically or failed to terminate."""


@dataclass
class Constraint:
    coeffs: np.ndarray
    relation: str
    rhs: float


@dataclass
class LinearProgram:
    num_vars: int
    direction: str = "feasibility"
    objective: np.ndarray | None = None
    constraints: list[Constraint] = field(default_factory=list)
    bounds: list[tuple[float, float]] | None = None
    names: list[str] | None = None

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.objective is None:
            self.objective = np.zeros(self.num_vars)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length does not match num_vars")
        if self.direction == "feasibility" and np.any(self.objective != 0):
            raise ValueError("feasibility problems carry a zero objective")
        if self.bounds is None:
            self.bounds = [(0.0, math.inf)] * self.num_vars
        if len(self.bounds) != self.num_vars:
            raise ValueError("bounds length does not match num_vars")

    def add_constraint(self, coeffs: Mapping[int, float] | Sequence[float], relation: str,
                       rhs: float) -> None:
        if relation not in RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        if isinstance(coeffs, Mapping):
            row = np.zeros(self.num_vars)
            for idx, c in coeffs.items():
                row[idx] += c
        else:
            row = np.asarray(coeffs, dtype=float)
            if row.shape != (self.num_vars,):
                raise ValueError("coefficient vector has the wrong length")
        if not np.all(np.isfinite(row)) or not math.isfinite(rhs):
            raise ValueError("constraint data must be finite")
        self.constraints.append(Constraint(row, relation, float(rhs)))

    def violation(self, x: np.ndarray) -> float:
        """Largest absolute violation of any row or bound at ``x``."""
        worst = 0.0
        for c in self.constraints:
            lhs = float(c.coeffs @ x)
            if c.relation == "<=":
                worst = max(worst, lhs - c.rhs)
            elif c.relation == ">=":
                worst = max(worst, c.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - c.rhs))
        for xi, (lo, hi) in zip(x, self.bounds):
            worst = max(worst, lo - xi, xi - hi)
        return worst


@dataclass
class LpSolution:
    status: str  # optimal | feasible | infeasible | unbounded
    point: np.ndarray | None = None
    objective_value: float = math.nan
    iterations: int = 0

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "feasible")


class _Standardized:
    """min c.s  s.t.  A s (rel) b,  s >= 0, with x = offset + M s."""

    def __init__(self, lp: LinearProgram):
        nv = lp.num_vars
        cols = []  # (var index, sign)
        offset = np.zeros(nv)
        extra_rows = []  # (column, upper) for s_col <= upper
        for j, (lo, hi) in enumerate(lp.bounds):
            if lo > hi:
                raise ValueError(f"variable {j} has empty bounds [{lo}, {hi}]")
            if math.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if math.isfinite(hi):
                    extra_rows.append((len(cols) - 1, hi - lo))
            elif math.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        M = np.zeros((nv, len(cols)))
        for c, (j, s) in enumerate(cols):
            M[j, c] = s
        self.M = M
        self.offset = offset
        rows, rels, rhs = [], [], []
        for con in lp.constraints:
            rows.append(con.coeffs @ M)
            rels.append(con.relation)
            rhs.append(con.rhs - float(con.coeffs @ offset))
        for c, ub in extra_rows:
            r = np.zeros(len(cols))
            r[c] = 1.0
            rows.append(r)
            rels.append("<=")
            rhs.append(ub)
        self.A = np.array(rows).reshape(len(rows), len(cols))
        self.rels = rels
        self.b = np.array(rhs, dtype=float)
        sign = {"maximize": -1.0, "minimize": 1.0, "feasibility": 0.0}[lp.direction]
        self.c = sign * (lp.objective @ M)
        self.obj_offset = float(lp.objective @ offset)

    def recover(self, s: np.ndarray) -> np.ndarray:
        return self.offset + self.M @ s


def solve(lp: LinearProgram, bland: bool = False) -> LpSolution:
    """Solve ``lp``; raises :class:`DegenerateLPError` rather than return a bad point."""
    std = _Standardized(lp)
    result = _two_phase(std, bland_from_start=bland)
    if result.status in ("optimal", "feasible"):
        x = std.recover(result.point)
        if lp.violation(x) > FEAS_TOL:
            if not bland:
                return solve(lp, bland=True)
            raise DegenerateLPError(
                f"simplex returned a point violating constraints by {lp.violation(x):.3g}")
        value = float(lp.objective @ x)
        status = "feasible" if lp.direction == "feasibility" else "optimal"
        return LpSolution(status, x, value, result.iterations)
    return result


def _two_phase(std: _Standardized, bland_from_start: bool = False) -> LpSolution:
    A, b, rels = std.A.copy(), std.b.copy(), list(std.rels)
    R, C = A.shape
    # Flip rows so every right-hand side is non-negative.
    for r in range(R):
        if b[r] < 0:
            A[r] *= -1
            b[r] *= -1
            rels[r] = {"<=": ">=", ">=": "<=", "=": "="}[rels[r]]
    n_slack = sum(1 for rel in rels if rel != "=")
    n_art = sum(1 for rel in rels if rel != "<=")
    width = C + n_slack + n_art
    T = np.zeros((R + 1, width + 1))
    T[:R, :C] = A
    T[:R, -1] = b
    basis = [-1] * R
    art_start = C + n_slack
    s_col, a_col = C, art_start
    for r, rel in enumerate(rels):
        if rel == "<=":
            T[r, s_col] = 1.0
            basis[r] = s_col
            s_col += 1
        elif rel == ">=":
            T[r, s_col] = -1.0
            s_col += 1
            T[r, a_col] = 1.0
            basis[r] = a_col
            a_col += 1
        else:
            T[r, a_col] = 1.0
            basis[r] = a_col
            a_col += 1

    iterations = 0
    if n_art:
        art_rows = [r for r in range(R) if basis[r] >= art_start]
        T[R, :] = -T[art_rows, :].sum(axis=0)
        T[R, art_start:width] = 0.0
        status, it = _iterate(T, basis, width, bland_from_start)
        iterations += it
        if status == "unbounded":  # cannot happen for a bounded-below phase-one objective
            raise DegenerateLPError("phase one reported unbounded")
        if -T[R, -1] > FEAS_TOL:
            return LpSolution("infeasible", iterations=iterations)
        # Drive zero-valued artificials out of the basis; drop redundant rows.
        keep = []
        for r in range(R):
            if basis[r] >= art_start:
                candidates = np.nonzero(np.abs(T[r, :art_start]) > PIVOT_TOL)[0]
                if candidates.size == 0:
                    continue
                _pivot(T, basis, r, int(candidates[np.argmax(np.abs(T[r, candidates]))]))
            keep.append(r)
        rows = keep + [R]
        T = np.column_stack([T[np.ix_(rows, range(art_start))], T[rows, -1]])
        basis = [basis[r] for r in keep]
        R = len(keep)
        width = art_start
    else:
        T = np.column_stack([T[:, :width], T[:, -1]])

    cost = np.zeros(width)
    cost[:C] = std.c
    if not np.any(cost):
        s = _basic_solution(T, basis, C)
        return LpSolution("feasible", s, 0.0, iterations)
    T[R, :width] = cost
    T[R, -1] = 0.0
    for r, j in enumerate(basis):
        if cost[j] != 0.0:
            T[R] -= cost[j] * T[r]
    status, it = _iterate(T, basis, width, bland_from_start)
    iterations += it
    if status == "unbounded":
        return LpSolution("unbounded", iterations=iterations)
    s = _basic_solution(T, basis, C)
    return LpSolution("optimal", s, float(std.c @ s), iterations)


def _basic_solution(T: np.ndarray, basis: list[int], C: int) -> np.ndarray:
    s = np.zeros(C)
    for r, j in enumerate(basis):
        if j < C:
            s[j] = max(T[r, -1], 0.0)
    return s


def _pivot(T: np.ndarray, basis: list[int], r: int, e: int) -> None:
    T[r] /= T[r, e]
    col = T[:, e].copy()
    col[r] = 0.0
    # The tableaus here are mostly zeros; only touch rows that change.
    rows = np.nonzero(col)[0]
    prow = T[r]
    nz = np.nonzero(prow)[0]
    if nz.size < 0.5 * prow.size:
        T[np.ix_(rows, nz)] -= np.outer(col[rows], prow[nz])
    else:
        T[rows] -= np.outer(col[rows], prow)
    basis[r] = e


def _iterate(T: np.ndarray, basis: list[int], width: int, bland: bool) -> tuple[str, int]:
    R = T.shape[0] - 1
    switch_at = 0 if bland else 3 * (R + width)
    max_iter = 50 * (R + width) + 1000
    for it in range(max_iter):
        d = T[R, :width]
        if it >= switch_at:
            improving = np.nonzero(d < -OPT_TOL)[0]
            if improving.size == 0:
                return "optimal", it
            e = int(improving[0])
        else:
            e = int(np.argmin(d))
            if d[e] >= -OPT_TOL:
                return "optimal", it
        col = T[:R, e]
        rows = np.nonzero(col > PIVOT_TOL)[0]
        if rows.size == 0:
            return "unbounded", it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        if it >= switch_at:
            r = int(min(ties, key=lambda q: basis[q]))
        else:
            r = int(ties[np.argmax(col[ties])])
        _pivot(T, basis, r, e)
    raise DegenerateLPError(f"simplex did not terminate within {max_iter} iterations")


def format_lp(lp: LinearProgram) -> str:
    """Plain-text dump, one row per line, for debugging."""
    names = lp.names or [f"x{j}" for j in range(lp.num_vars)]

    def expr(coeffs):
        terms = [f"{c:+g}*{names[j]}" for j, c in enumerate(coeffs) if c != 0]
        return " ".join(terms) if terms else "0"

    lines = [f"{lp.direction} {expr(lp.objective)}", "subject to"]
    for con in lp.constraints:
        lines.append(f"  {expr(con.coeffs)} {con.relation} {con.rhs:g}")
    lines.append("bounds")
    for name, (lo, hi) in zip(names, lp.bounds):
        lines.append(f"  {lo:g} <= {name} <= {hi:g}")
    return "\n".join(lines) + "\n"
