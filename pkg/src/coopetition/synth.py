"""Synthesis of manipulation policies by enumerating target profiles.

For every candidate target profile (i*, j*, k*) a linear program over the
manipulated matrices, the costs ``d2``/``d3`` and the learners' dominant
payoffs ``v2``/``v3`` is built and solved. Feasible points are reassembled
into complete strategies, re-verified by brute force, and the best one
across profiles is returned.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .linsolve import DegenerateLPError, LinearProgram, LpSolution, format_lp, solve
from .polymatrix import (
    CompleteStrategy,
    PolymatrixGame,
    dominance_gap,
    manipulation_cost,
    realized_utilities,
)

log = logging.getLogger(__name__)

POLICY_CLASSES = ("type1", "type2", "batch")
OBJECTIVES = ("feasibility", "min_cost", "max_margin", "min_inefficiency",
              "max_egalitarian", "custom")
CUSTOM_TERMS = ("d2", "d3", "v2", "v3")
DEFAULT_EPS = 0.1
VERIFY_TOL = 1e-9


# ---------------------------------------------------------------------------
# policies


@dataclass(frozen=True)
class ManipulatorPolicy:
    """A constant complete strategy, or two of them split at round ceil(T/2)."""

    first: CompleteStrategy
    second: CompleteStrategy | None = None

    @property
    def kind(self) -> str:
        return "constant" if self.second is None else "batch"

    @property
    def phases(self) -> tuple[CompleteStrategy, ...]:
        return (self.first,) if self.second is None else (self.first, self.second)

    @staticmethod
    def switch_round(T: int) -> int:
        """Last round (1-based) of the first batch phase."""
        return math.ceil(T / 2)

    def strategy_at(self, t: int, T: int) -> CompleteStrategy:
        if self.second is None or t <= self.switch_round(T):
            return self.first
        return self.second

    def check(self, base: PolymatrixGame) -> None:
        for cs in self.phases:
            cs.check(base)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "first": self.first.to_dict()}
        if self.second is not None:
            d["second"] = self.second.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ManipulatorPolicy":
        second = d.get("second")
        return cls(CompleteStrategy.from_dict(d["first"]),
                   CompleteStrategy.from_dict(second) if second else None)

    @classmethod
    def constant(cls, base: PolymatrixGame, action: int) -> "ManipulatorPolicy":
        """Play ``action`` forever without touching the matrices."""
        return cls(CompleteStrategy.unmodified(base, action))


# ---------------------------------------------------------------------------
# LP construction


class _Registry:
    def __init__(self):
        self.names: list[str] = []
        self.bounds: list[tuple[float, float]] = []
        self.index: dict[str, int] = {}

    def add(self, name: str, lo: float = -math.inf, hi: float = math.inf) -> int:
        self.index[name] = len(self.names)
        self.names.append(name)
        self.bounds.append((lo, hi))
        return self.index[name]

    def __getitem__(self, name: str) -> int:
        return self.index[name]


@dataclass
class TargetLP:
    """An LP plus the bookkeeping needed to rebuild matrices from its solution."""

    lp: LinearProgram
    game: PolymatrixGame
    triples: tuple[tuple[int, int, int], ...]
    prefixes: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]
    policy_class: str
    eps: float

    def var(self, name: str) -> int:
        return self.lp.names.index(name)

    def strategies(self, point: np.ndarray) -> list[CompleteStrategy]:
        names = {n: i for i, n in enumerate(self.lp.names)}
        out = []
        g = self.game
        for (i_star, _, _), pre, rows in zip(self.triples, self.prefixes, self.rows):
            A21 = g.A21.copy()
            A31 = g.A31.copy()
            for i in rows:
                for j in range(g.m):
                    A21[i, j] += point[names[f"{pre}dA21[{i},{j}]"]]
                for k in range(g.l):
                    A31[i, k] += point[names[f"{pre}dA31[{i},{k}]"]]
            out.append(CompleteStrategy(i_star, A21, A31))
        return out


def _add_phase(lp_rows: list, reg: _Registry, game: PolymatrixGame, triple, eps: float,
               pre: str, rows: tuple[int, ...], third_fixed: bool) -> None:
    """Cost, dominance and bookkeeping rows for one target profile.

    Manipulated entries enter as deviations ``dA = A - A0`` so the abs-value
    rows start out satisfied at zero, which keeps phase one of the simplex
    short. ``third_fixed`` selects the type-II form for player 3 (dominance
    only against player 2's target action, scalar ``v3``).
    """
    i_star, j_star, k_star = triple
    n, m, l = game.sizes
    d2 = reg.add(f"{pre}d2", 0.0)
    d3 = reg.add(f"{pre}d3", 0.0)
    for i in rows:
        for j in range(m):
            a = reg.add(f"{pre}dA21[{i},{j}]")
            lp_rows.append(({a: 1.0, d2: -1.0}, "<=", 0.0))
            lp_rows.append(({a: -1.0, d2: -1.0}, "<=", 0.0))
        for k in range(l):
            a = reg.add(f"{pre}dA31[{i},{k}]")
            lp_rows.append(({a: 1.0, d3: -1.0}, "<=", 0.0))
            lp_rows.append(({a: -1.0, d3: -1.0}, "<=", 0.0))
    # A21[i*, j] + A23[j, k] (= or <=) v2[k] (- eps off target)
    v2 = [reg.add(f"{pre}v2[{k}]") for k in range(l)]
    for k in range(l):
        for j in range(m):
            a = reg[f"{pre}dA21[{i_star},{j}]"]
            base = game.A21[i_star, j] + game.A23[j, k]
            rel, rhs = ("=", -base) if j == j_star else ("<=", -base - eps)
            lp_rows.append(({a: 1.0, v2[k]: -1.0}, rel, rhs))
    if third_fixed:
        v3 = reg.add(f"{pre}v3")
        for k in range(l):
            a = reg[f"{pre}dA31[{i_star},{k}]"]
            base = game.A31[i_star, k] + game.A32[j_star, k]
            rel, rhs = ("=", -base) if k == k_star else ("<=", -base - eps)
            lp_rows.append(({a: 1.0, v3: -1.0}, rel, rhs))
    else:
        v3s = [reg.add(f"{pre}v3[{j}]") for j in range(m)]
        for j in range(m):
            for k in range(l):
                a = reg[f"{pre}dA31[{i_star},{k}]"]
                base = game.A31[i_star, k] + game.A32[j, k]
                rel, rhs = ("=", -base) if k == k_star else ("<=", -base - eps)
                lp_rows.append(({a: 1.0, v3s[j]: -1.0}, rel, rhs))


def _target_names(pre: str, triple, third_fixed: bool) -> tuple[str, str]:
    _, j_star, k_star = triple
    return f"{pre}v2[{k_star}]", (f"{pre}v3" if third_fixed else f"{pre}v3[{j_star}]")


def revenue(game: PolymatrixGame, triple) -> float:
    """Player 1's payoff at a pure profile before manipulation cost."""
    i, j, k = triple
    return float(game.A12[i, j] + game.A13[i, k])


def _finish(reg: _Registry, lp_rows: list, objective: dict[int, float], direction: str) -> LinearProgram:
    obj = np.zeros(len(reg.names))
    for idx, c in objective.items():
        obj[idx] += c
    lp = LinearProgram(len(reg.names), direction, obj, bounds=list(reg.bounds), names=list(reg.names))
    for coeffs, rel, rhs in lp_rows:
        lp.add_constraint(coeffs, rel, float(rhs))
    return lp


def _check_triple(game: PolymatrixGame, triple) -> None:
    if len(triple) != 3 or not all(0 <= a < s for a, s in zip(triple, game.sizes)):
        raise ValueError(f"triple {tuple(triple)} out of range for sizes {game.sizes}")


def _custom_coeffs(custom: Mapping[str, float]) -> dict[str, float]:
    unknown = set(custom) - set(CUSTOM_TERMS)
    if unknown:
        raise ValueError(f"custom objective terms must be among {CUSTOM_TERMS}, got {sorted(unknown)}")
    out = {k: float(v) for k, v in custom.items()}
    if not all(math.isfinite(v) for v in out.values()):
        raise ValueError("custom objective must be finite")
    return out


def build_dominance_lp(game: PolymatrixGame, triple, eps: float = DEFAULT_EPS,
                       objective: str = "feasibility", policy_class: str = "type1",
                       row_restricted: bool = True, also_win: bool = False,
                       custom: Mapping[str, float] | None = None,
                       sense: str = "minimize") -> TargetLP:
    """LP for a dominance solvable policy targeting ``triple``."""
    _check_triple(game, triple)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if policy_class not in ("type1", "type2"):
        raise ValueError(f"not a dominance solvable class: {policy_class!r}")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    third_fixed = policy_class == "type2"
    rows = (triple[0],) if row_restricted else tuple(range(game.n))
    reg = _Registry()
    lp_rows: list = []
    _add_phase(lp_rows, reg, game, triple, eps, "", rows, third_fixed)
    d2, d3 = reg["d2"], reg["d3"]
    n2, n3 = _target_names("", triple, third_fixed)
    v2, v3 = reg[n2], reg[n3]
    r1 = revenue(game, triple)

    win = objective != "max_egalitarian" or also_win
    if win:
        lp_rows.append(({v2: 1.0, d2: 1.0, d3: 1.0}, "<=", r1))
        lp_rows.append(({v3: 1.0, d2: 1.0, d3: 1.0}, "<=", r1))

    direction, obj = "feasibility", {}
    if objective in ("min_cost", "min_inefficiency"):
        direction, obj = "minimize", {d2: 1.0, d3: 1.0}
    elif objective == "max_margin":
        v0 = reg.add("v0", 0.0)
        lp_rows.append(({v0: 1.0, d2: 1.0, d3: 1.0, v2: 1.0}, "<=", r1))
        lp_rows.append(({v0: 1.0, d2: 1.0, d3: 1.0, v3: 1.0}, "<=", r1))
        direction, obj = "maximize", {v0: 1.0}
    elif objective == "max_egalitarian":
        v0 = reg.add("v0")
        lp_rows.append(({v0: 1.0, d2: 1.0, d3: 1.0}, "<=", r1))
        lp_rows.append(({v0: 1.0, v2: -1.0}, "<=", 0.0))
        lp_rows.append(({v0: 1.0, v3: -1.0}, "<=", 0.0))
        direction, obj = "maximize", {v0: 1.0}
    elif objective == "custom":
        coeffs = _custom_coeffs(custom or {})
        lookup = {"d2": d2, "d3": d3, "v2": v2, "v3": v3}
        direction = sense
        obj = {lookup[k]: c for k, c in coeffs.items()}
    lp = _finish(reg, lp_rows, obj, direction)
    return TargetLP(lp, game, (tuple(triple),), ("",), (rows,), policy_class, eps)


def build_type1_lp(game, triple, eps=DEFAULT_EPS, objective="feasibility", **kw) -> TargetLP:
    return build_dominance_lp(game, triple, eps, objective, "type1", **kw)


def build_type2_lp(game, triple, eps=DEFAULT_EPS, objective="feasibility", **kw) -> TargetLP:
    return build_dominance_lp(game, triple, eps, objective, "type2", **kw)


def build_batch_lp(game: PolymatrixGame, triple1, triple2, eps: float = DEFAULT_EPS,
                   objective: str = "feasibility", row_restricted: bool = True,
                   custom: Mapping[str, float] | None = None,
                   sense: str = "minimize") -> TargetLP:
    """LP for a two-phase policy: each phase type-I dominance solvable, and the
    summed single-shot payoff of player 1 beats each learner's sum by ``eps``."""
    _check_triple(game, triple1)
    _check_triple(game, triple2)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if objective not in ("feasibility", "min_cost", "max_margin", "custom"):
        raise ValueError(f"objective {objective!r} is not supported for batch policies")
    reg = _Registry()
    lp_rows: list = []
    rows = []
    for pre, t in (("h_", triple1), ("t_", triple2)):
        r = (t[0],) if row_restricted else tuple(range(game.n))
        rows.append(r)
        _add_phase(lp_rows, reg, game, t, eps, pre, r, third_fixed=False)
    ds = [reg[f"{p}d{q}"] for p in ("h_", "t_") for q in (2, 3)]
    names = [_target_names(p, t, False) for p, t in (("h_", triple1), ("t_", triple2))]
    v2s = [reg[a] for a, _ in names]
    v3s = [reg[b] for _, b in names]
    total = revenue(game, triple1) + revenue(game, triple2)
    for vs in (v2s, v3s):
        coeffs = {d: 1.0 for d in ds}
        for v in vs:
            coeffs[v] = coeffs.get(v, 0.0) + 1.0
        lp_rows.append((coeffs, "<=", total - eps))

    direction, obj = "feasibility", {}
    if objective == "min_cost":
        direction, obj = "minimize", {d: 1.0 for d in ds}
    elif objective == "max_margin":
        v0 = reg.add("v0", 0.0)
        for vs in (v2s, v3s):
            coeffs = {d: 1.0 for d in ds}
            coeffs[v0] = 2.0
            for v in vs:
                coeffs[v] = coeffs.get(v, 0.0) + 1.0
            lp_rows.append((coeffs, "<=", total))
        direction, obj = "maximize", {v0: 1.0}
    elif objective == "custom":
        coeffs = _custom_coeffs(custom or {})
        direction = sense
        lookup = {"d2": [ds[0], ds[2]], "d3": [ds[1], ds[3]], "v2": v2s, "v3": v3s}
        for key, c in coeffs.items():
            for idx in lookup[key]:
                obj[idx] = obj.get(idx, 0.0) + c
    lp = _finish(reg, lp_rows, obj, direction)
    return TargetLP(lp, game, (tuple(triple1), tuple(triple2)), ("h_", "t_"), tuple(rows),
                    "batch", eps)


# ---------------------------------------------------------------------------
# verification


@dataclass
class Check:
    name: str
    achieved: float
    required: float
    satisfied: bool
    enforced: bool = True

    def to_dict(self) -> dict:
        return {"name": self.name, "achieved": _json_float(self.achieved),
                "required": self.required, "satisfied": self.satisfied,
                "enforced": self.enforced}


@dataclass
class VerificationReport:
    checks: list[Check]
    tol: float = VERIFY_TOL

    @property
    def violations(self) -> list[Check]:
        return [c for c in self.checks if c.enforced and not c.satisfied]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ok": self.ok, "tol": self.tol, "checks": [c.to_dict() for c in self.checks]}

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            tag = "ok  " if c.satisfied else ("FAIL" if c.enforced else "info")
            lines.append(f"[{tag}] {c.name}: {c.achieved:.6g} (need >= {c.required:g})")
        return "\n".join(lines)


def _json_float(x: float):
    return x if math.isfinite(x) else str(x)


def verify_policy(game: PolymatrixGame, policy: ManipulatorPolicy, triples, policy_class: str,
                  eps: float, require_win: bool = True, tol: float = VERIFY_TOL) -> VerificationReport:
    """Re-derive the dominance and winning conditions by enumeration.

    ``tol`` absorbs floating-point round-off in matrices produced by the LP
    solver; it is reported alongside the checks.
    """
    checks: list[Check] = []

    def add(name, achieved, required, enforced=True):
        checks.append(Check(name, achieved, required, achieved >= required - tol, enforced))

    utils = []
    for phase, (cs, triple) in enumerate(zip(policy.phases, triples)):
        tag = "" if len(triples) == 1 else f"phase{phase + 1} "
        i_star, j_star, k_star = triple
        if cs.action != i_star:
            checks.append(Check(f"{tag}manipulator action is i*", cs.action, i_star, False))
        eff = cs.in_effect(game)
        add(f"{tag}player 2 target {j_star} dominant vs all player-3 actions",
            dominance_gap(eff, i_star, j_star, 2), eps)
        if policy_class == "type2":
            add(f"{tag}player 3 target {k_star} dominant vs player-2 action {j_star}",
                dominance_gap(eff, i_star, k_star, 3, against=j_star), eps)
        else:
            add(f"{tag}player 3 target {k_star} dominant vs all player-2 actions",
                dominance_gap(eff, i_star, k_star, 3), eps)
        utils.append(realized_utilities(eff, triple, cs.cost(game)))

    if policy.kind == "constant":
        u1, u2, u3 = utils[0]
        add("winning: u1 - u2 at target", u1 - u2, 0.0, require_win)
        add("winning: u1 - u3 at target", u1 - u3, 0.0, require_win)
    else:
        s = np.sum(utils, axis=0)
        add("batch winning: summed u1 - summed u2", s[0] - s[1], eps, require_win)
        add("batch winning: summed u1 - summed u3", s[0] - s[2], eps, require_win)
    return VerificationReport(checks, tol)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class PolicyCertificate:
    policy: ManipulatorPolicy
    policy_class: str
    triples: tuple[tuple[int, int, int], ...]
    eps: float
    objective: str = "feasibility"
    cost: float = 0.0
    utilities: tuple[tuple[float, float, float], ...] = ()
    objective_value: float | None = None
    require_win: bool = True
    extras: dict = field(default_factory=dict)
    report: VerificationReport | None = None

    @property
    def margin(self) -> float:
        """Single-shot (constant) or per-round-average (batch) winning margin."""
        s = np.mean(self.utilities, axis=0)
        return float(min(s[0] - s[1], s[0] - s[2]))

    @property
    def welfare(self) -> float:
        return float(min(np.mean(self.utilities, axis=0)))

    def to_dict(self) -> dict:
        return {
            "policy_class": self.policy_class,
            "objective": self.objective,
            "eps": self.eps,
            "triples": [list(map(int, t)) for t in self.triples],
            "policy": self.policy.to_dict(),
            "cost": self.cost,
            "utilities": [list(u) for u in self.utilities],
            "margin": self.margin,
            "objective_value": self.objective_value,
            "require_win": self.require_win,
            "extras": {k: _json_float(v) if isinstance(v, float) else v
                       for k, v in self.extras.items()},
            "verification": self.report.to_dict() if self.report else None,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "PolicyCertificate":
        return cls(
            policy=ManipulatorPolicy.from_dict(d["policy"]),
            policy_class=d["policy_class"],
            triples=tuple(tuple(int(a) for a in t) for t in d["triples"]),
            eps=float(d["eps"]),
            objective=d.get("objective", "feasibility"),
            cost=float(d.get("cost", 0.0)),
            utilities=tuple(tuple(u) for u in d.get("utilities", ())),
            objective_value=d.get("objective_value"),
            require_win=d.get("require_win", True),
            extras=dict(d.get("extras", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "PolicyCertificate":
        return cls.from_dict(json.loads(text))


def make_certificate(game: PolymatrixGame, policy: ManipulatorPolicy, triples, policy_class: str,
                     eps: float, objective: str = "feasibility",
                     objective_value: float | None = None, require_win: bool = True,
                     extras: dict | None = None) -> PolicyCertificate:
    policy.check(game)
    triples = tuple(tuple(int(a) for a in t) for t in triples)
    utilities = tuple(realized_utilities(cs.in_effect(game), t, cs.cost(game))
                      for cs, t in zip(policy.phases, triples))
    cost = float(np.mean([cs.cost(game) for cs in policy.phases]))
    cert = PolicyCertificate(policy, policy_class, triples, eps, objective, cost, utilities,
                             objective_value, require_win, dict(extras or {}))
    cert.report = verify_certificate(game, cert)
    return cert


def verify_certificate(game: PolymatrixGame, cert: PolicyCertificate,
                       tol: float = VERIFY_TOL) -> VerificationReport:
    report = verify_policy(game, cert.policy, cert.triples, cert.policy_class, cert.eps,
                           cert.require_win, tol)
    for idx, (cs, t, u) in enumerate(zip(cert.policy.phases, cert.triples, cert.utilities)):
        actual = realized_utilities(cs.in_effect(game), t, cs.cost(game))
        err = max(abs(a - b) for a, b in zip(actual, u))
        report.checks.append(Check(f"stated utilities of phase {idx + 1} match matrices",
                                   -err, 0.0, err <= tol))
    return report


# ---------------------------------------------------------------------------
# search


@dataclass
class SynthesisRequest:
    game: PolymatrixGame
    policy_class: str = "type1"
    objective: str = "feasibility"
    eps: float = DEFAULT_EPS
    row_restricted: bool = True
    custom: Mapping[str, float] | None = None
    sense: str = "minimize"
    also_win: bool = False

    def __post_init__(self):
        if self.policy_class not in POLICY_CLASSES:
            raise ValueError(f"unknown policy class {self.policy_class!r}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.objective == "custom":
            _custom_coeffs(self.custom or {})
            if self.sense not in ("minimize", "maximize"):
                raise ValueError("sense must be minimize or maximize")


@dataclass
class SynthesisResult:
    certificate: PolicyCertificate | None
    lps_solved: int
    feasible: list[tuple] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def inefficiency_ratios(game: PolymatrixGame, triple, cost: float) -> tuple[float, float]:
    """(cost over revenue above the worst-case revenue K, cost over revenue)."""
    rev = revenue(game, triple)
    K = float(np.min(game.A12[:, :, None] + game.A13[:, None, :]))

    def ratio(num, den):
        if num == 0:
            return 0.0
        return num / den if den > 0 else math.inf

    return ratio(cost, rev - K), ratio(cost, rev)


def _score(objective: str, sol: LpSolution, cert: PolicyCertificate, sense: str) -> float:
    """Larger is better."""
    if objective == "feasibility":
        return 0.0
    if objective == "min_cost":
        return -sol.objective_value
    if objective == "min_inefficiency":
        return -cert.extras["inefficiency_ratio"]
    if objective == "custom":
        return sol.objective_value if sense == "maximize" else -sol.objective_value
    return sol.objective_value


def candidate_targets(game: PolymatrixGame, policy_class: str) -> Iterable[tuple]:
    triples = list(itertools.product(range(game.n), range(game.m), range(game.l)))
    if policy_class == "batch":
        return itertools.product(triples, triples)
    return ((t,) for t in triples)


def synthesize_all(request: SynthesisRequest, dump_dir: str | None = None) -> SynthesisResult:
    """Solve every target LP and keep the best certified policy.

    Profiles are visited in lexicographic order and a later profile replaces
    the incumbent only when strictly better, so ties resolve to the smallest.
    """
    game = request.game
    best: tuple[float, PolicyCertificate] | None = None
    result = SynthesisResult(None, 0)
    for targets in candidate_targets(game, request.policy_class):
        result.lps_solved += 1
        outcome = _solve_targets(request, targets, dump_dir)
        if isinstance(outcome, str):
            log.warning(outcome)
            result.warnings.append(outcome)
            continue
        if outcome is None:
            continue
        score, cert = outcome
        result.feasible.append(targets)
        if best is None or score > best[0] + 1e-9:
            best = (score, cert)
            if request.objective == "feasibility":
                break
    result.certificate = best[1] if best else None
    return result


def _build(request: SynthesisRequest, targets) -> TargetLP:
    if request.policy_class == "batch":
        return build_batch_lp(request.game, targets[0], targets[1], request.eps, request.objective,
                              request.row_restricted, request.custom, request.sense)
    return build_dominance_lp(request.game, targets[0], request.eps, request.objective,
                              request.policy_class, request.row_restricted,
                              request.also_win, request.custom, request.sense)


def _solve_targets(request: SynthesisRequest, targets, dump_dir: str | None = None):
    """(score, certificate), None when infeasible, or a warning string."""
    tlp = _build(request, targets)
    if dump_dir is not None:
        _dump(dump_dir, targets, tlp.lp)
    try:
        sol = solve(tlp.lp)
    except DegenerateLPError as exc:
        return f"targets {targets}: {exc}"
    if not sol.ok:
        return None
    cert = _certificate_from_solution(request, tlp, sol)
    if not cert.report.ok:
        return f"targets {targets}: LP point failed re-verification"
    return _score(request.objective, sol, cert, request.sense), cert


def optimize_target(request: SynthesisRequest, *triples) -> PolicyCertificate | None:
    """Solve the LP for one fixed target (two triples for batch policies)."""
    expected = 2 if request.policy_class == "batch" else 1
    if len(triples) != expected:
        raise ValueError(f"{request.policy_class} policies need {expected} target triple(s)")
    outcome = _solve_targets(request, tuple(tuple(t) for t in triples))
    if isinstance(outcome, str):
        raise DegenerateLPError(outcome)
    return None if outcome is None else outcome[1]


def _certificate_from_solution(request: SynthesisRequest, tlp: TargetLP,
                               sol: LpSolution) -> PolicyCertificate:
    phases = tlp.strategies(sol.point)
    policy = ManipulatorPolicy(*phases)
    names = tlp.lp.names
    extras = {"lp_" + k: float(sol.point[names.index(k)])
              for k in ("d2", "d3", "h_d2", "h_d3", "t_d2", "t_d3") if k in names}
    value = sol.objective_value if request.objective != "feasibility" else None
    cert = make_certificate(request.game, policy, tlp.triples, tlp.policy_class, request.eps,
                            request.objective, value,
                            require_win=request.objective != "max_egalitarian" or request.also_win,
                            extras=extras)
    if policy.kind == "constant":
        ratio_def, ratio_rev = inefficiency_ratios(request.game, tlp.triples[0], cert.cost)
        cert.extras["inefficiency_ratio"] = ratio_def
        cert.extras["cost_over_revenue"] = ratio_rev
    return cert


def _dump(dump_dir: str, targets, lp: LinearProgram) -> None:
    import os

    os.makedirs(dump_dir, exist_ok=True)
    tag = "_".join("-".join(map(str, t)) for t in targets)
    with open(os.path.join(dump_dir, f"lp_{tag}.txt"), "w") as fh:
        fh.write(format_lp(lp))


def synthesize(request: SynthesisRequest) -> PolicyCertificate | None:
    return synthesize_all(request).certificate


def synthesize_max_margin(game: PolymatrixGame, policy_class: str = "type1",
                          eps: float = DEFAULT_EPS, **kw) -> PolicyCertificate | None:
    return synthesize(SynthesisRequest(game, policy_class, "max_margin", eps, **kw))


def synthesize_min_inefficiency(game: PolymatrixGame, eps: float = DEFAULT_EPS,
                                policy_class: str = "type1", **kw) -> PolicyCertificate | None:
    return synthesize(SynthesisRequest(game, policy_class, "min_inefficiency", eps, **kw))


def synthesize_max_egalitarian(game: PolymatrixGame, eps: float = DEFAULT_EPS,
                               policy_class: str = "type1", also_win: bool = False,
                               **kw) -> PolicyCertificate | None:
    return synthesize(SynthesisRequest(game, policy_class, "max_egalitarian", eps,
                                       also_win=also_win, **kw))


def synthesize_min_cost(game: PolymatrixGame, policy_class: str = "type1",
                        eps: float = DEFAULT_EPS, **kw) -> PolicyCertificate | None:
    return synthesize(SynthesisRequest(game, policy_class, "min_cost", eps, **kw))
