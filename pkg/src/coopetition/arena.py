"""Repeated play of a manipulator policy against two learning agents."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .agents import Agent, AgentSpec, make_agent
from .polymatrix import PolymatrixGame
from .synth import ManipulatorPolicy

MODES = ("sampled", "expected")
FEEDBACK = ("mixed", "realized")


class NotAWin(ValueError):
    """Margin requested for a game player 1 did not strictly win."""


def payoff_range(game: PolymatrixGame, player: int) -> tuple[float, float]:
    """Smallest and largest single-shot payoff of a learner over all profiles."""
    if player == 2:
        u = game.A21[:, :, None] + game.A23[None, :, :]
    elif player == 3:
        u = game.A31[:, None, :] + game.A32[None, :, :]
    else:
        raise ValueError("only players 2 and 3 learn")
    return float(u.min()), float(u.max())


@dataclass
class GameTrace:
    """Per-round record of one game. ``actions`` is -1 in expected mode."""

    mode: str
    utilities: np.ndarray  # T x 3
    costs: np.ndarray  # T
    actions: np.ndarray  # T x 3
    phase: np.ndarray  # T, index into policy.phases
    y: np.ndarray  # T x m
    z: np.ndarray  # T x l
    seed: int | None = None

    @property
    def T(self) -> int:
        return len(self.costs)

    @property
    def totals(self) -> tuple[float, float, float]:
        """Time-averaged utilities (U1, U2, U3)."""
        return tuple(float(u) for u in self.utilities.mean(axis=0))

    @property
    def won(self) -> bool:
        U1, U2, U3 = self.totals
        return U1 > U2 and U1 > U3

    def to_csv(self, fh=None) -> str | None:
        out = fh if fh is not None else io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["round", "u1", "u2", "u3", "cost", "a1", "a2", "a3"])
        for t in range(self.T):
            w.writerow([t + 1, *(repr(float(u)) for u in self.utilities[t]),
                        repr(float(self.costs[t])), *(int(a) for a in self.actions[t])])
        return None if fh is not None else out.getvalue()


def margin(trace: GameTrace) -> float:
    """min(U1 - U2, U1 - U3); only defined when player 1 strictly wins."""
    U1, U2, U3 = trace.totals
    if not (U1 > U2 and U1 > U3):
        raise NotAWin(f"player 1 did not win: U = ({U1:.6g}, {U2:.6g}, {U3:.6g})")
    return min(U1 - U2, U1 - U3)


def _as_agent(a) -> Agent:
    if isinstance(a, Agent):
        return a
    return make_agent(a)


def _draw(rng: np.random.Generator, p: np.ndarray) -> int:
    """Inverse-CDF draw; a plain loop is faster than numpy for a dozen actions."""
    r = rng.random()
    acc = 0.0
    probs = p.tolist()
    for a, q in enumerate(probs):
        acc += q
        if r < acc:
            return a
    return max(a for a, q in enumerate(probs) if q > 0)


def run_game(game: PolymatrixGame, policy: ManipulatorPolicy, agent2, agent3, T: int,
             seed: int | None = 0, mode: str = "sampled", feedback: str = "mixed") -> GameTrace:
    """Play ``T`` rounds. Agents may be :class:`Agent` instances (they are
    reset) or specs such as ``"mwu:0.3"``.

    Agents always learn from counterfactual vectors. With ``feedback="mixed"``
    the vectors are taken against the opponents' mixed strategies; with
    ``"realized"`` against the sampled actions (sampled mode only).
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if feedback not in FEEDBACK:
        raise ValueError(f"feedback must be one of {FEEDBACK}")
    policy.check(game)
    effs = [cs.in_effect(game) for cs in policy.phases]
    costs = [cs.cost(game) for cs in policy.phases]
    ranges = []
    for player in (2, 3):
        lo_hi = [payoff_range(g, player) for g in effs]
        ranges.append((min(r[0] for r in lo_hi), max(r[1] for r in lo_hi)))
    p2, p3 = _as_agent(agent2), _as_agent(agent3)
    for spec, agent in ((agent2, p2), (agent3, p3)):
        # Regret bookkeeping is only kept for agents the caller can inspect.
        agent.record_regret = isinstance(spec, Agent)
    p2.reset(game.m, ranges[0], T)
    p3.reset(game.l, ranges[1], T)
    rng = np.random.default_rng(seed)

    n, m, l = game.sizes
    # Per-phase constants with player 1 fixed on a1: rows of her payoffs,
    # the learners' slices, and python lists for cheap scalar lookups.
    consts = []
    for cs, g, cost in zip(policy.phases, effs, costs):
        a1 = cs.action
        consts.append((a1, cost, g.A12[a1], g.A13[a1], g.A21[a1], g.A23, g.A31[a1], g.A32,
                       g.A12[a1].tolist(), g.A13[a1].tolist(), g.A21[a1].tolist(),
                       g.A23.tolist(), g.A31[a1].tolist(), g.A32.tolist()))
    utilities = np.zeros((T, 3))
    cost_arr = np.zeros(T)
    actions = np.full((T, 3), -1, dtype=int)
    phase = np.zeros(T, dtype=int)
    ys = np.zeros((T, m))
    zs = np.zeros((T, l))
    switch = policy.switch_round(T) if policy.second is not None else T
    for t in range(T):
        ph = 0 if t + 1 <= switch else 1
        (a1, cost, r12, r13, r21, A23, r31, A32,
         l12, l13, l21, l23, l31, l32) = consts[ph]
        y, z = p2.act(), p3.act()
        if mode == "sampled":
            a2, a3 = _draw(rng, y), _draw(rng, z)
            actions[t] = (a1, a2, a3)
            utilities[t] = (l12[a2] + l13[a3] - cost,
                            l21[a2] + l23[a2][a3],
                            l31[a3] + l32[a2][a3])
        else:
            utilities[t] = (r12 @ y + r13 @ z - cost,
                            r21 @ y + y @ A23 @ z,
                            r31 @ z + y @ A32 @ z)
        # Counterfactual vectors with player 1 on a1.
        if feedback == "realized" and mode == "sampled":
            v2 = r21 + A23[:, a3]
            v3 = r31 + A32[a2]
        else:
            v2 = r21 + A23 @ z
            v3 = r31 + y @ A32
        p2.update(v2)
        p3.update(v3)
        cost_arr[t] = cost
        phase[t] = ph
        ys[t], zs[t] = y, z
    return GameTrace(mode, utilities, cost_arr, actions, phase, ys, zs, seed)


@dataclass(frozen=True)
class ExperimentConfig:
    game: PolymatrixGame
    policy: ManipulatorPolicy
    agent2: AgentSpec
    agent3: AgentSpec
    T: int = 100
    mode: str = "sampled"
    feedback: str = "mixed"
    label: str = ""

    def __post_init__(self):
        for name in ("agent2", "agent3"):
            val = getattr(self, name)
            if isinstance(val, str):
                object.__setattr__(self, name, AgentSpec.parse(val))


@dataclass
class ExperimentStats:
    N: int
    wins: int
    margins: list[float]
    seeds: list[int]
    totals: np.ndarray  # N x 3
    label: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def win_rate(self) -> float:
        return self.wins / self.N if self.N else 0.0

    @property
    def mean_margin(self) -> float:
        """Average margin over won games; 0 when nothing was won."""
        return float(np.mean(self.margins)) if self.margins else 0.0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "N": self.N,
            "wins": self.wins,
            "win_rate": self.win_rate,
            "mean_margin": self.mean_margin,
            "mean_utilities": self.totals.mean(axis=0).tolist() if self.N else [],
            "seeds": list(self.seeds),
            "extras": self.extras,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def run_experiment(config: ExperimentConfig, N: int, base_seed: int = 0,
                   threads: int = 1) -> ExperimentStats:
    """``N`` independent games seeded ``base_seed + i``; aggregation is by run index."""
    if N < 1:
        raise ValueError("N must be at least 1")
    seeds = [base_seed + i for i in range(N)]

    def one(seed):
        tr = run_game(config.game, config.policy, config.agent2.build(), config.agent3.build(),
                      config.T, seed, config.mode, config.feedback)
        return tr.totals

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            totals = list(pool.map(one, seeds))
    else:
        totals = [one(s) for s in seeds]
    totals = np.array(totals)
    margins = [float(min(u[0] - u[1], u[0] - u[2])) for u in totals
               if u[0] > u[1] and u[0] > u[2]]
    return ExperimentStats(N, len(margins), margins, seeds, totals, config.label)


def best_constant_baseline(game: PolymatrixGame, agent2, agent3, T: int = 100, N: int = 200,
                           base_seed: int = 0, mode: str = "sampled",
                           threads: int = 1) -> ExperimentStats:
    """Best pure manipulator action with unmodified matrices.

    Ranked by win rate, then mean margin; ties go to the lowest action.
    """
    best = None
    for a in range(game.n):
        cfg = ExperimentConfig(game, ManipulatorPolicy.constant(game, a), agent2, agent3, T, mode,
                               label=f"constant action {a}")
        stats = run_experiment(cfg, N, base_seed, threads)
        stats.extras["action"] = a
        if best is None or (stats.win_rate, stats.mean_margin) > (best.win_rate, best.mean_margin):
            best = stats
    return best
