"""Online learners for players 2 and 3.

Every agent sees full-information feedback: after each round it receives the
expected payoff of each of its pure actions against the other players'
mixed strategies. Payoffs are mapped affinely into [-1, 1] using the range
supplied at :meth:`Agent.reset`; without a range they are used as given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

KINDS = ("mwu", "ftrl", "lmwu", "ftl", "constant")
REGULARIZERS = ("entropic", "euclidean")
LMWU_DEFAULT_ETA = 0.01

# Rates used to reproduce the experiment tables. "Fast" MWU/FTRL settle on a
# strictly dominant action within a couple of rounds; the "slow" LMWU rate is
# tuned so the learners are still mixing noticeably after 100 rounds.
FAST_ETA = 20.0
SLOW_LMWU_ETA = 0.12


def default_eta(kind: str, num_actions: int, horizon: int | None) -> float:
    """sqrt(8 ln m / T) for MWU/FTRL, a fixed small rate for LMWU."""
    if kind == "lmwu":
        return LMWU_DEFAULT_ETA
    if horizon is None or horizon < 1:
        raise ValueError("the default MWU/FTRL rate needs the horizon T")
    return math.sqrt(8 * math.log(num_actions) / horizon)


@dataclass
class RegretLedger:
    """Per-round expected payoff of the agent and its counterfactual vectors."""

    realized: list[float] = field(default_factory=list)
    counterfactual: list[np.ndarray] = field(default_factory=list)

    def record(self, strategy: np.ndarray, payoffs: np.ndarray) -> None:
        self.realized.append(float(strategy @ payoffs))
        self.counterfactual.append(np.array(payoffs, dtype=float))

    @property
    def rounds(self) -> int:
        return len(self.realized)

    def best_fixed_payoff(self, T: int | None = None) -> float:
        T = self.rounds if T is None else T
        if T == 0:
            return 0.0
        return float(np.max(np.sum(self.counterfactual[:T], axis=0)))

    def regret(self, T: int | None = None) -> float:
        T = self.rounds if T is None else T
        return self.best_fixed_payoff(T) - float(np.sum(self.realized[:T]))


def average_regret(ledger: RegretLedger, T: int | None = None) -> float:
    T = ledger.rounds if T is None else T
    if not 0 < T <= ledger.rounds:
        raise ValueError(f"T must be in 1..{ledger.rounds}")
    return ledger.regret(T) / T


class Agent:
    kind = "base"

    def __init__(self, eta: float | None = None):
        if eta is not None and not (math.isfinite(eta) and eta >= 0):
            raise ValueError("learning rate must be a non-negative finite number")
        self.eta_arg = eta
        self.eta = eta
        self.num_actions = 0
        self.rounds = 0
        self.cumulative = np.zeros(0)
        self.ledger = RegretLedger()
        self.record_regret = True
        self._lo, self._span = -1.0, 2.0

    def reset(self, num_actions: int, payoff_range: tuple[float, float] | None = None,
              horizon: int | None = None) -> "Agent":
        if num_actions < 1:
            raise ValueError("need at least one action")
        self.num_actions = num_actions
        self.rounds = 0
        self.cumulative = np.zeros(num_actions)
        self.ledger = RegretLedger()
        if payoff_range is None:
            self._lo, self._span = -1.0, 2.0
        else:
            lo, hi = map(float, payoff_range)
            if hi < lo:
                raise ValueError("payoff range must satisfy lo <= hi")
            self._lo, self._span = lo, hi - lo
        self._init(horizon)
        return self

    def _init(self, horizon: int | None) -> None:
        pass

    def scale(self, payoffs: np.ndarray) -> np.ndarray:
        if self._span == 0:
            return np.zeros_like(payoffs)
        return (payoffs - self._lo) * (2.0 / self._span) - 1.0

    def act(self) -> np.ndarray:
        raise NotImplementedError

    def update(self, payoffs) -> None:
        v = np.asarray(payoffs, dtype=float)
        if v.shape != (self.num_actions,):
            raise ValueError(f"payoff vector has shape {v.shape}, expected ({self.num_actions},)")
        if not math.isfinite(v.sum()):
            raise ValueError("payoff vector must be finite")
        if self.record_regret:
            self.ledger.record(self.act(), v)
        g = self.scale(v)
        self._learn(g)
        self.cumulative += g
        self.rounds += 1

    def _learn(self, g: np.ndarray) -> None:
        pass

    def __repr__(self):
        return f"{type(self).__name__}(eta={self.eta})"


class MWU(Agent):
    """Exponential weights: w <- w * exp(eta * g), renormalized each round."""

    kind = "mwu"

    def _init(self, horizon):
        if self.eta_arg is None:
            self.eta = default_eta("mwu", self.num_actions, horizon)
        self.weights = np.full(self.num_actions, 1.0 / self.num_actions)

    def act(self):
        return self.weights.copy()

    def _learn(self, g):
        w = self.weights * np.exp(self.eta * g)
        total = w.sum()
        if not 0 < total < math.inf:
            # Overflow or underflow: shift so the largest factor is 1.
            w = self.weights * np.exp(self.eta * (g - g.max()))
            total = w.sum()
        self.weights = w / total


class LMWU(Agent):
    """Linear multiplicative weights: w <- w * (1 + eta * g), g in [-1, 1]."""

    kind = "lmwu"

    def _init(self, horizon):
        if self.eta_arg is None:
            self.eta = default_eta("lmwu", self.num_actions, horizon)
        if self.eta >= 1:
            raise ValueError("LMWU needs eta < 1 to keep weights positive")
        self.weights = np.full(self.num_actions, 1.0 / self.num_actions)

    def act(self):
        return self.weights.copy()

    def _learn(self, g):
        if g.max() > 1 + 1e-12 or g.min() < -1 - 1e-12:
            raise ValueError("LMWU payoffs must lie in [-1, 1] after scaling")
        w = self.weights * (1.0 + self.eta * g)
        self.weights = w / w.sum()


def _project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


class FTRL(Agent):
    """Follow the regularized leader on cumulative payoffs.

    The entropic regularizer gives softmax(eta * cumulative), the same
    strategies as :class:`MWU`; the euclidean one projects onto the simplex.
    """

    kind = "ftrl"

    def __init__(self, eta: float | None = None, regularizer: str = "entropic"):
        super().__init__(eta)
        if regularizer not in REGULARIZERS:
            raise ValueError(f"unknown regularizer {regularizer!r}")
        self.regularizer = regularizer

    def _init(self, horizon):
        if self.eta_arg is None:
            self.eta = default_eta("ftrl", self.num_actions, horizon)

    def act(self):
        s = self.eta * self.cumulative
        if self.regularizer == "euclidean":
            return _project_simplex(s + 1.0 / self.num_actions)
        e = np.exp(s - s.max())
        return e / e.sum()


class FTL(Agent):
    """Best response to cumulative payoffs; ties go to the lowest index."""

    kind = "ftl"

    def act(self):
        p = np.zeros(self.num_actions)
        p[int(np.argmax(self.cumulative))] = 1.0
        return p


class Constant(Agent):
    kind = "constant"

    def __init__(self, action: int = 0):
        super().__init__(None)
        if action < 0:
            raise ValueError("action must be non-negative")
        self.action = action

    def _init(self, horizon):
        if self.action >= self.num_actions:
            raise ValueError(f"action {self.action} out of range for {self.num_actions} actions")

    def act(self):
        p = np.zeros(self.num_actions)
        p[self.action] = 1.0
        return p

    def __repr__(self):
        return f"Constant({self.action})"


@dataclass(frozen=True)
class AgentSpec:
    """Serializable agent description, e.g. ``mwu:0.3`` or ``constant:1``.

    The optional third field of an FTRL spec picks the regularizer
    (``ftrl:0.3:euclidean``).
    """

    kind: str
    eta: float | None = None
    action: int = 0
    regularizer: str = "entropic"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}; choose from {KINDS}")

    @classmethod
    def parse(cls, text: str) -> "AgentSpec":
        parts = text.strip().lower().split(":")
        kind = {"const": "constant", "mw": "mwu"}.get(parts[0], parts[0])
        try:
            if kind == "constant":
                return cls(kind, action=int(parts[1]) if len(parts) > 1 else 0)
            eta = float(parts[1]) if len(parts) > 1 and parts[1] else None
        except ValueError as exc:
            raise ValueError(f"bad agent spec {text!r}: {exc}") from None
        reg = parts[2] if len(parts) > 2 else "entropic"
        if reg != "entropic" and kind != "ftrl":
            raise ValueError("only FTRL takes a regularizer")
        return cls(kind, eta, regularizer=reg)

    def __str__(self):
        if self.kind == "constant":
            return f"constant:{self.action}"
        s = self.kind if self.eta is None else f"{self.kind}:{self.eta:g}"
        if self.regularizer != "entropic":
            s += (":" if self.eta is not None else "::") + self.regularizer
        return s

    def build(self) -> Agent:
        if self.kind == "mwu":
            return MWU(self.eta)
        if self.kind == "lmwu":
            return LMWU(self.eta)
        if self.kind == "ftrl":
            return FTRL(self.eta, self.regularizer)
        if self.kind == "ftl":
            return FTL()
        return Constant(self.action)


def make_agent(spec: str | AgentSpec) -> Agent:
    if isinstance(spec, str):
        spec = AgentSpec.parse(spec)
    return spec.build()
