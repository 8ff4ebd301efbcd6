"""The four example games and their hand-built manipulation policies.

Action indices are 0-based. Clock positions 1..12 of the social distancing
game map to indices 0..11; IPD uses C=0, D=1; electric vs petrol uses P=0,
E=1; battle of the buddies events 1..3 map to 0..2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .polymatrix import CompleteStrategy, PolymatrixGame, realized_utilities
from .synth import ManipulatorPolicy, PolicyCertificate, make_certificate

CLOCK = tuple(str(p) for p in range(1, 13))


def clock_distance(a: int, b: int) -> int:
    """Shortest distance between clock positions (either 1-based or 0-based)."""
    gap = abs(a - b)
    return gap if gap <= 6 else 12 - gap


def distance_matrix() -> np.ndarray:
    idx = np.arange(12)
    gap = np.abs(idx[:, None] - idx[None, :])
    return np.where(gap <= 6, gap, 12 - gap).astype(float)


def social_distancing() -> PolymatrixGame:
    d = distance_matrix()
    return PolymatrixGame(d, d, d, d, d, d, labels=(CLOCK, CLOCK, CLOCK))


def ipd3() -> PolymatrixGame:
    lower = np.array([[3.0, 0.0], [5.0, 1.0]])
    upper = lower.T
    cd = ("C", "D")
    return PolymatrixGame(lower, lower, upper, lower, upper, upper, labels=(cd, cd, cd))


def electric_petrol() -> PolymatrixGame:
    A1 = np.array([[0.87, 0.0], [0.8, 2.0]])
    A21 = np.array([[2.0, 1.5], [1.75, 1.25]])
    A23 = np.array([[0.0, 1.0], [0.49, 0.0]])
    pe = ("P", "E")
    return PolymatrixGame(A1, A1, A21, A23, A21, A23.T, labels=(pe, pe, pe))


def battle_of_buddies() -> PolymatrixGame:
    ev = ("1", "2", "3")
    return PolymatrixGame(
        np.diag([3.0, 2.0, 1.0]),
        np.diag([3.0, 1.0, 2.0]),
        np.diag([2.0, 3.0, 1.0]),
        np.diag([1.0, 3.0, 2.0]),
        np.diag([2.0, 1.0, 3.0]),
        np.diag([1.0, 2.0, 3.0]),
        labels=(ev, ev, ev),
    )


GAMES: dict[str, Callable[[], PolymatrixGame]] = {
    "social_distancing": social_distancing,
    "ipd3": ipd3,
    "electric_petrol": electric_petrol,
    "bob": battle_of_buddies,
}


def get_game(name: str) -> PolymatrixGame:
    key = name.replace("-", "_").lower()
    aliases = {"sd": "social_distancing", "ipd": "ipd3", "evp": "electric_petrol",
               "battle_of_buddies": "bob"}
    key = aliases.get(key, key)
    if key not in GAMES:
        raise KeyError(f"unknown game {name!r}; choose from {sorted(GAMES)}")
    return GAMES[key]()


@dataclass
class GameFixture:
    """A worked manipulation from the literature, parameterized by eps.

    ``stated_utilities`` are the closed-form values quoted for the example;
    :meth:`utilities` recomputes them from the matrices. Any disagreement is
    listed in ``notes``.
    """

    name: str
    base: PolymatrixGame
    eps: float
    policy_class: str
    triple: tuple[int, int, int]
    A21: np.ndarray
    A31: np.ndarray
    stated_utilities: tuple[float, float, float]
    stated_cost: float
    valid_range: tuple[float, float] | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        """Strict dominance needs a positive slack."""
        return self.eps <= 0

    @property
    def in_stated_range(self) -> bool:
        if self.valid_range is None:
            return True
        lo, hi = self.valid_range
        return lo < self.eps < hi

    @property
    def strategy(self) -> CompleteStrategy:
        return CompleteStrategy(self.triple[0], self.A21, self.A31)

    @property
    def policy(self) -> ManipulatorPolicy:
        return ManipulatorPolicy(self.strategy)

    @property
    def in_effect(self) -> PolymatrixGame:
        return self.strategy.in_effect(self.base)

    @property
    def cost(self) -> float:
        return self.strategy.cost(self.base)

    def utilities(self) -> tuple[float, float, float]:
        return realized_utilities(self.in_effect, self.triple, self.cost)

    def certificate(self) -> PolicyCertificate:
        return make_certificate(self.base, self.policy, (self.triple,), self.policy_class,
                                self.eps, extras={"fixture": self.name})


def _check_eps(eps: float, lo: float, hi: float, name: str) -> None:
    if not lo <= eps <= hi:
        raise ValueError(f"{name} fixture needs {lo:g} <= eps <= {hi:g}, got {eps}")


def social_distancing_win_fixture(eps: float = 0.1) -> GameFixture:
    """Everyone else is pushed to the spot opposite player 1 (12, 6, 6)."""
    d = distance_matrix()
    A = np.where(d < 6, d - eps, d + eps)
    return GameFixture("social_distancing_win", social_distancing(), eps, "type1", (11, 5, 5),
                       A, A, (12 - 2 * eps, 6 + eps, 6 + eps), 2 * eps)


def social_distancing_welfare_fixture(eps: float = 0.1) -> GameFixture:
    """Spread the three players to (12, 5, 7).

    Only row 12 of each matrix changes. The matrices make position 7 dominant
    for player 3 only once player 2 sits at 5, so this is a type-II policy.
    """
    d = distance_matrix()
    A21 = d.copy()
    A21[11] = np.where(np.arange(12) == 4, d[11] + 1 - eps, d[11] - 1 - 2 * eps)
    A31 = d.copy()
    A31[11] = np.where(np.arange(12) == 6, d[11] + 1 - eps, d[11] - 1 + eps)
    fx = GameFixture("social_distancing_welfare", social_distancing(), eps, "type2", (11, 4, 6),
                     A21, A31, (8 - eps, 8 - eps, 8 - eps), 2 + eps)
    fx.notes.append("player 3's target is dominant only against player 2 at position 5 "
                    "(fails for player 2 at 12), hence type-II")
    return fx


def ipd3_fixture(eps: float = 0.1) -> GameFixture:
    """Player 1 defects; the others are paid to cooperate: target (D, C, C)."""
    _check_eps(eps, 0.0, 7 / 6, "ipd3")
    base = ipd3()
    A = np.array([[3.0, 5.0], [1.5 + eps, -0.5]])
    fx = GameFixture("ipd3", base, eps, "type1", (1, 0, 0), A, A,
                     (7 - 2 * eps, 4.5 + eps, 4.5 + eps), 3 + 2 * eps, (0.0, 7 / 6))
    if eps > 5 / 6:
        fx.notes.append("player 1 no longer wins for eps > 5/6 (7 - 2eps < 4.5 + eps)")
    return fx


def electric_petrol_fixture(eps: float = 0.1) -> GameFixture:
    """Shift every learner payoff toward electric: target (E, E, E)."""
    base = electric_petrol()
    A = np.array([[2 - eps, 1.5 + eps], [1.75 - eps, 1.25 + eps]])
    fx = GameFixture("electric_petrol", base, eps, "type1", (1, 1, 1), A, A,
                     (4 - 2 * eps, 1.25 + eps, 1.25 + eps), 2 * eps, (3 / 12, 11 / 12))
    fx.notes.append("E beats P for a learner only when 2*eps > 1.5 (other learner on E); "
                    "the dominance slack is 2*eps - 1.5, negative for eps < 0.75")
    return fx


def bob_fixture(eps: float = 0.1) -> GameFixture:
    """Cheapest route to everyone at event 1; only A21's first row changes."""
    base = battle_of_buddies()
    A21 = base.A21.copy()
    A21[0] = [2.5 + eps, -0.5, 0.0]
    return GameFixture("bob", base, eps, "type2", (0, 0, 0), A21, base.A31.copy(),
                       (5.5 - eps, 3.5 + eps, 3.0), 0.5 + eps, (0.0, 1.0))


def bob_adversarial_fixture(eps: float = 0.1) -> GameFixture:
    """Everyone at event 1 while minimizing the learners' summed payoff."""
    base = battle_of_buddies()
    A21 = np.array([[eps, -3.0, -3.0], [0.0, 3.0, 0.0], [0.0, 0.0, 1.0]])
    A31 = np.array([[eps, -2 + eps, -2 + eps], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]])
    fx = GameFixture("bob_adversarial", base, eps, "type2", (0, 0, 0), A21, A31,
                     (1 + eps, 1 + eps, 1 + eps), 5 - eps, (0.0, 1.0))
    fx.notes.append("player 3's payoff is eps + 1 from the matrices; the prose value 3 "
                    "is not used")
    return fx


FIXTURES: dict[str, Callable[[float], GameFixture]] = {
    "social_distancing_win": social_distancing_win_fixture,
    "social_distancing_welfare": social_distancing_welfare_fixture,
    "ipd3": ipd3_fixture,
    "electric_petrol": electric_petrol_fixture,
    "bob": bob_fixture,
    "bob_adversarial": bob_adversarial_fixture,
}

# Fixture used as "the policy" for each game when reproducing experiments.
DEFAULT_FIXTURE = {
    "social_distancing": "social_distancing_win",
    "ipd3": "ipd3",
    "electric_petrol": "electric_petrol",
    "bob": "bob",
}
