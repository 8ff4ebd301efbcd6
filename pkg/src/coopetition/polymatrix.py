"""Three-player polymatrix games with a payoff-manipulating player 1.

Matrix orientation: every pairwise matrix is indexed by the lower-numbered
player's action on rows. So ``A12``, ``A21`` are ``n x m``; ``A13``, ``A31``
are ``n x l``; ``A23``, ``A32`` are ``m x l``. Utilities are

    u1 = x^T A12 y + x^T A13 z - cost
    u2 = x^T A21 y + y^T A23 z
    u3 = x^T A31 z + y^T A32 z

Player 1 may replace ``A21`` and ``A31`` each round and pays the sum of the
infinity-norm deviations from the base matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

MATRIX_NAMES = ("A12", "A13", "A21", "A23", "A31", "A32")
STRATEGY_ATOL = 1e-9


class GameShapeError(ValueError):
    """A payoff matrix does not match the game's action counts."""

    def __init__(self, name: str, expected: tuple[int, int], got: tuple[int, ...]):
        super().__init__(f"{name} has shape {got}, expected {expected}")
        self.name = name
        self.expected = expected
        self.got = got


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PolymatrixGame:
    A12: np.ndarray
    A13: np.ndarray
    A21: np.ndarray
    A23: np.ndarray
    A31: np.ndarray
    A32: np.ndarray
    labels: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]] | None = field(default=None)

    def __post_init__(self):
        for name in MATRIX_NAMES:
            arr = _frozen(getattr(self, name))
            if arr.ndim != 2:
                raise GameShapeError(name, (-1, -1), arr.shape)
            object.__setattr__(self, name, arr)
        n, m = self.A12.shape
        l = self.A13.shape[1]
        if n < 1 or m < 1 or l < 1:
            raise ValueError("every player needs at least one action")
        expected = {"A12": (n, m), "A13": (n, l), "A21": (n, m),
                    "A23": (m, l), "A31": (n, l), "A32": (m, l)}
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise GameShapeError(name, shape, got)
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")
        if self.labels is not None:
            labels = tuple(tuple(str(s) for s in group) for group in self.labels)
            if tuple(len(g) for g in labels) != (n, m, l):
                raise ValueError("labels do not match action counts")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.A12.shape[0]

    @property
    def m(self) -> int:
        return self.A12.shape[1]

    @property
    def l(self) -> int:
        return self.A13.shape[1]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.n, self.m, self.l

    def num_actions(self, player: int) -> int:
        return self.sizes[player - 1]

    def with_manipulation(self, A21, A31) -> "PolymatrixGame":
        """The game in effect when player 1 submits ``A21`` and ``A31``."""
        return PolymatrixGame(self.A12, self.A13, A21, self.A23, A31, self.A32, labels=self.labels)

    def __eq__(self, other):
        if not isinstance(other, PolymatrixGame):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in MATRIX_NAMES)

    __hash__ = None

    def to_dict(self) -> dict:
        d = {"n": self.n, "m": self.m, "l": self.l}
        for name in MATRIX_NAMES:
            d[name] = getattr(self, name).tolist()
        if self.labels is not None:
            d["labels"] = [list(g) for g in self.labels]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PolymatrixGame":
        missing = [k for k in MATRIX_NAMES if k not in d]
        if missing:
            raise ValueError(f"game is missing matrices: {', '.join(missing)}")
        game = cls(*(d[k] for k in MATRIX_NAMES), labels=d.get("labels"))
        for key, size in zip("nml", game.sizes):
            if key in d and int(d[key]) != size:
                raise ValueError(f"declared {key}={d[key]} but matrices imply {size}")
        return game

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "PolymatrixGame":
        return cls.from_dict(json.loads(text))


class ActionProfile(NamedTuple):
    a1: int
    a2: int
    a3: int


@dataclass(frozen=True, eq=False)
class CompleteStrategy:
    """Player 1's pure action together with the matrices she submits."""

    action: int
    A21: np.ndarray
    A31: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A21", _frozen(self.A21))
        object.__setattr__(self, "A31", _frozen(self.A31))
        if self.action < 0:
            raise ValueError("action must be non-negative")

    def __eq__(self, other):
        if not isinstance(other, CompleteStrategy):
            return NotImplemented
        return (self.action == other.action and np.array_equal(self.A21, other.A21)
                and np.array_equal(self.A31, other.A31))

    __hash__ = None

    def check(self, base: PolymatrixGame) -> None:
        if not 0 <= self.action < base.n:
            raise ValueError(f"action {self.action} out of range for n={base.n}")
        _check_shapes(self.A21, self.A31, base)

    def in_effect(self, base: PolymatrixGame) -> PolymatrixGame:
        self.check(base)
        return base.with_manipulation(self.A21, self.A31)

    def cost(self, base: PolymatrixGame) -> float:
        return manipulation_cost(self.A21, self.A31, base)

    def to_dict(self) -> dict:
        return {"action": int(self.action), "A21": self.A21.tolist(), "A31": self.A31.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "CompleteStrategy":
        return cls(int(d["action"]), d["A21"], d["A31"])

    @classmethod
    def unmodified(cls, base: PolymatrixGame, action: int) -> "CompleteStrategy":
        return cls(action, base.A21, base.A31)


def _check_shapes(A21, A31, base: PolymatrixGame) -> None:
    if np.shape(A21) != base.A21.shape:
        raise GameShapeError("A21", base.A21.shape, np.shape(A21))
    if np.shape(A31) != base.A31.shape:
        raise GameShapeError("A31", base.A31.shape, np.shape(A31))


def pure(index: int, size: int) -> np.ndarray:
    """Unit vector e_index of length ``size``."""
    if not 0 <= index < size:
        raise ValueError(f"action {index} out of range for {size} actions")
    e = np.zeros(size)
    e[index] = 1.0
    return e


def uniform(size: int) -> np.ndarray:
    return np.full(size, 1.0 / size)


def as_strategy(probs: Sequence[float], size: int | None = None) -> np.ndarray:
    """Validate a mixed strategy: non-negative entries summing to one."""
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or (size is not None and p.shape[0] != size):
        raise ValueError(f"strategy has shape {p.shape}, expected ({size},)")
    if np.any(p < 0) or abs(p.sum() - 1.0) > STRATEGY_ATOL:
        raise ValueError("strategy must be a probability vector")
    return p


def manipulation_cost(new21, new31, base: PolymatrixGame) -> float:
    """Sum of infinity-norm (max-abs-entry) deviations of A21 and A31."""
    _check_shapes(new21, new31, base)
    d2 = np.max(np.abs(np.asarray(new21, dtype=float) - base.A21))
    d3 = np.max(np.abs(np.asarray(new31, dtype=float) - base.A31))
    return float(d2 + d3)


def _check_cost(player: int, cost: float) -> None:
    if player not in (1, 2, 3):
        raise ValueError(f"player must be 1, 2 or 3, got {player}")
    if player != 1 and cost != 0:
        raise ValueError("only player 1 pays a manipulation cost")


def expected_utility(game: PolymatrixGame, x, y, z, player: int, cost: float = 0.0) -> float:
    _check_cost(player, cost)
    x = as_strategy(x, game.n)
    y = as_strategy(y, game.m)
    z = as_strategy(z, game.l)
    if player == 1:
        return float(x @ game.A12 @ y + x @ game.A13 @ z - cost)
    if player == 2:
        return float(x @ game.A21 @ y + y @ game.A23 @ z)
    return float(x @ game.A31 @ z + y @ game.A32 @ z)


def realized_utility(game: PolymatrixGame, profile: Sequence[int], player: int,
                     cost: float = 0.0) -> float:
    _check_cost(player, cost)
    a1, a2, a3 = profile
    if not (0 <= a1 < game.n and 0 <= a2 < game.m and 0 <= a3 < game.l):
        raise ValueError(f"profile {tuple(profile)} out of range for sizes {game.sizes}")
    if player == 1:
        return float(game.A12[a1, a2] + game.A13[a1, a3] - cost)
    if player == 2:
        return float(game.A21[a1, a2] + game.A23[a2, a3])
    return float(game.A31[a1, a3] + game.A32[a2, a3])


def realized_utilities(game: PolymatrixGame, profile: Sequence[int],
                       cost: float = 0.0) -> tuple[float, float, float]:
    return (realized_utility(game, profile, 1, cost),
            realized_utility(game, profile, 2),
            realized_utility(game, profile, 3))


def counterfactual_payoffs(game: PolymatrixGame, player: int, x, other) -> np.ndarray:
    """Expected payoff of each pure action of ``player`` (2 or 3).

    ``x`` is player 1's strategy and ``other`` the strategy of the remaining
    learner (z for player 2, y for player 3).
    """
    if player == 2:
        return game.A21.T @ np.asarray(x, dtype=float) + game.A23 @ np.asarray(other, dtype=float)
    if player == 3:
        return game.A31.T @ np.asarray(x, dtype=float) + game.A32.T @ np.asarray(other, dtype=float)
    raise ValueError("player 1 is the manipulator and receives no learning feedback")


def _payoff_table(game: PolymatrixGame, i_star: int, player: int) -> np.ndarray:
    """Rows: own action; columns: the other learner's action; player 1 fixed at i_star."""
    if player == 2:
        return game.A21[i_star, :][:, None] + game.A23
    if player == 3:
        return game.A31[i_star, :][:, None] + game.A32.T
    raise ValueError("dominance is only defined for players 2 and 3")


def dominance_gap(game: PolymatrixGame, i_star: int, target: int, player: int,
                  against: int | None = None) -> float:
    """Smallest advantage of ``target`` over any alternative.

    With ``against=None`` the minimum runs over every action of the other
    learner (type-I); otherwise that learner's action is fixed (type-II).
    Returns ``inf`` when the player has a single action.
    """
    table = _payoff_table(game, i_star, player)
    if not 0 <= target < table.shape[0]:
        raise ValueError(f"target {target} out of range")
    if against is not None:
        table = table[:, [against]]
    others = np.delete(table, target, axis=0)
    if others.size == 0:
        return float("inf")
    return float(np.min(table[target][None, :] - others))


def check_type1_dominance(game: PolymatrixGame, i_star: int, target: int, player: int,
                          slack: float = 0.1) -> bool:
    """True iff ``target`` beats every alternative by at least ``slack`` for
    every action of the other learner, with player 1 on ``i_star``."""
    return dominance_gap(game, i_star, target, player) >= slack


def check_type2_dominance(game: PolymatrixGame, i_star: int, j_star: int, k_star: int,
                          slack: float = 0.1, player: int = 3) -> bool:
    """Dominance of one learner's target with both other players' actions fixed.

    For ``player=3`` the target is ``k_star`` against (i_star, j_star); for
    ``player=2`` the target is ``j_star`` against (i_star, k_star).
    """
    if player == 3:
        return dominance_gap(game, i_star, k_star, 3, against=j_star) >= slack
    return dominance_gap(game, i_star, j_star, 2, against=k_star) >= slack
