"""
Impartial game primitives: nim-sum, mex, the memoized Grundy engine,
P/N classification and disjunctive sums.
"""
import logging
import random
from abc import ABC, abstractmethod
from functools import reduce
from operator import xor
from typing import Dict, FrozenSet, Hashable, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import Config
from errors import InvalidPositionError, StateSpaceExceeded

logger = logging.getLogger("chocolate.core")

Position = Hashable

GRUNDY_LIMIT = 2 ** 32


def nim_sum(values: Iterable[int]) -> int:
    """Bitwise mod-2 sum of the binary expansions."""
    values = list(values)
    for v in values:
        if v < 0:
            raise ValueError(f"nim-sum operands must be nonnegative, got {v}")
    return reduce(xor, values, 0)


def mex(values: Iterable[int]) -> int:
    """Least nonnegative integer missing from ``values``."""
    values = list(values)
    # mex(S) <= |S|, so a bitmap of |S|+1 cells always has a free slot
    seen = np.zeros(len(values) + 1, dtype=bool)
    for v in values:
        if v < 0:
            raise ValueError(f"mex is defined on nonnegative integers, got {v}")
        if v < seen.size:
            seen[v] = True
    return int(np.argmin(seen))


class ImpartialGame(ABC):
    """A finite, well-founded move relation under normal play."""

    @abstractmethod
    def moves(self, p: Position) -> FrozenSet[Position]:
        ...

    def validate(self, p: Position) -> None:
        """Raise InvalidPositionError when ``p`` is not a position of the game."""

    def is_terminal(self, p: Position) -> bool:
        return not self.moves(p)

    def describe(self) -> str:
        return type(self).__name__


class NimHeap(ImpartialGame):
    """A single Nim pile; the position is the stone count."""

    def validate(self, p: Position) -> None:
        if not isinstance(p, int) or p < 0:
            raise InvalidPositionError(f"Nim pile must be a nonnegative integer, got {p!r}", "n >= 0")

    def moves(self, p: int) -> FrozenSet[int]:
        return frozenset(range(p))

    def describe(self) -> str:
        return "Nim heap"


class SumGame(ImpartialGame):
    """Disjunctive sum: a move is made in exactly one component."""

    def __init__(self, left: ImpartialGame, right: ImpartialGame):
        self.left = left
        self.right = right

    def validate(self, p: Position) -> None:
        if not isinstance(p, tuple) or len(p) != 2:
            raise InvalidPositionError(f"Sum position must be a pair, got {p!r}", "(g, h)")
        self.left.validate(p[0])
        self.right.validate(p[1])

    def moves(self, p: Tuple[Position, Position]) -> FrozenSet[Tuple[Position, Position]]:
        g, h = p
        left = {(g2, h) for g2 in self.left.moves(g)}
        right = {(g, h2) for h2 in self.right.moves(h)}
        return frozenset(left | right)

    def reference_moves(self, p):
        g, h = p
        left_moves = getattr(self.left, "reference_moves", self.left.moves)
        right_moves = getattr(self.right, "reference_moves", self.right.moves)
        return frozenset([(g2, h) for g2 in left_moves(g)] + [(g, h2) for h2 in right_moves(h)])

    def describe(self) -> str:
        return f"({self.left.describe()}) + ({self.right.describe()})"


def sum_game(g: ImpartialGame, h: ImpartialGame) -> SumGame:
    return SumGame(g, h)


class GrundyTable:
    """Memo from position to Grundy value. Inserts are idempotent."""

    def __init__(self):
        self._values: Dict[Position, int] = {}

    def __contains__(self, p: Position) -> bool:
        return p in self._values

    def __getitem__(self, p: Position) -> int:
        return self._values[p]

    def __len__(self) -> int:
        return len(self._values)

    def __iter__(self) -> Iterator[Position]:
        return iter(self._values)

    def get(self, p: Position, default: Optional[int] = None) -> Optional[int]:
        return self._values.get(p, default)

    def items(self):
        return self._values.items()

    def store(self, p: Position, value: int) -> None:
        assert 0 <= value < GRUNDY_LIMIT, f"Grundy value {value} out of range at {p!r}"
        previous = self._values.setdefault(p, value)
        assert previous == value, f"conflicting Grundy values for {p!r}: {previous} vs {value}"


def grundy(
    game: ImpartialGame,
    p: Position,
    memo: Optional[GrundyTable] = None,
    rng: Optional[random.Random] = None,
    max_positions: Optional[int] = None,
) -> int:
    """
    G(p) = mex{G(h) : h in moves(p)}, evaluated with an explicit stack.

    ``rng`` shuffles the order in which options are expanded; the value does
    not depend on it. ``memo`` is extended in place.
    """
    game.validate(p)
    memo = memo if memo is not None else GrundyTable()
    limit = max_positions if max_positions is not None else Config.MAX_POSITIONS
    if p in memo:
        return memo[p]

    stack: List[Tuple[Position, Optional[List[Position]]]] = [(p, None)]
    while stack:
        node, options = stack[-1]
        if node in memo:
            stack.pop()
            continue
        if options is None:
            options = list(game.moves(node))
            if rng is not None:
                rng.shuffle(options)
            stack[-1] = (node, options)
        pending = [q for q in options if q not in memo]
        if pending:
            stack.extend((q, None) for q in pending)
            continue
        memo.store(node, mex({memo[q] for q in options}))
        if len(memo) > limit:
            raise StateSpaceExceeded(f"{game.describe()}: more than {limit} positions evaluated")
        stack.pop()
    return memo[p]


def grundy_table(
    game: ImpartialGame,
    positions: Iterable[Position],
    memo: Optional[GrundyTable] = None,
    max_positions: Optional[int] = None,
) -> GrundyTable:
    """Evaluate every position in ``positions`` into one shared table."""
    memo = memo if memo is not None else GrundyTable()
    for p in positions:
        grundy(game, p, memo, max_positions=max_positions)
    return memo


def is_p_position(game: ImpartialGame, p: Position, memo: Optional[GrundyTable] = None) -> bool:
    return grundy(game, p, memo) == 0


def outcome(game: ImpartialGame, p: Position, memo: Optional[GrundyTable] = None) -> str:
    return "P" if is_p_position(game, p, memo) else "N"


def smaller_values_reachable(game: ImpartialGame, p: Position, memo: GrundyTable) -> bool:
    """Every v < G(p) is the Grundy value of some option of p."""
    value = grundy(game, p, memo)
    reached = {grundy(game, q, memo) for q in game.moves(p)}
    return all(v in reached for v in range(value))


def naive_grundy(game: ImpartialGame, p: Position, max_nodes: Optional[int] = None) -> int:
    """
    Memo-free recursive evaluation, kept apart from the engine as a test oracle.

    Uses ``game.reference_moves`` when the game provides one so that the
    oracle does not go through the engine's move generator either.
    """
    budget = [max_nodes if max_nodes is not None else Config.ORACLE_MAX_NODES]
    options_of = getattr(game, "reference_moves", game.moves)

    def evaluate(q):
        budget[0] -= 1
        if budget[0] < 0:
            raise StateSpaceExceeded(f"naive oracle exceeded its node budget at {q!r}")
        values = sorted({evaluate(r) for r in options_of(q)})
        m = 0
        for v in values:
            if v != m:
                break
            m += 1
        return m

    game.validate(p)
    return evaluate(p)


def mex_identity_holds(values: Sequence[int]) -> bool:
    """
    k1 ^ ... ^ ks equals the mex over every single-coordinate decrement.
    """
    values = list(values)
    options = set()
    for i, v in enumerate(values):
        for t in range(1, v + 1):
            reduced = values[:i] + [v - t] + values[i + 1:]
            options.add(nim_sum(reduced))
    return nim_sum(values) == mex(options)
