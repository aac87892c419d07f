"""
Chocolate-bar games CB(F, x1..xs, y).

A position keeps the s base coordinates and the height coordinate apart:
``ChocPosition(base=(x1, ..., xs), y)``. The order the coordinates are
written in ({y,z} for s=1, {x,y,z} for s=2, (x1..xs,y) above that) is only
used at the edges, see ``from_written_coords``.
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, NamedTuple, Optional, Sequence, Tuple

import numpy as np

import fdsl
from core import ImpartialGame
from errors import ArityError, InvalidPositionError, MonotonicityError, UnsupportedDimensionError

logger = logging.getLogger("chocolate.chocolate")

HEIGHT_INVARIANT = "y <= F(x)"


class ChocPosition(NamedTuple):
    base: Tuple[int, ...]
    y: int


class ChocGame(ImpartialGame):
    """CB(F, ...) for a monotone FunctionSpec of arity s."""

    def __init__(self, F: fdsl.FunctionSpec, bounds: Optional[Sequence[int]] = None, name: Optional[str] = None):
        self.F = F
        self.s = F.arity
        self.bounds = tuple(bounds) if bounds is not None else None
        self.name = name or F.text
        self._f_memo: Dict[Tuple[int, ...], int] = {}
        if self.bounds is not None:
            if len(self.bounds) != self.s:
                raise ArityError(f"{len(self.bounds)} bounds given for a game with s={self.s}")
            check = fdsl.check_monotone(F, self.bounds)
            if not check.monotone:
                u, v = check.witness
                raise MonotonicityError(f"{F.text} is not monotone: F{u} > F{v}")

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_f_memo"] = {}
        return state

    def f(self, base: Tuple[int, ...]) -> int:
        value = self._f_memo.get(base)
        if value is None:
            value = fdsl.evaluate(self.F, base)
            self._f_memo[base] = value
        return value

    def validate(self, p: ChocPosition) -> None:
        if not isinstance(p, ChocPosition):
            raise InvalidPositionError(f"not a chocolate position: {p!r}")
        if len(p.base) != self.s:
            raise ArityError(f"position {p!r} has {len(p.base) + 1} coordinates, game needs {self.s + 1}")
        if p.y < 0 or any(c < 0 for c in p.base):
            raise InvalidPositionError(f"negative coordinate in {p!r}", "coordinates >= 0")
        if p.y > self.f(p.base):
            raise InvalidPositionError(
                f"y={p.y} exceeds F{p.base}={self.f(p.base)}", HEIGHT_INVARIANT
            )

    def moves(self, p: ChocPosition) -> FrozenSet[ChocPosition]:
        return moves_multi(self, p)

    def reference_moves(self, p: ChocPosition) -> FrozenSet[ChocPosition]:
        """Moves written out per dimension; used by the naive oracle."""
        if self.s == 1:
            return moves_2d(self, p)
        if self.s == 2:
            return moves_3d(self, p)
        self.validate(p)
        out = set()
        for i, xi in enumerate(p.base):
            for u in range(xi):
                cut = p.base[:i] + (u,) + p.base[i + 1:]
                out.add(ChocPosition(cut, min(self.f(cut), p.y)))
        out.update(ChocPosition(p.base, w) for w in range(p.y))
        return frozenset(out)

    def describe(self) -> str:
        return f"CB({self.name}, s={self.s})"


def validate_position(game: ChocGame, p: ChocPosition) -> bool:
    """True when p is a canonical position; arity mismatches still raise."""
    if len(p.base) != game.s:
        raise ArityError(f"position {p!r} has {len(p.base) + 1} coordinates, game needs {game.s + 1}")
    try:
        game.validate(p)
    except InvalidPositionError:
        return False
    return True


def normalize(game: ChocGame, p: ChocPosition) -> ChocPosition:
    """Clamp y to F(base)."""
    if len(p.base) != game.s:
        raise ArityError(f"position {p!r} has {len(p.base) + 1} coordinates, game needs {game.s + 1}")
    return ChocPosition(tuple(p.base), min(p.y, game.f(tuple(p.base))))


def moves_2d(game: ChocGame, p: ChocPosition) -> FrozenSet[ChocPosition]:
    if game.s != 1:
        raise UnsupportedDimensionError(f"moves_2d needs s=1, game has s={game.s}")
    game.validate(p)
    (z,), y = p
    out = {ChocPosition((z,), v) for v in range(y)}
    out.update(ChocPosition((w,), min(y, game.f((w,)))) for w in range(z))
    return frozenset(out)


def moves_3d(game: ChocGame, p: ChocPosition) -> FrozenSet[ChocPosition]:
    if game.s != 2:
        raise UnsupportedDimensionError(f"moves_3d needs s=2, game has s={game.s}")
    game.validate(p)
    (x, z), y = p
    out = {ChocPosition((u, z), min(game.f((u, z)), y)) for u in range(x)}
    out.update(ChocPosition((x, z), v) for v in range(y))
    out.update(ChocPosition((x, w), min(y, game.f((x, w)))) for w in range(z))
    return frozenset(out)


def moves_multi(game: ChocGame, p: ChocPosition) -> FrozenSet[ChocPosition]:
    """
    Cut along base axis i to any u < xi (height re-clamped to F of the new
    base), or lower the height to any w < y.
    """
    game.validate(p)
    base, y = p
    out = set()
    for i in range(len(base)):
        head, tail = base[:i], base[i + 1:]
        for u in range(base[i]):
            cut = head + (u,) + tail
            fv = game.f(cut)
            out.add(ChocPosition(cut, fv if fv < y else y))
    for w in range(y):
        out.add(ChocPosition(base, w))
    return frozenset(out)


@dataclass(frozen=True)
class ColumnHeights:
    heights: np.ndarray
    bitter: Tuple[int, ...]

    def key(self) -> Tuple:
        return (self.heights.shape, self.heights.tobytes())


def column_heights(game: ChocGame, p: ChocPosition) -> ColumnHeights:
    """min(F(u), y) + 1 at every base cell u <= base(p); the origin is bitter."""
    if game.s > 2:
        raise UnsupportedDimensionError(f"column heights are only drawn for s <= 2, game has s={game.s}")
    game.validate(p)
    table = fdsl.tabulate(game.F, p.base)
    return ColumnHeights(np.minimum(table, p.y) + 1, (0,) * game.s)


def render_ascii(game: ChocGame, p: ChocPosition) -> str:
    """
    s=1: side view, '#' is the bitter square, 'o' any other square.
    s=2: top view of column heights, the bitter column marked with '*'.
    """
    bar = column_heights(game, p)
    heights = bar.heights
    if game.s == 1:
        rows = []
        for level in range(int(heights.max()), 0, -1):
            row = []
            for i, h in enumerate(heights):
                if h < level:
                    row.append(" ")
                elif i == 0 and level == 1:
                    row.append("#")
                else:
                    row.append("o")
            rows.append("".join(row).rstrip())
        return "\n".join(rows)
    width = len(str(int(heights.max()))) + 1
    lines = []
    for x in range(heights.shape[0] - 1, -1, -1):
        cells = []
        for z in range(heights.shape[1]):
            mark = "*" if (x, z) == bar.bitter else ""
            cells.append(f"{int(heights[x, z])}{mark}".rjust(width))
        lines.append("".join(cells))
    return "\n".join(lines)


def valid_positions(game: ChocGame, bounds: Sequence[int], y_cap: Optional[int] = None) -> Iterator[ChocPosition]:
    """Every canonical position with base <= bounds, in (base, y) order."""
    if len(bounds) != game.s:
        raise ArityError(f"{len(bounds)} bounds given for a game with s={game.s}")
    for base in fdsl.product_box(bounds):
        top = game.f(base)
        if y_cap is not None:
            top = min(top, y_cap)
        for y in range(top + 1):
            yield ChocPosition(base, y)


def coordinate_nim_sum(p: ChocPosition) -> int:
    value = p.y
    for c in p.base:
        value ^= c
    return value


def from_written_coords(s: int, coords: Sequence[int]) -> ChocPosition:
    """{y,z} for s=1, {x,y,z} for s=2, (x1..xs,y) for s>=3."""
    coords = tuple(int(c) for c in coords)
    if len(coords) != s + 1:
        raise ArityError(f"expected {s + 1} coordinates for s={s}, got {len(coords)}")
    if s == 1:
        y, z = coords
        return ChocPosition((z,), y)
    if s == 2:
        x, y, z = coords
        return ChocPosition((x, z), y)
    return ChocPosition(coords[:-1], coords[-1])


def to_written_coords(p: ChocPosition) -> Tuple[int, ...]:
    if len(p.base) == 1:
        return (p.y, p.base[0])
    if len(p.base) == 2:
        return (p.base[0], p.y, p.base[1])
    return tuple(p.base) + (p.y,)


# ---------------------------------------------------------------- built-in functions

LIBRARY: Dict[str, Tuple[str, int]] = {
    "const0": ("0", 1),
    "const3": ("3", 1),
    "const5-3d": ("5", 2),
    "const1-4d": ("1", 3),
    "half": ("x1/2", 1),
    "quarter": ("x1/4", 1),
    "max-half-3d": ("max(x1/2, x2/2)", 2),
    "max-half-4d": ("max(x1/2, x2/2, x3/2)", 3),
    "half-x-only": ("x1/2", 2),
    "threshold1-3d": ("[max(x1, x2) > 1]", 2),
    "threshold3-3d": ("[max(x1, x2) > 3]", 2),
    "identity": ("x1", 1),
}

# negative controls: known to fail the nim-sum formula
NON_NS = {"identity"}


def threshold_text(t: int, k: int) -> str:
    args = ", ".join(f"x{i}" for i in range(1, k + 1))
    return f"[max({args}) > {t}]" if k > 1 else f"[x1 > {t}]"


def builtin(name: str, bounds: Optional[Sequence[int]] = None) -> ChocGame:
    text, arity = LIBRARY[name]
    return ChocGame(fdsl.parse(text, arity), bounds=bounds, name=name)
