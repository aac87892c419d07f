"""
NS property checks on bounded domains.

h has the NS property when floor(z/2^i) = floor(z'/2^i) forces
floor(h(z)/2^(i-1)) = floor(h(z')/2^(i-1)) for every i >= 1. Everything here
is a bounded certificate: a passing report means "holds up to B".
"""
import logging
from dataclasses import dataclass
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed

import fdsl
from errors import ArityError, MonotonicityError, OrderingError, PreconditionError
from reports.models import NSReport, NSWitness

logger = logging.getLogger("chocolate.nsprop")

UnaryFunction = Union[fdsl.FunctionSpec, "SliceFunction", Callable[[int], int]]


@dataclass(frozen=True)
class SliceFunction:
    """g(v) = F(fixed coordinates with ``axis`` set to v)."""

    source: fdsl.FunctionSpec
    axis: int
    fixed: Tuple[int, ...]

    def point(self, v: int) -> Tuple[int, ...]:
        return self.fixed[:self.axis] + (v,) + self.fixed[self.axis:]

    def __call__(self, v: int) -> int:
        return fdsl.evaluate(self.source, self.point(v))

    @property
    def text(self) -> str:
        names = [f"x{i + 1}={c}" for i, c in enumerate(self.point(0)) if i != self.axis]
        pinned = ", ".join(names)
        return f"{self.source.text} along x{self.axis + 1}" + (f" [{pinned}]" if pinned else "")


def slice_function(F: fdsl.FunctionSpec, axis: int, fixed: Sequence[int]) -> SliceFunction:
    """Restrict F to one axis; ``fixed`` lists the other s-1 coordinates in order."""
    if not 0 <= axis < F.arity:
        raise ArityError(f"axis {axis} out of range for arity {F.arity}")
    fixed = tuple(int(c) for c in fixed)
    if len(fixed) != F.arity - 1:
        raise ArityError(f"slice of arity-{F.arity} function needs {F.arity - 1} fixed coordinates, got {len(fixed)}")
    return SliceFunction(F, axis, fixed)


def _as_unary(h: UnaryFunction) -> Callable[[int], int]:
    if isinstance(h, fdsl.FunctionSpec):
        if h.arity != 1:
            raise ArityError(f"NS is defined for unary functions, {h.text!r} has arity {h.arity}")
        return lambda z: fdsl.evaluate(h, (z,))
    return h


def describe(h: UnaryFunction) -> str:
    return getattr(h, "text", None) or getattr(h, "__name__", repr(h))


def exponent_cap(bound: int, top: int) -> int:
    return max(bound, top).bit_length() + 1


def first_violation(h: UnaryFunction, bound: int) -> Tuple[Optional[NSWitness], Tuple[int, int]]:
    """
    Scan exponents i = 1..cap. For monotone h a block sharing floor(z/2^i)
    violates NS exactly when two consecutive members differ after the
    floor by 2^(i-1), so adjacent comparisons find the first witness.
    """
    fn = _as_unary(h)
    values = np.array([fn(z) for z in range(bound + 1)], dtype=np.int64)
    drops = np.flatnonzero(np.diff(values) < 0)
    if drops.size:
        z = int(drops[0])
        raise MonotonicityError(f"{describe(h)} is not monotone: h({z})={values[z]} > h({z + 1})={values[z + 1]}")
    zs = np.arange(bound + 1, dtype=np.int64)
    cap = exponent_cap(bound, int(values[-1]))
    for i in range(1, cap + 1):
        fz = zs >> i
        fh = values >> (i - 1)
        bad = np.flatnonzero((fz[1:] == fz[:-1]) & (fh[1:] != fh[:-1]))
        if bad.size:
            z_prime = int(bad[0]) + 1
            z = int(fz[z_prime]) << i
            return NSWitness(z=z, z_prime=z_prime, i=i, h_z=int(values[z]), h_z_prime=int(values[z_prime])), (1, cap)
    return None, (1, cap)


def check_ns(h: UnaryFunction, bound: int) -> NSReport:
    witness, i_range = first_violation(h, bound)
    report = NSReport(function=describe(h), bound=bound, i_range=i_range, holds_on_bound=witness is None, witness=witness)
    if isinstance(h, SliceFunction):
        report.axis = h.axis
        report.fixed = list(h.fixed)
    logger.debug("NS %s: %s", report.function, report.label)
    return report


def _check_slices(F: fdsl.FunctionSpec, bounds: Sequence[int], keys: Sequence[Tuple[int, Tuple[int, ...]]]) -> List[NSReport]:
    return [check_ns(slice_function(F, axis, fixed), bounds[axis]) for axis, fixed in keys]


def check_all_slices(F: fdsl.FunctionSpec, bounds: Sequence[int], jobs: int = 1, chunk: int = 64) -> List[NSReport]:
    """One report per (axis, fixed tuple), ordered lexicographically by (axis, fixed)."""
    if len(bounds) != F.arity:
        raise ArityError(f"{len(bounds)} bounds given for arity {F.arity}")
    keys = []
    for axis in range(F.arity):
        others = [b for j, b in enumerate(bounds) if j != axis]
        keys.extend((axis, tuple(fixed)) for fixed in fdsl.product_box(others))
    if jobs > 1:
        chunks = [keys[i:i + chunk] for i in range(0, len(keys), chunk)]
        parts = Parallel(n_jobs=jobs)(delayed(_check_slices)(F, bounds, c) for c in chunks)
        return [report for part in parts for report in part]
    return _check_slices(F, bounds, keys)


def all_hold(reports: Sequence[NSReport]) -> bool:
    return all(r.holds_on_bound for r in reports)


@dataclass(frozen=True)
class ABSets:
    A: FrozenSet[int]
    B: FrozenSet[int]

    @property
    def equal(self) -> bool:
        return self.A == self.B


def ab_sets(h: UnaryFunction, y: int, z: int) -> ABSets:
    """A = {y ^ (z-k)}, B = {min(y, h(z-k)) ^ (z-k)} for k = 1..z."""
    fn = _as_unary(h)
    if y > fn(z):
        raise PreconditionError(f"ab_sets needs y <= h(z), got y={y}, h({z})={fn(z)}")
    A = frozenset(y ^ (z - k) for k in range(1, z + 1))
    B = frozenset(min(y, fn(z - k)) ^ (z - k) for k in range(1, z + 1))
    return ABSets(A, B)


@dataclass(frozen=True)
class FloorDecomposition:
    z: int
    z_prime: int
    i: int
    equal: bool
    d: Optional[int] = None
    c: Optional[int] = None
    s: Optional[int] = None
    t: Optional[int] = None

    def verify(self) -> bool:
        z, zp, i = self.z, self.z_prime, self.i
        if self.equal:
            return self.d is not None and self.d * 2 ** i <= z < zp < (self.d + 1) * 2 ** i
        c, s, t = self.c, self.s, self.t
        return (
            s >= i
            and 0 <= t < 2 ** s
            and z == c * 2 ** (s + 1) + t
            and z < c * 2 ** (s + 1) + 2 ** s <= zp
        )


def floor_interval_check(z: int, z_prime: int, i: int) -> FloorDecomposition:
    """
    Equal floors at 2^i: the common block index d. Otherwise split at the
    highest bit s where z and z' differ (z has 0 there, z' has 1).
    """
    if not 0 <= z < z_prime:
        raise OrderingError(f"floor_interval_check needs 0 <= z < z', got z={z}, z'={z_prime}")
    if i < 0:
        raise OrderingError(f"exponent must be nonnegative, got {i}")
    if z >> i == z_prime >> i:
        return FloorDecomposition(z, z_prime, i, True, d=z >> i)
    s = (z ^ z_prime).bit_length() - 1
    c = z >> (s + 1)
    t = z - c * 2 ** (s + 1)
    return FloorDecomposition(z, z_prime, i, False, c=c, s=s, t=t)
