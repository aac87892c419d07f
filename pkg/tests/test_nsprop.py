"""
Tests for the NS checker, slices, A/B sets and the floor-interval decomposition.
"""
import pytest

import fdsl
import nsprop
from errors import ArityError, MonotonicityError, OrderingError, PreconditionError


def violates(witness, h):
    z, zp, i = witness.z, witness.z_prime, witness.i
    return z >> i == zp >> i and h(z) >> (i - 1) != h(zp) >> (i - 1)


def test_half_holds():
    report = nsprop.check_ns(fdsl.parse("x1/2"), 64)
    assert report.holds_on_bound
    assert report.witness is None
    assert report.label == "holds up to 64"


def test_identity_fails_at_first_pair():
    report = nsprop.check_ns(fdsl.parse("x1"), 4)
    assert not report.holds_on_bound
    w = report.witness
    assert (w.z, w.z_prime, w.i) == (0, 1, 1)
    assert w.violates(lambda z: z)


def test_constant_holds():
    for c in (0, 1, 7):
        for bound in (0, 1, 10, 100):
            assert nsprop.check_ns(lambda z, c=c: c, bound).holds_on_bound


def test_ns_families_hold_on_every_prefix():
    for text in ("x1/2", "0", "1", "2", "3"):
        h = fdsl.parse(text, 1)
        for bound in range(257):
            assert nsprop.check_ns(h, bound).holds_on_bound, (text, bound)


def test_non_monotone_input_raises():
    with pytest.raises(MonotonicityError):
        nsprop.check_ns(lambda z: 3 - z if z < 3 else 0, 8)


def test_multivariate_spec_needs_slicing():
    with pytest.raises(ArityError):
        nsprop.check_ns(fdsl.parse("max(x1,x2)"), 8)


def test_ns_on_prefix_is_closed_downward():
    for text in ("x1/2", "x1/4", "x1", "[x1 > 2]", "[x1 > 3]", "x1/2 + [x1 > 4]"):
        h = fdsl.parse(text)
        verdicts = [nsprop.check_ns(h, b).holds_on_bound for b in range(0, 257, 8)]
        # once it fails on a prefix it fails on every longer one
        assert verdicts == sorted(verdicts, reverse=True), text


def test_witnesses_reverify():
    for text in ("x1", "[x1 > 2]", "[x1 > 0]", "min(x1, 5)", "x1/2 + [x1 > 4]"):
        h = fdsl.parse(text)
        report = nsprop.check_ns(h, 64)
        assert not report.holds_on_bound, text
        assert violates(report.witness, h)


def test_slice_examples():
    F = fdsl.parse("max(x1/2, x2/2)")
    g = nsprop.slice_function(F, 1, (7,))
    assert [g(z) for z in range(10)] == [max(3, z // 2) for z in range(10)]

    t = 3
    T = fdsl.parse(f"[max(x1, x2) > {t}]")
    low = nsprop.slice_function(T, 1, (2,))
    assert [low(v) for v in range(8)] == [0, 0, 0, 0, 1, 1, 1, 1]
    high = nsprop.slice_function(T, 1, (5,))
    assert {high(v) for v in range(8)} == {1}


def test_slice_arity_errors():
    F = fdsl.parse("max(x1, x2)")
    with pytest.raises(ArityError):
        nsprop.slice_function(F, 2, (0,))
    with pytest.raises(ArityError):
        nsprop.slice_function(F, 0, (0, 1))


def test_check_all_slices_examples():
    assert nsprop.all_hold(nsprop.check_all_slices(fdsl.parse("max(x1/2, x2/2)"), (16, 16)))
    assert not nsprop.all_hold(nsprop.check_all_slices(fdsl.parse("x1 + x2"), (4, 4)))
    assert nsprop.all_hold(nsprop.check_all_slices(fdsl.parse("[max(x1, x2) > 1]"), (8, 8)))


def test_check_all_slices_order_and_count():
    reports = nsprop.check_all_slices(fdsl.parse("x1 + x2"), (2, 3))
    assert len(reports) == 4 + 3
    keys = [(r.axis, tuple(r.fixed)) for r in reports]
    assert keys == sorted(keys)
    failing = [r for r in reports if not r.holds_on_bound]
    assert failing and failing[0].axis == 0


def test_ab_sets_examples():
    half = fdsl.parse("x1/2")
    assert nsprop.ab_sets(half, 2, 5).equal
    empty = nsprop.ab_sets(half, 0, 0)
    assert empty.A == empty.B == frozenset()
    sets = nsprop.ab_sets(fdsl.parse("x1"), 1, 2)
    assert sets.A == {1 ^ 1, 1 ^ 0}


def test_ab_sets_precondition():
    with pytest.raises(PreconditionError):
        nsprop.ab_sets(fdsl.parse("x1/2"), 3, 5)


NS_FAMILIES = ["x1/2", "0", "1", "2", "3", "[x1 > 1]", "[x1 > 3]", "[x1 > 5]", "[x1 > 7]"]


@pytest.mark.parametrize("text", NS_FAMILIES)
def test_ab_sets_equal_for_ns_functions_up_to_32(text):
    h = fdsl.parse(text, 1)
    for z in range(33):
        for y in range(fdsl.evaluate(h, (z,)) + 1):
            assert nsprop.ab_sets(h, y, z).equal, (text, y, z)


def test_ab_sets_differ_for_even_threshold():
    h = fdsl.parse("[x1 > 2]", 1)
    assert not nsprop.ab_sets(h, 1, 4).equal


def test_floor_interval_examples():
    equal = nsprop.floor_interval_check(4, 7, 2)
    assert equal.equal and equal.d == 1
    split = nsprop.floor_interval_check(3, 4, 2)
    assert not split.equal
    assert (split.c, split.s, split.t) == (0, 2, 3)
    first = nsprop.floor_interval_check(0, 1, 1)
    assert first.equal and first.d == 0


def test_floor_interval_ordering():
    with pytest.raises(OrderingError):
        nsprop.floor_interval_check(4, 4, 1)
    with pytest.raises(OrderingError):
        nsprop.floor_interval_check(5, 2, 1)


def test_floor_interval_decomposition_always_verifies():
    for zp in range(1, 129):
        for z in range(zp):
            for i in range(9):
                assert nsprop.floor_interval_check(z, zp, i).verify(), (z, zp, i)


def test_exponent_cap():
    assert nsprop.exponent_cap(64, 32) == 8
    assert nsprop.exponent_cap(0, 0) == 1


def test_check_all_slices_is_independent_of_jobs():
    F = fdsl.parse("x1 + [x2 > 2]")
    serial = nsprop.check_all_slices(F, (12, 12))
    parallel = nsprop.check_all_slices(F, (12, 12), jobs=2, chunk=5)
    assert serial == parallel
