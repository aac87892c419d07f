"""
Tests for the function language.
"""
import random

import numpy as np
import pytest

import fdsl
from errors import ArityError
from fdsl import Add, FloorDiv, Lit, Max, Min, Threshold, Var


def random_node(rng, arity, depth):
    if depth == 0 or rng.random() < 0.25:
        return Var(rng.randint(1, arity)) if rng.random() < 0.6 else Lit(rng.randint(0, 9))
    kind = rng.choice(["add", "max", "min", "div", "thr"])
    if kind == "add":
        return Add(random_node(rng, arity, depth - 1), random_node(rng, arity, depth - 1))
    if kind in ("max", "min"):
        args = tuple(random_node(rng, arity, depth - 1) for _ in range(rng.randint(2, 3)))
        return Max(args) if kind == "max" else Min(args)
    if kind == "div":
        return FloorDiv(random_node(rng, arity, depth - 1), rng.randint(1, 4))
    return Threshold(random_node(rng, arity, depth - 1), rng.randint(0, 6))


def test_parse_half():
    spec = fdsl.parse("x1/2")
    assert spec.arity == 1
    assert spec.root == FloorDiv(Var(1), 2)
    assert fdsl.evaluate(spec, (5,)) == 2


def test_parse_three_dimensional_example():
    spec = fdsl.parse("max(x1/2, x2/2)")
    assert spec.arity == 2
    assert spec.root == Max((FloorDiv(Var(1), 2), FloorDiv(Var(2), 2)))
    assert fdsl.evaluate(spec, (7, 7)) == 3
    assert spec(7, 3) == 3


def test_threshold():
    spec = fdsl.parse("[max(x1,x2) > 1]")
    assert spec(1, 1) == 0
    assert spec(2, 1) == 1


def test_sum_and_min():
    spec = fdsl.parse("min(x1 + x2, 4) + 1")
    assert spec(1, 2) == 4
    assert spec(3, 3) == 5


def test_truncated_input_reports_end_of_input():
    text = "max(x1,"
    with pytest.raises(fdsl.ParseError) as info:
        fdsl.parse(text)
    diagnostic = info.value.diagnostic
    assert diagnostic.offset == len(text)
    assert "end of input" in diagnostic.message
    assert diagnostic.expected


@pytest.mark.parametrize("text", ["x1 - 1", "2 * x1", "x1/0", "x0", "max(x1)", "x1 x2", "[x1 > ]", ""])
def test_rejected_expressions(text):
    with pytest.raises(fdsl.ParseError) as info:
        fdsl.parse(text)
    assert 0 <= info.value.diagnostic.offset <= len(text)


@pytest.mark.parametrize("text, offset", [
    ("99999999999999999999", 0),
    ("x1 + 9223372036854775808", 5),
    ("x1/99999999999999999999", 3),
    ("[x1 > 99999999999999999999]", 6),
])
def test_oversized_literals_are_rejected(text, offset):
    with pytest.raises(fdsl.ParseError) as info:
        fdsl.parse(text, 1)
    assert info.value.diagnostic.offset == offset
    assert "too large" in info.value.diagnostic.message


def test_largest_literal_tabulates():
    spec = fdsl.parse(str(fdsl.MAX_LITERAL), 1)
    assert fdsl.tabulate(spec, (3,)).tolist() == [fdsl.MAX_LITERAL] * 4


def test_arity_errors():
    with pytest.raises(ArityError):
        fdsl.parse("x3", arity=2)
    spec = fdsl.parse("x1 + x2")
    with pytest.raises(ArityError):
        fdsl.evaluate(spec, (1,))


def test_declared_arity_can_exceed_variables():
    spec = fdsl.parse("5", arity=3)
    assert spec.arity == 3
    assert spec(1, 2, 3) == 5


def test_print_parse_round_trip():
    rng = random.Random(2024)
    for _ in range(1000):
        arity = rng.randint(1, 3)
        root = random_node(rng, arity, 5)
        text = fdsl.to_text(root)
        again = fdsl.parse(text, arity)
        assert again.root == root, text


def test_compiled_evaluator_matches_reference():
    rng = random.Random(5)
    specs = []
    for _ in range(100):
        arity = rng.randint(1, 3)
        specs.append(fdsl.FunctionSpec(arity, random_node(rng, arity, 5)))
    for _ in range(10000):
        spec = rng.choice(specs)
        coords = tuple(rng.randint(0, 20) for _ in range(spec.arity))
        assert fdsl.evaluate(spec, coords) == fdsl.reference_evaluate(spec.root, coords)


def test_tabulate_matches_evaluate():
    spec = fdsl.parse("max(x1/2, x2/2) + [x1 > 3]")
    table = fdsl.tabulate(spec, (5, 5))
    assert table.shape == (6, 6)
    for u, v in fdsl.product_box((5, 5)):
        assert table[u, v] == spec(u, v)


def test_check_monotone_passes_on_grammar():
    assert fdsl.check_monotone(fdsl.parse("max(x1/2,x2/2)"), (16, 16)).monotone
    assert fdsl.check_monotone(fdsl.parse("5", arity=2), (4, 4)).monotone
    assert fdsl.check_monotone(fdsl.parse("min(x1, x2 + 1)/3 + [x2 > 2]"), (10, 10)).witness is None


def test_check_monotone_reports_witness(monkeypatch):
    monkeypatch.setattr(fdsl, "tabulate", lambda spec, bounds: np.array([[0, 2], [1, 1]]))
    result = fdsl.check_monotone(fdsl.parse("x1 + x2"), (1, 1))
    assert not result.monotone
    assert result.witness == ((0, 1), (1, 1))


def test_table_function_reproduces_table():
    table = (0, 0, 1, 3, 3)
    spec = fdsl.table_function(table)
    assert [spec(z) for z in range(5)] == list(table)
    assert spec(9) == 3
    with pytest.raises(ValueError):
        fdsl.table_function((1, 0))
