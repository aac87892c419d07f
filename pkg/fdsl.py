"""
Expression language for monotone functions on nonnegative integer tuples.

    expr  := term ('+' term)*
    term  := atom ('/' INT)*
    atom  := INT | VAR | 'max(' expr (',' expr)+ ')' | 'min(' expr (',' expr)+ ')'
           | '(' expr ')' | '[' expr '>' INT ']'
    VAR   := 'x' INDEX            (1-based)

Every construct is monotone, so every parsed function is monotone on all of Z>=0^s.
"""
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from errors import ArityError, ChocolateError

logger = logging.getLogger("chocolate.fdsl")


# ---------------------------------------------------------------- nodes

@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Add:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Max:
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class Min:
    args: Tuple["Node", ...]


@dataclass(frozen=True)
class FloorDiv:
    operand: "Node"
    divisor: int


@dataclass(frozen=True)
class Threshold:
    operand: "Node"
    limit: int


Node = Union[Lit, Var, Add, Max, Min, FloorDiv, Threshold]


@dataclass(frozen=True)
class FunctionSpec:
    arity: int
    root: Node
    source: str = field(default="", compare=False)
    _compiled: Callable = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.arity < 1:
            raise ArityError(f"arity must be positive, got {self.arity}")
        used = max_variable(self.root)
        if used > self.arity:
            raise ArityError(f"variable x{used} exceeds declared arity {self.arity}")
        object.__setattr__(self, "_compiled", _compile(self.root))

    def __reduce__(self):
        return (FunctionSpec, (self.arity, self.root, self.source))

    def __call__(self, *coords: int) -> int:
        return evaluate(self, coords)

    @property
    def text(self) -> str:
        return self.source or to_text(self.root)


# ---------------------------------------------------------------- diagnostics

@dataclass(frozen=True)
class ParseDiagnostic:
    offset: int
    message: str
    expected: FrozenSet[str] = frozenset()

    def render(self, text: str) -> str:
        pointer = " " * self.offset + "^"
        hint = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        return f"{self.message} at offset {self.offset}{hint}\n  {text}\n  {pointer}"


class ParseError(ChocolateError):
    def __init__(self, diagnostic: ParseDiagnostic, text: str):
        super().__init__(diagnostic.render(text))
        self.diagnostic = diagnostic
        self.text = text


MAX_LITERAL = 2 ** 32


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<func>max|min)
  | (?P<var>x\d+)
  | (?P<int>\d+)
  | (?P<punct>[-+/(),\[\]>*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(ParseDiagnostic(pos, f"unexpected character {text[pos]!r}"), text)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            tokens.append(Token(value if kind == "punct" else kind, value, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def fail(self, message: str, expected: Sequence[str] = ()):
        tok = self.current
        where = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(ParseDiagnostic(tok.offset, f"{message}, found {where}", frozenset(expected)), self.text)

    def expect(self, kind: str) -> Token:
        tok = self.current
        if tok.kind != kind:
            self.fail(f"expected {kind!r}", [kind])
        self.pos += 1
        return tok

    def integer(self) -> int:
        tok = self.expect("int")
        value = int(tok.text)
        if value > MAX_LITERAL:
            raise ParseError(ParseDiagnostic(tok.offset, f"integer literal too large (limit {MAX_LITERAL})"), self.text)
        return value

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "eof":
            self.fail("unexpected trailing input", ["+", "/", "eof"])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "+":
            self.pos += 1
            node = Add(node, self.term())
        return node

    def term(self) -> Node:
        node = self.atom()
        while self.current.kind == "/":
            self.pos += 1
            tok = self.current
            divisor = self.integer()
            if divisor < 1:
                raise ParseError(ParseDiagnostic(tok.offset, "divisor must be a positive integer"), self.text)
            node = FloorDiv(node, divisor)
        return node

    def atom(self) -> Node:
        tok = self.current
        if tok.kind == "int":
            return Lit(self.integer())
        if tok.kind == "var":
            index = int(tok.text[1:])
            if index < 1:
                raise ParseError(ParseDiagnostic(tok.offset, "variables are numbered from x1"), self.text)
            self.pos += 1
            return Var(index)
        if tok.kind == "func":
            self.pos += 1
            self.expect("(")
            args = [self.expr()]
            if self.current.kind != ",":
                self.fail(f"{tok.text}() needs at least two arguments", [","])
            while self.current.kind == ",":
                self.pos += 1
                args.append(self.expr())
            self.expect(")")
            return (Max if tok.text == "max" else Min)(tuple(args))
        if tok.kind == "(":
            self.pos += 1
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "[":
            self.pos += 1
            node = self.expr()
            self.expect(">")
            limit = self.integer()
            self.expect("]")
            return Threshold(node, limit)
        if tok.kind in ("-", "*"):
            self.fail(f"operator {tok.text!r} is not part of the language (it would break monotonicity)")
        self.fail("expected an expression", ["INT", "VAR", "max(", "min(", "(", "["])


def parse(text: str, arity: Optional[int] = None) -> FunctionSpec:
    """Parse ``text``; the arity defaults to the largest variable index used."""
    root = _Parser(text).parse()
    used = max_variable(root)
    if arity is None:
        arity = max(used, 1)
    elif used > arity:
        raise ArityError(f"expression uses x{used} but arity is {arity}")
    return FunctionSpec(arity, root, text.strip())


# ---------------------------------------------------------------- printing

def to_text(node: Node) -> str:
    if isinstance(node, Lit):
        return str(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Add):
        right = to_text(node.right)
        if isinstance(node.right, Add):
            right = f"({right})"
        return f"{to_text(node.left)} + {right}"
    if isinstance(node, (Max, Min)):
        name = "max" if isinstance(node, Max) else "min"
        return f"{name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, FloorDiv):
        inner = to_text(node.operand)
        if isinstance(node.operand, Add):
            inner = f"({inner})"
        return f"{inner}/{node.divisor}"
    if isinstance(node, Threshold):
        return f"[{to_text(node.operand)} > {node.limit}]"
    raise TypeError(f"unknown node {node!r}")


def max_variable(node: Node) -> int:
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Lit):
        return 0
    return max(max_variable(child) for child in children(node))


def children(node: Node) -> Tuple[Node, ...]:
    if isinstance(node, Add):
        return (node.left, node.right)
    if isinstance(node, (Max, Min)):
        return node.args
    if isinstance(node, (FloorDiv, Threshold)):
        return (node.operand,)
    return ()


# ---------------------------------------------------------------- evaluation

def _compile(node: Node) -> Callable[[Tuple[int, ...]], int]:
    if isinstance(node, Lit):
        value = node.value
        return lambda c: value
    if isinstance(node, Var):
        i = node.index - 1
        return lambda c: c[i]
    if isinstance(node, Add):
        left, right = _compile(node.left), _compile(node.right)
        return lambda c: left(c) + right(c)
    if isinstance(node, Max):
        parts = [_compile(a) for a in node.args]
        return lambda c: max(p(c) for p in parts)
    if isinstance(node, Min):
        parts = [_compile(a) for a in node.args]
        return lambda c: min(p(c) for p in parts)
    if isinstance(node, FloorDiv):
        inner, d = _compile(node.operand), node.divisor
        return lambda c: inner(c) // d
    if isinstance(node, Threshold):
        inner, t = _compile(node.operand), node.limit
        return lambda c: 1 if inner(c) > t else 0
    raise TypeError(f"unknown node {node!r}")


def evaluate(spec: FunctionSpec, coords: Sequence[int]) -> int:
    coords = tuple(coords)
    if len(coords) != spec.arity:
        raise ArityError(f"{spec.text!r} takes {spec.arity} argument(s), got {len(coords)}")
    if any(c < 0 for c in coords):
        raise ValueError(f"coordinates must be nonnegative, got {coords}")
    return spec._compiled(coords)


def reference_evaluate(node: Node, coords: Sequence[int]) -> int:
    """Plain tree walk, kept for cross-checking the compiled evaluator."""
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Var):
        return coords[node.index - 1]
    if isinstance(node, Add):
        return reference_evaluate(node.left, coords) + reference_evaluate(node.right, coords)
    if isinstance(node, Max):
        return max(reference_evaluate(a, coords) for a in node.args)
    if isinstance(node, Min):
        return min(reference_evaluate(a, coords) for a in node.args)
    if isinstance(node, FloorDiv):
        return reference_evaluate(node.operand, coords) // node.divisor
    if isinstance(node, Threshold):
        return int(reference_evaluate(node.operand, coords) > node.limit)
    raise TypeError(f"unknown node {node!r}")


def _tabulate_node(node: Node, grids: List[np.ndarray], shape) -> np.ndarray:
    if isinstance(node, Lit):
        return np.full(shape, node.value, dtype=np.int64)
    if isinstance(node, Var):
        return grids[node.index - 1]
    if isinstance(node, Add):
        return _tabulate_node(node.left, grids, shape) + _tabulate_node(node.right, grids, shape)
    if isinstance(node, Max):
        return np.maximum.reduce([_tabulate_node(a, grids, shape) for a in node.args])
    if isinstance(node, Min):
        return np.minimum.reduce([_tabulate_node(a, grids, shape) for a in node.args])
    if isinstance(node, FloorDiv):
        return _tabulate_node(node.operand, grids, shape) // node.divisor
    if isinstance(node, Threshold):
        return (_tabulate_node(node.operand, grids, shape) > node.limit).astype(np.int64)
    raise TypeError(f"unknown node {node!r}")


def tabulate(spec: FunctionSpec, bounds: Sequence[int]) -> np.ndarray:
    """Values of ``spec`` on the box [0, b1] x ... x [0, bs] as an int64 array."""
    if len(bounds) != spec.arity:
        raise ArityError(f"{len(bounds)} bounds given for arity {spec.arity}")
    shape = tuple(b + 1 for b in bounds)
    grids = list(np.indices(shape, dtype=np.int64))
    return np.broadcast_to(_tabulate_node(spec.root, grids, shape), shape).copy()


@dataclass(frozen=True)
class MonotoneCheck:
    monotone: bool
    witness: Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]] = None  # (u, v) with u <= v, F(u) > F(v)


def check_monotone(spec: FunctionSpec, bounds: Sequence[int]) -> MonotoneCheck:
    """Single-step comparisons along each axis; enough by transitivity."""
    table = tabulate(spec, bounds)
    for axis in range(table.ndim):
        drops = np.argwhere(np.diff(table, axis=axis) < 0)
        if drops.size:
            u = tuple(int(c) for c in drops[0])
            v = list(u)
            v[axis] += 1
            logger.warning("%s is not monotone: F%s > F%s", spec.text, u, tuple(v))
            return MonotoneCheck(False, (u, tuple(v)))
    return MonotoneCheck(True)


def table_function(values: Sequence[int]) -> FunctionSpec:
    """
    Unary function reproducing a finite monotone table on its domain, written as
    the first value plus one [x1 > k] step per unit increase.
    """
    values = list(values)
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError(f"table is not monotone: {values}")
    root: Node = Lit(values[0]) if values else Lit(0)
    for k in range(len(values) - 1):
        for _ in range(values[k + 1] - values[k]):
            root = Add(root, Threshold(Var(1), k))
    return FunctionSpec(1, root)


def product_box(bounds: Sequence[int]):
    return itertools.product(*(range(b + 1) for b in bounds))
