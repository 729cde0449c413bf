"""Expression-tree genotype: evaluation, serialization, parsing, simplification.

A tree is a deterministic function of a d-dimensional point. Evaluation is
elementwise with scalar/vector broadcasting: the operand ``x`` is the whole
decision vector, constants are scalars, and the reduction operators
(sum, mean, prod, max) collapse a vector to a scalar while ``cum`` maps a
vector to its prefix sums. A vector-valued root is reduced by its mean so
every tree yields one objective value per point.

Canonical text form is prefix notation with explicit parentheses, e.g.
``add(x, mul(2.5, x))``. Constants are printed with 17 significant digits so
that parse(serialize(t)) evaluates identically to t.
"""

import re

import numpy as np

from elagp.errors import ExpressionParseError
from elagp.ops import PROTECTION_EPS, REDUCTIONS, SYMBOL_TABLE

_TWO_PI = 2.0 * np.pi


class Node:
    """One tree node: an operator with children, the operand ``x``, or a constant."""

    __slots__ = ("symbol", "children", "value")

    def __init__(self, symbol, children=(), value=None):
        self.symbol = symbol
        self.children = list(children)
        self.value = value

    @staticmethod
    def const(value):
        return Node("const", value=float(value))

    @staticmethod
    def var():
        return Node("x")

    def is_leaf(self):
        return not self.children

    def copy(self):
        return Node(self.symbol, [c.copy() for c in self.children], self.value)


def _apply_unary(symbol, v):
    if symbol == "neg":
        return -v
    if symbol == "rec":
        return np.where(np.abs(v) <= PROTECTION_EPS, 1.0, 1.0 / np.where(v == 0, 1.0, v))
    if symbol == "multen":
        return 10.0 * v
    if symbol == "square":
        return v * v
    if symbol == "sqrt":
        return np.sqrt(np.abs(v))
    if symbol == "abs":
        return np.abs(v)
    if symbol == "exp":
        return np.exp(v)
    if symbol == "log":
        absv = np.abs(v)
        return np.where(absv <= PROTECTION_EPS, 1.0, np.log(np.where(absv == 0, 1.0, absv)))
    if symbol == "sin":
        return np.sin(_TWO_PI * v)
    if symbol == "cos":
        return np.cos(_TWO_PI * v)
    if symbol == "round":
        return np.ceil(v)
    raise ValueError(f"unknown unary operator {symbol!r}")


def _eval_node(node, X):
    """Evaluate ``node`` on an n x d design.

    Returns (values, is_vector): values has shape (n, d) when is_vector else (n,).
    Non-finite intermediates propagate; the caller classifies them.
    """
    sym = node.symbol
    if sym == "x":
        return X, True
    if sym == "const":
        return np.full(X.shape[0], node.value), False

    if len(node.children) == 2:
        a, a_vec = _eval_node(node.children[0], X)
        b, b_vec = _eval_node(node.children[1], X)
        if a_vec and not b_vec:
            b = b[:, None]
        elif b_vec and not a_vec:
            a = a[:, None]
        vec = a_vec or b_vec
        if sym == "add":
            return a + b, vec
        if sym == "sub":
            return a - b, vec
        if sym == "mul":
            return a * b, vec
        if sym == "div":
            return np.where(np.abs(b) <= PROTECTION_EPS, 1.0,
                            a / np.where(b == 0, 1.0, b)), vec
        raise ValueError(f"unknown binary operator {sym!r}")

    v, vec = _eval_node(node.children[0], X)
    if sym in REDUCTIONS:
        if not vec:
            return v, False
        if sym == "sum":
            return np.sum(v, axis=1), False
        if sym == "mean":
            return np.mean(v, axis=1), False
        if sym == "prod":
            return np.prod(v, axis=1), False
        return np.max(v, axis=1), False
    if sym == "cum":
        if not vec:
            return v, False
        return np.cumsum(v, axis=1), True
    return _apply_unary(sym, v), vec


def _depth(node):
    d, stack = 0, [(node, 1)]
    while stack:
        n, lvl = stack.pop()
        d = max(d, lvl)
        for c in n.children:
            stack.append((c, lvl + 1))
    return d


def _format_const(value):
    return format(value, ".17g")


def _serialize(node, out):
    if node.symbol == "x":
        out.append("x")
    elif node.symbol == "const":
        out.append(_format_const(node.value))
    else:
        out.append(node.symbol)
        out.append("(")
        for i, c in enumerate(node.children):
            if i:
                out.append(", ")
            _serialize(c, out)
        out.append(")")


class ExprTree:
    """Immutable-by-convention rooted expression tree."""

    __slots__ = ("root",)

    def __init__(self, root):
        self.root = root

    @property
    def depth(self):
        return _depth(self.root)

    def n_nodes(self):
        count, stack = 0, [self.root]
        while stack:
            n = stack.pop()
            count += 1
            stack.extend(n.children)
        return count

    def evaluate(self, point):
        """Evaluate on one d-vector; returns a float (possibly NaN/inf)."""
        X = np.asarray(point, dtype=float).reshape(1, -1)
        return float(self.evaluate_batch(X)[0])

    def evaluate_batch(self, X):
        """Row-wise evaluation on an n x d matrix; returns an n-vector."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise ValueError("design must be an n x d matrix")
        with np.errstate(all="ignore"):
            values, is_vector = _eval_node(self.root, X)
            if is_vector:
                values = np.mean(values, axis=1)
        return np.asarray(values, dtype=float)

    def serialize(self):
        out = []
        _serialize(self.root, out)
        return "".join(out)

    def copy(self):
        return ExprTree(self.root.copy())

    def simplify(self):
        return ExprTree(_simplify(self.root))

    def __repr__(self):
        return f"ExprTree({self.serialize()!r})"

    def __str__(self):
        return self.serialize()


def iter_nodes(root):
    """Preorder traversal yielding (node, parent, child_index); root has parent None."""
    stack = [(root, None, 0)]
    while stack:
        node, parent, idx = stack.pop()
        yield node, parent, idx
        for i, c in enumerate(node.children):
            stack.append((c, node, i))


def _fold_value(node):
    """Evaluate a constant-only subtree to a scalar using the same semantics."""
    return ExprTree(node).evaluate(np.zeros(1))


def _is_const_subtree(node):
    if node.symbol == "x":
        return False
    return all(_is_const_subtree(c) for c in node.children)


def _simplify(node):
    if node.is_leaf():
        return node.copy()
    children = [_simplify(c) for c in node.children]
    out = Node(node.symbol, children, node.value)
    if node.symbol == "neg" and children[0].symbol == "neg":
        return children[0].children[0]
    if _is_const_subtree(out):
        folded = _fold_value(out)
        if np.isfinite(folded):
            return Node.const(folded)
    return out


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)"
    r"|(?P<punct>[(),]))"
)


def _tokenize(text):
    pos, tokens = 0, []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ExpressionParseError(f"bad token at position {pos}: {text[pos:pos+10]!r}")
        pos = m.end()
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num"))))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            tokens.append((m.group("punct"), None))
    return tokens


def parse_expression(text):
    """Parse canonical prefix notation back into an ExprTree."""
    tokens = _tokenize(text)
    pos = 0

    def expect(kind):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][0] != kind:
            raise ExpressionParseError(f"expected {kind!r} at token {pos} in {text!r}")
        pos += 1

    def parse_node():
        nonlocal pos
        if pos >= len(tokens):
            raise ExpressionParseError(f"unexpected end of input in {text!r}")
        kind, value = tokens[pos]
        if kind == "num":
            pos += 1
            return Node.const(value)
        if kind != "name":
            raise ExpressionParseError(f"unexpected token {kind!r} in {text!r}")
        name = value
        pos += 1
        if name == "x":
            return Node.var()
        spec = SYMBOL_TABLE.get(name)
        if spec is None or spec.arity == 0:
            raise ExpressionParseError(f"unknown operator {name!r} in {text!r}")
        expect("(")
        children = [parse_node()]
        for _ in range(spec.arity - 1):
            expect(",")
            children.append(parse_node())
        expect(")")
        return Node(name, children)

    root = parse_node()
    if pos != len(tokens):
        raise ExpressionParseError(f"trailing tokens in {text!r}")
    return ExprTree(root)
