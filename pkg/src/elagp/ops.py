"""Symbol pool for expression trees: operands, operators, selection probabilities.

The pool contains 3 operands and 20 operators. Each group carries its own
selection probability distribution (each sums to 1). Division, reciprocal and
logarithm are protected: they return exactly 1 when the critical argument is
at most 1e-20 in magnitude.
"""

from dataclasses import dataclass

PROTECTION_EPS = 1e-20


@dataclass(frozen=True)
class OpSpec:
    symbol: str
    arity: int  # 0 = operand, 1 = unary, 2 = binary
    init_probability: float
    protected: bool = False


OPERANDS = (
    OpSpec("x", 0, 0.6250),
    OpSpec("a", 0, 0.3125),
    OpSpec("rand", 0, 0.0625),
)

OPERATORS = (
    OpSpec("add", 2, 0.1655),
    OpSpec("sub", 2, 0.1655),
    OpSpec("mul", 2, 0.1098),
    OpSpec("div", 2, 0.1098, protected=True),
    OpSpec("neg", 1, 0.0219),
    OpSpec("rec", 1, 0.0219, protected=True),
    OpSpec("multen", 1, 0.0219),
    OpSpec("square", 1, 0.0549),
    OpSpec("sqrt", 1, 0.0549),
    OpSpec("abs", 1, 0.0219),
    OpSpec("exp", 1, 0.0219),
    OpSpec("log", 1, 0.0329, protected=True),
    OpSpec("sin", 1, 0.0329),
    OpSpec("cos", 1, 0.0329),
    OpSpec("round", 1, 0.0329),
    OpSpec("sum", 1, 0.0329),
    OpSpec("mean", 1, 0.0329),
    OpSpec("cum", 1, 0.0109),
    OpSpec("prod", 1, 0.0109),
    OpSpec("max", 1, 0.0109),
)

ALL_SYMBOLS = OPERANDS + OPERATORS

SYMBOL_TABLE = {spec.symbol: spec for spec in ALL_SYMBOLS}

# Reductions collapse a vector value to a scalar; cum keeps the vector shape.
REDUCTIONS = frozenset({"sum", "mean", "prod", "max"})


def validate_probabilities(operands=OPERANDS, operators=OPERATORS, tol=1e-9):
    """Raise ValueError unless each group's probabilities sum to 1 within tol."""
    s_ops = sum(o.init_probability for o in operands)
    s_fns = sum(o.init_probability for o in operators)
    if abs(s_ops - 1.0) > tol:
        raise ValueError(f"operand probabilities sum to {s_ops!r}, expected 1")
    if abs(s_fns - 1.0) > tol:
        raise ValueError(f"operator probabilities sum to {s_fns!r}, expected 1")
    for spec in operands + operators:
        if spec.protected and spec.symbol not in ("div", "rec", "log"):
            raise ValueError(f"unexpected protection on {spec.symbol}")
