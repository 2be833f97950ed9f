from src.expr.nodes import (
    T_SLOT,
    ZERO,
    ONE,
    Expr,
    Const,
    as_expr,
    Var,
    EvaluationError,
    add,
    mul,
    sub,
    neg,
    div,
    power,
    func,
    const,
    coordinate,
    sin,
    cos,
    exp,
    log,
    sqrt,
    inverse_entry,
    total,
    diff,
    evaluate,
    substitute,
    variables,
    to_text,
)
from src.expr.parser import (
    parse_expr,
    parse_value,
    ExprSyntaxError,
    UnknownIdentifierError,
    VariableRangeError,
    PathParameterError,
)

__all__ = [
    "T_SLOT", "ZERO", "ONE", "Expr", "Const", "as_expr", "Var", "EvaluationError",
    "add", "mul", "sub", "neg", "div", "power", "func", "const", "coordinate",
    "sin", "cos", "exp", "log", "sqrt", "inverse_entry", "total",
    "diff", "evaluate", "substitute", "variables", "to_text",
    "parse_expr", "parse_value",
    "ExprSyntaxError", "UnknownIdentifierError", "VariableRangeError", "PathParameterError",
]
