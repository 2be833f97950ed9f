"""
Expression Parser
=================

Recursive-descent parser for the chart expression DSL:

    expr   := term (("+" | "-") term)* ;
    term   := factor (("*" | "/") factor)* ;
    factor := ("-" factor) | power ;
    power  := atom ("^" factor)? ;
    atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")" ;

Errors carry the byte offset of the offending token.
"""

import re
from dataclasses import dataclass
from typing import List, Optional

from src.expr.nodes import (
    FUNCTIONS,
    T_SLOT,
    Const,
    Expr,
    Func,
    Var,
    add,
    const,
    div,
    exp,
    func,
    log,
    mul,
    neg,
    power,
    sub,
)


class ExprSyntaxError(ValueError):
    """Malformed input; offset is a byte position in the source."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ValueError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name}")


class VariableRangeError(ValueError):
    def __init__(self, name: str, dim: int, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"variable {name} out of range for dimension {dim}")


class PathParameterError(ValueError):
    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"path parameter t not allowed here (offset {offset})")


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_COORDINATE = re.compile(r"x(\d+)")


@dataclass
class Token:
    kind: str  # number | ident | op | end
    text: str
    offset: int


def tokenize(src: str) -> List[Token]:
    tokens: List[Token] = []
    data = src.encode("utf-8")
    pos = 0
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", len(src[:pos].encode("utf-8")))
        kind = match.lastgroup
        if kind != "ws":
            offset = len(src[:pos].encode("utf-8"))
            tokens.append(Token(kind, match.group(), offset))
        pos = match.end()
    tokens.append(Token("end", "", len(data)))
    return tokens


class _Parser:

    def __init__(self, src: str, dim: int, allow_t: bool):
        self.tokens = tokenize(src)
        self.pos = 0
        self.dim = dim
        self.allow_t = allow_t

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind == "op" and self.current.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            found = self.current.text or "end of input"
            raise ExprSyntaxError(f"expected {text!r}, found {found!r}", self.current.offset)

    # --- grammar ---

    def parse(self) -> Expr:
        tree = self.expr()
        if self.current.kind != "end":
            raise ExprSyntaxError(f"unexpected {self.current.text!r}", self.current.offset)
        return tree

    def expr(self) -> Expr:
        left = self.term()
        while True:
            if self.accept("+"):
                left = add(left, self.term())
            elif self.accept("-"):
                left = sub(left, self.term())
            else:
                return left

    def term(self) -> Expr:
        left = self.factor()
        while True:
            if self.accept("*"):
                left = mul(left, self.factor())
            elif self.accept("/"):
                left = div(left, self.factor())
            else:
                return left

    def factor(self) -> Expr:
        if self.accept("-"):
            return neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current.kind == "op" and self.current.text == "^":
            offset = self.advance().offset
            exponent = self.factor()
            return _raise_to(base, exponent, offset)
        return base

    def atom(self) -> Expr:
        token = self.current
        if token.kind == "number":
            self.advance()
            return const(float(token.text))
        if token.kind == "ident":
            self.advance()
            return self.identifier(token)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        found = token.text or "end of input"
        raise ExprSyntaxError(f"unexpected {found!r}", token.offset)

    def identifier(self, token: Token) -> Expr:
        name = token.text
        if name in FUNCTIONS:
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return func(name, arg)
        if name == "t":
            if not self.allow_t:
                raise PathParameterError(token.offset)
            return Var(T_SLOT)
        match = _COORDINATE.fullmatch(name)
        if match is None:
            raise UnknownIdentifierError(name, token.offset)
        k = int(match.group(1))
        if k < 1 or k > self.dim:
            raise VariableRangeError(name, self.dim, token.offset)
        return Var(k - 1)


def _raise_to(base: Expr, exponent: Expr, offset: int) -> Expr:
    if not isinstance(exponent, Const):
        raise ExprSyntaxError("exponent must be a numeric literal", offset)
    c = exponent.value
    if c == int(c):
        return power(base, int(c))
    # exp(u)^c and sqrt(u)^c are positive, so real exponents are allowed
    if isinstance(base, Func) and base.name == "exp":
        return exp(mul(exponent, base.arg))
    if isinstance(base, Func) and base.name == "sqrt":
        return exp(mul(const(c / 2.0), log(base.arg)))
    if isinstance(base, Const) and base.value > 0:
        return const(base.value ** c)
    raise ExprSyntaxError("non-integer exponent requires a positive base", offset)


def parse_expr(src: str, dim: int, allow_t: bool = False) -> Expr:
    """
    Parse DSL text into an Expr over coordinates x1..x<dim> (and t if allowed).

    Raises:
        ExprSyntaxError, UnknownIdentifierError, VariableRangeError,
        PathParameterError
    """
    if dim < 0:
        raise ValueError("dimension must be non-negative")
    return _Parser(src, dim, allow_t).parse()


def parse_value(value, dim: int, allow_t: bool = False) -> Expr:
    """Manifest values may be numbers or expression strings."""
    if isinstance(value, bool):
        raise ExprSyntaxError("boolean is not an expression", 0)
    if isinstance(value, (int, float)):
        return const(float(value))
    if not isinstance(value, str):
        raise ExprSyntaxError(f"expected expression string, got {type(value).__name__}", 0)
    return parse_expr(value, dim, allow_t)
