"""
Expression Trees
================

Immutable scalar expressions over chart coordinates x1..xm and the path
parameter t, with exact structural differentiation and point evaluation.

Coordinates are written x1..xm in the DSL and stored 0-based: x1 is slot 0.
The path parameter lives in the distinguished slot T_SLOT.
"""

import math
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

T_SLOT = -1

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")


class EvaluationError(ArithmeticError):
    """Evaluation hit a domain error; never silently turned into NaN."""

    def __init__(self, reason: str, t: Optional[float] = None):
        self.reason = reason
        self.t = t
        message = reason if t is None else f"{reason} at t={t!r}"
        super().__init__(message)

    def at(self, t: float) -> "EvaluationError":
        """Same failure, located at path parameter t."""
        return EvaluationError(self.reason, t)


# ============================================================================
# NODES
# ============================================================================

class Expr:
    """Base node. Subclasses are immutable; equality is structural."""

    __slots__ = ("_hash", "_fn", "_uses_t")

    def _key(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self) -> str:
        return f"{type(self).__name__}({to_text(self)!r})"

    def __str__(self) -> str:
        return to_text(self)

    # --- arithmetic sugar, all routed through the folding constructors ---

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, exponent: int):
        return power(self, exponent)

    @property
    def is_zero(self) -> bool:
        return False

    @property
    def children(self) -> Tuple["Expr", ...]:
        return ()


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value: float):
        object.__setattr__(self, "value", float(value))

    def _key(self) -> tuple:
        return (self.value,)

    @property
    def is_zero(self) -> bool:
        return self.value == 0.0


class Var(Expr):
    """Coordinate slot (0-based) or T_SLOT."""

    __slots__ = ("index",)

    def __init__(self, index: int):
        object.__setattr__(self, "index", int(index))

    def _key(self) -> tuple:
        return (self.index,)


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[Expr]):
        object.__setattr__(self, "terms", tuple(terms))

    def _key(self) -> tuple:
        return self.terms

    @property
    def children(self) -> Tuple[Expr, ...]:
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: Sequence[Expr]):
        object.__setattr__(self, "factors", tuple(factors))

    def _key(self) -> tuple:
        return self.factors

    @property
    def children(self) -> Tuple[Expr, ...]:
        return self.factors


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def _key(self) -> tuple:
        return (self.num, self.den)

    @property
    def children(self) -> Tuple[Expr, ...]:
        return (self.num, self.den)


class Pow(Expr):
    """Integer powers only."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", int(exponent))

    def _key(self) -> tuple:
        return (self.base, self.exponent)

    @property
    def children(self) -> Tuple[Expr, ...]:
        return (self.base,)


class Neg(Expr):
    __slots__ = ("child",)

    def __init__(self, child: Expr):
        object.__setattr__(self, "child", child)

    def _key(self) -> tuple:
        return (self.child,)

    @property
    def children(self) -> Tuple[Expr, ...]:
        return (self.child,)


class Func(Expr):
    __slots__ = ("name", "arg")

    def __init__(self, name: str, arg: Expr):
        if name not in FUNCTIONS:
            raise ValueError(f"unknown function {name}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arg", arg)

    def _key(self) -> tuple:
        return (self.name, self.arg)

    @property
    def children(self) -> Tuple[Expr, ...]:
        return (self.arg,)


class InverseEntry(Expr):
    """Entry (i, j) of the inverse of a square Expr matrix, inverted numerically at each point."""

    __slots__ = ("rows", "i", "j")

    def __init__(self, rows: Tuple[Tuple[Expr, ...], ...], i: int, j: int):
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("inverse needs a square matrix")
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"entry ({i}, {j}) outside a {n} x {n} matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)

    def _key(self) -> tuple:
        return (self.rows, self.i, self.j)

    @property
    def children(self) -> Tuple[Expr, ...]:
        return tuple(c for row in self.rows for c in row)


ZERO = Const(0.0)
ONE = Const(1.0)


# ============================================================================
# FOLDING CONSTRUCTORS
# ============================================================================

def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    return Const(value)


def const(value: float) -> Expr:
    return Const(value)


def coordinate(k: int) -> Expr:
    """Coordinate x_k, 1-based as in the DSL."""
    return Var(k - 1)


def add(*terms: Expr) -> Expr:
    flat: List[Expr] = []
    total = 0.0
    has_const = False
    for term in terms:
        parts = term.terms if isinstance(term, Add) else (term,)
        for p in parts:
            if isinstance(p, Const):
                total += p.value
                has_const = True
            else:
                flat.append(p)
    if has_const and total != 0.0:
        flat.append(Const(total))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(flat)


def mul(*factors: Expr) -> Expr:
    flat: List[Expr] = []
    coeff = 1.0
    for factor in factors:
        parts = factor.factors if isinstance(factor, Mul) else (factor,)
        for p in parts:
            if isinstance(p, Const):
                coeff *= p.value
            else:
                flat.append(p)
    if coeff == 0.0:
        return ZERO
    if not flat:
        return Const(coeff)
    if coeff == -1.0:
        inner = flat[0] if len(flat) == 1 else Mul(flat)
        return Neg(inner)
    if coeff != 1.0:
        flat.insert(0, Const(coeff))
    if len(flat) == 1:
        return flat[0]
    return Mul(flat)


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.child
    return Neg(e)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, neg(b))


def div(num: Expr, den: Expr) -> Expr:
    if num.is_zero:
        return ZERO
    if isinstance(den, Const):
        if den.value == 1.0:
            return num
        if isinstance(num, Const) and den.value != 0.0:
            return Const(num.value / den.value)
    return Div(num, den)


def power(base: Expr, exponent: int) -> Expr:
    if int(exponent) != exponent:
        raise ValueError("Pow exponents must be integers")
    exponent = int(exponent)
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Const) and not (base.value == 0.0 and exponent < 0):
        return Const(base.value ** exponent)
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        x = arg.value
        if name == "sin":
            return Const(math.sin(x))
        if name == "cos":
            return Const(math.cos(x))
        if name == "exp" and x < 700.0:
            return Const(math.exp(x))
        if name == "log" and x > 0.0:
            return Const(math.log(x))
        if name == "sqrt" and x >= 0.0:
            return Const(math.sqrt(x))
    return Func(name, arg)


def sin(e: Expr) -> Expr:
    return func("sin", e)


def cos(e: Expr) -> Expr:
    return func("cos", e)


def exp(e: Expr) -> Expr:
    return func("exp", e)


def log(e: Expr) -> Expr:
    return func("log", e)


def sqrt(e: Expr) -> Expr:
    return func("sqrt", e)


def inverse_entry(rows: Sequence[Sequence[Expr]], i: int, j: int) -> Expr:
    """(G^-1)_{ij}; a constant matrix folds to a constant."""
    frozen = tuple(tuple(as_expr(c) for c in row) for row in rows)
    if all(isinstance(c, Const) for row in frozen for c in row):
        return Const(_inverse(tuple(tuple(c.value for c in row) for row in frozen), i, j))
    return InverseEntry(frozen, i, j)


def total(terms: Iterable[Expr]) -> Expr:
    """Sum of an iterable, folded once."""
    return add(*list(terms))


# ============================================================================
# DIFFERENTIATION
# ============================================================================

def diff(e: Expr, slot: int) -> Expr:
    """Exact partial derivative with respect to a coordinate slot or T_SLOT."""
    memo: Dict[int, Expr] = {}
    return _diff(e, slot, memo)


def _diff(e: Expr, slot: int, memo: Dict[int, Expr]) -> Expr:
    key = id(e)
    if key in memo:
        return memo[key]

    if isinstance(e, Const):
        out = ZERO
    elif isinstance(e, Var):
        out = ONE if e.index == slot else ZERO
    elif isinstance(e, Add):
        out = add(*[_diff(c, slot, memo) for c in e.terms])
    elif isinstance(e, Mul):
        terms = []
        for i, factor in enumerate(e.factors):
            d = _diff(factor, slot, memo)
            if d.is_zero:
                continue
            terms.append(mul(*e.factors[:i], d, *e.factors[i + 1:]))
        out = add(*terms)
    elif isinstance(e, Div):
        du = _diff(e.num, slot, memo)
        dv = _diff(e.den, slot, memo)
        if dv.is_zero:
            out = div(du, e.den)
        else:
            out = div(sub(mul(du, e.den), mul(e.num, dv)), power(e.den, 2))
    elif isinstance(e, Pow):
        db = _diff(e.base, slot, memo)
        out = mul(Const(e.exponent), power(e.base, e.exponent - 1), db)
    elif isinstance(e, Neg):
        out = neg(_diff(e.child, slot, memo))
    elif isinstance(e, Func):
        du = _diff(e.arg, slot, memo)
        if du.is_zero:
            out = ZERO
        elif e.name == "sin":
            out = mul(cos(e.arg), du)
        elif e.name == "cos":
            out = neg(mul(sin(e.arg), du))
        elif e.name == "exp":
            out = mul(e, du)
        elif e.name == "log":
            out = div(du, e.arg)
        else:
            out = div(du, mul(Const(2.0), e))
    elif isinstance(e, InverseEntry):
        # d(G^-1) = -G^-1 (dG) G^-1
        n = len(e.rows)
        terms = []
        for a in range(n):
            for b in range(n):
                d = _diff(e.rows[a][b], slot, memo)
                if not d.is_zero:
                    terms.append(neg(mul(InverseEntry(e.rows, e.i, a), d, InverseEntry(e.rows, b, e.j))))
        out = add(*terms)
    else:
        raise TypeError(f"cannot differentiate {type(e).__name__}")

    memo[key] = out
    return out


# ============================================================================
# SUBSTITUTION / INSPECTION
# ============================================================================

def substitute(e: Expr, mapping: Mapping[int, Expr]) -> Expr:
    """Replace variable slots by expressions, refolding on the way up."""
    memo: Dict[int, Expr] = {}

    def walk(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Const):
            out = node
        elif isinstance(node, Var):
            out = mapping.get(node.index, node)
        elif isinstance(node, Add):
            out = add(*[walk(c) for c in node.terms])
        elif isinstance(node, Mul):
            out = mul(*[walk(c) for c in node.factors])
        elif isinstance(node, Div):
            out = div(walk(node.num), walk(node.den))
        elif isinstance(node, Pow):
            out = power(walk(node.base), node.exponent)
        elif isinstance(node, Neg):
            out = neg(walk(node.child))
        elif isinstance(node, InverseEntry):
            out = inverse_entry([[walk(c) for c in row] for row in node.rows], node.i, node.j)
        else:
            out = func(node.name, walk(node.arg))
        memo[key] = out
        return out

    return walk(e)


def variables(e: Expr) -> frozenset:
    """Set of slots referenced by the tree."""
    found = set()
    stack = [e]
    seen = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            found.add(node.index)
        stack.extend(node.children)
    return frozenset(found)


# ============================================================================
# PRINTING
# ============================================================================

def _is_atomic(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value >= 0.0
    return isinstance(e, (Var, Func, InverseEntry))


def _wrap(e: Expr) -> str:
    text = to_text(e)
    return text if _is_atomic(e) else f"({text})"


def _number(value: float) -> str:
    if value < 0:
        return f"({value!r})"
    return repr(value)


def to_text(e: Expr) -> str:
    """Printable form; accepted back by the parser except for inverse entries."""
    if isinstance(e, Const):
        return _number(e.value)
    if isinstance(e, Var):
        return "t" if e.index == T_SLOT else f"x{e.index + 1}"
    if isinstance(e, Add):
        return " + ".join(_wrap(c) if isinstance(c, Add) else to_text(c) for c in e.terms)
    if isinstance(e, Mul):
        return " * ".join(_wrap(c) for c in e.factors)
    if isinstance(e, Div):
        return f"{_wrap(e.num)} / {_wrap(e.den)}"
    if isinstance(e, Pow):
        exponent = str(e.exponent) if e.exponent >= 0 else f"({e.exponent})"
        return f"{_wrap(e.base)}^{exponent}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.child)}"
    if isinstance(e, InverseEntry):
        body = "; ".join(", ".join(to_text(c) for c in row) for row in e.rows)
        return f"inverse[{e.i + 1},{e.j + 1}]({body})"
    return f"{e.name}({to_text(e.arg)})"


# ============================================================================
# EVALUATION
# ============================================================================

def _log(x: float) -> float:
    if x <= 0.0:
        raise EvaluationError("log of non-positive")
    return math.log(x)


def _sqrt(x: float) -> float:
    if x < 0.0:
        raise EvaluationError("sqrt of negative")
    return math.sqrt(x)


@lru_cache(maxsize=64)
def _inverse_matrix(rows: Tuple[Tuple[float, ...], ...]) -> np.ndarray:
    try:
        return np.linalg.inv(np.array(rows, dtype=float))
    except np.linalg.LinAlgError:
        raise EvaluationError("singular matrix") from None


def _inverse(rows: Tuple[Tuple[float, ...], ...], i: int, j: int) -> float:
    return float(_inverse_matrix(rows)[i, j])


_RUNTIME = {
    "_sin": math.sin,
    "_cos": math.cos,
    "_exp": math.exp,
    "_log": _log,
    "_sqrt": _sqrt,
    "_inverse": _inverse,
}


def _compile(e: Expr) -> Callable[[Sequence[float], Optional[float]], float]:
    """Straight-line Python code, one assignment per distinct node."""
    lines: List[str] = ["def _f(x, t):"]
    names: Dict[int, str] = {}

    def emit(node: Expr) -> str:
        key = id(node)
        if key in names:
            return names[key]
        if isinstance(node, Const):
            rhs = repr(node.value)
        elif isinstance(node, Var):
            rhs = "t" if node.index == T_SLOT else f"x[{node.index}]"
        elif isinstance(node, Add):
            rhs = " + ".join(emit(c) for c in node.terms)
        elif isinstance(node, Mul):
            rhs = " * ".join(emit(c) for c in node.factors)
        elif isinstance(node, Div):
            rhs = f"{emit(node.num)} / {emit(node.den)}"
        elif isinstance(node, Pow):
            rhs = f"{emit(node.base)} ** {node.exponent}"
        elif isinstance(node, Neg):
            rhs = f"-{emit(node.child)}"
        elif isinstance(node, InverseEntry):
            rows = ", ".join("(" + "".join(f"{emit(c)}, " for c in row) + ")" for row in node.rows)
            rhs = f"_inverse(({rows},), {node.i}, {node.j})"
        else:
            rhs = f"_{node.name}({emit(node.arg)})"
        name = f"v{len(names)}"
        names[key] = name
        lines.append(f"    {name} = {rhs}")
        return name

    result = emit(e)
    lines.append(f"    return {result}")
    namespace = dict(_RUNTIME)
    exec(compile("\n".join(lines), "<expr>", "exec"), namespace)
    return namespace["_f"]


def _compiled(e: Expr):
    try:
        return e._fn
    except AttributeError:
        fn = _compile(e)
        object.__setattr__(e, "_fn", fn)
        object.__setattr__(e, "_uses_t", T_SLOT in variables(e))
        return fn


def evaluate(e: Expr, point: Sequence[float], t: Optional[float] = None) -> float:
    """
    Evaluate at a chart point (and path parameter t when the tree uses it).

    Raises:
        EvaluationError: division by zero, log of non-positive, sqrt of
            negative, overflow, missing t, or a coordinate outside the point.
    """
    fn = _compiled(e)
    if e._uses_t and t is None:
        raise EvaluationError("path parameter t required")
    try:
        value = fn(point, t)
    except ZeroDivisionError:
        raise EvaluationError("division by zero") from None
    except OverflowError:
        raise EvaluationError("overflow") from None
    except IndexError:
        raise EvaluationError(f"point has {len(point)} coordinates") from None
    if not math.isfinite(value):
        raise EvaluationError("non-finite result")
    return value
