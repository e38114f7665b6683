"""Small safe expression compiler for problem definitions.

Problem files describe coefficients, right-hand sides, integral kernels and
exact solutions as plain text over a fixed function vocabulary.  The text is
parsed with `ast`, checked against a whitelist, and compiled to an ordinary
Python function of the declared variables.  Nothing outside the whitelist
(attribute access, subscripts, names other than the declared variables) is
accepted.
"""

from __future__ import annotations

import ast
import math

from .errors import ParseError

__all__ = ["compile_expression", "FUNCTIONS"]


def _sec(x: float) -> float:
    return 1.0 / math.cos(x)


FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "sec": _sec,
    "exp": math.exp,
    "sqrt": math.sqrt,
    "pow": math.pow,
    "gamma": math.gamma,
}

_CONSTANTS = {"pi": math.pi, "e": math.e}

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.USub, ast.UAdd)


def _check(node: ast.AST, variables: tuple, text: str) -> None:
    if isinstance(node, ast.Expression):
        _check(node.body, variables, text)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise ParseError(f"operator not allowed in {text!r}")
        _check(node.left, variables, text)
        _check(node.right, variables, text)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise ParseError(f"operator not allowed in {text!r}")
        _check(node.operand, variables, text)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in FUNCTIONS:
            raise ParseError(f"unknown function in {text!r}")
        if node.keywords:
            raise ParseError(f"keyword arguments not allowed in {text!r}")
        for arg in node.args:
            _check(arg, variables, text)
    elif isinstance(node, ast.Name):
        if node.id not in variables and node.id not in _CONSTANTS:
            raise ParseError(
                f"unknown name {node.id!r} in {text!r} (variables: {', '.join(variables)})"
            )
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ParseError(f"non-numeric literal in {text!r}")
    else:
        raise ParseError(f"unsupported syntax ({type(node).__name__}) in {text!r}")


def compile_expression(text: str, variables: tuple):
    """Compile `text` to a function of the named `variables`.

    Raises ParseError for syntax errors, unknown names, or any construct
    outside the arithmetic/function whitelist.
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError(f"expected an expression string, got {text!r}")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as err:
        raise ParseError(f"syntax error in {text!r} at column {err.offset}") from err
    _check(tree, variables, text)
    code = compile(tree, "<expression>", "eval")
    namespace = {"__builtins__": {}} | FUNCTIONS | _CONSTANTS

    def fn(*args):
        local = dict(zip(variables, args))
        return float(eval(code, namespace, local))

    fn.__name__ = f"expr[{text}]"
    return fn
