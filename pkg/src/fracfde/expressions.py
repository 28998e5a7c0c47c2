"""Tiny arithmetic-expression compiler for user-supplied kernels.

Grammar: +, -, *, /, ** (or ^), unary minus, parentheses, numeric
literals, the functions exp/log/sin/cos, and a caller-declared variable
set (t, s, u1, u2 depending on context). Expressions are parsed with the
ast module and every node is checked against a whitelist, so nothing
outside the grammar can execute. Compiled callables broadcast over numpy
arrays.
"""

from __future__ import annotations

import ast

import numpy as np

from .errors import ConfigError

_ALLOWED_FUNCS = {
    "exp": np.exp,
    "log": np.log,
    "sin": np.sin,
    "cos": np.cos,
}

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
_ALLOWED_UNARY = (ast.UAdd, ast.USub)


def _check(node: ast.AST, variables: frozenset, source: str):
    if isinstance(node, ast.Expression):
        _check(node.body, variables, source)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise ConfigError(f"operator not allowed in {source!r}")
        _check(node.left, variables, source)
        _check(node.right, variables, source)
    elif isinstance(node, ast.UnaryOp):
        if not isinstance(node.op, _ALLOWED_UNARY):
            raise ConfigError(f"unary operator not allowed in {source!r}")
        _check(node.operand, variables, source)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS:
            raise ConfigError(
                f"only {sorted(_ALLOWED_FUNCS)} may be called in {source!r}"
            )
        if node.keywords or len(node.args) != 1:
            raise ConfigError(f"functions take one positional argument in {source!r}")
        _check(node.args[0], variables, source)
    elif isinstance(node, ast.Name):
        if node.id not in variables:
            raise ConfigError(
                f"unknown variable {node.id!r} in {source!r}; "
                f"allowed: {sorted(variables)}"
            )
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)):
            raise ConfigError(f"only numeric literals allowed in {source!r}")
    else:
        raise ConfigError(
            f"syntax element {type(node).__name__} not allowed in {source!r}"
        )


def compile_expression(source: str, variables: tuple):
    """Compile an expression string to a vectorized callable.

    `variables` fixes both the allowed names and the call signature.
    """
    text = source.replace("^", "**")
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse expression {source!r}: {exc.msg}") from None
    varset = frozenset(variables)
    _check(tree, varset, source)
    code = compile(tree, f"<expression {source!r}>", "eval")
    namespace = dict(_ALLOWED_FUNCS)

    def func(*args):
        if len(args) != len(variables):
            raise TypeError(
                f"expression {source!r} takes {len(variables)} arguments "
                f"({', '.join(variables)}), got {len(args)}"
            )
        scope = dict(namespace)
        scope.update(zip(variables, args))
        return eval(code, {"__builtins__": {}}, scope)

    func.__name__ = "expr_" + "_".join(variables)
    func.expression = source
    func.variables = variables
    return func
