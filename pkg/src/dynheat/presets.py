"""Named truth sources, presets of the three numerical examples, and config expressions.

Coefficient fields in a config file are written either as a number, as a
named source, as an arithmetic expression in ``x`` (and ``t`` for the time
modulation), or as ``table:<path>`` pointing to an ``x,value`` CSV that is
linearly interpolated onto the grid.
"""
import ast
import operator

import numpy as np

from .fields import read_space_csv

__all__ = ["NAMED_SOURCES", "EXAMPLES", "compile_field"]

NAMED_SOURCES = {
    "zero": lambda x: np.zeros_like(x),
    "parabolic": lambda x: x * (1.0 - x),
    "sine": lambda x: np.sin(np.pi * x),
    "gaussian": lambda x: np.exp(-8.0 * (x - 0.5) ** 2),
}

# Examples 1-3 of the numerical section: f0 = 0, eps = e_J
EXAMPLES = {
    1: {"source": "parabolic", "epsilon": 1e-6, "e_J": 1e-6, "p": (0.01, 0.03, 0.05)},
    2: {"source": "sine", "epsilon": 1e-8, "e_J": 1e-8, "p": (0.01, 0.03, 0.05)},
    3: {"source": "gaussian", "epsilon": 1e-8, "e_J": 1e-8, "p": (0.0, 0.01, 0.03, 0.05)},
}

_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "log": np.log,
    "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh, "sinh": np.sinh, "cosh": np.cosh,
}
_CONSTS = {"pi": np.pi, "e": np.e}
_BINOPS = {
    ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
    ast.Div: operator.truediv, ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTS:
            return _CONSTS[node.id]
        raise ValueError(f"unknown name {node.id!r} in expression")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
        return _UNARY[type(node.op)](_eval(node.operand, env))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        if len(node.args) != 1 or node.keywords:
            raise ValueError(f"{node.func.id} takes exactly one argument")
        return _FUNCS[node.func.id](_eval(node.args[0], env))
    raise ValueError(f"unsupported expression element: {ast.dump(node)}")


def compile_field(expr, variables=("x",)):
    """Turn a field expression into a float or a callable of ``variables``.

    >>> compile_field("2.5")
    2.5
    >>> compile_field("parabolic")(np.array([0.5]))
    array([0.25])
    """
    text = str(expr).strip()
    try:
        return float(text)
    except ValueError:
        pass
    if text in NAMED_SOURCES:
        named = NAMED_SOURCES[text]
        if variables == ("x",):
            return named
        return lambda *args: named(args[variables.index("x")])
    if text.startswith("table:"):
        xs, vals = read_space_csv(text[len("table:"):])
        order = np.argsort(xs)
        xs, vals = xs[order], vals[order]
        return lambda *args: np.interp(args[variables.index("x")], xs, vals)
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse field expression {text!r}: {exc}") from None

    def fn(*args):
        out = _eval(tree, dict(zip(variables, args)))
        ref = args[variables.index("x")] if "x" in variables else args[0]
        return np.broadcast_to(out, np.shape(ref)).astype(float)

    fn(*[np.zeros(1) for _ in variables])  # fail fast on unknown names
    return fn
