"""Tiny arithmetic grammar for potentials given on the command line.

Accepted: numeric literals, the variable x, + - * /, powers (both ** and ^),
and the functions sin, cos, exp.  Anything else — other symbols, other
functions — is rejected by a whitelist walk over the parsed tree, so the
grammar is closed even though sympy's parser knows far more.  V' is obtained
symbolically; when no smoothness level is supplied, beta is the sampled
maximum of |V''| over a wide window (floored at 1e-8), which suffices for the
spot checks since they probe a narrower range.
"""

from __future__ import annotations

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .fokker_planck import Potential1D

__all__ = ["parse_potential", "PotentialSyntaxError"]

_X = sympy.Symbol("x")
_TRANSFORMS = standard_transformations + (convert_xor,)
_ALLOWED_FUNCS = (sympy.sin, sympy.cos, sympy.exp)
_BETA_FLOOR = 1e-8


class PotentialSyntaxError(ValueError):
    pass


def parse_potential(text: str, beta: float | None = None,
                    sample_halfwidth: float = 20.0) -> Potential1D:
    """Build a Potential1D from an expression like "x^2/2 + 0.1*sin(x)".

    beta overrides the sampled |V''| bound when given (e.g. when the exact
    smoothness level is known analytically).
    """
    try:
        expr = parse_expr(
            text,
            local_dict={"x": _X, "sin": sympy.sin, "cos": sympy.cos, "exp": sympy.exp},
            transformations=_TRANSFORMS,
        )
    except Exception as exc:
        raise PotentialSyntaxError(f"could not parse potential {text!r}: {exc}") from None
    _validate(expr, text)
    d1 = sympy.diff(expr, _X)
    if beta is None:
        beta = _sampled_beta(sympy.diff(d1, _X), text, sample_halfwidth)
    return Potential1D(_as_callable(expr), _as_callable(d1), float(beta))


def _validate(expr, text: str) -> None:
    for node in sympy.preorder_traversal(expr):
        if node is sympy.S.Zero or isinstance(node, (sympy.Integer, sympy.Rational, sympy.Float)):
            continue
        if node == _X:
            continue
        if isinstance(node, (sympy.Add, sympy.Mul, sympy.Pow)):
            continue
        if isinstance(node, _ALLOWED_FUNCS):
            continue
        raise PotentialSyntaxError(
            f"potential {text!r} uses {node!r}, outside the grammar "
            "(numbers, x, + - * /, powers, sin, cos, exp)"
        )


def _as_callable(expr):
    f = sympy.lambdify(_X, expr, modules="numpy")

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.asarray(f(x), dtype=float)
        if out.shape != x.shape:  # lambdified constants return scalars
            out = np.broadcast_to(out, x.shape).copy()
        return out

    return g


def _sampled_beta(d2, text: str, halfwidth: float) -> float:
    xs = np.linspace(-halfwidth, halfwidth, 8001)
    with np.errstate(all="ignore"):  # probing extremes; non-finite handled below
        vals = np.abs(_as_callable(d2)(xs))
    peak = float(vals.max())
    if not np.isfinite(peak):
        raise PotentialSyntaxError(
            f"|V''| of {text!r} overflows on [-{halfwidth}, {halfwidth}]; pass beta explicitly"
        )
    return max(peak, _BETA_FLOOR)
