"""Compile exact expressions into fast complex-arithmetic callables.

The numeric experiments evaluate flow fields and connection matrices tens of
thousands of times; evaluating sparse-polynomial dictionaries directly is
exact but slow.  This module renders a :class:`MultiPoly` or
:class:`RationalFunction` into Python source once and compiles it, after
substituting any fixed parameter values.
"""

from __future__ import annotations

from typing import Callable, Mapping, Sequence

from .multipoly import MultiPoly
from .ratfunc import RationalFunction


def _poly_source(p: MultiPoly, names: Mapping[str, str]) -> str:
    if not p.terms:
        return "0j"
    chunks = []
    for exp, coeff in p.sorted_terms():
        factors = [repr(coeff.to_complex())]
        for v, e in zip(p.variables, exp):
            if e == 1:
                factors.append(names[v])
            elif e > 1:
                factors.append(f"{names[v]}**{e}")
        chunks.append("*".join(factors))
    return "(" + " + ".join(chunks) + ")"


def compile_expr(expr: RationalFunction | MultiPoly, arg_order: Sequence[str]) -> Callable[..., complex]:
    """Compile into f(*args) -> complex with positional arguments ``arg_order``."""
    names = {v: f"_x{i}" for i, v in enumerate(arg_order)}
    if isinstance(expr, MultiPoly):
        used = [v for v in expr.variables if expr.uses(v)]
    else:
        used = [v for v in expr.variables if expr.uses(v)]
    missing = [v for v in used if v not in names]
    if missing:
        raise ValueError(f"expression uses unbound variables {missing}")
    args = ", ".join(names[v] for v in arg_order)
    if isinstance(expr, MultiPoly):
        body = _poly_source(expr, names)
    else:
        body = f"({_poly_source(expr.numerator, names)}) / ({_poly_source(expr.denominator, names)})"
    source = f"def _compiled({args}):\n    return {body}\n"
    scope: dict = {}
    exec(source, {}, scope)
    return scope["_compiled"]
