"""Solving structured linear systems that arise from commutator identities.

The derivation pipelines produce many equations, each linear in a handful of
unknown symbols with coefficients in a rational function field (optionally a
quadratic extension of one, handled through a ``normalize`` hook).  These
systems are nearly triangular, so a greedy strategy -- repeatedly solve the
equation with the fewest unknowns for its cheapest unknown and substitute --
resolves them without the coefficient blow-up of dense elimination.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

from .errors import DerivationFailure, Inconsistent
from .multipoly import MultiPoly
from .ratfunc import RationalFunction

Normalize = Callable[[RationalFunction], RationalFunction]


def _identity(x: RationalFunction) -> RationalFunction:
    return x


def _equation_poly(eq) -> MultiPoly:
    if isinstance(eq, RationalFunction):
        return eq.numerator
    if isinstance(eq, MultiPoly):
        return eq
    return MultiPoly.constant(eq)


def _linear_split(p: MultiPoly, unknowns: Sequence[str]) -> tuple[dict[str, MultiPoly], MultiPoly]:
    """Write p as sum(coeff[u] * u) + rest; raises if p is not linear."""
    present = [u for u in unknowns if p.uses(u)]
    coeffs: dict[str, MultiPoly] = {}
    rest = p
    for u in present:
        cs = rest.coeffs_in(u)
        if any(d > 1 for d in cs):
            raise DerivationFailure(f"equation not linear in {u}", detail=p)
        c = cs.get(1)
        if c is not None:
            c = c.align(tuple(v for v in p.variables if v != u))
            for w in unknowns:
                if c.uses(w):
                    raise DerivationFailure("product of unknowns in equation", detail=p)
            coeffs[u] = c
        rest = cs.get(0, MultiPoly(tuple(v for v in p.variables if v != u)))
    return coeffs, rest


def solve_linear_symbolic(
    equations: Iterable,
    unknowns: Sequence[str],
    normalize: Normalize | None = None,
    require_all: bool = True,
) -> dict[str, RationalFunction]:
    """Solve a linear system for the given unknown symbols.

    Returns a map unknown -> RationalFunction free of all unknowns.  Raises
    :class:`Inconsistent` when an equation reduces to a nonzero constant and
    :class:`DerivationFailure` when the system leaves unknowns undetermined
    (with ``require_all``) or contains nonlinear terms.
    """
    norm = normalize or _identity
    work: list[RationalFunction] = []
    for eq in equations:
        r = norm(RationalFunction.of(eq) if not isinstance(eq, RationalFunction) else eq)
        if not r.is_zero():
            work.append(r)
    assignments: list[tuple[str, RationalFunction]] = []
    remaining = list(unknowns)

    while work and remaining:
        best = None  # (n_unknowns, coeff_size, eq_index, unknown, coeffs, rest)
        for idx, eq in enumerate(work):
            p = eq.numerator
            coeffs, rest = _linear_split(p, remaining)
            if not coeffs:
                if not p.is_zero():
                    raise Inconsistent("equation with no unknowns is nonzero", residual=eq)
                continue
            for u, c in coeffs.items():
                size = (len(coeffs), len(c.terms), c.total_degree())
                if best is None or size < best[0]:
                    best = (size, idx, u, coeffs, rest)
        if best is None:
            break
        _, idx, u, coeffs, rest = best
        denom = RationalFunction(coeffs[u])
        numer = RationalFunction(rest)
        for v, c in coeffs.items():
            if v != u:
                numer = numer + RationalFunction(c) * RationalFunction.variable(v)
        value = norm(-numer / denom)
        assignments.append((u, value))
        remaining.remove(u)
        new_work = []
        for k, eq in enumerate(work):
            if k == idx:
                continue
            if eq.uses(u):
                eq = norm(eq.subs({u: value}))
            if not eq.is_zero():
                new_work.append(eq)
        work = new_work

    for eq in work:
        if not any(eq.uses(u) for u in remaining) and not eq.is_zero():
            raise Inconsistent("residual equation is nonzero", residual=eq)
    if remaining and require_all:
        raise DerivationFailure(f"undetermined unknowns: {remaining}")

    # back-substitute so each value is free of all unknowns
    solution: dict[str, RationalFunction] = {}
    for u, value in reversed(assignments):
        pending = {v: solution[v] for v in solution if value.uses(v)}
        if pending:
            value = norm(value.subs(pending))
        solution[u] = value
    return solution


def verify_solution(equations: Iterable, solution: dict[str, RationalFunction],
                    normalize: Normalize | None = None) -> bool:
    norm = normalize or _identity
    for eq in equations:
        r = RationalFunction.of(eq) if not isinstance(eq, RationalFunction) else eq
        r = norm(r.subs(solution))
        if not r.is_zero():
            return False
    return True


def make_quadratic_reducer(var: str, square_value: MultiPoly) -> Normalize:
    """Normalization modulo the relation var^2 = square_value.

    ``square_value`` must not involve ``var``.  Numerator and denominator are
    reduced to degree <= 1 in ``var`` and the denominator is rationalized to
    be free of ``var`` by conjugation, so the result is a canonical
    representative u + v*var with u, v honest rational functions.
    """
    if square_value.uses(var):
        raise ValueError("square value must not involve the reduced variable")

    def reduce_poly(p: MultiPoly) -> MultiPoly:
        if not p.uses(var) or p.degree_in(var) <= 1:
            return p
        p, sq = MultiPoly._common(p, square_value)
        out = MultiPoly(p.variables)
        xvar = MultiPoly.variable(var, p.variables)
        for deg, coeff in p.coeffs_in(var).items():
            c = coeff.align(p.variables)
            q, r = divmod(deg, 2)
            term = c * (sq ** q)
            if r:
                term = term * xvar
            out = out + term
        return out

    def conjugate(p: MultiPoly) -> MultiPoly:
        parts = p.coeffs_in(var)
        xvar = MultiPoly.variable(var, p.variables)
        e = parts.get(0)
        o = parts.get(1)
        even = e.align(p.variables) if e is not None else MultiPoly(p.variables)
        odd = o.align(p.variables) * xvar if o is not None else MultiPoly(p.variables)
        return even - odd

    def normalize(r: RationalFunction) -> RationalFunction:
        num = reduce_poly(r.numerator)
        den = reduce_poly(r.denominator)
        if den.uses(var):
            conj = conjugate(den)
            num = reduce_poly(num * conj)
            den = reduce_poly(den * conj)
            if den.uses(var):
                raise DerivationFailure("rationalization failed", detail=r)
        if den.is_zero():
            raise DerivationFailure("denominator vanishes modulo the relation", detail=r)
        return RationalFunction(num, den)

    return normalize
