"""Rational functions: quotients of :class:`MultiPoly` values.

Equality is decided by cross-multiplication, so the reduction performed by
the constructor is an optimization, not a correctness requirement.  The
reduction pipeline cancels the largest common monomial, absorbs constant
denominators, tries exact division both ways, and (for moderate sizes)
removes the full multivariate gcd computed by a primitive polynomial
remainder sequence.  Denominators are normalized to leading coefficient 1.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

from .errors import DivisionByZero
from .gaussian import GaussianRational
from .multipoly import MultiPoly, Scalar

# gcd extraction is abandoned beyond this work budget; cross multiplication
# keeps equality exact either way, so the reduction is purely cosmetic
_GCD_TERM_LIMIT = 400
_GCD_DEFAULT_BUDGET = 3000


class _GcdBudgetExceeded(Exception):
    pass


class _Budget:
    __slots__ = ("left",)

    def __init__(self, amount: int):
        self.left = amount

    def spend(self, cost: int = 1) -> None:
        self.left -= cost
        if self.left < 0:
            raise _GcdBudgetExceeded


PolyLike = Union[MultiPoly, int, Fraction, GaussianRational]


def _as_poly(value: PolyLike) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    return MultiPoly.constant(value)


def poly_content_gcd(p: MultiPoly, q: MultiPoly, budget: "_Budget | None" = None) -> MultiPoly:
    """Multivariate gcd over Q(i) by primitive remainder sequences.

    The result is defined up to a scalar; it is returned with leading
    coefficient 1.  A work budget caps the remainder-sequence effort; when
    exhausted the computation raises internally and callers fall back to
    the unreduced representation.
    """
    if budget is None:
        budget = _Budget(_GCD_DEFAULT_BUDGET)
    p, q = MultiPoly._common(p, q)
    if p.is_zero():
        return _monic(q)
    if q.is_zero():
        return _monic(p)
    if p.is_constant() or q.is_constant():
        return MultiPoly.constant(1, p.variables)
    shared = [v for v in p.variables if p.uses(v) and q.uses(v)]
    if not shared:
        return MultiPoly.constant(1, p.variables)
    var = min(shared, key=lambda v: min(p.degree_in(v), q.degree_in(v)))
    a, b = p, q
    if a.degree_in(var) < b.degree_in(var):
        a, b = b, a
    cont_a, prim_a = _content_primitive(a, var, budget)
    cont_b, prim_b = _content_primitive(b, var, budget)
    cont = poly_content_gcd(cont_a, cont_b, budget)
    a, b = prim_a, prim_b
    while not b.is_zero() and b.degree_in(var) > 0:
        budget.spend(len(a.terms) + len(b.terms))
        r = _pseudo_rem(a, b, var, budget)
        if r.is_zero():
            a, b = b, r
            break
        _, r = _content_primitive(r, var, budget)
        a, b = b, r
    if b.is_zero():
        gcd_prim = a
    else:
        # remainder dropped to degree 0 in var: primitive parts are coprime
        gcd_prim = MultiPoly.constant(1, p.variables)
    return _monic(cont * gcd_prim)


def _monic(p: MultiPoly) -> MultiPoly:
    if p.is_zero():
        return p
    lead = p.leading_coefficient()
    if lead == GaussianRational(1):
        return p
    return p * lead.inverse()


def _content_primitive(p: MultiPoly, var: str, budget: "_Budget") -> tuple[MultiPoly, MultiPoly]:
    coeffs = list(p.coeffs_in(var).values())
    content = coeffs[0]
    for c in coeffs[1:]:
        if content.is_constant():
            break
        content = poly_content_gcd(content, c, budget)
    content = _monic(content.align(p.variables))
    if content.is_constant():
        return MultiPoly.constant(1, p.variables), p
    return content, p.exact_div(content)


def _pseudo_rem(a: MultiPoly, b: MultiPoly, var: str, budget: "_Budget") -> MultiPoly:
    """Pseudo-remainder of a by b in the main variable ``var``."""
    da, db = a.degree_in(var), b.degree_in(var)
    if da < db:
        return a
    b_parts = b.coeffs_in(var)
    b_lead = b_parts[db].align(a.variables)
    x = MultiPoly.variable(var, a.variables)
    r = a
    while not r.is_zero():
        dr = r.degree_in(var)
        if dr < db:
            break
        budget.spend(len(r.terms))
        r_lead = r.coeffs_in(var)[dr].align(a.variables)
        r = b_lead * r - (x ** (dr - db)) * r_lead * b
    return r


class RationalFunction:
    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: PolyLike, denominator: PolyLike = 1, reduce: bool = True):
        num = _as_poly(numerator)
        den = _as_poly(denominator)
        num, den = MultiPoly._common(num, den)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if reduce:
            num, den = _reduce_pair(num, den)
        self.numerator = num
        self.denominator = den

    # -- constructors -------------------------------------------------------

    @staticmethod
    def of(value: "RationalFunction | PolyLike") -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        return RationalFunction(value)

    @staticmethod
    def variable(name: str) -> "RationalFunction":
        return RationalFunction(MultiPoly.variable(name))

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __bool__(self) -> bool:
        return bool(self.numerator)

    def is_polynomial(self) -> bool:
        return self.denominator.is_constant()

    def as_poly(self) -> MultiPoly:
        if not self.is_polynomial():
            raise ValueError(f"not a polynomial: {self}")
        return self.numerator * self.denominator.constant_value().inverse()

    @property
    def variables(self) -> tuple[str, ...]:
        return self.numerator.variables

    def uses(self, var: str) -> bool:
        return self.numerator.uses(var) or self.denominator.uses(var)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other) -> "RationalFunction":
        o = RationalFunction.of(other)
        if self.denominator == o.denominator:
            return RationalFunction(self.numerator + o.numerator, self.denominator)
        return RationalFunction(
            self.numerator * o.denominator + o.numerator * self.denominator,
            self.denominator * o.denominator,
        )

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.numerator, self.denominator, reduce=False)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-RationalFunction.of(other))

    def __rsub__(self, other) -> "RationalFunction":
        return (-self) + other

    def __mul__(self, other) -> "RationalFunction":
        o = RationalFunction.of(other)
        return RationalFunction(self.numerator * o.numerator, self.denominator * o.denominator)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RationalFunction(self.denominator, self.numerator)

    def __truediv__(self, other) -> "RationalFunction":
        return self * RationalFunction.of(other).inverse()

    def __rtruediv__(self, other) -> "RationalFunction":
        return RationalFunction.of(other) * self.inverse()

    def __pow__(self, n: int) -> "RationalFunction":
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.numerator ** n, self.denominator ** n, reduce=False)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational, MultiPoly)):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (self.numerator * other.denominator) == (other.numerator * self.denominator)

    __hash__ = None

    # -- calculus, substitution, evaluation --------------------------------------

    def derivative(self, var: str) -> "RationalFunction":
        n, d = self.numerator, self.denominator
        if not d.uses(var):
            return RationalFunction(n.derivative(var), d)
        return RationalFunction(
            n.derivative(var) * d - n * d.derivative(var),
            d * d,
        )

    def subs(self, assignment: Mapping[str, "RationalFunction | PolyLike"]) -> "RationalFunction":
        """Substitute rational functions for variables."""
        poly_only = {}
        rf_subs = {}
        for v, val in assignment.items():
            if not self.uses(v):
                continue
            r = RationalFunction.of(val)
            if r.is_polynomial():
                poly_only[v] = r.as_poly()
            else:
                rf_subs[v] = r
        num, den = self.numerator, self.denominator
        if poly_only:
            num = num.subs(poly_only)
            den = den.subs(poly_only)
        if not rf_subs:
            return RationalFunction(num, den)
        # clear each rational substitution by multiplying through
        result_num = _subs_cleared(num, rf_subs)
        result_den = _subs_cleared(den, rf_subs)
        # both are (poly, denom-power-product) pairs over a shared basis
        (n_poly, n_extra), (d_poly, d_extra) = result_num, result_den
        return RationalFunction(n_poly * d_extra, d_poly * n_extra)

    def eval_exact(self, assignment: Mapping[str, Scalar]) -> GaussianRational:
        den = self.denominator.eval_exact(assignment)
        if not den:
            raise DivisionByZero("denominator vanishes at the evaluation point")
        return self.numerator.eval_exact(assignment) / den

    def eval_complex(self, assignment: Mapping[str, complex]) -> complex:
        return self.numerator.eval_complex(assignment) / self.denominator.eval_complex(assignment)

    def __str__(self) -> str:
        if self.denominator == MultiPoly.constant(1, self.denominator.variables):
            return str(self.numerator)
        return f"({self.numerator}) / ({self.denominator})"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def _subs_cleared(p: MultiPoly, rf_subs: Mapping[str, RationalFunction]) -> tuple[MultiPoly, MultiPoly]:
    """Substitute rational values into a polynomial, returning num/den."""
    max_deg = {v: p.degree_in(v) if p.uses(v) else 0 for v in rf_subs}
    den = MultiPoly.constant(1)
    for v, r in rf_subs.items():
        den = den * (r.denominator ** max_deg[v])
    # replace v by numerator(v) and multiply each term by the missing
    # denominator powers
    num = MultiPoly.constant(0)
    universe = list(p.variables)
    for r in rf_subs.values():
        for w in r.numerator.variables:
            if w not in universe:
                universe.append(w)
        for w in r.denominator.variables:
            if w not in universe:
                universe.append(w)
    u = tuple(universe)
    for exp, coeff in p.terms.items():
        term = MultiPoly.constant(coeff, u)
        for v, e in zip(p.variables, exp):
            r = rf_subs.get(v)
            if r is None:
                if e:
                    term = term * (MultiPoly.variable(v, u) ** e)
                continue
            if e:
                term = term * (r.numerator.align(u) ** e)
            if max_deg[v] > e:
                term = term * (r.denominator.align(u) ** (max_deg[v] - e))
        num = num + term
    return num, den


def _reduce_pair(num: MultiPoly, den: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    if num.is_zero():
        return num, MultiPoly.constant(1, den.variables)
    # common monomial factor
    shift = tuple(min(a, b) for a, b in zip(num.monomial_gcd(), den.monomial_gcd()))
    if any(shift):
        num = num.shift_down(shift)
        den = den.shift_down(shift)
    if den.is_constant():
        return num * den.constant_value().inverse(), MultiPoly.constant(1, den.variables)
    try:
        q = num.exact_div(den)
        return q, MultiPoly.constant(1, den.variables)
    except ValueError:
        pass
    if len(num.terms) + len(den.terms) <= _GCD_TERM_LIMIT:
        try:
            g = poly_content_gcd(num, den)
        except _GcdBudgetExceeded:
            g = None
        if g is not None and not g.is_constant():
            num = num.exact_div(g)
            den = den.exact_div(g)
            if den.is_constant():
                return num * den.constant_value().inverse(), MultiPoly.constant(1, den.variables)
    lead = den.leading_coefficient()
    if lead != GaussianRational(1):
        inv = lead.inverse()
        num = num * inv
        den = den * inv
    return num, den


def rf(value: PolyLike) -> RationalFunction:
    return RationalFunction.of(value)
