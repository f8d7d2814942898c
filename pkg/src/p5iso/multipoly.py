"""Sparse multivariate polynomials over Q(i).

A polynomial carries an ordered tuple of variable names and a mapping from
exponent vectors (one integer per variable) to nonzero
:class:`~p5iso.gaussian.GaussianRational` coefficients:

    3/2*a0^2*t - i*b0   ->   variables ("a0", "b0", "t"),
                             {(2, 0, 1): 3/2, (0, 1, 0): -i}

Zero coefficients are never stored, so two polynomials over the same
variable list are equal iff their term maps are equal.  Binary operations
align variable lists automatically (union, left-to-right order), which keeps
client code free of bookkeeping while preserving determinism.

Terms are ordered graded-lexicographically; serialization follows that
order, and ``parse_poly(str(p), p.variables)`` is the identity.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Union

from .errors import DivisionByZero, UnknownSymbol
from .gaussian import GaussianRational, gauss, parse_gaussian

Scalar = Union[int, Fraction, GaussianRational]


def _to_coeff(value: Scalar) -> GaussianRational:
    return value if isinstance(value, GaussianRational) else GaussianRational(value)


class MultiPoly:
    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[tuple, GaussianRational] | None = None):
        self.variables: tuple[str, ...] = tuple(variables)
        self.terms: dict[tuple, GaussianRational] = {}
        if terms:
            n = len(self.variables)
            for exp, coeff in terms.items():
                c = _to_coeff(coeff)
                if not c:
                    continue
                if len(exp) != n:
                    raise ValueError("exponent length does not match variable list")
                self.terms[tuple(exp)] = c

    # -- constructors --------------------------------------------------

    @staticmethod
    def constant(value: Scalar, variables: Iterable[str] = ()) -> "MultiPoly":
        variables = tuple(variables)
        c = _to_coeff(value)
        if not c:
            return MultiPoly(variables)
        return MultiPoly(variables, {(0,) * len(variables): c})

    @staticmethod
    def variable(name: str, variables: Iterable[str] | None = None) -> "MultiPoly":
        universe = (name,) if variables is None else tuple(variables)
        if name not in universe:
            raise UnknownSymbol(f"{name!r} not in variable list {universe}")
        exp = tuple(1 if v == name else 0 for v in universe)
        return MultiPoly(universe, {exp: GaussianRational(1)})

    # -- basic queries --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(exp) for exp in self.terms)

    def constant_value(self) -> GaussianRational:
        """The coefficient of the constant monomial (poly must be constant)."""
        if not self.terms:
            return GaussianRational(0)
        if not self.is_constant():
            raise ValueError(f"not a constant polynomial: {self}")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(exp) for exp in self.terms)

    def degree_in(self, var: str) -> int:
        if not self.terms:
            return -1
        i = self._index(var)
        return max(exp[i] for exp in self.terms)

    def _index(self, var: str) -> int:
        try:
            return self.variables.index(var)
        except ValueError:
            raise UnknownSymbol(f"{var!r} not in variable list {self.variables}") from None

    def uses(self, var: str) -> bool:
        if var not in self.variables:
            return False
        i = self.variables.index(var)
        return any(exp[i] for exp in self.terms)

    # -- universe alignment ----------------------------------------------

    def align(self, variables: Iterable[str]) -> "MultiPoly":
        """Re-express over a larger variable list (superset, any order)."""
        target = tuple(variables)
        if target == self.variables:
            return self
        pos = {v: k for k, v in enumerate(target)}
        try:
            remap = [pos[v] for v in self.variables]
        except KeyError as e:
            raise UnknownSymbol(f"target list is missing variable {e}") from None
        n = len(target)
        terms = {}
        for exp, coeff in self.terms.items():
            new_exp = [0] * n
            for old_i, e in enumerate(exp):
                if e:
                    new_exp[remap[old_i]] = e
            terms[tuple(new_exp)] = coeff
        return MultiPoly(target, terms)

    @staticmethod
    def _common(a: "MultiPoly", b: "MultiPoly") -> tuple["MultiPoly", "MultiPoly"]:
        if a.variables == b.variables:
            return a, b
        merged = list(a.variables)
        seen = set(merged)
        for v in b.variables:
            if v not in seen:
                merged.append(v)
                seen.add(v)
        u = tuple(merged)
        return a.align(u), b.align(u)

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = MultiPoly.constant(other, self.variables)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly._common(self, other)
        terms = dict(a.terms)
        for exp, coeff in b.terms.items():
            s = terms.get(exp)
            if s is None:
                terms[exp] = coeff
            else:
                s = s + coeff
                if s:
                    terms[exp] = s
                else:
                    del terms[exp]
        out = MultiPoly(a.variables)
        out.terms = terms
        return out

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        out = MultiPoly(self.variables)
        out.terms = {exp: -c for exp, c in self.terms.items()}
        return out

    def __sub__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = MultiPoly.constant(other, self.variables)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Fraction, GaussianRational)):
            c = _to_coeff(other)
            out = MultiPoly(self.variables)
            if c:
                out.terms = {exp: coeff * c for exp, coeff in self.terms.items()}
            return out
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly._common(self, other)
        terms: dict[tuple, GaussianRational] = {}
        for exp_a, ca in a.terms.items():
            for exp_b, cb in b.terms.items():
                exp = tuple(x + y for x, y in zip(exp_a, exp_b))
                c = ca * cb
                s = terms.get(exp)
                if s is None:
                    terms[exp] = c
                else:
                    s = s + c
                    if s:
                        terms[exp] = s
                    else:
                        del terms[exp]
        out = MultiPoly(a.variables)
        out.terms = terms
        return out

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.constant(1, self.variables)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = MultiPoly.constant(other, self.variables)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b = MultiPoly._common(self, other)
        return a.terms == b.terms

    __hash__ = None

    # -- calculus and substitution -----------------------------------------

    def derivative(self, var: str) -> "MultiPoly":
        """Formal partial derivative with respect to ``var``."""
        i = self._index(var)
        terms = {}
        for exp, coeff in self.terms.items():
            e = exp[i]
            if not e:
                continue
            new_exp = exp[:i] + (e - 1,) + exp[i + 1:]
            c = coeff * e
            s = terms.get(new_exp)
            terms[new_exp] = c if s is None else s + c
        out = MultiPoly(self.variables)
        out.terms = {e: c for e, c in terms.items() if c}
        return out

    def coeffs_in(self, var: str) -> dict[int, "MultiPoly"]:
        """Split into coefficients of powers of ``var`` (var removed)."""
        i = self._index(var)
        rest = self.variables[:i] + self.variables[i + 1:]
        buckets: dict[int, dict[tuple, GaussianRational]] = {}
        for exp, coeff in self.terms.items():
            reduced = exp[:i] + exp[i + 1:]
            buckets.setdefault(exp[i], {})[reduced] = coeff
        return {deg: MultiPoly(rest, terms) for deg, terms in buckets.items()}

    def coefficient(self, var: str, degree: int) -> "MultiPoly":
        return self.coeffs_in(var).get(degree, MultiPoly(tuple(v for v in self.variables if v != var)))

    def subs(self, assignment: Mapping[str, "MultiPoly | Scalar"]) -> "MultiPoly":
        """Substitute polynomials (or scalars) for variables.

        Variables absent from ``assignment`` are kept.  The result lives over
        the union of the remaining variables and those of the substituted
        values.
        """
        relevant = {v: val for v, val in assignment.items() if self.uses(v)}
        if not relevant:
            return self
        kept = tuple(v for v in self.variables if v not in relevant)
        universe = list(kept)
        seen = set(universe)
        values: dict[str, MultiPoly] = {}
        for v, val in relevant.items():
            p = val if isinstance(val, MultiPoly) else MultiPoly.constant(val)
            values[v] = p
            for w in p.variables:
                if w not in seen:
                    universe.append(w)
                    seen.add(w)
        u = tuple(universe)
        result = MultiPoly(u)
        power_cache: dict[tuple[str, int], MultiPoly] = {}

        def var_power(v: str, e: int) -> MultiPoly:
            key = (v, e)
            got = power_cache.get(key)
            if got is None:
                got = values[v].align(u) ** e
                power_cache[key] = got
            return got

        kept_index = [self.variables.index(v) for v in kept]
        sub_index = [(k, v) for k, v in enumerate(self.variables) if v in relevant]
        for exp, coeff in self.terms.items():
            base_exp = [0] * len(u)
            for j, i in enumerate(kept_index):
                base_exp[j] = exp[i]
            term = MultiPoly(u, {tuple(base_exp): coeff})
            for i, v in sub_index:
                if exp[i]:
                    term = term * var_power(v, exp[i])
            result = result + term
        return result

    def eval_exact(self, assignment: Mapping[str, Scalar]) -> GaussianRational:
        """Evaluate with every variable assigned an exact scalar."""
        total = GaussianRational(0)
        values = [ _to_coeff(assignment[v]) if v in assignment else None for v in self.variables ]
        for v, val in zip(self.variables, values):
            if val is None and self.uses(v):
                raise UnknownSymbol(f"no value for {v!r}")
        for exp, coeff in self.terms.items():
            c = coeff
            for val, e in zip(values, exp):
                if e:
                    c = c * (val ** e)
            total = total + c
        return total

    def eval_complex(self, assignment: Mapping[str, complex]) -> complex:
        total = 0j
        idx = [assignment.get(v) for v in self.variables]
        for exp, coeff in self.terms.items():
            c = coeff.to_complex()
            for val, e in zip(idx, exp):
                if e:
                    if val is None:
                        raise UnknownSymbol("missing numeric value")
                    c *= val ** e
            total += c
        return total

    # -- term order, division, content ------------------------------------

    def sorted_terms(self) -> list[tuple[tuple, GaussianRational]]:
        """Terms in graded-lexicographic order, largest first."""
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True)

    def leading_term(self) -> tuple[tuple, GaussianRational]:
        if not self.terms:
            raise DivisionByZero("leading term of the zero polynomial")
        return max(self.terms.items(), key=lambda item: (sum(item[0]), item[0]))

    def leading_coefficient(self) -> GaussianRational:
        return self.leading_term()[1]

    def exact_div(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact polynomial division; raises ValueError if not divisible."""
        a, d = MultiPoly._common(self, divisor)
        if d.is_zero():
            raise DivisionByZero("division by the zero polynomial")
        if d.is_constant():
            return a * d.constant_value().inverse()
        quotient = MultiPoly(a.variables)
        remainder = a
        d_exp, d_coeff = d.leading_term()
        d_inv = d_coeff.inverse()
        while remainder.terms:
            r_exp, r_coeff = remainder.leading_term()
            q_exp = tuple(x - y for x, y in zip(r_exp, d_exp))
            if any(e < 0 for e in q_exp):
                raise ValueError("not exactly divisible")
            q_term = MultiPoly(a.variables, {q_exp: r_coeff * d_inv})
            quotient = quotient + q_term
            remainder = remainder - q_term * d
        return quotient

    def divides(self, other: "MultiPoly") -> bool:
        try:
            other.exact_div(self)
            return True
        except (ValueError, DivisionByZero):
            return False

    def monomial_gcd(self) -> tuple:
        """Componentwise minimum exponent vector over all terms."""
        if not self.terms:
            return (0,) * len(self.variables)
        mins = None
        for exp in self.terms:
            if mins is None:
                mins = list(exp)
            else:
                mins = [min(a, b) for a, b in zip(mins, exp)]
            if not any(mins):
                break
        return tuple(mins)

    def shift_down(self, shift: tuple) -> "MultiPoly":
        """Divide by the monomial with exponent vector ``shift``."""
        if not any(shift):
            return self
        out = MultiPoly(self.variables)
        out.terms = {tuple(x - y for x, y in zip(exp, shift)): c for exp, c in self.terms.items()}
        return out

    def map_coefficients(self, fn: Callable[[GaussianRational], GaussianRational]) -> "MultiPoly":
        out = MultiPoly(self.variables)
        for exp, c in self.terms.items():
            v = fn(c)
            if v:
                out.terms[exp] = v
        return out

    # -- serialization ------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for exp, coeff in self.sorted_terms():
            factors = [
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(self.variables, exp)
                if e
            ]
            if coeff.is_rational():
                c = str(coeff)
            else:
                c = f"({coeff})"
            if not factors:
                chunks.append(c)
            elif c == "1":
                chunks.append("*".join(factors))
            elif c == "-1":
                chunks.append("-" + "*".join(factors))
            else:
                chunks.append(c + "*" + "*".join(factors))
        text = chunks[0]
        for chunk in chunks[1:]:
            if chunk.startswith("-"):
                text += " - " + chunk[1:]
            else:
                text += " + " + chunk
        return text

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


def poly_derivative(p: MultiPoly, var: str) -> MultiPoly:
    return p.derivative(var)


def parse_poly(text: str, variables: Iterable[str]) -> MultiPoly:
    """Parse the serialization produced by ``str(MultiPoly)``."""
    universe = tuple(variables)
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial text")
    if s == "0":
        return MultiPoly(universe)
    result = MultiPoly(universe)
    for sign, chunk in _split_terms(s):
        coeff = GaussianRational(1)
        exp = [0] * len(universe)
        for factor in _split_factors(chunk):
            if factor.startswith("("):
                coeff = coeff * parse_gaussian(factor[1:-1])
                continue
            head = factor.split("^", 1)
            name = head[0]
            if name in universe:
                power = int(head[1]) if len(head) == 2 else 1
                exp[universe.index(name)] += power
            else:
                coeff = coeff * parse_gaussian(factor)
        coeff = coeff * sign
        if coeff:
            term = MultiPoly(universe, {tuple(exp): coeff})
            result = result + term
    return result


def _split_terms(s: str):
    """Yield (sign, chunk) for top-level +/- separated terms."""
    depth = 0
    sign = 1
    start = 0
    if s[0] == "-":
        sign = -1
        start = 1
    elif s[0] == "+":
        start = 1
    k = start
    while k < len(s):
        ch = s[k]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and ch in "+-" and s[k - 1] not in "^*/(+-":
            yield sign, s[start:k]
            sign = 1 if ch == "+" else -1
            start = k + 1
        k += 1
    yield sign, s[start:]


def _split_factors(chunk: str):
    depth = 0
    start = 0
    for k, ch in enumerate(chunk):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            yield chunk[start:k]
            start = k + 1
    yield chunk[start:]


def poly(text: str, variables: Iterable[str]) -> MultiPoly:
    """Shorthand parser used throughout the test-suite and golden data."""
    return parse_poly(text, variables)
