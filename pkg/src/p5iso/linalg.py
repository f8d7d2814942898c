"""Polynomial matrices, fraction-free solving, differential operators.

Matrices are plain nested lists; the helpers are generic over any entry
type supporting ring arithmetic (MultiPoly, RationalFunction, complex).

:func:`bareiss_solve` performs exact fraction-free Gaussian elimination on
polynomial systems and verifies its own answer by back-substitution.

:class:`DiffOperator` pairs a derivation symbol (``d/dz``, ``z*d/dz`` or
``d/dt``) with a square matrix of rational functions; :func:`lie_bracket`
returns the matrix obstruction to a pair of such operators commuting.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DerivationFailure, Inconsistent, ShapeError, SingularSystem
from .gaussian import GaussianRational
from .multipoly import MultiPoly
from .ratfunc import RationalFunction

Matrix = list


# -- generic matrix helpers ---------------------------------------------------

def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, m, p = len(a), len(b), len(b[0])
    if len(a[0]) != m:
        raise ShapeError("incompatible shapes in matrix product")
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = a[i][0] * b[0][j]
            for k in range(1, m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, s) -> Matrix:
    return [[x * s for x in row] for row in a]


def mat_map(a: Matrix, fn) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def mat_commutator(a: Matrix, b: Matrix) -> Matrix:
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_trace(a: Matrix):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


def identity_matrix(n: int, one=1, zero=0) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def charpoly_coefficients(a: Matrix) -> list:
    """Coefficients [c_{n-1}, ..., c_0] of det(T - A) = T^n + c_{n-1} T^{n-1} + ... + c_0.

    Computed by the Faddeev-LeVerrier recursion, which stays in the entry
    ring (division only by small integers).
    """
    n = len(a)
    zero = a[0][0] - a[0][0]
    one = zero + 1
    m = identity_matrix(n, one=one, zero=zero)
    coeffs = []
    c = one
    for k in range(1, n + 1):
        am = mat_mul(a, m)
        tr = mat_trace(am)
        c = tr * _ring_fraction(-1, k, zero)
        coeffs.append(c)
        m = mat_add(am, mat_scale(identity_matrix(n, one=one, zero=zero), c))
    return coeffs


def _ring_fraction(num: int, den: int, zero):
    """num/den coerced into the ring of ``zero``."""
    if isinstance(zero, MultiPoly):
        from fractions import Fraction
        return MultiPoly.constant(Fraction(num, den), zero.variables)
    if isinstance(zero, RationalFunction):
        from fractions import Fraction
        return RationalFunction(MultiPoly.constant(Fraction(num, den)))
    if isinstance(zero, GaussianRational):
        from fractions import Fraction
        return GaussianRational(Fraction(num, den))
    return num / den


# -- fraction-free linear solving ---------------------------------------------


def _coerce_poly(value) -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    return MultiPoly.constant(value)


def bareiss_solve(a: Sequence[Sequence], rhs: Sequence) -> list[RationalFunction]:
    """Exact solve of A x = rhs over polynomial entries.

    A may be square or overdetermined (more rows than columns); the extra
    rows must be consistent.  The solution is verified internally by
    substitution and returned as rational functions.
    """
    rows = len(a)
    if rows == 0:
        return []
    cols = len(a[0])
    if rows < cols:
        raise SingularSystem("underdetermined system")
    if len(rhs) != rows:
        raise ShapeError("rhs length does not match matrix")

    universe: list[str] = []
    seen = set()
    entries = [[_coerce_poly(x) for x in row] for row in a]
    vector = [_coerce_poly(x) for x in rhs]
    for row in entries:
        for x in row:
            for v in x.variables:
                if v not in seen:
                    universe.append(v)
                    seen.add(v)
    for x in vector:
        for v in x.variables:
            if v not in seen:
                universe.append(v)
                seen.add(v)
    u = tuple(universe)
    m = [[x.align(u) for x in row] + [vector[i].align(u)] for i, row in enumerate(entries)]

    prev = MultiPoly.constant(1, u)
    pivot_row = 0
    pivots = []
    for col in range(cols):
        found = None
        for r in range(pivot_row, rows):
            if not m[r][col].is_zero():
                found = r
                break
        if found is None:
            raise SingularSystem(f"no pivot in column {col}")
        if found != pivot_row:
            m[pivot_row], m[found] = m[found], m[pivot_row]
        p = m[pivot_row][col]
        for r in range(pivot_row + 1, rows):
            for c in range(col + 1, cols + 1):
                m[r][c] = (p * m[r][c] - m[r][col] * m[pivot_row][c]).exact_div(prev)
            m[r][col] = MultiPoly(u)
        prev = p
        pivots.append(pivot_row)
        pivot_row += 1

    for r in range(cols, rows):
        if not m[r][cols].is_zero():
            raise Inconsistent("inconsistent overdetermined system", residual=m[r][cols])

    solution: list[RationalFunction] = [RationalFunction(0)] * cols
    for k in range(cols - 1, -1, -1):
        acc = RationalFunction(m[k][cols])
        for j in range(k + 1, cols):
            acc = acc - RationalFunction(m[k][j]) * solution[j]
        solution[k] = acc / RationalFunction(m[k][k])

    for i in range(rows):
        acc = RationalFunction(0)
        for j in range(cols):
            acc = acc + RationalFunction(entries[i][j]) * solution[j]
        if acc != RationalFunction(vector[i]):
            raise DerivationFailure("back-substitution check failed", detail=(i, acc))
    return solution


# -- differential operators ---------------------------------------------------

D_DZ = "d/dz"
Z_D_DZ = "z*d/dz"
D_DT = "d/dt"

_Z_DERIVATIONS = (D_DZ, Z_D_DZ)


def total_t_derivative(expr: RationalFunction | MultiPoly, dynamic: Iterable[str] = (),
                       t_var: str = "t", prime_suffix: str = "'"):
    """Total d/dt with chain-rule symbols: d(x)/dt = x' for dynamic x."""
    dyn = tuple(dynamic)
    if isinstance(expr, MultiPoly):
        out = expr.derivative(t_var) if expr.uses(t_var) else MultiPoly(expr.variables)
        for x in dyn:
            if expr.uses(x):
                out = out + expr.derivative(x) * MultiPoly.variable(x + prime_suffix)
        return out
    n, d = expr.numerator, expr.denominator
    dn = total_t_derivative(n, dyn, t_var, prime_suffix)
    dd = total_t_derivative(d, dyn, t_var, prime_suffix)
    if dd.is_zero():
        return RationalFunction(dn, d)
    return RationalFunction(dn * d - n * dd, d * d)


@dataclass(frozen=True)
class DiffOperator:
    """A derivation plus a square matrix of rational functions.

    ``dynamic`` lists the symbols treated as functions of t by
    :func:`lie_bracket` (their derivatives enter as primed symbols).
    """

    derivation: str
    size: int
    matrix: Matrix
    dynamic: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.derivation not in (D_DZ, Z_D_DZ, D_DT):
            raise ValueError(f"unknown derivation {self.derivation!r}")
        if len(self.matrix) != self.size or any(len(row) != self.size for row in self.matrix):
            raise ShapeError("matrix shape does not match declared size")
        object.__setattr__(
            self, "matrix",
            [[RationalFunction.of(x) for x in row] for row in self.matrix],
        )

    def z_derivative_entrywise(self, m: Matrix) -> Matrix:
        if self.derivation == D_DZ:
            return mat_map(m, lambda e: e.derivative("z"))
        if self.derivation == Z_D_DZ:
            z = RationalFunction.variable("z")
            return mat_map(m, lambda e: e.derivative("z") * z)
        raise ValueError("not a z-derivation")

    def evaluate_matrix(self, assignment) -> list[list[complex]]:
        return [[e.eval_complex(assignment) for e in row] for row in self.matrix]

    def trace(self) -> RationalFunction:
        return mat_trace(self.matrix)


def lie_bracket(l1: DiffOperator, l2: DiffOperator) -> Matrix:
    """Obstruction to commutation of (d + A, d/dt + B).

    For l1 = d + A with d a z-derivation and l2 = d/dt + B the result is
    d(B) - (d/dt)(A) + A B - B A; the pair commutes iff it vanishes.
    Passing the arguments in the opposite order negates the result.
    """
    if l1.derivation == D_DT and l2.derivation in _Z_DERIVATIONS:
        return mat_scale(lie_bracket(l2, l1), RationalFunction(-1))
    if l1.derivation not in _Z_DERIVATIONS or l2.derivation != D_DT:
        raise ValueError("expected one z-derivation operator and one d/dt operator")
    if l1.size != l2.size:
        raise ShapeError("operator sizes differ")
    dyn = tuple(dict.fromkeys(l1.dynamic + l2.dynamic))
    a, b = l1.matrix, l2.matrix
    d_b = l1.z_derivative_entrywise(b)
    dt_a = mat_map(a, lambda e: total_t_derivative(e, dyn))
    return mat_add(mat_sub(d_b, dt_a), mat_commutator(a, b))


def mat_is_zero(m: Matrix) -> bool:
    zero = RationalFunction(0)
    return all(RationalFunction.of(x) == zero for row in m for x in row)
