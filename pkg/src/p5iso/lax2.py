"""Rank-2 Lax pair: derivation of the partner operator and the scalar flow.

Everything here is computed, never transcribed: the d/dt partner B (entries
polynomial in z of degree at most 2, trace fixed to zero) and the flow of
the chart coordinates (a0, b0, c1) are solved from the vanishing of the
commutator bracket, working modulo the chart's cubic relation.  The scalar
second-order equation satisfied by q = -b0 then follows by eliminating a0
and c1, and the reducible locus yields a first-order Riccati equation for
the invariant-line slope.

All derivations are carried out over the rational function field with the
parameters th0, th1, th symbolic; numeric values only enter when a result
is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import golden
from .errors import DerivationFailure, NoSuchReduciblePoint
from .gaussian import GaussianRational
from .linalg import D_DT, D_DZ, DiffOperator, lie_bracket, mat_is_zero, total_t_derivative
from .moduli2 import Theta, reducible_theta_constraint
from .multipoly import MultiPoly
from .ratfunc import RationalFunction
from .symsolve import make_quadratic_reducer, solve_linear_symbolic

CHART_VARS = ("a0", "b0", "c1", "t", "th0", "th1", "th")
DYNAMIC = ("a0", "b0", "c1")
_B_COEFFS = ("Bp0", "Bp1", "Bp2", "Bq0", "Bq1", "Bq2", "Br0", "Br1", "Br2")
_FLOW = ("a0'", "b0'", "c1'")

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


def _vars(names) -> list[MultiPoly]:
    universe = tuple(names)
    return [MultiPoly.variable(n, universe) for n in universe]


def cubic_rhs() -> MultiPoly:
    """Right-hand side R(b0, c1, t) with a0^2 = R on the first chart."""
    res = golden.m1_cubic_residual()
    a0 = MultiPoly.variable("a0", res.variables)
    return a0 ** 2 - res


def cubic_reducer():
    return make_quadratic_reducer("a0", cubic_rhs())


def m1_matrix_symbolic() -> list[list[MultiPoly]]:
    """Numerator matrix M(z) with d/dz + M/(z(z-1)) on the first chart."""
    u = ("z",) + CHART_VARS
    z, a0, b0, c1, t, th0, th1, th = _vars(u)
    c3 = t ** 2 * _QUARTER
    c2 = th * t * _HALF - (b0 + 2) * c3
    c0 = th1 ** 2 * _QUARTER - th0 ** 2 * _QUARTER - (b0 + 1) * (c1 - (b0 + 1) * t ** 2 * _QUARTER + th * t * _HALF)
    c = c0 + c1 * z + c2 * z ** 2 + c3 * z ** 3
    return [[a0, c], [z + b0, -a0]]


@dataclass(frozen=True)
class LaxPairRank2:
    """The z-operator, its solved d/dt partner, and the chart flow."""

    a_op: DiffOperator
    b_op: DiffOperator
    flow: dict

    def bracket_residual(self) -> list:
        """Commutator obstruction with the flow substituted (pre-reduction)."""
        res = lie_bracket(self.a_op, self.b_op)
        return [[e.subs(self.flow) for e in row] for row in res]

    def bracket_residual_is_zero(self) -> bool:
        norm = cubic_reducer()
        return all(norm(e).is_zero() for row in self.bracket_residual() for e in row)


@dataclass(frozen=True)
class ScalarODE:
    """unknown^(order) = expression(unknown, derivative symbol, t, params)."""

    unknown: str
    order: int
    expression: RationalFunction
    derivative_symbol: str


@dataclass(frozen=True)
class P5Params:
    alpha: object
    beta: object
    gamma: object
    delta: object

    def as_tuple(self):
        return (self.alpha, self.beta, self.gamma, self.delta)


@lru_cache(maxsize=1)
def solve_lax_pair_symbolic() -> LaxPairRank2:
    """Solve the commutator system for B and the flow of (a0, b0, c1)."""
    m = m1_matrix_symbolic()
    u = m[0][0].variables
    universe = u + _B_COEFFS
    z = MultiPoly.variable("z", universe)
    m = [[e.align(universe) for e in row] for row in m]

    bp = [MultiPoly.variable(n, universe) for n in _B_COEFFS[0:3]]
    bq = [MultiPoly.variable(n, universe) for n in _B_COEFFS[3:6]]
    br = [MultiPoly.variable(n, universe) for n in _B_COEFFS[6:9]]
    p = bp[0] + bp[1] * z + bp[2] * z ** 2
    q = bq[0] + bq[1] * z + bq[2] * z ** 2
    r = br[0] + br[1] * z + br[2] * z ** 2
    b = [[p, q], [r, -p]]

    zz1 = z ** 2 - z
    m_t = [[total_t_derivative(e, DYNAMIC) for e in row] for row in m]
    comm = [
        [
            sum((m[i][k] * b[k][j] - b[i][k] * m[k][j] for k in range(2)), MultiPoly(universe))
            for j in range(2)
        ]
        for i in range(2)
    ]
    residual = [
        [zz1 * b[i][j].derivative("z") - m_t[i][j] + comm[i][j] for j in range(2)]
        for i in range(2)
    ]

    equations = []
    for (i, j) in ((0, 0), (0, 1), (1, 0)):
        for coeff in residual[i][j].coeffs_in("z").values():
            equations.append(coeff)

    unknowns = list(_B_COEFFS) + list(_FLOW)
    solution = solve_linear_symbolic(equations, unknowns, normalize=cubic_reducer())

    zvar = RationalFunction.variable("z")
    b_entries = []
    for group in range(3):
        val = RationalFunction(0)
        for k in range(3):
            val = val + solution[_B_COEFFS[group * 3 + k]] * zvar ** k
        b_entries.append(val)
    p_rf, q_rf, r_rf = b_entries

    zs = MultiPoly.variable("z")
    a_den = RationalFunction(zs ** 2 - zs)
    m_small = m1_matrix_symbolic()
    a_op = DiffOperator(
        D_DZ, 2,
        [[RationalFunction(m_small[0][0]) / a_den, RationalFunction(m_small[0][1]) / a_den],
         [RationalFunction(m_small[1][0]) / a_den, RationalFunction(m_small[1][1]) / a_den]],
        dynamic=DYNAMIC,
    )
    b_op = DiffOperator(D_DT, 2, [[p_rf, q_rf], [r_rf, -p_rf]], dynamic=DYNAMIC)
    flow = {name: solution[name] for name in _FLOW}
    return LaxPairRank2(a_op=a_op, b_op=b_op, flow=flow)


def solve_lax_pair(th: Theta | None = None) -> LaxPairRank2:
    """The symbolic Lax pair; ``th`` only selects numeric substitutions later."""
    pair = solve_lax_pair_symbolic()
    if th is None or not th.is_exact():
        return pair
    values = {"th0": th.theta0, "th1": th.theta1, "th": th.theta}
    sub = {k: RationalFunction(MultiPoly.constant(v)) for k, v in values.items()}
    flow = {k: v.subs(sub) for k, v in pair.flow.items()}
    b_mat = [[e.subs(sub) for e in row] for row in pair.b_op.matrix]
    a_mat = [[e.subs(sub) for e in row] for row in pair.a_op.matrix]
    return LaxPairRank2(
        a_op=DiffOperator(D_DZ, 2, a_mat, dynamic=DYNAMIC),
        b_op=DiffOperator(D_DT, 2, b_mat, dynamic=DYNAMIC),
        flow=flow,
    )


def flow_tangency_residual() -> RationalFunction:
    """d/dt of the cubic relation along the flow, reduced modulo it."""
    pair = solve_lax_pair_symbolic()
    deriv = total_t_derivative(golden.m1_cubic_residual(), DYNAMIC)
    norm = cubic_reducer()
    return norm(RationalFunction(deriv).subs(pair.flow))


@lru_cache(maxsize=1)
def b0_second_derivative_symbolic() -> RationalFunction:
    """b0'' along the flow, as a function of the chart coordinates."""
    pair = solve_lax_pair_symbolic()
    norm = cubic_reducer()
    return norm(total_t_derivative(pair.flow["b0'"], DYNAMIC).subs(pair.flow))


def _solve_affine(expr: RationalFunction, var: str) -> RationalFunction:
    """Solve expr = 0 for var, requiring the numerator to be affine in it."""
    num = expr.numerator
    parts = num.coeffs_in(var)
    if 1 not in parts or any(d > 1 for d in parts):
        raise DerivationFailure(f"expression is not affine in {var}", detail=num)
    rest = parts.get(0)
    if rest is None:
        return RationalFunction(0)
    return -RationalFunction(rest) / RationalFunction(parts[1])


@lru_cache(maxsize=1)
def derive_p5_scalar_symbolic() -> ScalarODE:
    """Eliminate a0 and c1 from the flow to obtain q'' for q = -b0.

    The b0' equation is affine in (a0, c1) jointly; whichever of the two it
    actually involves is solved from it, the other is solved from the cubic
    relation (which is affine in c1 once a0 is known, and quadratic in a0
    otherwise, handled by reduction), and both are substituted into the
    once-differentiated b0' equation.
    """
    pair = solve_lax_pair_symbolic()
    norm = cubic_reducer()
    phi_b = pair.flow["b0'"]
    b0p = RationalFunction.variable("b0'")
    eq = phi_b - b0p

    # differentiate the b0' equation once along the flow
    b0pp = norm(total_t_derivative(phi_b, DYNAMIC).subs(pair.flow))

    if eq.uses("c1"):
        psi_c1 = _solve_affine(eq, "c1")
        x = b0pp.subs({"c1": psi_c1})
        w = RationalFunction(golden.m1_cubic_residual()).subs({"c1": psi_c1})
        x = _reduce_mod_quadratic(x, "a0", w)
        if x.uses("a0"):
            raise DerivationFailure("a0 failed to eliminate from q''", detail=x)
    else:
        psi_a0 = _solve_affine(eq, "a0")
        x = b0pp.subs({"a0": psi_a0})
        w = RationalFunction(golden.m1_cubic_residual()).subs({"a0": psi_a0})
        psi_c1 = _solve_affine(w, "c1")
        x = x.subs({"c1": psi_c1})
        if x.uses("a0") or x.uses("c1"):
            raise DerivationFailure("elimination left chart variables in q''", detail=x)

    q = RationalFunction.variable("q")
    qp = RationalFunction.variable("qp")
    rhs = x.subs({"b0": -q, "b0'": -qp})
    return ScalarODE(unknown="q", order=2, expression=-rhs, derivative_symbol="qp")


def _reduce_mod_quadratic(x: RationalFunction, var: str, w: RationalFunction) -> RationalFunction:
    """Reduce x modulo the relation w = 0, with w quadratic in var."""
    w_parts = {d: RationalFunction(c) for d, c in w.numerator.coeffs_in(var).items()}
    if max(w_parts) != 2:
        raise DerivationFailure(f"relation is not quadratic in {var}", detail=w.numerator)
    if x.denominator.uses(var):
        raise DerivationFailure("denominator involves the reduced variable", detail=x.denominator)
    parts = {d: RationalFunction(c) for d, c in x.numerator.coeffs_in(var).items()}
    top = max(parts)
    coeffs = [parts.get(d, RationalFunction(0)) for d in range(top + 1)]
    w2 = w_parts[2]
    w1 = w_parts.get(1, RationalFunction(0))
    w0 = w_parts.get(0, RationalFunction(0))
    for d in range(top, 1, -1):
        c = coeffs[d]
        if c.is_zero():
            continue
        coeffs[d - 1] = coeffs[d - 1] - c * w1 / w2
        coeffs[d - 2] = coeffs[d - 2] - c * w0 / w2
        coeffs[d] = RationalFunction(0)
    acc = coeffs[0]
    if not coeffs[1].is_zero():
        acc = acc + coeffs[1] * RationalFunction.variable(var)
    return acc / RationalFunction(x.denominator)


def derive_p5_scalar(lp: LaxPairRank2 | None = None, th: Theta | None = None) -> ScalarODE:
    ode = derive_p5_scalar_symbolic()
    if th is None or not th.is_exact():
        return ode
    sub = {"th0": th.theta0, "th1": th.theta1, "th": th.theta}
    expr = ode.expression.subs({k: RationalFunction(MultiPoly.constant(v)) for k, v in sub.items()})
    return ScalarODE(unknown=ode.unknown, order=ode.order, expression=expr, derivative_symbol=ode.derivative_symbol)


def p5_standard_params(th: Theta) -> P5Params:
    return P5Params(
        alpha=th.theta1 * th.theta1 * _HALF,
        beta=-(th.theta0 * th.theta0) * _HALF,
        gamma=-th.theta,
        delta=GaussianRational(Fraction(-1, 2)) if th.is_exact() else complex(-0.5),
    )


# -- reducible locus: the Riccati reduction ------------------------------------


@lru_cache(maxsize=8)
def derive_riccati_symbolic(eps: tuple[int, int, int]) -> tuple[ScalarODE, dict]:
    """Complete the reducible family to a Lax pair and reduce to u = b1/b0.

    Returns the Riccati equation for u and the solved gauge data (the
    diagonal normalization fixes the scalar gauge, so the flow of b0, b1
    is pinned while their ratio is gauge-invariant).
    """
    e0, e1, e2 = eps
    u = ("z", "b0", "b1", "t", "th0", "th1", "al1", "al2", "be0", "be1", "be2", "b0'", "b1'")
    z, b0, b1, t, th0, th1 = (MultiPoly.variable(n, u) for n in ("z", "b0", "b1", "t", "th0", "th1"))
    al1, al2, be0, be1, be2 = (MultiPoly.variable(n, u) for n in ("al1", "al2", "be0", "be1", "be2"))

    a0 = th0 * Fraction(e0, 2)
    a2 = t * Fraction(e2, 2)
    a1 = th1 * Fraction(e1, 2) - a0 - a2
    a = a0 + a1 * z + a2 * z ** 2
    b = b0 + b1 * z
    alpha = al1 * z + al2 * z ** 2  # constant part fixed to zero (scalar gauge)
    beta = be0 + be1 * z + be2 * z ** 2

    zz1 = z ** 2 - z
    a_t = total_t_derivative(a, ("b0", "b1"))
    b_t = total_t_derivative(b, ("b0", "b1"))
    res_diag = zz1 * alpha.derivative("z") - a_t
    res_low = zz1 * beta.derivative("z") - b_t + 2 * alpha * b - 2 * a * beta

    equations = []
    for expr in (res_diag, res_low):
        equations.extend(expr.coeffs_in("z").values())
    unknowns = ["al1", "al2", "be0", "be1", "be2", "b0'", "b1'"]
    sol = solve_linear_symbolic(equations, unknowns)

    uvar = RationalFunction.variable("u")
    flow_b0, flow_b1 = sol["b0'"], sol["b1'"]
    num = flow_b1 * RationalFunction(b0) - RationalFunction(b1) * flow_b0
    expr = num / RationalFunction(b0) ** 2
    # gauge invariance: the ratio flow must be invariant under joint scaling
    s = RationalFunction.variable("s")
    scaled = expr.subs({"b0": s * RationalFunction.variable("b0"), "b1": s * RationalFunction.variable("b1")})
    if scaled != expr:
        raise DerivationFailure("u-flow is not scale invariant", detail=scaled)
    riccati = expr.subs({"b0": RationalFunction(1), "b1": uvar})
    if riccati.numerator.uses("u") and riccati.numerator.degree_in("u") > 2:
        raise DerivationFailure("right side is not quadratic in u", detail=riccati)
    ode = ScalarODE(unknown="u", order=1, expression=riccati, derivative_symbol="up")
    return ode, sol


def derive_riccati(eps: tuple[int, int, int], th: Theta) -> ScalarODE:
    """First-order equation for u = b1/b0 on a compatible reducible family."""
    residual = reducible_theta_constraint(eps[0], eps[1], eps[2], th)
    if isinstance(residual, GaussianRational):
        bad = not residual.is_zero()
    else:
        bad = abs(residual) > 1e-12
    if bad:
        raise NoSuchReduciblePoint(f"theta compatibility violated, residual {residual}")
    ode, _ = derive_riccati_symbolic(tuple(eps))
    if th.is_exact():
        sub = {"th0": th.theta0, "th1": th.theta1}
        expr = ode.expression.subs({k: RationalFunction(MultiPoly.constant(v)) for k, v in sub.items()})
        return ScalarODE(ode.unknown, 1, expr, ode.derivative_symbol)
    return ode
