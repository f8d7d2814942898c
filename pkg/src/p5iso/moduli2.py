"""Charts of the rank-2 moduli space of connections.

The space is covered by two affine charts.  The first normalizes the
lower-left polynomial to z + b0 and carries coordinates (a0, b0, c1, t)
subject to one cubic relation; the second normalizes it to 1 + B1 z with
coordinates (A2, B1, C1, t) and a quartic relation obtained by clearing
B1-denominators, so that its B1 = 0 locus (the complement of the first
chart, where A2^2 = t^2/4) is part of the same equation.

Scalars are either exact (:class:`GaussianRational`) or ``complex``; all
formulas use ``Fraction`` constants so both modes share one code path.
Polynomials in z appear as plain coefficient lists.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    InvalidParameter,
    NoSuchReduciblePoint,
    NotOnModuli,
    OutsideOverlap,
    UnexpectedParabolicData,
)
from .gaussian import GaussianRational, parse_gaussian
from .linalg import D_DZ, DiffOperator
from .multipoly import MultiPoly
from .ratfunc import RationalFunction

Scalar = object  # GaussianRational in exact mode, complex in numeric mode

_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


def _inv(x: Scalar) -> Scalar:
    if isinstance(x, GaussianRational):
        return x.inverse()
    return 1.0 / x


def _is_zero(x: Scalar, tol: float = 0.0) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return abs(x) <= tol


# -- polynomial-in-z coefficient lists -------------------------------------------

def zp_add(p: Sequence[Scalar], q: Sequence[Scalar]) -> list[Scalar]:
    n = max(len(p), len(q))
    out = []
    for k in range(n):
        a = p[k] if k < len(p) else 0
        b = q[k] if k < len(q) else 0
        out.append(a + b)
    return out


def zp_mul(p: Sequence[Scalar], q: Sequence[Scalar]) -> list[Scalar]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def zp_scale(p: Sequence[Scalar], s: Scalar) -> list[Scalar]:
    return [a * s for a in p]


def zp_trim(p: Sequence[Scalar]) -> list[Scalar]:
    out = list(p)
    while out and _is_zero(out[-1]):
        out.pop()
    return out


def zp_get(p: Sequence[Scalar], k: int) -> Scalar:
    return p[k] if k < len(p) else GaussianRational(0)


def zp_eval(p: Sequence[Scalar], z: Scalar) -> Scalar:
    acc = 0
    for c in reversed(list(p)):
        acc = acc * z + c
    return acc


# -- parameters -------------------------------------------------------------------


@dataclass(frozen=True)
class Theta:
    """Local exponent parameters; the shifted value theta = thetainf + 1."""

    theta0: Scalar
    theta1: Scalar
    theta_inf: Scalar

    @property
    def theta(self) -> Scalar:
        return self.theta_inf + 1

    @staticmethod
    def exact(theta0, theta1, theta_inf) -> "Theta":
        return Theta(
            GaussianRational.of(theta0),
            GaussianRational.of(theta1),
            GaussianRational.of(theta_inf),
        )

    def is_exact(self) -> bool:
        return isinstance(self.theta0, GaussianRational)

    def to_complex(self) -> "Theta":
        if not self.is_exact():
            return self
        return Theta(self.theta0.to_complex(), self.theta1.to_complex(), self.theta_inf.to_complex())

    def to_json(self) -> dict:
        return {
            "theta0": str(self.theta0),
            "theta1": str(self.theta1),
            "thetainf": str(self.theta_inf),
        }


# -- chart points ------------------------------------------------------------------


M1 = "M1"
M2 = "M2"

_CHART_FIELDS = {M1: ("a0", "b0", "c1"), M2: ("A2", "B1", "C1")}


@dataclass(frozen=True)
class Rank2ChartPoint:
    chart: str
    coords: dict
    t: Scalar

    def __post_init__(self):
        if self.chart not in _CHART_FIELDS:
            raise InvalidParameter(f"unknown chart {self.chart!r}")
        missing = [k for k in _CHART_FIELDS[self.chart] if k not in self.coords]
        if missing:
            raise InvalidParameter(f"missing coordinates {missing} for chart {self.chart}")

    def __getattr__(self, name):
        coords = object.__getattribute__(self, "coords")
        if name in coords:
            return coords[name]
        raise AttributeError(name)

    @staticmethod
    def m1(a0, b0, c1, t) -> "Rank2ChartPoint":
        return Rank2ChartPoint(M1, {"a0": a0, "b0": b0, "c1": c1}, t)

    @staticmethod
    def m2(A2, B1, C1, t) -> "Rank2ChartPoint":
        return Rank2ChartPoint(M2, {"A2": A2, "B1": B1, "C1": C1}, t)

    def is_exact(self) -> bool:
        return isinstance(self.t, GaussianRational)

    def to_json(self, th: Theta | None = None, line0=None, line1=None) -> dict:
        doc = {"chart": self.chart, "t": str(self.t)}
        doc.update({k: str(v) for k, v in self.coords.items()})
        if th is not None:
            doc["theta"] = th.to_json()
        if line0 is not None:
            doc["line0"] = [str(line0[0]), str(line0[1])]
        if line1 is not None:
            doc["line1"] = [str(line1[0]), str(line1[1])]
        return doc

    @staticmethod
    def from_json(doc: dict) -> "Rank2ChartPoint":
        chart = doc["chart"]
        coords = {k: parse_gaussian(doc[k]) for k in _CHART_FIELDS[chart]}
        return Rank2ChartPoint(chart, coords, parse_gaussian(doc["t"]))


def chart_residuals(p: Rank2ChartPoint, th: Theta) -> list[Scalar]:
    """Defining-relation residuals; all zero iff the point is on the space."""
    if _is_zero(p.t):
        raise InvalidParameter("t must be nonzero")
    t, th0, th1, theta = p.t, th.theta0, th.theta1, th.theta
    if p.chart == M1:
        a0, b0, c1 = p.a0, p.b0, p.c1
        rhs = (
            -(t * t) * _QUARTER * b0 ** 3
            + (-(t * t) * _HALF + theta * t * _HALF + c1) * b0 ** 2
            + (-(th1 * th1) * _QUARTER + th0 * th0 * _QUARTER + theta * t * _HALF - t * t * _QUARTER + c1) * b0
            + th0 * th0 * _QUARTER
        )
        return [a0 * a0 - rhs]
    a2, b1, c1 = p.A2, p.B1, p.C1
    bracket = (
        th0 * th0 * _QUARTER * b1 ** 2
        + c1 * b1 ** 2
        + b1 * (theta * t * _HALF - 2 * a2 * a2 - a2)
        - (b1 + 1) * (t * t * _QUARTER - a2 * a2)
    )
    return [a2 * a2 * b1 ** 2 + (1 + b1) * bracket - th1 * th1 * _QUARTER * b1 ** 2]


def on_chart(p: Rank2ChartPoint, th: Theta, tol: float = 1e-10) -> bool:
    res = chart_residuals(p, th)
    return all(_is_zero(r, tol if not p.is_exact() else 0.0) for r in res)


# -- the connection matrix ----------------------------------------------------------


def matrix_polys(p: Rank2ChartPoint, th: Theta) -> tuple[list, list, list]:
    """Coefficient lists (a(z), b(z), c(z)) of the matrix numerator.

    The operator is d/dz + [[a, c], [b, -a]] / (z(z-1)).
    """
    t, th0, th1, theta = p.t, th.theta0, th.theta1, th.theta
    if p.chart == M1:
        a0, b0, c1 = p.a0, p.b0, p.c1
        c3 = t * t * _QUARTER
        c2 = theta * t * _HALF - (b0 + 2) * c3
        c0 = th1 * th1 * _QUARTER - th0 * th0 * _QUARTER - (b0 + 1) * (c1 - (b0 + 1) * t * t * _QUARTER + theta * t * _HALF)
        return [a0], [b0, GaussianRational(1) if p.is_exact() else 1.0], [c0, c1, c2, c3]
    a2, b1, c1 = p.A2, p.B1, p.C1
    one = GaussianRational(1) if p.is_exact() else 1.0
    zero = GaussianRational(0) if p.is_exact() else 0.0
    c0 = th0 * th0 * _QUARTER
    if not _is_zero(b1):
        c3 = (t * t * _QUARTER - a2 * a2) * _inv(b1)
        c2 = (theta * t * _HALF - 2 * a2 * a2 - a2 - (2 * b1 + 1) * c3) * _inv(b1)
    else:
        c3 = theta * t * _HALF - t * t * _HALF - a2
        c2 = th1 * th1 * _QUARTER - t * t * _QUARTER - th0 * th0 * _QUARTER - c1 - c3
    return [zero, zero, a2], [one, b1], [c0, c1, c2, c3]


def to_operator(p: Rank2ChartPoint, th: Theta) -> DiffOperator:
    """Exact differential operator d/dz + M(z)/(z(z-1)) for an exact point."""
    if not p.is_exact():
        raise InvalidParameter("to_operator needs an exact point; numeric mode evaluates matrix_polys")
    for r in chart_residuals(p, th):
        if not _is_zero(r):
            raise NotOnModuli(f"chart relation violated, residual {r}")
    a, b, c = matrix_polys(p, th)
    a_rf = _z_entry(a)
    return DiffOperator(D_DZ, 2, [[a_rf, _z_entry(c)], [_z_entry(b), -a_rf]])


def _z_entry(coeffs) -> RationalFunction:
    den = MultiPoly.variable("z") ** 2 - MultiPoly.variable("z")
    num = MultiPoly(("z",))
    for k, coef in enumerate(coeffs):
        c = GaussianRational.of(coef)
        if c:
            num = num + MultiPoly(("z",), {(k,): c})
    return RationalFunction(num, den)


def m1_point_from_operator(op: DiffOperator, t: Scalar) -> Rank2ChartPoint:
    """Invert :func:`to_operator` on the first chart."""
    den = MultiPoly.variable("z") ** 2 - MultiPoly.variable("z")
    a_num = (op.matrix[0][0] * RationalFunction(den)).as_poly()
    c_num = (op.matrix[0][1] * RationalFunction(den)).as_poly()
    a0 = a_num.constant_value()
    c1 = c_num.coefficient("z", 1).constant_value()
    b_num = (op.matrix[1][0] * RationalFunction(den)).as_poly()
    b0 = b_num.coefficient("z", 0).constant_value()
    return Rank2ChartPoint.m1(a0, b0, c1, GaussianRational.of(t))


def residue_matrices(p: Rank2ChartPoint, th: Theta) -> tuple[list, list]:
    """Residues of the connection matrix at z = 0 and z = 1."""
    a, b, c = matrix_polys(p, th)
    m0 = [[zp_get(a, 0), zp_get(c, 0)], [zp_get(b, 0), -zp_get(a, 0)]]
    a1 = zp_eval(a, 1)
    res0 = [[-m0[0][0], -m0[0][1]], [-m0[1][0], -m0[1][1]]]
    res1 = [[a1, zp_eval(c, 1)], [zp_eval(b, 1), -a1]]
    return res0, res1


# -- gauge transforms and chart transitions ----------------------------------------


@dataclass(frozen=True)
class GaugeTransform:
    """Bundle automorphism e1 -> lam1 e1, e2 -> lam2 e2 + (alpha + beta z) e1."""

    lam1: Scalar
    lam2: Scalar
    alpha: Scalar
    beta: Scalar

    def apply(self, a: Sequence, b: Sequence, c: Sequence) -> tuple[list, list, list]:
        """Transform the numerator coefficient lists of an operator."""
        lin = [self.alpha, self.beta]
        inv2 = _inv(self.lam2)
        a_new = zp_add(a, zp_scale(zp_mul(lin, b), -1 * inv2))
        b_new = zp_scale(b, self.lam1 * inv2)
        inv12 = _inv(self.lam1 * self.lam2)
        c_new = zp_scale(
            zp_add(
                zp_add(zp_scale(zp_mul(lin, a), 2 * self.lam2), zp_scale(zp_mul(zp_mul(lin, lin), b), -1)),
                zp_scale(c, self.lam2 * self.lam2),
            ),
            inv12,
        )
        # the derivative term of the gauge adds beta * z(z-1) to the numerator
        c_new = zp_add(c_new, zp_scale([0, -1, 1], self.beta * _inv(self.lam1)))
        return zp_trim(a_new), zp_trim(b_new), zp_trim(c_new)


def chart_transition(p: Rank2ChartPoint, target: str, th: Theta) -> Rank2ChartPoint:
    """Move a point to the other chart through the unique gauge normalization."""
    if target == p.chart:
        return p
    a, b, c = matrix_polys(p, th)
    one = GaussianRational(1) if p.is_exact() else 1.0
    if p.chart == M1 and target == M2:
        b0 = p.b0
        if _is_zero(b0):
            raise OutsideOverlap("b0 = 0 is not in the second chart's overlap image")
        g = GaugeTransform(_inv(b0), one, p.a0 * _inv(b0), -p.a0 * _inv(b0 * b0))
        a_n, b_n, c_n = g.apply(a, b, c)
        return Rank2ChartPoint.m2(zp_get(a_n, 2), zp_get(b_n, 1), zp_get(c_n, 1), p.t)
    if p.chart == M2 and target == M1:
        b1 = p.B1
        if _is_zero(b1):
            raise OutsideOverlap("B1 = 0 lies outside the first chart")
        a2 = p.A2
        g = GaugeTransform(_inv(b1), one, -a2 * _inv(b1 * b1), a2 * _inv(b1))
        a_n, b_n, c_n = g.apply(a, b, c)
        return Rank2ChartPoint.m1(zp_get(a_n, 0), zp_get(b_n, 0), zp_get(c_n, 1), p.t)
    raise InvalidParameter(f"no transition {p.chart} -> {target}")


# -- the reducible locus ---------------------------------------------------------


@dataclass(frozen=True)
class ReducibleParams:
    """Sign choices and the invariant-line direction of a reducible point."""

    eps0: int
    eps1: int
    eps2: int
    line: tuple  # projective pair [b0 : b1], not both zero
    t: Scalar

    def __post_init__(self):
        if any(e not in (1, -1) for e in (self.eps0, self.eps1, self.eps2)):
            raise InvalidParameter("eps entries must be +1 or -1")
        if _is_zero(self.line[0]) and _is_zero(self.line[1]):
            raise InvalidParameter("line must be a nonzero projective pair")
        if _is_zero(self.t):
            raise InvalidParameter("t must be nonzero")


def reducible_theta_constraint(eps0: int, eps1: int, eps2: int, th: Theta) -> Scalar:
    """Residual of the compatibility condition theta = eps2 (eps1 th1 - eps0 th0 + 1).

    The +1 inside the bracket is forced by the defining relations of the
    moduli space (substituting the triangular family into them), and it is
    what makes the reducible locus actually land on the space.
    """
    return th.theta - eps2 * (eps1 * th.theta1 - eps0 * th.theta0 + 1)


def reducible_diag_coeffs(r: ReducibleParams, th: Theta) -> list[Scalar]:
    a0 = r.eps0 * th.theta0 * _HALF
    a2 = r.eps2 * r.t * _HALF
    a1 = r.eps1 * th.theta1 * _HALF - a0 - a2
    return [a0, a1, a2]


def reducible_operator(r: ReducibleParams, th: Theta) -> DiffOperator:
    """Lower-triangular operator of a reducible point (exact scalars)."""
    residual = reducible_theta_constraint(r.eps0, r.eps1, r.eps2, th)
    if not _is_zero(residual):
        raise NoSuchReduciblePoint(f"theta compatibility violated, residual {residual}")
    a = reducible_diag_coeffs(r, th)
    b = [r.line[0], r.line[1]]
    a_rf = _z_entry(a)
    zero = RationalFunction(0)
    return DiffOperator(D_DZ, 2, [[a_rf, zero], [_z_entry(b), -a_rf]])


def reducible_to_m1(r: ReducibleParams, th: Theta) -> tuple[Rank2ChartPoint, GaugeTransform]:
    """Gauge a reducible point (with b1 != 0) into the first chart."""
    b0, b1 = r.line
    if _is_zero(b1):
        raise OutsideOverlap("line with b1 = 0 does not meet the first chart")
    residual = reducible_theta_constraint(r.eps0, r.eps1, r.eps2, th)
    if not _is_zero(residual):
        raise NoSuchReduciblePoint(f"theta compatibility violated, residual {residual}")
    a = reducible_diag_coeffs(r, th)
    one = GaussianRational(1) if isinstance(r.t, GaussianRational) else 1.0
    beta = a[2] * _inv(b1)
    alpha = (a[1] - a[2] * b0 * _inv(b1)) * _inv(b1)
    g = GaugeTransform(_inv(b1), one, alpha, beta)
    a_n, b_n, c_n = g.apply(a, [b0, b1], [])
    pt = Rank2ChartPoint.m1(zp_get(a_n, 0), zp_get(b_n, 0), zp_get(c_n, 1), r.t)
    return pt, g


def admissible_eps_triples(th: Theta, tol: float = 0.0) -> list[tuple[int, int, int]]:
    out = []
    for e0 in (1, -1):
        for e1 in (1, -1):
            for e2 in (1, -1):
                if _is_zero(reducible_theta_constraint(e0, e1, e2, th), tol):
                    out.append((e0, e1, e2))
    return out


# -- parabolic structure -----------------------------------------------------------


@dataclass(frozen=True)
class ParabolicPoint:
    base: Rank2ChartPoint
    line0: Optional[tuple] = None
    line1: Optional[tuple] = None


def _is_integer(x: Scalar, tol: float = 0.0) -> bool:
    if isinstance(x, GaussianRational):
        return x.im == 0 and x.re.denominator == 1
    return abs(x.imag) <= tol and abs(x.real - round(x.real)) <= tol


def _abs_value(x: Scalar) -> Scalar:
    if isinstance(x, GaussianRational):
        return GaussianRational(abs(x.re))
    return abs(x)


def eigenline_condition(matrix, eigenvalue, pair, tol: float = 0.0) -> bool:
    """Does matrix * pair == eigenvalue * pair projectively?"""
    y1, y2 = pair
    r1 = matrix[0][0] * y1 + matrix[0][1] * y2 - eigenvalue * y1
    r2 = matrix[1][0] * y1 + matrix[1][1] * y2 - eigenvalue * y2
    return _is_zero(r1, tol) and _is_zero(r2, tol)


def parabolic_lift_check(pp: ParabolicPoint, th: Theta, tol: float = 0.0) -> bool:
    """Validate stored eigenline data against the residue matrices."""
    if pp.line0 is not None and not _is_integer(th.theta0, tol):
        raise UnexpectedParabolicData("line0 supplied but theta0 is not an integer")
    if pp.line1 is not None and not _is_integer(th.theta1, tol):
        raise UnexpectedParabolicData("line1 supplied but theta1 is not an integer")
    res0, res1 = residue_matrices(pp.base, th)
    ok = True
    if pp.line0 is not None:
        lam = -_abs_value(th.theta0) * _HALF
        ok = ok and eigenline_condition(res0, lam, pp.line0, tol)
    if pp.line1 is not None:
        lam = -_abs_value(th.theta1) * _HALF
        ok = ok and eigenline_condition(res1, lam, pp.line1, tol)
    return ok


# -- sampling helpers -----------------------------------------------------------


def m1_c1_on_cubic(a0, b0, t, th: Theta) -> Scalar:
    """Solve the chart relation for c1 (requires b0 not in {0, -1})."""
    th0, th1, theta = th.theta0, th.theta1, th.theta
    if _is_zero(b0) or _is_zero(b0 + 1):
        raise InvalidParameter("c1 solve needs b0 (b0 + 1) != 0")
    num = (
        a0 * a0
        + t * t * _QUARTER * b0 ** 3
        + (t * t * _HALF - theta * t * _HALF) * b0 ** 2
        + (th1 * th1 * _QUARTER - th0 * th0 * _QUARTER - theta * t * _HALF + t * t * _QUARTER) * b0
        - th0 * th0 * _QUARTER
    )
    return num * _inv(b0 * b0 + b0)


def m2_c1_on_relation(a2, b1, t, th: Theta) -> Scalar:
    """Solve the second chart's relation for C1 (requires B1(B1+1) != 0)."""
    if _is_zero(b1) or _is_zero(b1 + 1):
        raise InvalidParameter("C1 solve needs B1 (B1 + 1) != 0")
    th0, th1, theta = th.theta0, th.theta1, th.theta
    rest = (
        a2 * a2 * b1 ** 2
        + (1 + b1) * (
            th0 * th0 * _QUARTER * b1 ** 2
            + b1 * (theta * t * _HALF - 2 * a2 * a2 - a2)
            - (b1 + 1) * (t * t * _QUARTER - a2 * a2)
        )
        - th1 * th1 * _QUARTER * b1 ** 2
    )
    return -rest * _inv((1 + b1) * b1 ** 2)


def point_to_json_str(p: Rank2ChartPoint, th: Theta) -> str:
    return json.dumps(p.to_json(th), indent=2, sort_keys=True)
