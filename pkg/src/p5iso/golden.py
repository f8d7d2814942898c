"""Pinned reference equations for the verification suite.

Every symbolic derivation in the toolkit is compared against an entry of
this module, and nothing here is ever produced by the derivation code
itself: each constant was typed in once, audited against its source
display, and is referenced by name (``golden:<NAME>``) in verification
reports.

Variable conventions:

- rank-2 chart: ``a0, b0, c1, t`` with parameters ``th0, th1, th``
  (``th`` is the shifted parameter, equal to 1 + thinf);
- scalar equation: unknown ``q`` with derivative symbol ``qp``;
- rank-4 invariant basis: ``f0..f3`` dynamical, ``e0..e3`` constants;
- rank-4 symmetric basis: ``b1, b3`` dynamical, ``a1, a2, a3`` constants;
- canonical lattice variant: ``f, g`` dynamical, same ``e*`` constants;
- monodromy: matrix entries ``a1, b1, c1, d1, a2, b2, c2, d2`` with trace
  data ``s1, s2, s3``.
"""

from __future__ import annotations

from fractions import Fraction

from .gaussian import GaussianRational
from .multipoly import MultiPoly
from .ratfunc import RationalFunction


def _v(names: str) -> list[MultiPoly]:
    universe = tuple(names.split())
    return [MultiPoly.variable(n, universe) for n in universe]


def _i(universe) -> MultiPoly:
    return MultiPoly.constant(GaussianRational(0, 1), universe)


def _f(p: int, q: int = 1) -> Fraction:
    return Fraction(p, q)


# -- scalar equation for q = -b0 ---------------------------------------------

P5_SCALAR_VARS = ("q", "qp", "t", "th0", "th1", "th")


def p5_scalar_rhs_as_printed() -> RationalFunction:
    """The q'' display exactly as printed in the source reference.

    Kept verbatim for the record; it fails the normal-form cross-check
    below, so the corrected variant is the verification target.
    """
    q, qp, t, th0, th1, th = (RationalFunction.variable(n) for n in P5_SCALAR_VARS)
    one = RationalFunction(1)
    return (
        (one / q + one / (q - 1)) * qp ** 2 * _f(1, 2)
        - qp / t
        + th * q * (q - 1) / t
        - th0 ** 2 * (q - 1) / (q * t ** 2 * 2)
        + th1 ** 2 * q / ((q - 1) * t ** 2 * 2)
        - q * (q - 1) * (2 * q - 1) * _f(1, 2)
    )


def p5_scalar_rhs() -> RationalFunction:
    """Verification target for q''.

    Identical to the printed display except that the signs of the three
    q'-free groups (the th0^2, th1^2 and pure polynomial terms) are
    reversed.  This is the unique variant that the substitution
    q = y/(y-1) carries to the Painleve V normal form with the printed
    parameter values (alpha, beta, gamma, delta) =
    (th1^2/2, -th0^2/2, -th, -1/2); the printed display itself does not
    transform correctly, so those three signs are typos.
    """
    q, qp, t, th0, th1, th = (RationalFunction.variable(n) for n in P5_SCALAR_VARS)
    one = RationalFunction(1)
    return (
        (one / q + one / (q - 1)) * qp ** 2 * _f(1, 2)
        - qp / t
        + th * q * (q - 1) / t
        + th0 ** 2 * (q - 1) / (q * t ** 2 * 2)
        - th1 ** 2 * q / ((q - 1) * t ** 2 * 2)
        + q * (q - 1) * (2 * q - 1) * _f(1, 2)
    )


def p5_scalar_sign_discrepancy() -> RationalFunction:
    """printed display minus target: exactly the three flipped groups, doubled."""
    q, qp, t, th0, th1, th = (RationalFunction.variable(n) for n in P5_SCALAR_VARS)
    return (
        -2 * th0 ** 2 * (q - 1) / (q * t ** 2 * 2)
        + 2 * th1 ** 2 * q / ((q - 1) * t ** 2 * 2)
        - 2 * q * (q - 1) * (2 * q - 1) * _f(1, 2)
    )


def p5_standard_rhs() -> RationalFunction:
    """Painleve V normal form: y'' in terms of (y, yp, t, alpha..delta)."""
    names = ("y", "yp", "t", "alpha", "beta", "gamma", "delta")
    y, yp, t, alpha, beta, gamma, delta = (RationalFunction.variable(n) for n in names)
    one = RationalFunction(1)
    return (
        (one / (2 * y) + one / (y - 1)) * yp ** 2
        - yp / t
        + (y - 1) ** 2 * (alpha * y + beta / y) / t ** 2
        + gamma * y / t
        + delta * y * (y + 1) / (y - 1)
    )


def p5_parameter_map() -> dict[str, RationalFunction]:
    """(alpha, beta, gamma, delta) of the normal form, in terms of th0, th1, th."""
    th0, th1, th = (RationalFunction.variable(n) for n in ("th0", "th1", "th"))
    return {
        "alpha": th1 ** 2 * _f(1, 2),
        "beta": -(th0 ** 2) * _f(1, 2),
        "gamma": -th,
        "delta": RationalFunction(_f(-1, 2)),
    }


# -- rank-2 chart geometry ------------------------------------------------------

M1_CUBIC_VARS = ("a0", "b0", "c1", "t", "th0", "th1", "th")


def m1_cubic_residual() -> MultiPoly:
    """a0^2 minus the cubic in b0; zero exactly on the first chart."""
    a0, b0, c1, t, th0, th1, th = _v("a0 b0 c1 t th0 th1 th")
    rhs = (
        -(t ** 2) * b0 ** 3 * _f(1, 4)
        + (-(t ** 2) * _f(1, 2) + th * t * _f(1, 2) + c1) * b0 ** 2
        + (-(th1 ** 2) * _f(1, 4) + th0 ** 2 * _f(1, 4) + th * t * _f(1, 2) - t ** 2 * _f(1, 4) + c1) * b0
        + th0 ** 2 * _f(1, 4)
    )
    return a0 ** 2 - rhs


# -- rank-2 monodromy space -----------------------------------------------------

def chart_b1_relation() -> MultiPoly:
    """Defining relation of the chart normalized by b1 = 1."""
    a1, a2, b2, s2, s3 = _v("a1 a2 b2 s2 s3")
    return a2 * (s2 - a2) - b2 * (s3 - a1 * a2) - 1


def parabolic_chart_relation() -> MultiPoly:
    """Relation of the parabolic chart (s1 = 2, b2 = 1, y2 = 1)."""
    c1, y1, a2, s2, s3 = _v("c1 y1 a2 s2 s3")
    return (1 + c1 * y1) * a2 + c1 * y1 ** 2 * (1 + a2 * (a2 - s2)) - s3


# -- rank-4 operator displays ------------------------------------------------

RANK4_D_VARS = ("z", "t", "a1", "a2", "a3", "b1", "b3")


def rank4_d_matrix() -> list[list[MultiPoly]]:
    """Matrix of the z d/dz operator on the invariant basis."""
    z, t, a1, a2, a3, b1, b3 = _v("z t a1 a2 a3 b1 b3")
    u = z.variables
    i = _i(u)
    q = t * _f(1, 4)
    return [
        [a1 + a2 + a3 - _f(3, 8), 0 * z, z, z * (q + b1 + b3)],
        [q - i * b1 + i * b3, -i * a1 - a2 + i * a3 - _f(1, 8), 0 * z, z],
        [MultiPoly.constant(1, u), q - b1 - b3, -a1 + a2 - a3 + _f(1, 8), 0 * z],
        [0 * z, MultiPoly.constant(1, u), q + i * b1 - i * b3, i * a1 - a2 - i * a3 + _f(3, 8)],
    ]


def rank4_linf_matrix() -> list[list[MultiPoly]]:
    """The lattice operator matrix at a* = b* = 0."""
    z, t = _v("z t")[:2]
    u = ("z", "t")
    zero = MultiPoly(u)
    one = MultiPoly.constant(1, u)
    q = t * _f(1, 4)
    return [
        [MultiPoly.constant(_f(-3, 8), u), zero, z, q * z],
        [q, MultiPoly.constant(_f(-1, 8), u), zero, z],
        [one, q, MultiPoly.constant(_f(1, 8), u), zero],
        [zero, one, q, MultiPoly.constant(_f(3, 8), u)],
    ]


def rank4_canonical_d_matrix() -> list[list[MultiPoly]]:
    """Matrix of the operator on the canonical lattice basis."""
    z, t, a1, a2, a3, b1, b3 = _v("z t a1 a2 a3 b1 b3")
    u = z.variables
    i = _i(u)
    one = MultiPoly.constant(1, u)
    q = t * _f(1, 4)
    return [
        [a1 + a2 + a3 + _f(3, 8), 0 * z, one, b1 + b3 + q],
        [z * (q - i * b1 + i * b3), -i * a1 - a2 + i * a3 - _f(3, 8), 0 * z, z],
        [z, q - b1 - b3, -a1 + a2 - a3 - _f(1, 8), 0 * z],
        [0 * z, one, q + i * b1 - i * b3, i * a1 - a2 - i * a3 + _f(1, 8)],
    ]


# -- rank-4 flow displays -------------------------------------------------------

F_SYSTEM_VARS = ("f0", "f1", "t", "e0", "e1", "e2", "e3")


def f_system_rhs() -> tuple[MultiPoly, MultiPoly]:
    """(2t f0', 2t f1') after eliminating f2 and f3."""
    f0, f1, t, e0, e1, e2, e3 = _v("f0 f1 t e0 e1 e2 e3")
    p0 = (
        8 * f0 ** 2 * f1 - 2 * f0 ** 2 * t - 4 * f0 * f1 * t + f0 * t ** 2
        - 4 * e0 * f0 + 2 * e0 * t + 4 * e1 * f0 - 4 * e2 * f0 + 4 * e3 * f0
        - 2 * e3 * t - 2 * f0 + 2 * t
    )
    p1 = (
        -8 * f0 * f1 ** 2 + 4 * f0 * f1 * t + 2 * f1 ** 2 * t - f1 * t ** 2
        + 4 * e0 * f1 - 2 * e0 * t - 4 * e1 * f1 + 2 * e1 * t + 4 * e2 * f1
        - 4 * e3 * f1 + 2 * f1
    )
    return p0, p1


B_SYSTEM_VARS = ("b1", "b3", "t", "a1", "a2", "a3")


def b_system_rhs() -> tuple[MultiPoly, MultiPoly]:
    """(4t b1', 4t b3')."""
    b1, b3, t, a1, a2, a3 = _v("b1 b3 t a1 a2 a3")
    i = _i(b1.variables)
    p1 = (
        -16 * i * b1 ** 2 * b3 + i * t ** 2 * b1 + 16 * i * b3 ** 3
        - 4 * i * a1 * t + 4 * a1 * t - 32 * a2 * b3
    )
    p3 = (
        -16 * i * b1 ** 3 + 16 * i * b1 * b3 ** 2 - i * t ** 2 * b3
        + 4 * i * a3 * t - 32 * a2 * b1 + 4 * a3 * t
    )
    return p1, p3


def b_system_h_formulas() -> dict[str, RationalFunction]:
    """h1, h2, h3 of the d/dt operator in the symmetric basis."""
    b1, b3, t, a1, a2, a3 = (RationalFunction.variable(n) for n in B_SYSTEM_VARS)
    i = RationalFunction(MultiPoly.constant(GaussianRational(0, 1)))
    return {
        "h1": -b1 * i * _f(1, 2) + b1 * _f(1, 2),
        "h2": (2 * b1 ** 2 * i - 2 * b3 ** 2 * i + 4 * a2) / t,
        "h3": b3 * i * _f(1, 2) + b3 * _f(1, 2),
    }


def b_hamiltonian() -> RationalFunction:
    """H(b1, b3, t; a1, a2, a3) generating the b-flow."""
    b1, b3, t, a1, a2, a3 = (RationalFunction.variable(n) for n in B_SYSTEM_VARS)
    i = RationalFunction(MultiPoly.constant(GaussianRational(0, 1)))
    one = RationalFunction(1)
    return (
        i * (b1 ** 2 - b3 ** 2) ** 2 / t
        + i * t * b1 * b3 * _f(1, 4)
        + 4 * a2 * (b1 ** 2 - b3 ** 2) / t
        - (one + i) * a3 * b1
        + (one - i) * a1 * b3
    )


CANONICAL_FG_VARS = ("f", "g", "t", "e0", "e1", "e2")


def canonical_fg_rhs() -> tuple[MultiPoly, MultiPoly]:
    """(2t f', 2t g') on the canonical lattice after elimination."""
    f, g, t, e0, e1, e2 = _v("f g t e0 e1 e2")
    pf = (
        -8 * f ** 2 * g + 2 * f ** 2 * t + 4 * f * g * t - f * t ** 2
        + 8 * e0 * f - 2 * e0 * t + 2 * e1 * t + 8 * e2 * f - 2 * f + 2 * t
    )
    pg = (
        8 * f * g ** 2 - 4 * f * g * t - 2 * g ** 2 * t + g * t ** 2
        - 8 * e0 * g + 4 * e0 * t + 2 * e1 * t - 8 * e2 * g + 2 * e2 * t + 2 * g
    )
    return pf, pg


# -- rank-4 fiber cubic (derived once, pinned for regression) --------------------

RANK4_FIBER_CUBIC_VARS = ("y", "x3", "x4", "p1", "p2", "p3")


def rank4_fiber_cubic_pinned() -> MultiPoly:
    """x3 x4 y - x3^2 - x4^2 + p3 x3 + p1 x4 - y - p2, the eliminated fiber."""
    y, x3, x4, p1, p2, p3 = _v("y x3 x4 p1 p2 p3")
    return x3 * x4 * y - x3 ** 2 - x4 ** 2 + p3 * x3 + p1 * x4 - y - p2
