"""The rank-2 monodromy space and the rank-4 monodromy identity.

Rank 2: tuples (m0, m1, formal part alpha, Stokes entries f1, f2) subject
to the determinant/trace relations and the product identity
m0 m1 = diag(alpha, 1/alpha) * lower(f2) * upper(f1), taken modulo the
scaling conjugation diag(c, 1).  Affine charts normalize one of the four
off-diagonal entries to 1; parabolic charts (for s = +-2) add a normalized
eigenline of the unipotent-trace matrix.

Rank 4: the monodromy at infinity is the product of a cyclic formal factor
and two Stokes factors with entries (x1..x4, y); eliminating x1, x2 from
its characteristic polynomial yields a cubic relation in (y, x3, x4) with
coefficients affine in the characteristic coefficients.

Scalars are exact (GaussianRational) or complex; both share one code path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DerivationFailure, InvalidParameter, OutsideChart
from .gaussian import GaussianRational
from .linalg import bareiss_solve, mat_mul
from .multipoly import MultiPoly
from .ratfunc import RationalFunction
from .moduli2 import _inv, _is_zero  # shared scalar helpers

Matrix2 = list


# -- rank 2: points and relations ---------------------------------------------------


@dataclass(frozen=True)
class Rank2MonodromyPoint:
    m0: Matrix2
    m1: Matrix2
    alpha: object
    f1: object
    f2: object
    s1: object
    s2: object
    line0: Optional[tuple] = None
    line1: Optional[tuple] = None

    @property
    def s3(self):
        return self.alpha

    def entries(self) -> dict:
        (a1, b1), (c1, d1) = self.m0
        (a2, b2), (c2, d2) = self.m1
        return {"a1": a1, "b1": b1, "c1": c1, "d1": d1,
                "a2": a2, "b2": b2, "c2": c2, "d2": d2}

    def to_json(self) -> dict:
        doc = {
            "m0": [[str(x) for x in row] for row in self.m0],
            "m1": [[str(x) for x in row] for row in self.m1],
            "alpha": str(self.alpha),
            "f1": str(self.f1), "f2": str(self.f2),
            "s1": str(self.s1), "s2": str(self.s2),
        }
        if self.line0 is not None:
            doc["line0"] = [str(self.line0[0]), str(self.line0[1])]
        if self.line1 is not None:
            doc["line1"] = [str(self.line1[0]), str(self.line1[1])]
        return doc


def validate_rank2(pt: Rank2MonodromyPoint, tol: float = 0.0) -> dict:
    """Residuals of the defining relations plus the split flag.

    Returns {"residuals": [...], "split": bool, "line_residuals": [...]};
    residuals are reported, never raised.
    """
    e = pt.entries()
    res = [
        e["a1"] * e["d1"] - e["b1"] * e["c1"] - 1,
        e["a2"] * e["d2"] - e["b2"] * e["c2"] - 1,
        e["a1"] + e["d1"] - pt.s1,
        e["a2"] + e["d2"] - pt.s2,
        e["a1"] * e["a2"] + e["b1"] * e["c2"] - pt.s3,
    ]
    split = all(_is_zero(e[k], tol) for k in ("b1", "c1", "b2", "c2"))
    line_res = []
    if pt.line0 is not None:
        y1, y2 = pt.line0
        line_res.append(e["a1"] * y1 + e["b1"] * y2 - _eigvalue(pt.s1) * y1)
        line_res.append(e["c1"] * y1 + e["d1"] * y2 - _eigvalue(pt.s1) * y2)
    if pt.line1 is not None:
        y1, y2 = pt.line1
        line_res.append(e["a2"] * y1 + e["b2"] * y2 - _eigvalue(pt.s2) * y1)
        line_res.append(e["c2"] * y1 + e["d2"] * y2 - _eigvalue(pt.s2) * y2)
    return {"residuals": res, "split": split, "line_residuals": line_res}


def _eigvalue(s):
    """Eigenvalue of a trace +-2 unimodular matrix (s/2)."""
    return s * Fraction(1, 2)


def monodromy_identity_residual(pt: Rank2MonodromyPoint) -> Matrix2:
    """m0 m1 - diag(alpha, 1/alpha) lower(f2) upper(f1); zero iff it holds."""
    if _is_zero(pt.alpha):
        raise InvalidParameter("alpha must be nonzero")
    prod = mat_mul(pt.m0, pt.m1)
    ainv = _inv(pt.alpha)
    rhs = [
        [pt.alpha, pt.alpha * pt.f1],
        [ainv * pt.f2, ainv * (1 + pt.f1 * pt.f2)],
    ]
    return [[prod[i][j] - rhs[i][j] for j in range(2)] for i in range(2)]


def solve_stokes_from_matrices(m0: Matrix2, m1: Matrix2, alpha) -> tuple:
    """f1, f2 from the product identity (alpha = (m0 m1)[0][0] required)."""
    prod = mat_mul(m0, m1)
    return prod[0][1] * _inv(alpha), alpha * prod[1][0]


# -- rank 2: affine charts -------------------------------------------------------------

CHARTS = ("b1=1", "c1=1", "b2=1", "c2=1")

_CHART_COORDS = {
    "b1=1": ("a1", "a2", "b2"),
    "c2=1": ("a1", "a2", "c1"),
    "c1=1": ("a1", "a2", "b2", "c2"),
    "b2=1": ("a1", "a2", "b1", "c1"),
}


@dataclass(frozen=True)
class ChartPoint2:
    chart: str
    coords: dict
    s: tuple  # (s1, s2, s3)

    def __post_init__(self):
        missing = [k for k in _CHART_COORDS[self.chart] if k not in self.coords]
        if missing:
            raise InvalidParameter(f"missing chart coordinates {missing}")

    def residuals(self) -> list:
        s1, s2, s3 = self.s
        c = self.coords
        if self.chart == "b1=1":
            a1, a2, b2 = c["a1"], c["a2"], c["b2"]
            return [a2 * (s2 - a2) - b2 * (s3 - a1 * a2) - 1]
        if self.chart == "c2=1":
            a1, a2, c1 = c["a1"], c["a2"], c["c1"]
            return [a1 * (s1 - a1) - (s3 - a1 * a2) * c1 - 1]
        if self.chart == "c1=1":
            a1, a2, b2, c2 = c["a1"], c["a2"], c["b2"], c["c2"]
            b1 = a1 * (s1 - a1) - 1
            return [a1 * a2 + b1 * c2 - s3, a2 * (s2 - a2) - b2 * c2 - 1]
        a1, a2, b1, c1 = c["a1"], c["a2"], c["b1"], c["c1"]
        c2 = a2 * (s2 - a2) - 1
        return [a1 * a2 + b1 * c2 - s3, a1 * (s1 - a1) - b1 * c1 - 1]

    def inflate(self) -> Rank2MonodromyPoint:
        """Reconstruct the full matrix tuple with Stokes entries."""
        s1, s2, s3 = self.s
        c = dict(self.coords)
        a1, a2 = c["a1"], c["a2"]
        d1, d2 = s1 - a1, s2 - a2
        if self.chart == "b1=1":
            b1 = _one_like(a1)
            c1 = a1 * d1 - 1
            c2 = s3 - a1 * a2
            b2 = c["b2"]
        elif self.chart == "c2=1":
            c2 = _one_like(a1)
            b1 = s3 - a1 * a2
            b2 = a2 * d2 - 1
            c1 = c["c1"]
        elif self.chart == "c1=1":
            c1 = _one_like(a1)
            b1 = a1 * d1 - 1
            b2, c2 = c["b2"], c["c2"]
        else:
            b2 = _one_like(a1)
            c2 = a2 * d2 - 1
            b1, c1 = c["b1"], c["c1"]
        m0 = [[a1, b1], [c1, d1]]
        m1 = [[a2, b2], [c2, d2]]
        f1, f2 = solve_stokes_from_matrices(m0, m1, s3)
        return Rank2MonodromyPoint(m0=m0, m1=m1, alpha=s3, f1=f1, f2=f2, s1=s1, s2=s2)


def _one_like(x):
    return GaussianRational(1) if isinstance(x, GaussianRational) else 1.0


def rescale(pt: Rank2MonodromyPoint, c) -> Rank2MonodromyPoint:
    """Conjugate by diag(c, 1): b-entries scale by c, c-entries by 1/c."""
    cinv = _inv(c)
    (a1, b1), (c1, d1) = pt.m0
    (a2, b2), (c2, d2) = pt.m1
    return Rank2MonodromyPoint(
        m0=[[a1, c * b1], [cinv * c1, d1]],
        m1=[[a2, c * b2], [cinv * c2, d2]],
        alpha=pt.alpha,
        f1=c * pt.f1,
        f2=cinv * pt.f2,
        s1=pt.s1, s2=pt.s2,
        line0=None if pt.line0 is None else (pt.line0[0], cinv * pt.line0[1]),
        line1=None if pt.line1 is None else (pt.line1[0], cinv * pt.line1[1]),
    )


_NORMALIZED_ENTRY = {"b1=1": "b1", "c1=1": "c1", "b2=1": "b2", "c2=1": "c2"}


def chart_coords(pt: Rank2MonodromyPoint, chart: str) -> ChartPoint2:
    """Project a full point to a chart by the unique scaling normalization."""
    entry_name = _NORMALIZED_ENTRY[chart]
    value = pt.entries()[entry_name]
    if _is_zero(value):
        raise OutsideChart(f"entry {entry_name} vanishes at this point")
    scale = _inv(value) if entry_name in ("b1", "b2") else value
    scaled = rescale(pt, scale)
    e = scaled.entries()
    coords = {k: e[k] for k in _CHART_COORDS[chart]}
    return ChartPoint2(chart=chart, coords=coords, s=(pt.s1, pt.s2, pt.s3))


def chart_transition(cp: ChartPoint2, target: str) -> ChartPoint2:
    return chart_coords(cp.inflate(), target)


def gm_equivalent(p: Rank2MonodromyPoint, q: Rank2MonodromyPoint, tol: float = 0.0) -> bool:
    """Same orbit of the scaling conjugation?"""
    ep, eq = p.entries(), q.entries()
    for prod in (("b1", "c1"), ("b2", "c2"), ("b1", "c2"), ("b2", "c1")):
        lhs = ep[prod[0]] * ep[prod[1]]
        rhs = eq[prod[0]] * eq[prod[1]]
        if not _is_zero(lhs - rhs, tol):
            return False
    for diag in ("a1", "d1", "a2", "d2"):
        if not _is_zero(ep[diag] - eq[diag], tol):
            return False
    # ratios of the scaling-covariant entries must agree
    for pair in (("b1", "b2"), ("c1", "c2")):
        lhs = ep[pair[0]] * eq[pair[1]]
        rhs = eq[pair[0]] * ep[pair[1]]
        if not _is_zero(lhs - rhs, tol):
            return False
    return True


# -- rank 2: parabolic charts -----------------------------------------------------------


@dataclass(frozen=True)
class ParabolicChart:
    """A chart of the space extended by an eigenline of m0 or m1.

    Produced mechanically: the trace of the chosen matrix is +-2 (so its
    double eigenvalue is ``sign``), one off-diagonal entry and one
    y-component are normalized to 1, and every relation that is
    monic-linear in some variable is eliminated.  ``sfree`` denotes the
    free trace of the other matrix.
    """

    which: int            # 0: eigenline of m0 (s1 = +-2), 1: eigenline of m1
    sign: int             # +1 for trace 2, -1 for trace -2
    normalized_entry: str
    normalized_y: str
    coords: tuple[str, ...]
    eliminations: dict    # variable -> MultiPoly in the remaining ones
    relations: tuple      # residual MultiPoly relations in the coords

    def residuals(self, values: dict, s_free, s3) -> list:
        assignment = dict(values)
        assignment["sfree"] = s_free
        assignment["s3"] = s3
        if isinstance(s3, GaussianRational):
            return [rel.eval_exact(assignment) for rel in self.relations]
        numeric = {k: complex(v) for k, v in assignment.items()}
        return [rel.eval_complex(numeric) for rel in self.relations]


_PARABOLIC_SYMBOLS = ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2",
                      "y1", "y2", "sfree", "s3")


def build_parabolic_chart(which: int = 0, sign: int = 1,
                          normalized_entry: str = "b2", normalized_y: str = "y2") -> ParabolicChart:
    """Mechanical construction of a parabolic chart."""
    u = _PARABOLIC_SYMBOLS
    sym = {n: MultiPoly.variable(n, u) for n in u}
    eig = ("a1", "b1", "c1", "d1") if which == 0 else ("a2", "b2", "c2", "d2")
    oth = ("a2", "b2", "c2", "d2") if which == 0 else ("a1", "b1", "c1", "d1")
    eta = MultiPoly.constant(Fraction(sign), u)

    relations = [
        sym[eig[0]] + sym[eig[3]] - 2 * eta,
        sym[oth[0]] + sym[oth[3]] - sym["sfree"],
        sym[eig[0]] * sym[eig[3]] - sym[eig[1]] * sym[eig[2]] - 1,
        sym[oth[0]] * sym[oth[3]] - sym[oth[1]] * sym[oth[2]] - 1,
        sym["a1"] * sym["a2"] + sym["b1"] * sym["c2"] - sym["s3"],
        (sym[eig[0]] - eta) * sym["y1"] + sym[eig[1]] * sym["y2"],
        sym[eig[2]] * sym["y1"] + (sym[eig[3]] - eta) * sym["y2"],
    ]

    assignments = {normalized_entry: MultiPoly.constant(1, u),
                   normalized_y: MultiPoly.constant(1, u)}
    relations = [r.subs(assignments) for r in relations]
    eliminations: dict[str, MultiPoly] = dict(assignments)

    changed = True
    order = ["d1", "d2", "b1", "b2", "c1", "c2", "a1", "a2", "y1", "y2"]
    while changed:
        changed = False
        for var in order:
            if var in eliminations:
                continue
            for rel in relations:
                if not rel.uses(var):
                    continue
                parts = rel.coeffs_in(var)
                if max(parts) != 1 or not parts[1].is_constant():
                    continue
                value = -parts.get(0, MultiPoly(parts[1].variables)) * parts[1].constant_value().inverse()
                value = value.align(u)
                eliminations[var] = value
                relations = [r.subs({var: value}) for r in relations]
                for w, expr in list(eliminations.items()):
                    if expr.uses(var):
                        eliminations[w] = expr.subs({var: value}).align(u)
                changed = True
                break
            if changed:
                break
    relations = tuple(r.align(u) for r in relations if not r.is_zero())
    used = set()
    for r in relations:
        for v in ("a1", "b1", "c1", "d1", "a2", "b2", "c2", "d2", "y1", "y2"):
            if r.uses(v):
                used.add(v)
    coords = tuple(v for v in ("c1", "y1", "a2", "b1", "b2", "c2", "a1", "y2", "d1", "d2") if v in used)
    return ParabolicChart(which=which, sign=sign, normalized_entry=normalized_entry,
                          normalized_y=normalized_y, coords=coords,
                          eliminations=eliminations, relations=relations)


# -- rank 2: fibers of the projection to (a1, a2) ------------------------------------------


@dataclass(frozen=True)
class FiberStratum:
    """A zero-pattern stratum of a fiber, modulo the scaling action.

    ``pattern`` flags which of (b1, c1, b2, c2) are nonzero; within a fixed
    fiber the pattern determines the stratum, so (pattern, dim) is a
    faithful key.
    """

    pattern: tuple[bool, bool, bool, bool]
    dim: int


@dataclass(frozen=True)
class FiberClass:
    kind: str  # OnePoint | Empty | Line | Special
    strata: tuple = ()

    def summary(self) -> tuple:
        return tuple(sorted((s.pattern, s.dim) for s in self.strata))


def _k_invariants(a1, a2, s1, s2, s3) -> tuple:
    return (a1 * (s1 - a1) - 1, a2 * (s2 - a2) - 1, s3 - a1 * a2)


def solve_fiber_by_charts(k1, k2, k3) -> list[FiberStratum]:
    """Strata of {b1 c1 = K1, b2 c2 = K2, b1 c2 = K3, not all zero} mod scaling.

    Solved by explicit substitution in the four normalization slices
    (b1 = 1, c1 = 1, b2 = 1, c2 = 1), stratifying any leftover free slot
    into its zero and nonzero parts and merging slice overlaps by pattern.
    A slot marked None below is free in the slice; a dependent nonzero
    pair (a "hyperbola" slice solution) is recorded with its dimension.
    """
    nz1, nz2, nz3 = (not _is_zero(k) for k in (k1, k2, k3))
    found: list[tuple[list, int]] = []  # (template with None for free slots, extra dim)

    # slice b1 = 1: c1 = K1, c2 = K3, then b2 c2 = K2
    if nz3:
        found.append(([True, nz1, nz2, True], 0))
    elif not nz2:
        found.append(([True, nz1, None, False], 0))
    # slice c1 = 1: b1 = K1, then b1 c2 = K3, b2 c2 = K2
    if nz1:
        if nz3:
            found.append(([True, True, nz2, True], 0))
        elif not nz2:
            found.append(([True, True, None, False], 0))
    elif not nz3:
        if nz2:
            found.append(([False, True, True, True], 1))
        else:
            found.append(([False, True, None, False], 0))
            found.append(([False, True, False, None], 0))
    # slice b2 = 1: c2 = K2, then b1 c2 = K3, b1 c1 = K1
    if nz2:
        if nz3:
            found.append(([True, nz1, True, True], 0))
        elif not nz1:
            found.append(([False, None, True, True], 0))
    elif not nz3:
        if nz1:
            found.append(([True, True, True, False], 1))
        else:
            found.append(([None, False, True, False], 0))
            found.append(([False, None, True, False], 0))
    # slice c2 = 1: b1 = K3, b2 = K2, then b1 c1 = K1
    if nz3:
        found.append(([True, nz1, nz2, True], 0))
    elif not nz1:
        found.append(([False, None, nz2, True], 0))

    strata: dict[tuple, FiberStratum] = {}
    for template, extra in found:
        free = [i for i, v in enumerate(template) if v is None]
        for mask in range(1 << len(free)):
            pattern = list(template)
            dim = extra
            for bit, slot in enumerate(free):
                if (mask >> bit) & 1:
                    pattern[slot] = True
                    dim += 1
                else:
                    pattern[slot] = False
            if not any(pattern):
                continue  # split tuples are excluded
            key = tuple(pattern)
            if key in strata and strata[key].dim != dim:
                raise InvalidParameter(f"inconsistent stratum dimensions at {key}")
            strata.setdefault(key, FiberStratum(pattern=key, dim=dim))
    return sorted(strata.values(), key=lambda s: (s.pattern, s.dim))


def pr_fiber_classify(a1, a2, s1, s2, s3) -> FiberClass:
    """Classify the fiber of the projection to (a1, a2)."""
    k1, k2, k3 = _k_invariants(a1, a2, s1, s2, s3)
    comps = tuple(solve_fiber_by_charts(k1, k2, k3))
    generic_ok = not (_is_zero(k1) or _is_zero(k2))
    if not _is_zero(k3) and generic_ok:
        return FiberClass(kind="OnePoint", strata=comps)
    if _is_zero(k3) and generic_ok:
        if not comps:
            return FiberClass(kind="Empty")
        if len(comps) == 1 and comps[0].dim == 0:
            return FiberClass(kind="OnePoint", strata=comps)
        if len(comps) == 1 and comps[0].dim == 1:
            return FiberClass(kind="Line", strata=comps)
        return FiberClass(kind="Special", strata=comps)
    return FiberClass(kind="Special", strata=comps)


def fiber_bruteforce(a1, a2, s1, s2, s3) -> list[FiberStratum]:
    """Independent oracle: enumerate solution strata by zero pattern.

    For each of the 15 admissible zero patterns of (b1, c1, b2, c2) the
    product relations either rule the pattern out or leave a torus of
    solutions whose dimension (after the scaling gauge) is counted
    directly.
    """
    k1, k2, k3 = _k_invariants(a1, a2, s1, s2, s3)
    ks = (k1, k2, k3)
    pairs = ((0, 1), (2, 3), (0, 3))
    out = []
    for pat in range(1, 16):
        nz = tuple((pat >> i) & 1 == 1 for i in range(4))
        ok = True
        for (i, j), k in zip(pairs, ks):
            if (nz[i] and nz[j]) != (not _is_zero(k)):
                ok = False
                break
        if not ok:
            continue
        # on the nonzero slots the active relations are independent
        # multiplicative constraints; the scaling gauge acts locally freely
        active = sum(1 for (i, j), k in zip(pairs, ks) if nz[i] and nz[j])
        dim = sum(nz) - active - 1
        if dim < 0:
            raise InvalidParameter("impossible stratum dimension")
        out.append(FiberStratum(pattern=nz, dim=dim))
    return sorted(out, key=lambda s: (s.pattern, s.dim))


# -- rank 4 ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Rank4MonodromyPoint:
    x1: object
    x2: object
    x3: object
    x4: object
    y: object

    def to_json(self) -> dict:
        return {k: str(getattr(self, k)) for k in ("x1", "x2", "x3", "x4", "y")}


def mon_infinity_rank4(pt: Rank4MonodromyPoint):
    """Product (cyclic formal factor) . (y Stokes factor) . (x Stokes factor)."""
    one = GaussianRational(1) if isinstance(pt.y, GaussianRational) else 1.0
    zero = GaussianRational(0) if isinstance(pt.y, GaussianRational) else 0.0
    formal = [
        [zero, zero, zero, -one],
        [one, zero, zero, zero],
        [zero, one, zero, zero],
        [zero, zero, one, zero],
    ]
    sy = [
        [one, zero, zero, zero],
        [zero, one, zero, pt.y],
        [zero, zero, one, zero],
        [zero, zero, zero, one],
    ]
    sx = [
        [one, zero, zero, zero],
        [pt.x1, one, pt.x2, zero],
        [zero, zero, one, zero],
        [pt.x3, zero, pt.x4, one],
    ]
    return mat_mul(mat_mul(formal, sy), sx)


def rank4_charpoly(matrix) -> tuple:
    """(p1, p2, p3, det) with charpoly T^4 + p3 T^3 + p2 T^2 + p1 T + det.

    Principal-minor sums, exact over any commutative scalars.
    """
    n = 4
    p3 = -sum(matrix[i][i] for i in range(n))
    minors2 = 0
    for i in range(n):
        for j in range(i + 1, n):
            minors2 = minors2 + matrix[i][i] * matrix[j][j] - matrix[i][j] * matrix[j][i]
    minors3 = 0
    for rows in itertools.combinations(range(n), 3):
        minors3 = minors3 + _det3([[matrix[r][c] for c in rows] for r in rows])
    return -minors3, minors2, p3, _det4(matrix)


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _det4(m):
    total = 0
    for j in range(4):
        minor = [[m[r][c] for c in range(4) if c != j] for r in range(1, 4)]
        term = m[0][j] * _det3(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


@dataclass(frozen=True)
class CharPoly4:
    p1: object
    p2: object
    p3: object


RANK4_FIBER_VARS = ("x1", "x2", "x3", "x4", "y", "p1", "p2", "p3")


def rank4_charpoly_symbolic() -> tuple[MultiPoly, MultiPoly, MultiPoly, MultiPoly]:
    sym = {n: MultiPoly.variable(n, RANK4_FIBER_VARS) for n in RANK4_FIBER_VARS}
    pt = Rank4MonodromyPoint(x1=sym["x1"], x2=sym["x2"], x3=sym["x3"], x4=sym["x4"], y=sym["y"])
    one = MultiPoly.constant(1, RANK4_FIBER_VARS)
    zero = MultiPoly(RANK4_FIBER_VARS)
    formal = [
        [zero, zero, zero, -one],
        [one, zero, zero, zero],
        [zero, one, zero, zero],
        [zero, zero, one, zero],
    ]
    sy = [
        [one, zero, zero, zero],
        [zero, one, zero, pt.y],
        [zero, zero, one, zero],
        [zero, zero, zero, one],
    ]
    sx = [
        [one, zero, zero, zero],
        [pt.x1, one, pt.x2, zero],
        [zero, zero, one, zero],
        [pt.x3, zero, pt.x4, one],
    ]
    mon = mat_mul(mat_mul(formal, sy), sx)
    return rank4_charpoly(mon)


def rank4_fiber_cubic() -> MultiPoly:
    """Eliminate x1, x2 from the charpoly-coefficient equations.

    Returns the cubic in (y, x3, x4) with coefficients affine in p1, p2,
    p3, normalized so the triple-product monomial is monic.
    """
    c1, c2, c3, det = rank4_charpoly_symbolic()
    sym = {n: MultiPoly.variable(n, RANK4_FIBER_VARS) for n in RANK4_FIBER_VARS}
    eq1 = c1 - sym["p1"]
    eq3 = c3 - sym["p3"]
    for eq in (eq1, eq3):
        for v in ("x1", "x2"):
            if eq.uses(v) and eq.degree_in(v) > 1:
                raise DerivationFailure(f"charpoly equation not linear in {v}", detail=eq)
            if eq.coefficient(v, 1).uses("x1") or eq.coefficient(v, 1).uses("x2"):
                raise DerivationFailure("cross terms obstruct linear elimination", detail=eq)
    a = [[eq1.coefficient("x1", 1), eq1.coefficient("x2", 1)],
         [eq3.coefficient("x1", 1), eq3.coefficient("x2", 1)]]
    rhs = [-(eq1.coefficient("x1", 0).coefficient("x2", 0)),
           -(eq3.coefficient("x1", 0).coefficient("x2", 0))]
    x1_val, x2_val = bareiss_solve(a, rhs)
    cubic = RationalFunction(c2 - sym["p2"]).subs({"x1": x1_val, "x2": x2_val})
    poly = cubic.as_poly()
    lead = poly.coefficient("y", 1).coefficient("x3", 1).coefficient("x4", 1)
    lead_c = lead.constant_value()
    if not lead_c:
        raise DerivationFailure("triple product term is absent", detail=poly)
    return poly * lead_c.inverse()


def cubic_support_ok(cubic: MultiPoly) -> bool:
    """Monomial support in (y, x3, x4) within the allowed shape."""
    allowed = {(1, 1, 1), (0, 2, 0), (0, 0, 2), (0, 1, 0), (0, 0, 1), (1, 0, 0), (0, 0, 0)}
    iy = cubic.variables.index("y")
    i3 = cubic.variables.index("x3")
    i4 = cubic.variables.index("x4")
    for exp in cubic.terms:
        if (exp[iy], exp[i3], exp[i4]) not in allowed:
            return False
    return True


def cubic_coefficients_affine_in_p(cubic: MultiPoly) -> bool:
    idx = [cubic.variables.index(n) for n in ("p1", "p2", "p3")]
    for exp in cubic.terms:
        if sum(exp[i] for i in idx) > 1:
            return False
    return True
