"""The rank-4 symmetric connection family and its Lax-pair derivations.

The operator acts on a free module with basis e0..e3 cyclically permuted by
an order-4 symmetry that also maps the fourth root zeta = z^(1/4) to
i*zeta.  All data is generated from the single image

    D(e0) = (zeta^2 + (t/4) zeta + s) e0 + (a1 + b1 zeta) e1
            + a2 e2 + (a3 + b3 zeta) e3

(s = -3/8 for the invariant-basis variant, +3/8 for the canonical-lattice
variant) by equivariance, and matrices over C(z) are obtained by rewriting
on an invariant basis.  Vectors with zeta-coefficients are handled by
:class:`ZetaVector`.

Derivations performed here (all exact, parameters symbolic):

- the 4x4 matrix of the operator on both invariant bases, checked against
  the pinned displays;
- the flow of (f0, f1) forced by a commuting d/dt partner (the f-system);
- the flow of (b1, b3) from equivariance on e0, with its Hamiltonian;
- the canonical-variant (f, g) system;
- the cyclic symmetry of the four-variable f-system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from . import golden
from .errors import DerivationFailure, InvalidParams
from .gaussian import GaussianRational
from .linalg import D_DT, Z_D_DZ, DiffOperator, total_t_derivative
from .multipoly import MultiPoly
from .ratfunc import RationalFunction
from .symsolve import solve_linear_symbolic

_I = GaussianRational(0, 1)
_QUARTER = Fraction(1, 4)
_HALF = Fraction(1, 2)

AB_VARS = ("t", "a1", "a2", "a3", "b1", "b3")


def _ipow(k: int) -> GaussianRational:
    return _I ** (k % 4)


class ZetaVector:
    """An element sum_k x_k(zeta) e_k with x_k Laurent in zeta.

    Stored as four dicts mapping zeta-exponent -> MultiPoly coefficient
    over a fixed parameter universe.
    """

    def __init__(self, universe: tuple[str, ...], parts: Sequence[dict] | None = None):
        self.universe = universe
        self.parts: list[dict[int, MultiPoly]] = [dict(p) for p in parts] if parts else [{} for _ in range(4)]

    def add_term(self, k: int, power: int, coeff: MultiPoly) -> None:
        if coeff.is_zero():
            return
        bucket = self.parts[k]
        prev = bucket.get(power)
        new = coeff if prev is None else prev + coeff
        if new.is_zero():
            bucket.pop(power, None)
        else:
            bucket[power] = new

    def __add__(self, other: "ZetaVector") -> "ZetaVector":
        out = ZetaVector(self.universe, self.parts)
        for k in range(4):
            for power, coeff in other.parts[k].items():
                out.add_term(k, power, coeff)
        return out

    def scale(self, power: int, coeff: MultiPoly) -> "ZetaVector":
        """Multiply by coeff * zeta^power."""
        out = ZetaVector(self.universe)
        for k in range(4):
            for p, c in self.parts[k].items():
                out.add_term(k, p + power, c * coeff)
        return out

    def sigma(self) -> "ZetaVector":
        """The order-4 symmetry: e_k -> e_{k+1}, zeta -> i zeta."""
        out = ZetaVector(self.universe)
        for k in range(4):
            for p, c in self.parts[k].items():
                out.add_term((k + 1) % 4, p, c * _ipow(p))
        return out

    def z_ddz(self) -> "ZetaVector":
        """Apply z d/dz to the zeta-coefficients: zeta^n -> (n/4) zeta^n."""
        out = ZetaVector(self.universe)
        for k in range(4):
            for p, c in self.parts[k].items():
                out.add_term(k, p, c * Fraction(p, 4))
        return out

    def map_coeffs(self, fn: Callable[[MultiPoly], MultiPoly]) -> "ZetaVector":
        out = ZetaVector(self.universe)
        for k in range(4):
            for p, c in self.parts[k].items():
                out.add_term(k, p, fn(c))
        return out


def _basis_vector(universe, k: int) -> ZetaVector:
    v = ZetaVector(universe)
    v.add_term(k, 0, MultiPoly.constant(1, universe))
    return v


def _d_images(universe, shift: Fraction, extra: dict | None = None) -> list[ZetaVector]:
    """Images D(e_k), generated from D(e0) by equivariance.

    ``shift`` is the scalar constant in the e0-coefficient (-3/8 or +3/8);
    ``extra`` optionally renames the coefficient symbols.
    """
    names = {"a1": "a1", "a2": "a2", "a3": "a3", "b1": "b1", "b3": "b3", "t": "t"}
    if extra:
        names.update(extra)
    sym = {k: MultiPoly.variable(v, universe) for k, v in names.items()}
    d_e0 = ZetaVector(universe)
    d_e0.add_term(0, 2, MultiPoly.constant(1, universe))
    d_e0.add_term(0, 1, sym["t"] * _QUARTER)
    d_e0.add_term(0, 0, MultiPoly.constant(shift, universe))
    d_e0.add_term(1, 0, sym["a1"])
    d_e0.add_term(1, 1, sym["b1"])
    d_e0.add_term(2, 0, sym["a2"])
    d_e0.add_term(3, 0, sym["a3"])
    d_e0.add_term(3, 1, sym["b3"])
    images = [d_e0]
    for _ in range(3):
        images.append(images[-1].sigma())
    return images


def _apply_images(vec: ZetaVector, images: list[ZetaVector]) -> ZetaVector:
    """sum_k x_k * images[k] for the linear part of an operator action."""
    out = ZetaVector(vec.universe)
    for k in range(4):
        for p, c in vec.parts[k].items():
            out = out + images[k].scale(p, c)
    return out


def _invariant_basis(universe, canonical: bool) -> list[ZetaVector]:
    """B_j = zeta^{s_j} sum_k i^{jk} e_k with shifts (0,1,2,3) or (0,-3,-2,-1)."""
    shifts = (0, -3, -2, -1) if canonical else (0, 1, 2, 3)
    basis = []
    for j in range(4):
        v = ZetaVector(universe)
        for k in range(4):
            v.add_term(k, shifts[j], MultiPoly.constant(_ipow(j * k), universe))
        basis.append(v)
    return basis


def _to_basis_coords(vec: ZetaVector, canonical: bool) -> list[MultiPoly]:
    """Coordinates of ``vec`` on the invariant basis, as polynomials in z."""
    shifts = (0, -3, -2, -1) if canonical else (0, 1, 2, 3)
    universe = vec.universe
    coords = []
    quarter = Fraction(1, 4)
    for j in range(4):
        acc: dict[int, MultiPoly] = {}
        for k in range(4):
            w = _ipow(-j * k) * quarter
            for p, c in vec.parts[k].items():
                power = p - shifts[j]
                prev = acc.get(power)
                term = c * w
                acc[power] = term if prev is None else prev + term
        out = MultiPoly(("z",) + universe)
        for power, c in acc.items():
            if c.is_zero():
                continue
            if power % 4 != 0 or power < 0:
                raise DerivationFailure(
                    f"coordinate {j} has fractional z-power zeta^{power}", detail=c)
            out = out + c.align(out.variables) * MultiPoly.variable("z", out.variables) ** (power // 4)
        coords.append(out)
    return coords


def d_matrix_from_expansion(canonical: bool = False) -> list[list[MultiPoly]]:
    """Matrix of the operator on the invariant basis, via equivariance."""
    universe = AB_VARS
    shift = Fraction(3, 8) if canonical else Fraction(-3, 8)
    images = _d_images(universe, shift)
    basis = _invariant_basis(universe, canonical)
    cols = []
    for b in basis:
        image = b.z_ddz() + _apply_images(b, images)
        cols.append(_to_basis_coords(image, canonical))
    return [[cols[j][i] for j in range(4)] for i in range(4)]


def e_matrix_from_expansion() -> list[list[MultiPoly]]:
    """Matrix of the d/dt partner on the invariant basis, h-symbols free."""
    universe = AB_VARS + ("h1", "h2", "h3")
    h = [MultiPoly.variable(n, universe) for n in ("h1", "h2", "h3")]
    e_e0 = ZetaVector(universe)
    e_e0.add_term(0, 1, MultiPoly.constant(1, universe))
    for m in range(1, 4):
        e_e0.add_term(m, 0, h[m - 1])
    images = [e_e0]
    for _ in range(3):
        images.append(images[-1].sigma())
    basis = _invariant_basis(universe, canonical=False)
    cols = [_to_basis_coords(_apply_images(b, images), canonical=False) for b in basis]
    return [[cols[j][i] for j in range(4)] for i in range(4)]


# -- parameter dictionary ---------------------------------------------------------


def eps_from_ab(a1, a2, a3) -> tuple:
    return (
        a1 + a2 + a3 - Fraction(3, 8),
        -(_I * a1) - a2 + _I * a3 - Fraction(1, 8),
        -a1 + a2 - a3 + Fraction(1, 8),
        _I * a1 - a2 - _I * a3 + Fraction(3, 8),
    )


def f_from_b(b1, b3, t) -> tuple:
    q = t * _QUARTER
    return (
        q + b1 + b3,
        q - _I * b1 + _I * b3,
        q - b1 - b3,
        q + _I * b1 - _I * b3,
    )


def b_from_f(f0, f1, t) -> tuple:
    """Invert the (b1, b3) -> (f0, f1) half of the dictionary."""
    u = f0 - t * _QUARTER
    v = f1 - t * _QUARTER
    b1 = (u + _I * v) * _HALF
    b3 = (u - _I * v) * _HALF
    return b1, b3


@dataclass(frozen=True)
class Rank4Params:
    """Symmetric-basis coefficients with their invariant-basis images."""

    a1: object
    a2: object
    a3: object
    b1: object
    b3: object
    t: object

    def __post_init__(self):
        if isinstance(self.t, GaussianRational) and self.t.is_zero():
            raise InvalidParams("t must be nonzero")

    @property
    def eps(self) -> tuple:
        return eps_from_ab(self.a1, self.a2, self.a3)

    @property
    def f(self) -> tuple:
        return f_from_b(self.b1, self.b3, self.t)

    def check_invariants(self) -> None:
        e = self.eps
        f = self.f
        total = e[0] + e[1] + e[2] + e[3]
        if isinstance(total, GaussianRational) and not total.is_zero():
            raise InvalidParams("eps entries do not sum to zero")
        for pair in ((f[0] + f[2]), (f[1] + f[3])):
            diff = pair - self.t * _HALF
            if isinstance(diff, GaussianRational) and not diff.is_zero():
                raise InvalidParams("f-sum constraint violated")


def build_D(params: Rank4Params, canonical: bool = False) -> DiffOperator:
    """The z d/dz operator of the family at the given parameter values."""
    params.check_invariants()
    values = {
        "a1": MultiPoly.constant(GaussianRational.of(params.a1)),
        "a2": MultiPoly.constant(GaussianRational.of(params.a2)),
        "a3": MultiPoly.constant(GaussianRational.of(params.a3)),
        "b1": MultiPoly.constant(GaussianRational.of(params.b1)),
        "b3": MultiPoly.constant(GaussianRational.of(params.b3)),
        "t": MultiPoly.constant(GaussianRational.of(params.t)),
    }
    mat = d_matrix_from_expansion(canonical)
    entries = [[RationalFunction(e.subs(values)) for e in row] for row in mat]
    return DiffOperator(Z_D_DZ, 4, entries)


def build_E(params: Rank4Params, g: Sequence) -> DiffOperator:
    """The d/dt partner with prescribed diagonal; requires sum(g) = 0."""
    total = g[0] + g[1] + g[2] + g[3]
    if isinstance(total, GaussianRational) and not total.is_zero():
        raise InvalidParams("g entries must sum to zero")
    z = RationalFunction.variable("z")
    zero = RationalFunction(0)
    one = RationalFunction(1)
    gg = [RationalFunction(MultiPoly.constant(GaussianRational.of(x))) for x in g]
    mat = [
        [gg[0], zero, zero, z],
        [one, gg[1], zero, zero],
        [zero, one, gg[2], zero],
        [zero, zero, one, gg[3]],
    ]
    return DiffOperator(D_DT, 4, mat)


# -- the f-system -----------------------------------------------------------------

F_UNIVERSE = ("z", "t", "f0", "f1", "e0", "e1", "e2", "e3",
              "g0", "g1", "g2", "g3", "f0'", "f1'")


def _f_matrices():
    z, t, f0, f1 = (MultiPoly.variable(n, F_UNIVERSE) for n in ("z", "t", "f0", "f1"))
    e = [MultiPoly.variable(f"e{j}", F_UNIVERSE) for j in range(4)]
    g = [MultiPoly.variable(f"g{j}", F_UNIVERSE) for j in range(4)]
    one = MultiPoly.constant(1, F_UNIVERSE)
    zero = MultiPoly(F_UNIVERSE)
    f2 = t * _HALF - f0
    f3 = t * _HALF - f1
    dmat = [
        [e[0], zero, z, z * f0],
        [f1, e[1], zero, z],
        [one, f2, e[2], zero],
        [zero, one, f3, e[3]],
    ]
    emat = [
        [g[0], zero, zero, z],
        [one, g[1], zero, zero],
        [zero, one, g[2], zero],
        [zero, zero, one, g[3]],
    ]
    return dmat, emat, g


def _bracket_equations(dmat, emat, dynamic) -> list[MultiPoly]:
    """z-coefficients of z dE/dz - dD/dt + [D, E] over the shared universe."""
    n = len(dmat)
    universe = dmat[0][0].variables
    z = MultiPoly.variable("z", universe)
    eqs = []
    for i in range(n):
        for j in range(n):
            acc = z * emat[i][j].derivative("z") - total_t_derivative(dmat[i][j], dynamic)
            for k in range(n):
                acc = acc + dmat[i][k] * emat[k][j] - emat[i][k] * dmat[k][j]
            if acc.is_zero():
                continue
            eqs.extend(acc.coeffs_in("z").values())
    return eqs


@lru_cache(maxsize=1)
def derive_f_system() -> tuple[MultiPoly, MultiPoly]:
    """The flow of (f0, f1): returns (2t f0', 2t f1') as polynomials."""
    dmat, emat, g = _f_matrices()
    eqs = _bracket_equations(dmat, emat, dynamic=("f0", "f1"))
    eqs.append(g[0] + g[1] + g[2] + g[3])
    sol = solve_linear_symbolic(eqs, ["g0", "g1", "g2", "g3", "f0'", "f1'"])
    t = RationalFunction.variable("t")
    p0 = (2 * t * sol["f0'"]).as_poly()
    p1 = (2 * t * sol["f1'"]).as_poly()
    return p0, p1


def f_system_full() -> tuple[MultiPoly, MultiPoly, MultiPoly, MultiPoly]:
    """(2t f_j')_{j=0..3} with f2, f3 expressed back through the constraints."""
    p0, p1 = derive_f_system()
    t = MultiPoly.variable("t", p0.variables)
    return p0, p1, t - p0, t - p1


def f_flow_functions():
    """Right-hand sides f0', f1' as rational functions (for integration)."""
    p0, p1 = derive_f_system()
    t = RationalFunction.variable("t")
    return RationalFunction(p0) / (2 * t), RationalFunction(p1) / (2 * t)


F4_UNIVERSE = ("z", "t", "f0", "f1", "f2", "f3", "e0", "e1", "e2", "e3",
               "g0", "g1", "g2", "g3", "f0'", "f1'", "f2'", "f3'")


@lru_cache(maxsize=1)
def derive_f_system_four() -> dict:
    """Flow of all four f-variables, extending the system off the constraints.

    The commutator equations come in pairs that coincide only on the
    constraint surface f0 + f2 = f1 + f3 = t/2; one representative of each
    pair is kept, and the remaining degree of freedom in the partner
    diagonal is fixed by d/dt(f0 + f2) = 1/2, which the reduced system
    satisfies identically.  The result is a vector field on C^4 that
    agrees with the reduced flow on the surface and preserves it.
    """
    z, t = (MultiPoly.variable(n, F4_UNIVERSE) for n in ("z", "t"))
    f = [MultiPoly.variable(f"f{j}", F4_UNIVERSE) for j in range(4)]
    e = [MultiPoly.variable(f"e{j}", F4_UNIVERSE) for j in range(4)]
    g = [MultiPoly.variable(f"g{j}", F4_UNIVERSE) for j in range(4)]
    one = MultiPoly.constant(1, F4_UNIVERSE)
    zero = MultiPoly(F4_UNIVERSE)
    dmat = [
        [e[0], zero, z, z * f[0]],
        [f[1], e[1], zero, z],
        [one, f[2], e[2], zero],
        [zero, one, f[3], e[3]],
    ]
    emat = [
        [g[0], zero, zero, z],
        [one, g[1], zero, zero],
        [zero, one, g[2], zero],
        [zero, zero, one, g[3]],
    ]
    dynamic = ("f0", "f1", "f2", "f3")
    zvar = z
    eqs = []
    for (i, j) in ((1, 0), (2, 1), (3, 2), (0, 3), (2, 0), (3, 1)):
        acc = zvar * emat[i][j].derivative("z") - total_t_derivative(dmat[i][j], dynamic)
        for k in range(4):
            acc = acc + dmat[i][k] * emat[k][j] - emat[i][k] * dmat[k][j]
        eqs.extend(acc.coeffs_in("z").values())
    eqs.append(g[0] + g[1] + g[2] + g[3])
    half = MultiPoly.constant(Fraction(1, 2), F4_UNIVERSE)
    eqs.append(MultiPoly.variable("f0'", F4_UNIVERSE) + MultiPoly.variable("f2'", F4_UNIVERSE) - half)
    unknowns = [f"f{j}'" for j in range(4)] + [f"g{j}" for j in range(4)]
    return solve_linear_symbolic(eqs, unknowns)


# -- cyclic symmetry of the f-system ------------------------------------------------


@dataclass(frozen=True)
class EpsAction:
    """eps_j -> eps_{perm[j]} + shift[j] accompanying f_j -> f_{j+1}."""

    perm: tuple[int, int, int, int]
    shift: tuple[Fraction, Fraction, Fraction, Fraction]

    def apply(self, eps: Sequence) -> tuple:
        return tuple(eps[self.perm[j]] + self.shift[j] for j in range(4))

    def order(self, max_order: int = 8) -> int:
        base = (Fraction(1), Fraction(2), Fraction(4), Fraction(8))
        current = base
        for n in range(1, max_order + 1):
            current = self.apply(current)
            if tuple(current) == base:
                return n
        return 0


def _f_shift_substitution() -> dict:
    """f0 -> f1, f1 -> t/2 - f0 inside the reduced two-variable system."""
    t = RationalFunction.variable("t")
    f0 = RationalFunction.variable("f0")
    f1 = RationalFunction.variable("f1")
    return {"f0": f1, "f1": t * _HALF - f0}


def _bucket_by_free_monomials(p: MultiPoly, unknowns: Sequence[str]) -> list[MultiPoly]:
    """Group terms by their monomial in the non-unknown variables.

    p vanishes identically in the free variables iff every bucket (a
    polynomial in the unknowns alone) vanishes.
    """
    unknown_idx = [k for k, v in enumerate(p.variables) if v in unknowns]
    keep = set(unknown_idx)
    buckets: dict[tuple, dict[tuple, object]] = {}
    for exp, coeff in p.terms.items():
        free_key = tuple(e if k not in keep else 0 for k, e in enumerate(exp))
        unk_exp = tuple(e if k in keep else 0 for k, e in enumerate(exp))
        buckets.setdefault(free_key, {})[unk_exp] = coeff
    return [MultiPoly(p.variables, terms) for terms in buckets.values()]


def check_cyclic_symmetry(action: EpsAction) -> bool:
    """Is the four-variable f-system invariant under the cyclic shift + action?

    Requires both the symbolic invariance identities and that the action has
    order exactly 4.
    """
    p = f_system_full()
    fsub = _f_shift_substitution()
    eps_syms = tuple(RationalFunction.variable(f"e{j}") for j in range(4))
    eps_new = action.apply(eps_syms)
    esub = {f"e{j}": eps_new[j] for j in range(4)}
    sub = dict(fsub)
    sub.update(esub)
    for j in range(4):
        lhs = RationalFunction(p[j]).subs(sub)
        rhs = RationalFunction(p[(j + 1) % 4])
        if lhs != rhs:
            return False
    return action.order() == 4


@lru_cache(maxsize=1)
def find_cyclic_eps_action() -> EpsAction:
    """Solve for the constant shifts making the cyclic substitution a symmetry."""
    p = f_system_full()
    fsub = _f_shift_substitution()
    shifts = tuple(RationalFunction.variable(f"c{j}") for j in range(4))
    eps_syms = tuple(RationalFunction.variable(f"e{j}") for j in range(4))
    sub = dict(fsub)
    sub.update({f"e{j}": eps_syms[(j + 1) % 4] + shifts[j] for j in range(4)})
    equations = []
    unknown_names = ("c0", "c1", "c2", "c3")
    for j in range(4):
        delta = RationalFunction(p[j]).subs(sub) - RationalFunction(p[(j + 1) % 4])
        equations.extend(_bucket_by_free_monomials(delta.numerator, unknown_names))
    # the flow only sees eps-differences; keep the zero-sum normalization
    equations.append(sum((RationalFunction.variable(c) for c in unknown_names), RationalFunction(0)))
    sol = solve_linear_symbolic(equations, list(unknown_names))
    shift = tuple(Fraction(sol[f"c{j}"].as_poly().constant_value().re) for j in range(4))
    action = EpsAction(perm=(1, 2, 3, 0), shift=shift)
    if not check_cyclic_symmetry(action):
        raise DerivationFailure("solved shifts do not give a symmetry", detail=shift)
    return action


# -- the b-system and its Hamiltonian ------------------------------------------------

B_UNIVERSE = ("t", "a1", "a2", "a3", "b1", "b3", "h1", "h2", "h3", "b1'", "b3'")


@lru_cache(maxsize=1)
def derive_b_system() -> dict:
    """Flow of (b1, b3) and the h-coefficients from equivariance on e0."""
    universe = B_UNIVERSE
    images_d = _d_images(universe, Fraction(-3, 8))
    h = [MultiPoly.variable(n, universe) for n in ("h1", "h2", "h3")]
    e_e0 = ZetaVector(universe)
    e_e0.add_term(0, 1, MultiPoly.constant(1, universe))
    for m in range(1, 4):
        e_e0.add_term(m, 0, h[m - 1])
    images_e = [e_e0]
    for _ in range(3):
        images_e.append(images_e[-1].sigma())

    d_e0 = images_d[0]
    # D(E(e0)) = (z d/dz of the zeta-factor) + linear action
    de = _apply_images(e_e0, images_d) + e_e0.z_ddz()
    # E(D(e0)) = (d/dt of the coefficients) + linear action
    ed = _apply_images(d_e0, images_e) + d_e0.map_coeffs(
        lambda c: total_t_derivative(c, ("b1", "b3")))
    residual = de + ed.scale(0, MultiPoly.constant(-1, universe))
    eqs = []
    for k in range(4):
        eqs.extend(residual.parts[k].values())
    sol = solve_linear_symbolic(eqs, ["h1", "h2", "h3", "b1'", "b3'"])
    return sol


def b_flow_polys() -> tuple[MultiPoly, MultiPoly]:
    """(4t b1', 4t b3') as polynomials."""
    sol = derive_b_system()
    t = RationalFunction.variable("t")
    return (4 * t * sol["b1'"]).as_poly(), (4 * t * sol["b3'"]).as_poly()


def hamiltonian_residuals() -> tuple[RationalFunction, RationalFunction]:
    """b1' - dH/db3 and b3' + dH/db1 for the pinned H (both must vanish)."""
    sol = derive_b_system()
    h = golden.b_hamiltonian()
    r1 = sol["b1'"] - h.derivative("b3")
    r3 = sol["b3'"] + h.derivative("b1")
    return r1, r3


def hamiltonian_t_scaled_residuals() -> tuple[RationalFunction, RationalFunction]:
    """t b1' - dH/db3 and t b3' + dH/db1 for the pinned H (do not vanish)."""
    sol = derive_b_system()
    t = RationalFunction.variable("t")
    h = golden.b_hamiltonian()
    return t * sol["b1'"] - h.derivative("b3"), t * sol["b3'"] + h.derivative("b1")


def b_flow_functions():
    sol = derive_b_system()
    return sol["b1'"], sol["b3'"]


# -- the canonical-lattice variant ----------------------------------------------------

FG_UNIVERSE = ("z", "t", "f", "g", "e0", "e1", "e2",
               "x0", "x1", "x2", "x3", "f'", "g'")


@lru_cache(maxsize=1)
def derive_canonical_fg() -> tuple[MultiPoly, MultiPoly]:
    """The canonical-variant flow: returns (2t f', 2t g') as polynomials."""
    z, t, f, g = (MultiPoly.variable(n, FG_UNIVERSE) for n in ("z", "t", "f", "g"))
    e = [MultiPoly.variable(f"e{j}", FG_UNIVERSE) for j in range(3)]
    x = [MultiPoly.variable(f"x{j}", FG_UNIVERSE) for j in range(4)]
    one = MultiPoly.constant(1, FG_UNIVERSE)
    zero = MultiPoly(FG_UNIVERSE)
    e3 = -e[0] - e[1] - e[2]
    f1 = t * _HALF - f
    g1 = t * _HALF - g
    dmat = [
        [e[0], zero, one, g],
        [z * f, e[1], zero, z],
        [z, g1, e[2], zero],
        [zero, one, f1, e3],
    ]
    emat = [
        [x[0], zero, zero, one],
        [z, x[1], zero, zero],
        [zero, one, x[2], zero],
        [zero, zero, one, x[3]],
    ]
    eqs = _bracket_equations(dmat, emat, dynamic=("f", "g"))
    eqs.append(x[0] + x[1] + x[2] + x[3])
    sol = solve_linear_symbolic(eqs, ["x0", "x1", "x2", "x3", "f'", "g'"])
    t_rf = RationalFunction.variable("t")
    return (2 * t_rf * sol["f'"]).as_poly(), (2 * t_rf * sol["g'"]).as_poly()


# -- formal data at infinity --------------------------------------------------------


def leading_symbol_charpoly() -> MultiPoly:
    """Characteristic polynomial of the lattice operator matrix, in (T, z, t)."""
    from .linalg import charpoly_coefficients

    mat = golden.rank4_linf_matrix()
    universe = ("T", "z", "t")
    mat = [[e.align(("z", "t")).align(universe) for e in row] for row in mat]
    coeffs = charpoly_coefficients(mat)
    tvar = MultiPoly.variable("T", universe)
    out = tvar ** 4
    for k, c in enumerate(coeffs):
        out = out + c * tvar ** (3 - k)
    return out


def eigenvalue_product_charpoly() -> MultiPoly:
    """prod_j (T - q_j) for q_j the conjugates of zeta^2 + (t/4) zeta."""
    universe = ("T", "t")
    tvar = MultiPoly.variable("T", universe)
    qt = MultiPoly.variable("t", universe) * _QUARTER
    prod = None
    for j in range(4):
        vec = ZetaVector(universe)
        vec.add_term(0, 2, MultiPoly.constant(_ipow(2 * j), universe))
        vec.add_term(0, 1, qt * _ipow(j))
        factor = {0: tvar}
        for p, c in vec.parts[0].items():
            factor[p] = factor.get(p, MultiPoly(universe)) - c
        prod = factor if prod is None else _zeta_poly_mul(prod, factor, universe)
    out = MultiPoly(("T", "z", "t"))
    for p, c in prod.items():
        if c.is_zero():
            continue
        if p % 4 != 0 or p < 0:
            raise DerivationFailure("eigenvalue product has fractional z-powers")
        out = out + c.align(out.variables) * MultiPoly.variable("z", out.variables) ** (p // 4)
    return out


def _zeta_poly_mul(a: dict, b: dict, universe) -> dict:
    out: dict[int, MultiPoly] = {}
    for pa, ca in a.items():
        for pb, cb in b.items():
            p = pa + pb
            term = ca * cb
            out[p] = out.get(p, MultiPoly(universe)) + term
    return {p: c for p, c in out.items() if not c.is_zero()}


def quasi_homogeneous_part(p: MultiPoly, weights: dict[str, int], weight: int) -> MultiPoly:
    out = MultiPoly(p.variables)
    w = [weights.get(v, 0) for v in p.variables]
    for exp, coeff in p.terms.items():
        if sum(e * wk for e, wk in zip(exp, w)) == weight:
            out.terms[exp] = coeff
    return out
