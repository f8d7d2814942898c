"""Normal forms of rank-2 regular-singular formal connections.

A connection is a truncated series operator z d/dz + A(z) with 2x2 exact
matrix coefficients, A(0) traceless with eigenvalues +-theta/2.  A gauge
series U = 1 + U1 z + ... is computed order by order from

    (n + ad A(0)) U_n = known terms,

which is uniquely solvable except at the resonant order n = m = |theta|
(theta a nonzero integer), where the upper-right slot may be obstructed;
the obstruction constant is normalized to 0 or 1 by a diagonal gauge.  The
zero-eigenvalue case keeps its nilpotent constant term as the obstruction.
The resulting exact normal form drives the lattice classification, the
eigenline cases, and an independent brute-force lattice search used as the
classification oracle.

Series matrices are lists of 2x2 nested lists (index = power of z);
Laurent matrices are dicts mapping powers to 2x2 blocks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BadLeadingTerm, InsufficientOrder
from .gaussian import GaussianRational, parse_gaussian

Mat = list
_HALF = Fraction(1, 2)


def _zero_mat() -> Mat:
    z = GaussianRational(0)
    return [[z, z], [z, z]]


def _id_mat() -> Mat:
    return [[GaussianRational(1), GaussianRational(0)], [GaussianRational(0), GaussianRational(1)]]


def _mat_add(a: Mat, b: Mat) -> Mat:
    return [[a[i][j] + b[i][j] for j in range(2)] for i in range(2)]


def _mat_sub(a: Mat, b: Mat) -> Mat:
    return [[a[i][j] - b[i][j] for j in range(2)] for i in range(2)]


def _mat_mul(a: Mat, b: Mat) -> Mat:
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def _mat_scale(a: Mat, s) -> Mat:
    return [[a[i][j] * s for j in range(2)] for i in range(2)]


def _mat_inv(a: Mat) -> Mat:
    det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
    inv = det.inverse()
    return [[a[1][1] * inv, -a[0][1] * inv], [-a[1][0] * inv, a[0][0] * inv]]


def _mat_is_zero(a: Mat) -> bool:
    return all(a[i][j].is_zero() for i in range(2) for j in range(2))


def series_mul(a: Sequence[Mat], b: Sequence[Mat], order: int) -> list[Mat]:
    out = []
    for n in range(order + 1):
        acc = _zero_mat()
        for i in range(n + 1):
            if i < len(a) and n - i < len(b):
                acc = _mat_add(acc, _mat_mul(a[i], b[n - i]))
        out.append(acc)
    return out


def series_inverse(a: Sequence[Mat], order: int) -> list[Mat]:
    """Inverse of a matrix series with invertible constant term."""
    inv0 = _mat_inv(a[0])
    out = [inv0]
    for n in range(1, order + 1):
        acc = _zero_mat()
        for i in range(1, n + 1):
            if i < len(a):
                acc = _mat_add(acc, _mat_mul(a[i], out[n - i]))
        out.append(_mat_scale(_mat_mul(inv0, acc), GaussianRational(-1)))
    return out


@dataclass(frozen=True)
class FormalConnection:
    """Truncated z d/dz + A(z) with A(0) of eigenvalues +-theta/2."""

    theta: GaussianRational
    coeffs: tuple  # A_0 .. A_K

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @staticmethod
    def make(theta, coeffs) -> "FormalConnection":
        th = GaussianRational.of(theta)
        mats = tuple(
            tuple(tuple(GaussianRational.of(x) for x in row) for row in m) for m in coeffs
        )
        return FormalConnection(theta=th, coeffs=mats)

    def coeff(self, k: int) -> Mat:
        if k < len(self.coeffs):
            return [list(row) for row in self.coeffs[k]]
        return _zero_mat()

    def to_json(self) -> dict:
        return {
            "theta": str(self.theta),
            "coeffs": [[[str(x) for x in row] for row in m] for m in self.coeffs],
        }

    @staticmethod
    def from_json(doc: dict) -> "FormalConnection":
        return FormalConnection.make(
            parse_gaussian(doc["theta"]),
            [[[parse_gaussian(x) for x in row] for row in m] for m in doc["coeffs"]],
        )


@dataclass(frozen=True)
class NormalFormResult:
    """Gauge series and exact normal form of a connection.

    ``gauge`` conjugates the input into z d/dz + N with N = diag(lam, -lam)
    plus ``obstruction_a`` * z^resonance_m in the upper-right corner when
    resonant.  resonance_m = 0 encodes the zero-eigenvalue branch, where
    the obstruction is the constant nilpotent entry.
    """

    gauge: tuple            # series G_0, G_1, ... conjugating input to the normal form
    lam: GaussianRational   # the (1,1) entry of the constant part
    resonance_m: Optional[int]
    obstruction_a: Optional[GaussianRational]
    order: int

    def normal_matrix_coeff(self, k: int) -> Mat:
        out = _zero_mat()
        if k == 0:
            out[0][0] = self.lam
            out[1][1] = -self.lam
        if self.resonance_m is not None and k == self.resonance_m and self.obstruction_a:
            out[0][1] = out[0][1] + self.obstruction_a
        return out

    def gauge_coeff(self, k: int) -> Mat:
        if k < len(self.gauge):
            return [list(row) for row in self.gauge[k]]
        return _zero_mat()


def _integer_value(x: GaussianRational) -> Optional[int]:
    if x.im == 0 and x.re.denominator == 1:
        return int(x.re)
    return None


def _eigen_column(m: Mat, lam: GaussianRational) -> list:
    """A nonzero vector in ker(m - lam) via the adjugate, leading entry 1."""
    shifted = [[m[0][0] - lam, m[0][1]], [m[1][0], m[1][1] - lam]]
    adj = [[shifted[1][1], -shifted[0][1]], [-shifted[1][0], shifted[0][0]]]
    for col in range(2):
        v = [adj[0][col], adj[1][col]]
        if v[0] or v[1]:
            lead = v[0] if v[0] else v[1]
            inv = lead.inverse()
            return [v[0] * inv, v[1] * inv]
    raise BadLeadingTerm("leading matrix has no eigenvector for the declared eigenvalue")


def normal_form(conn: FormalConnection) -> NormalFormResult:
    """Solve the gauge recursion and extract the resonance obstruction."""
    a0 = conn.coeff(0)
    theta = conn.theta
    tr = a0[0][0] + a0[1][1]
    det = a0[0][0] * a0[1][1] - a0[0][1] * a0[1][0]
    target_det = -(theta * theta) * Fraction(1, 4)
    if not tr.is_zero() or det != target_det:
        raise BadLeadingTerm("leading matrix is not traceless with eigenvalues +-theta/2")

    k_order = conn.order
    theta_int = _integer_value(theta)

    if theta.is_zero():
        return _normal_form_theta_zero(conn)

    m = abs(theta_int) if theta_int is not None and theta_int != 0 else None
    if m is not None and k_order < m:
        raise InsufficientOrder(f"truncation order {k_order} cannot decide the order-{m} obstruction")

    if theta_int is not None:
        lam = GaussianRational(Fraction(-abs(theta_int), 2))
    else:
        lam = -theta * _HALF

    # exact diagonalization of the constant term, eigenvalue lam first
    v_minus = _eigen_column(a0, lam)
    v_plus = _eigen_column(a0, -lam)
    p = [[v_minus[0], v_plus[0]], [v_minus[1], v_plus[1]]]
    if (p[0][0] * p[1][1] - p[0][1] * p[1][0]).is_zero():
        raise BadLeadingTerm("constant term is not diagonalizable")
    p_inv = _mat_inv(p)
    series = [_mat_mul(_mat_mul(p_inv, conn.coeff(k)), p) for k in range(k_order + 1)]

    u = [_id_mat()]
    n_mat_series: dict[int, Mat] = {}
    obstruction = None
    two_lam = lam + lam
    for n in range(1, k_order + 1):
        rhs = _zero_mat()
        for i in range(1, n + 1):
            rhs = _mat_add(rhs, _mat_mul(u[n - i], series[i]))
        for i, nm in n_mat_series.items():
            if 0 <= n - i < len(u) and i <= n:
                rhs = _mat_sub(rhs, _mat_mul(nm, u[n - i]))
        un = _zero_mat()
        # (n + ad A0) acts diagonally on entries: factors n, n+2lam, n-2lam, n
        f12 = GaussianRational(n) + two_lam
        f21 = GaussianRational(n) - two_lam
        un[0][0] = rhs[0][0] / n
        un[1][1] = rhs[1][1] / n
        if m is not None and n == m:
            obstruction = rhs[0][1]
            if not obstruction.is_zero():
                n_mat_series[m] = [[GaussianRational(0), obstruction],
                                   [GaussianRational(0), GaussianRational(0)]]
            un[0][1] = GaussianRational(0)
        else:
            un[0][1] = rhs[0][1] / f12
        un[1][0] = rhs[1][0] / f21
        u.append(un)

    gauge = [_mat_mul(u_k, p_inv) for u_k in u]
    if m is None:
        return NormalFormResult(gauge=tuple(gauge), lam=lam, resonance_m=None,
                                obstruction_a=None, order=k_order)

    a_val = obstruction if obstruction is not None else GaussianRational(0)
    if not a_val.is_zero():
        # rescale the obstruction to 1 by the diagonal gauge diag(1/a, 1)
        d = [[a_val.inverse(), GaussianRational(0)], [GaussianRational(0), GaussianRational(1)]]
        gauge = [_mat_mul(d, g) for g in gauge]
        a_val = GaussianRational(1)
    return NormalFormResult(gauge=tuple(gauge), lam=lam, resonance_m=m,
                            obstruction_a=a_val, order=k_order)


def _normal_form_theta_zero(conn: FormalConnection) -> NormalFormResult:
    a0 = conn.coeff(0)
    k_order = conn.order
    if _mat_is_zero(a0):
        p = _id_mat()
        a_val = GaussianRational(0)
    else:
        # nilpotent constant term: basis (A0 v, v) gives the unit nilpotent
        v = None
        for cand in ([GaussianRational(1), GaussianRational(0)],
                     [GaussianRational(0), GaussianRational(1)]):
            image = [a0[0][0] * cand[0] + a0[0][1] * cand[1],
                     a0[1][0] * cand[0] + a0[1][1] * cand[1]]
            if image[0] or image[1]:
                v = cand
                break
        image = [a0[0][0] * v[0] + a0[0][1] * v[1], a0[1][0] * v[0] + a0[1][1] * v[1]]
        p = [[image[0], v[0]], [image[1], v[1]]]
        a_val = GaussianRational(1)
    p_inv = _mat_inv(p)
    series = [_mat_mul(_mat_mul(p_inv, conn.coeff(k)), p) for k in range(k_order + 1)]
    n0 = series[0]

    u = [_id_mat()]
    for n in range(1, k_order + 1):
        rhs = _zero_mat()
        for i in range(1, n + 1):
            rhs = _mat_add(rhs, _mat_mul(u[n - i], series[i]))
        # subtract N_0-interaction beyond the ad-term: handled inside solve
        un = _solve_shifted_ad(n, n0, rhs)
        u.append(un)
    gauge = [_mat_mul(u_k, p_inv) for u_k in u]
    return NormalFormResult(gauge=tuple(gauge), lam=GaussianRational(0), resonance_m=0,
                            obstruction_a=a_val, order=k_order)


def _solve_shifted_ad(n: int, n0: Mat, rhs: Mat) -> Mat:
    """Solve (n + ad n0)(X) = rhs for nilpotent n0 = a E12.

    ad is nilpotent, so (n + ad)^(-1) = (1/n)(1 - ad/n + ad^2/n^2 - ...).
    """
    inv_n = GaussianRational(Fraction(1, n))

    def ad(x: Mat) -> Mat:
        return _mat_sub(_mat_mul(n0, x), _mat_mul(x, n0))

    term = _mat_scale(rhs, inv_n)
    out = term
    for _ in range(3):
        term = _mat_scale(ad(term), -inv_n)
        if _mat_is_zero(term):
            break
        out = _mat_add(out, term)
    return out


def gauge_residuals(conn: FormalConnection, nf: NormalFormResult) -> list[Mat]:
    """Coefficients of G (z d/dz + A) - (z d/dz + N) G up to the truncation."""
    n_powers = [0]
    if nf.resonance_m and nf.obstruction_a and not nf.obstruction_a.is_zero():
        n_powers.append(nf.resonance_m)
    out = []
    for n in range(nf.order + 1):
        acc = _zero_mat()
        for i in range(n + 1):
            acc = _mat_add(acc, _mat_mul(nf.gauge_coeff(n - i), conn.coeff(i)))
        acc = _mat_sub(acc, _mat_scale(nf.gauge_coeff(n), GaussianRational(n)))
        for i in n_powers:
            if i <= n:
                acc = _mat_sub(acc, _mat_mul(nf.normal_matrix_coeff(i), nf.gauge_coeff(n - i)))
        out.append(acc)
    return out


# -- lattice classification ------------------------------------------------------------


@dataclass(frozen=True)
class LatticeClass:
    kind: str  # "Unique" | "ProjectiveLineFamily"
    parametrization: Optional[str] = None


def classify_lattices(nf: NormalFormResult) -> LatticeClass:
    """Unique invariant lattice, or a projective line of them."""
    if nf.resonance_m is None:
        return LatticeClass(kind="Unique")
    if nf.resonance_m == 0:
        if nf.obstruction_a and not nf.obstruction_a.is_zero():
            return LatticeClass(kind="Unique")
        return LatticeClass(kind="ProjectiveLineFamily",
                            parametrization="P(C b1 + C b2), trivial module")
    if nf.obstruction_a and not nf.obstruction_a.is_zero():
        return LatticeClass(kind="Unique")
    m = nf.resonance_m
    return LatticeClass(kind="ProjectiveLineFamily",
                        parametrization=f"P(C b1 + C z^-{m} b2)")


# -- brute-force lattice search (classification oracle) ------------------------------


def _laurent_mat_mul(a: dict, b: dict) -> dict:
    out: dict[int, Mat] = {}
    for pa, ma in a.items():
        for pb, mb in b.items():
            p = pa + pb
            prod = _mat_mul(ma, mb)
            out[p] = _mat_add(out[p], prod) if p in out else prod
    return {p: m for p, m in out.items() if not _mat_is_zero(m)}


def search_invariant_lattices(nf: NormalFormResult, grid: Sequence[int] = (-2, -1, 1, 2)) -> list[tuple]:
    """Candidate lattices with basis (b1 + c z^-m b2, b2) that are invariant.

    Exhaustive check over the grid of c values on the exact normal form:
    the base change is T = 1 + c z^-m E21, and the candidate lattice is
    invariant with the right induced eigenvalues iff
    T^-1 N T + T^-1 z dT/dz has entries in C[[z]] whose constant part is
    traceless with determinant -(m/2)^2.  Returns the valid pairs (1, c)
    with c != 0 (lattices distinct from the standard one); positive
    resonance order required.
    """
    m = nf.resonance_m
    if not m:
        return []
    lam = nf.lam
    n_mat: dict[int, Mat] = {0: nf.normal_matrix_coeff(0)}
    if nf.obstruction_a and not nf.obstruction_a.is_zero():
        n_mat[m] = nf.normal_matrix_coeff(m)

    valid = []
    zero = GaussianRational(0)
    for c_int in grid:
        c = GaussianRational(c_int)
        if c.is_zero():
            continue
        t_mat = {0: _id_mat(), -m: [[zero, zero], [c, zero]]}
        t_inv = {0: _id_mat(), -m: [[zero, zero], [-c, zero]]}
        t_deriv = {-m: [[zero, zero], [c * GaussianRational(-m), zero]]}
        new = _laurent_mat_mul(t_inv, _laurent_mat_mul(n_mat, t_mat))
        for p, mat in _laurent_mat_mul(t_inv, t_deriv).items():
            new[p] = _mat_add(new[p], mat) if p in new else mat
        new = {p: mat for p, mat in new.items() if not _mat_is_zero(mat)}
        if any(p < 0 for p in new):
            continue
        const = new.get(0, _zero_mat())
        tr = const[0][0] + const[1][1]
        det = const[0][0] * const[1][1] - const[0][1] * const[1][0]
        if tr.is_zero() and det == -(lam * lam):
            valid.append((1, c_int))
    return valid


# -- eigenlines / parabolic structures ---------------------------------------------------


@dataclass(frozen=True)
class EigenlineSet:
    kind: str  # "None" | "UniqueLine" | "ProjectiveLine"
    eta: GaussianRational
    witness: Optional[dict] = None          # z-power -> 2-vector, original basis
    second_witness: Optional[dict] = None   # second generator for a projective family


def _gauge_inverse_column(nf: NormalFormResult, col: int, shift: int) -> dict:
    """z^shift * (G^-1 e_col) as a truncated Laurent vector in the input basis."""
    ginv = series_inverse([nf.gauge_coeff(k) for k in range(nf.order + 1)], nf.order)
    out: dict[int, list] = {}
    for k, mat in enumerate(ginv):
        vec = [mat[0][col], mat[1][col]]
        if vec[0] or vec[1]:
            out[k + shift] = vec
    return out


def eigenline_set(nf: NormalFormResult, eta) -> EigenlineSet:
    """Eigenlines D(v) = eta v, by the resonance case analysis."""
    eta = GaussianRational.of(eta)
    if nf.resonance_m is None:
        for sign, col in ((1, 0), (-1, 1)):
            k = eta - nf.lam * sign
            ki = _integer_value(k)
            if ki is not None:
                return EigenlineSet(kind="UniqueLine", eta=eta,
                                    witness=_gauge_inverse_column(nf, col, ki))
        return EigenlineSet(kind="None", eta=eta)

    m = nf.resonance_m
    a = nf.obstruction_a or GaussianRational(0)
    k = eta - nf.lam  # lam = -m/2, so k = eta + m/2
    ki = _integer_value(k)
    if ki is None:
        return EigenlineSet(kind="None", eta=eta)
    if m > 0 and ki == m:
        # the +m/2 class: a single structure in either obstruction case
        return EigenlineSet(kind="UniqueLine", eta=eta,
                            witness=_gauge_inverse_column(nf, 0, m))
    if a.is_zero():
        return EigenlineSet(
            kind="ProjectiveLine", eta=eta,
            witness=_gauge_inverse_column(nf, 0, ki),
            second_witness=_gauge_inverse_column(nf, 1, ki - m),
        )
    return EigenlineSet(kind="UniqueLine", eta=eta,
                        witness=_gauge_inverse_column(nf, 0, ki))


def eigenline_residuals(conn: FormalConnection, eta, witness: dict) -> list:
    """Coefficients of (z d/dz + A) v - eta v, truncated at the input order.

    The witness is a Laurent vector; residual orders above
    min-order + truncation are not meaningful and are dropped.
    """
    eta = GaussianRational.of(eta)
    orders = sorted(witness)
    if not orders:
        return []
    base = orders[0]
    top = base + conn.order
    residuals = []
    for n in range(base, top + 1):
        acc = [GaussianRational(0), GaussianRational(0)]
        v_n = witness.get(n, [GaussianRational(0), GaussianRational(0)])
        acc[0] = acc[0] + v_n[0] * (n - 0) - eta * v_n[0]
        acc[1] = acc[1] + v_n[1] * n - eta * v_n[1]
        for i in range(0, conn.order + 1):
            v = witness.get(n - i)
            if v is None:
                continue
            a_i = conn.coeff(i)
            acc[0] = acc[0] + a_i[0][0] * v[0] + a_i[0][1] * v[1]
            acc[1] = acc[1] + a_i[1][0] * v[0] + a_i[1][1] * v[1]
        residuals.append(acc)
    return residuals


def connection_to_json_str(conn: FormalConnection) -> str:
    return json.dumps(conn.to_json(), indent=2)
