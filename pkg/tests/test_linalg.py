import random
from fractions import Fraction

import pytest

from p5iso.errors import Inconsistent, ShapeError, SingularSystem
from p5iso.gaussian import GaussianRational
from p5iso.linalg import (
    D_DT,
    D_DZ,
    DiffOperator,
    bareiss_solve,
    charpoly_coefficients,
    lie_bracket,
    mat_is_zero,
    mat_scale,
)
from p5iso.multipoly import MultiPoly
from p5iso.ratfunc import RationalFunction

U = ("t", "th0")


def v(name):
    return MultiPoly.variable(name, U)


def c(x):
    return MultiPoly.constant(x, U)


def test_identity_system():
    t, th0 = v("t"), v("th0")
    sol = bareiss_solve([[c(1), c(0)], [c(0), c(1)]], [t, th0])
    assert sol[0] == RationalFunction(t)
    assert sol[1] == RationalFunction(th0)


def test_back_substitution():
    t = v("t")
    sol = bareiss_solve([[t, c(1)], [c(0), t]], [c(1), c(0)])
    assert sol[0] == RationalFunction(c(1), t)
    assert sol[1].is_zero()


def test_random_polynomial_system_back_substitution_oracle():
    rng = random.Random(11)
    n = 4
    names = ("t", "th0")
    for _ in range(5):
        a = []
        for i in range(n):
            row = []
            for j in range(n):
                poly = MultiPoly(names)
                for name in names:
                    if rng.random() < 0.5:
                        poly = poly + MultiPoly.variable(name, names) * Fraction(rng.randint(-3, 3))
                poly = poly + Fraction(rng.randint(-3, 3))
                row.append(poly)
            a.append(row)
        rhs = [MultiPoly.constant(Fraction(rng.randint(-4, 4)), names) for _ in range(n)]
        try:
            sol = bareiss_solve(a, rhs)
        except SingularSystem:
            continue
        # independent oracle: substitute back and compare entrywise
        for i in range(n):
            acc = RationalFunction(0)
            for j in range(n):
                acc = acc + RationalFunction(a[i][j]) * sol[j]
            assert acc == RationalFunction(rhs[i])


def test_singular_and_inconsistent():
    t = v("t")
    with pytest.raises(SingularSystem):
        bareiss_solve([[t, t], [t, t]], [c(1), c(0)])
    with pytest.raises(Inconsistent) as info:
        bareiss_solve([[c(1)], [c(1)]], [c(1), c(2)])
    assert info.value.residual is not None


def test_overdetermined_consistent():
    t = v("t")
    sol = bareiss_solve([[c(1)], [c(2)]], [t, 2 * t])
    assert sol[0] == RationalFunction(t)


def _op_z(matrix, dynamic=()):
    return DiffOperator(D_DZ, 2, matrix, dynamic=dynamic)


def _op_t(matrix, dynamic=()):
    return DiffOperator(D_DT, 2, matrix, dynamic=dynamic)


def test_bracket_trivial():
    zero = RationalFunction(0)
    res = lie_bracket(_op_z([[zero, zero], [zero, zero]]), _op_t([[zero, zero], [zero, zero]]))
    assert mat_is_zero(res)


def test_bracket_constant_diagonals():
    one = RationalFunction(1)
    two = RationalFunction(2)
    zero = RationalFunction(0)
    res = lie_bracket(_op_z([[one, zero], [zero, two]]), _op_t([[two, zero], [zero, one]]))
    assert mat_is_zero(res)


def test_bracket_expanded_by_hand():
    z = RationalFunction.variable("z")
    t = RationalFunction.variable("t")
    zero = RationalFunction(0)
    one = RationalFunction(1)
    a = _op_z([[zero, t / z], [zero, zero]])
    b = _op_t([[one, zero], [zero, zero]])
    res = lie_bracket(a, b)
    # d(B)/dz - d(A)/dt + [A, B] = [[0, -(1 + t)/z], [0, 0]]
    assert res[0][0].is_zero() and res[1][0].is_zero() and res[1][1].is_zero()
    assert res[0][1] == -(1 + t) / z


def test_bracket_antisymmetry():
    z = RationalFunction.variable("z")
    t = RationalFunction.variable("t")
    zero = RationalFunction(0)
    a = _op_z([[zero, t / z], [RationalFunction(1), zero]])
    b = _op_t([[t, z], [zero, -t]])
    fwd = lie_bracket(a, b)
    bwd = lie_bracket(b, a)
    assert all((fwd[i][j] + bwd[i][j]).is_zero() for i in range(2) for j in range(2))


def test_bracket_shape_mismatch():
    zero = RationalFunction(0)
    a = _op_z([[zero, zero], [zero, zero]])
    b3 = DiffOperator(D_DT, 3, [[zero] * 3 for _ in range(3)])
    with pytest.raises(ShapeError):
        lie_bracket(a, b3)


def test_dynamic_symbols_enter_bracket():
    z = RationalFunction.variable("z")
    b0 = RationalFunction.variable("b0")
    zero = RationalFunction(0)
    a = _op_z([[b0 / z, zero], [zero, -b0 / z]], dynamic=("b0",))
    b = _op_t([[zero, zero], [zero, zero]])
    res = lie_bracket(a, b)
    assert res[0][0].uses("b0'")


def test_charpoly_leverrier():
    t = v("t")
    mat = [[t, c(1)], [c(0), t]]
    coeffs = charpoly_coefficients(mat)
    # det(T - A) = T^2 - 2t T + t^2
    assert coeffs[0] == -2 * t
    assert coeffs[1] == t * t


def test_trace_and_scale():
    one = RationalFunction(1)
    m = [[one, one], [one, one]]
    assert mat_scale(m, RationalFunction(2))[0][0] == RationalFunction(2)
