"""Complex adaptive ODE integration and the numerical experiments.

The integrator is an embedded Dormand-Prince 5(4) pair over complex state
vectors, driven along piecewise paths (segments and circular arcs) in the
complex plane.  On top of it sit:

- fundamental-matrix transport around loops and monodromy estimates;
- the isomonodromy drift experiment (trace invariants before and after a
  flow in t, with automatic semicircle detours around movable poles);
- the scalar-equation residual of a trajectory;
- the Riccati embedding run and the f-/b-system cross-validation.

Only conjugation invariants (traces, characteristic coefficients) are ever
compared across t; raw monodromy matrices are gauge-dependent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import golden, lax2, rank4
from .compile import compile_expr
from .errors import IntegrationFailure, InvalidLoop, InvalidParams, PathBlocked
from .gaussian import GaussianRational
from .linalg import total_t_derivative
from .moduli2 import Theta, matrix_polys, Rank2ChartPoint
from .ratfunc import RationalFunction


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = 0.1
    max_steps: int = 200_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.max_steps <= 0:
            raise InvalidParams("tolerances and step budget must be positive")


@dataclass(frozen=True)
class Line:
    start: complex
    end: complex

    def point(self, s: float) -> complex:
        return self.start + (self.end - self.start) * s

    def velocity(self, s: float) -> complex:
        return self.end - self.start


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    angle0: float
    angle1: float

    def point(self, s: float) -> complex:
        phi = self.angle0 + (self.angle1 - self.angle0) * s
        return self.center + self.radius * cmath.exp(1j * phi)

    def velocity(self, s: float) -> complex:
        phi = self.angle0 + (self.angle1 - self.angle0) * s
        return self.radius * 1j * (self.angle1 - self.angle0) * cmath.exp(1j * phi)


def circle(center: complex, radius: float, base_angle: float = 0.0,
           orientation: int = 1) -> list[Arc]:
    """A full loop as one arc; positive orientation is counterclockwise."""
    if orientation not in (1, -1):
        raise InvalidLoop("orientation must be +1 or -1")
    return [Arc(center, radius, base_angle, base_angle + orientation * 2 * math.pi)]


@dataclass
class Trajectory:
    names: tuple[str, ...]
    samples: list  # (parameter value along the path, state ndarray)
    blowup_flag: Optional[complex] = None

    def final(self):
        return self.samples[-1]


# Dormand-Prince 5(4) tableau
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)


def _dp_step(f, s, y, h):
    k = []
    for stage in range(7):
        ys = y
        for j, a in enumerate(_DP_A[stage]):
            if a:
                ys = ys + h * a * k[j]
        k.append(f(s + _DP_C[stage] * h, ys))
    y5 = y
    for j, b in enumerate(_DP_B5):
        if b:
            y5 = y5 + h * b * k[j]
    y4 = y
    for j, b in enumerate(_DP_B4):
        if b:
            y4 = y4 + h * b * k[j]
    return y5, y4


def integrate_segment(f, y0, cfg: IntegratorConfig, record=None,
                      s0: float = 0.0, s1: float = 1.0):
    """Adaptive integration of y' = f(s, y) on [s0, s1]; complex states."""
    y = np.asarray(y0, dtype=complex)
    s = s0
    h = min(cfg.max_step, (s1 - s0) / 8 if s1 > s0 else cfg.max_step)
    h = max(h, 1e-8)
    steps = 0
    min_h = 1e-13 * max(1.0, abs(s1 - s0))
    scale0 = float(np.max(np.abs(y))) + 1.0
    while s < s1 - 1e-15:
        if steps >= cfg.max_steps:
            raise IntegrationFailure("step budget exhausted")
        h = min(h, s1 - s)
        try:
            y5, y4 = _dp_step(f, s, y, h)
        except (ZeroDivisionError, OverflowError, FloatingPointError):
            y5 = y4 = None
        bad = y5 is None or not np.all(np.isfinite(y5.view(float)))
        if not bad:
            sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y5))
            err = float(np.sqrt(np.mean((np.abs(y5 - y4) / sc) ** 2)))
        else:
            err = math.inf
        if err <= 1.0:
            s += h
            y = y5
            if record is not None:
                record(s, y)
            factor = 5.0 if err == 0 else min(5.0, 0.9 * err ** -0.2)
            h = min(cfg.max_step, h * factor)
            steps += 1
            continue
        h *= max(0.2, 0.9 * err ** -0.2) if err != math.inf else 0.1
        steps += 1
        if h < min_h:
            grown = float(np.max(np.abs(y))) > 1e6 * scale0 or bad
            if grown:
                return y, s, True  # pole signature
            raise IntegrationFailure("step underflow without pole signature")
    return y, s, False


def integrate_ode(field: Callable, y0, path: Sequence, cfg: IntegratorConfig = IntegratorConfig(),
                  names: tuple[str, ...] = ("y",)) -> Trajectory:
    """Integrate dy/dz = field(z, y) along a piecewise path in z."""
    samples = []
    y = np.asarray(y0, dtype=complex)
    samples.append((path[0].point(0.0), y.copy()))
    for seg in path:
        def f(s, state, seg=seg):
            return seg.velocity(s) * np.asarray(field(seg.point(s), state))

        def rec(s, state, seg=seg):
            samples.append((seg.point(s), state.copy()))

        y, s_reached, blowup = integrate_segment(f, y, cfg, record=rec)
        if blowup:
            return Trajectory(names=names, samples=samples, blowup_flag=seg.point(s_reached))
    return Trajectory(names=names, samples=samples)


# -- loop monodromy -----------------------------------------------------------------


@dataclass(frozen=True)
class MonodromyEstimate:
    base_point: complex
    center: complex
    radius: float
    orientation: int
    matrix: np.ndarray
    error_estimate: float

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def charpoly(self) -> np.ndarray:
        return np.poly(self.matrix)


def loop_monodromy(matrix_fn: Callable[[complex], np.ndarray], n: int,
                   center: complex, radius: float,
                   cfg: IntegratorConfig = IntegratorConfig(),
                   orientation: int = 1, base_angle: float = 0.0,
                   singularities: Sequence[complex] = ()) -> MonodromyEstimate:
    """Fundamental matrix of (d/dz + A) Y = 0 around a circle.

    ``matrix_fn`` returns A(z); horizontal sections satisfy Y' = -A Y.
    """
    for sing in singularities:
        if abs(abs(sing - center) - radius) < 1e-9:
            raise InvalidLoop(f"loop passes through singularity {sing}")

    def field(z, y):
        a = matrix_fn(z)
        return (-a @ y.reshape(n, n)).reshape(-1)

    path = circle(center, radius, base_angle, orientation)
    y0 = np.eye(n, dtype=complex).reshape(-1)
    traj = integrate_ode(field, y0, path, cfg, names=("Y",))
    if traj.blowup_flag is not None:
        raise IntegrationFailure(f"monodromy transport blew up near {traj.blowup_flag}")
    mat = traj.final()[1].reshape(n, n)
    det = complex(np.linalg.det(mat))
    err = max(abs(det - 1.0), 10 * cfg.rel_tol * float(np.linalg.norm(mat)))
    return MonodromyEstimate(
        base_point=path[0].point(0.0), center=center, radius=radius,
        orientation=orientation, matrix=mat, error_estimate=err,
    )


def rank2_matrix_fn(point_values: dict, th: Theta) -> Callable[[complex], np.ndarray]:
    """A(z) for a rank-2 chart point with complex values."""
    p = Rank2ChartPoint(point_values["chart"],
                        {k: v for k, v in point_values.items() if k not in ("chart", "t")},
                        point_values["t"])
    a, b, c = matrix_polys(p, th)

    def horner(coeffs, z):
        acc = 0j
        for x in reversed(coeffs):
            acc = acc * z + complex(x)
        return acc

    def fn(z: complex) -> np.ndarray:
        den = z * (z - 1.0)
        av = horner(a, z) / den
        return np.array([[av, horner(c, z) / den], [horner(b, z) / den, -av]])

    return fn


# -- the rank-2 isomonodromy experiment ------------------------------------------------


def _compiled_rank2_flow(th: Theta):
    pair = lax2.solve_lax_pair_symbolic()
    order = ("a0", "b0", "c1", "t", "th0", "th1", "th")
    fns = {k: compile_expr(v, order) for k, v in pair.flow.items()}
    thv = (complex(th.theta0), complex(th.theta1), complex(th.theta))

    def flow(t: complex, state: np.ndarray) -> np.ndarray:
        a0, b0, c1 = state
        args = (a0, b0, c1, t) + thv
        return np.array([fns["a0'"](*args), fns["b0'"](*args), fns["c1'"](*args)])

    return flow


def flow_with_detours(flow, state0, t0: complex, t1: complex,
                      cfg: IntegratorConfig, max_detours: int = 6) -> Trajectory:
    """Integrate a t-flow, detouring around movable poles by semicircles.

    On blow-up the run backs off to the last sample a safe radius away from
    the pole estimate, makes a half-turn around it, and continues toward
    the target; both half-turn orientations are tried.
    """
    samples = [(t0, np.asarray(state0, dtype=complex))]
    current_t = t0
    state = np.asarray(state0, dtype=complex)
    detours = 0
    while abs(current_t - t1) > 1e-13:
        seg = Line(current_t, t1)

        def f(s, y, seg=seg):
            return seg.velocity(s) * flow(seg.point(s), y)

        local = []

        def rec(s, y, seg=seg, local=local):
            local.append((seg.point(s), y.copy()))

        y, s_reached, blowup = integrate_segment(f, state, cfg, record=rec)
        if not blowup:
            samples.extend(local)
            return Trajectory(names=("state",), samples=samples)
        if detours >= max_detours:
            raise PathBlocked("could not avoid movable pole", pole=seg.point(s_reached))
        detours += 1
        pole_est = seg.point(min(1.0, s_reached + 0.01))
        radius = max(0.02 * abs(t1 - t0), 2.0 * abs(pole_est - seg.point(s_reached)))
        kept = [(tt, yy) for tt, yy in local if abs(tt - pole_est) >= radius]
        samples.extend(kept)
        if kept:
            current_t, state = kept[-1]
        entry_angle = cmath.phase(current_t - pole_est)
        entry_radius = abs(current_t - pole_est)
        done = False
        for turn in (math.pi, -math.pi):
            arc = Arc(pole_est, entry_radius, entry_angle, entry_angle + turn)

            def fa(s, y, arc=arc):
                return arc.velocity(s) * flow(arc.point(s), y)

            new_state, _, blow2 = integrate_segment(fa, state, cfg)
            if not blow2:
                state = new_state
                current_t = arc.point(1.0)
                samples.append((current_t, state.copy()))
                done = True
                break
        if not done:
            raise PathBlocked("both detour orientations hit poles", pole=pole_est)
    return Trajectory(names=("state",), samples=samples)


def isomonodromy_drift(th: Theta, start: dict, t0: complex, t1: complex,
                       cfg: IntegratorConfig = IntegratorConfig()) -> dict:
    """Drift of tr(mon_0) and tr(mon_1) between the ends of a t-flow."""
    flow = _compiled_rank2_flow(th)
    state0 = np.array([start["a0"], start["b0"], start["c1"]], dtype=complex)
    traj = flow_with_detours(flow, state0, complex(t0), complex(t1), cfg)
    t_end, state_end = traj.final()

    def traces(t_val: complex, state: np.ndarray) -> tuple[complex, complex]:
        values = {"chart": "M1", "a0": state[0], "b0": state[1], "c1": state[2], "t": t_val}
        fn = rank2_matrix_fn(values, th.to_complex())
        m0 = loop_monodromy(fn, 2, 0.0, 0.5, cfg, singularities=(0.0, 1.0))
        m1 = loop_monodromy(fn, 2, 1.0, 0.5, cfg, singularities=(0.0, 1.0))
        return m0.trace, m1.trace

    tr0_start, tr1_start = traces(complex(t0), state0)
    tr0_end, tr1_end = traces(t_end, state_end)
    return {
        "t0": complex(t0), "t1": t_end,
        "at_t0": {"tr_mon0": tr0_start, "tr_mon1": tr1_start},
        "at_t1": {"tr_mon0": tr0_end, "tr_mon1": tr1_end},
        "drift": {
            "tr_mon0": abs(tr0_end - tr0_start),
            "tr_mon1": abs(tr1_end - tr1_start),
        },
        "trajectory": traj,
    }


# -- scalar residual ------------------------------------------------------------------


def _compiled_p5_rhs(th: Theta):
    rhs = golden.p5_scalar_rhs()
    order = ("q", "qp", "t", "th0", "th1", "th")
    fn = compile_expr(rhs, order)
    thv = (complex(th.theta0), complex(th.theta1), complex(th.theta))

    def rhs_fn(q, qp, t):
        return fn(q, qp, t, *thv)

    return rhs_fn


def p5_residual(traj: Trajectory, th: Theta, exclusion: float = 1e-6) -> dict:
    """max |q'' - rhs| / scale over samples carrying (q, q', q'')."""
    rhs_fn = _compiled_p5_rhs(th)
    worst = 0.0
    skipped = 0
    for t_val, state in traj.samples:
        q, qp, qpp = state[0], state[1], state[2]
        if abs(q) < exclusion or abs(q - 1.0) < exclusion:
            skipped += 1
            continue
        rhs = rhs_fn(q, qp, t_val)
        scale = max(1.0, abs(qpp), abs(rhs))
        worst = max(worst, abs(qpp - rhs) / scale)
    return {"max_residual": worst, "skipped_samples": skipped,
            "evaluated_samples": len(traj.samples) - skipped}


def lax_flow_q_trajectory(th: Theta, start: dict, t0: complex, t1: complex,
                          cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """(q, q', q'') samples along the isomonodromic flow, q = -b0."""
    pair = lax2.solve_lax_pair_symbolic()
    b0pp = lax2.b0_second_derivative_symbolic()
    order = ("a0", "b0", "c1", "t", "th0", "th1", "th")
    f_b0 = compile_expr(pair.flow["b0'"], order)
    f_b0pp = compile_expr(b0pp, order)
    thv = (complex(th.theta0), complex(th.theta1), complex(th.theta))
    flow = _compiled_rank2_flow(th)
    state0 = np.array([start["a0"], start["b0"], start["c1"]], dtype=complex)
    traj = flow_with_detours(flow, state0, complex(t0), complex(t1), cfg)
    out = []
    for t_val, state in traj.samples:
        args = (state[0], state[1], state[2], t_val) + thv
        out.append((t_val, np.array([-state[1], -f_b0(*args), -f_b0pp(*args)])))
    return Trajectory(names=("q", "qp", "qpp"), samples=out, blowup_flag=traj.blowup_flag)


# -- Riccati embedding ------------------------------------------------------------------


def riccati_embed_check(eps: tuple[int, int, int], th: Theta, t0: float, t1: float,
                        cfg: IntegratorConfig = IntegratorConfig(),
                        u0: complex = 0.3 + 0.2j, threshold: float = 1e-6) -> dict:
    """Integrate the reducible-locus equation and test the scalar residual."""
    ode = lax2.derive_riccati(eps, th)
    order = ("u", "t", "th0", "th1")
    rhs = compile_expr(ode.expression, order)
    du = compile_expr(ode.expression.derivative("u"), order)
    dt = compile_expr(ode.expression.derivative("t"), order)
    thv = (complex(th.theta0), complex(th.theta1))

    def flow(t, state):
        return np.array([rhs(state[0], t, *thv)])

    traj = flow_with_detours(flow, np.array([u0], dtype=complex), complex(t0), complex(t1), cfg)
    samples = []
    for t_val, state in traj.samples:
        u = state[0]
        if abs(u) < 1e-8:
            continue
        up = rhs(u, t_val, *thv)
        upp = du(u, t_val, *thv) * up + dt(u, t_val, *thv)
        q = -1.0 / u
        qp = up / u ** 2
        qpp = upp / u ** 2 - 2 * up ** 2 / u ** 3
        samples.append((t_val, np.array([q, qp, qpp])))
    q_traj = Trajectory(names=("q", "qp", "qpp"), samples=samples)
    report = p5_residual(q_traj, th)
    report["passed"] = report["max_residual"] < threshold
    report["threshold"] = threshold
    return report


# -- f-system / b-system cross-validation --------------------------------------------------


def _compiled_f4_flow(eps_values: tuple):
    sol = rank4.derive_f_system_four()
    order = ("f0", "f1", "f2", "f3", "t", "e0", "e1", "e2", "e3")
    fns = [compile_expr(sol[f"f{j}'"], order) for j in range(4)]
    ev = tuple(complex(x) for x in eps_values)

    def flow(t, state):
        args = tuple(state) + (t,) + ev
        return np.array([fn(*args) for fn in fns])

    return flow


def _compiled_b_flow(a_values: tuple):
    b1p, b3p = rank4.b_flow_functions()
    order = ("b1", "b3", "t", "a1", "a2", "a3")
    f1 = compile_expr(b1p, order)
    f3 = compile_expr(b3p, order)
    av = tuple(complex(x) for x in a_values)

    def flow(t, state):
        args = (state[0], state[1], t) + av
        return np.array([f1(*args), f3(*args)])

    return flow


def f_b_consistency(a_values: tuple, b_start: tuple, t0: float, t1: float,
                    cfg: IntegratorConfig = IntegratorConfig()) -> dict:
    """Integrate both systems and compare through the entry dictionary."""
    eps = rank4.eps_from_ab(*[GaussianRational.of(x) if isinstance(x, (int, Fraction)) else x
                              for x in a_values])
    eps_c = tuple(complex(e.to_complex() if isinstance(e, GaussianRational) else e) for e in eps)
    total = sum(eps_c)
    if abs(total) > 1e-12:
        raise InvalidParams("eps entries do not sum to zero")
    b1_0, b3_0 = complex(b_start[0]), complex(b_start[1])

    def f_of_b(b1, b3, t):
        q = t / 4.0
        return np.array([
            q + b1 + b3,
            q - 1j * b1 + 1j * b3,
            q - b1 - b3,
            q + 1j * b1 - 1j * b3,
        ])

    f_flow = _compiled_f4_flow(eps_c)
    b_flow = _compiled_b_flow(tuple(complex(GaussianRational.of(x).to_complex()
                                            if isinstance(x, (int, Fraction)) else x)
                                    for x in a_values))

    # integrate both systems across shared checkpoints and compare there
    checkpoints = np.linspace(float(t0), float(t1), 9)
    f_state = f_of_b(b1_0, b3_0, complex(t0))
    b_state = np.array([b1_0, b3_0])
    constraint = 0.0
    deviation = 0.0
    for left, right in zip(checkpoints[:-1], checkpoints[1:]):
        f_traj = flow_with_detours(f_flow, f_state, complex(left), complex(right), cfg)
        b_traj = flow_with_detours(b_flow, b_state, complex(left), complex(right), cfg)
        for t_val, state in f_traj.samples:
            constraint = max(constraint, abs(state[0] + state[2] - t_val / 2),
                             abs(state[1] + state[3] - t_val / 2))
        _, f_state = f_traj.final()
        t_end, b_state = b_traj.final()
        mapped = f_of_b(b_state[0], b_state[1], t_end)
        deviation = max(deviation, float(np.max(np.abs(mapped - f_state))))
    return {
        "max_deviation": deviation,
        "constraint_drift": constraint,
        "f_final": f_state, "b_final": b_state, "t_final": float(checkpoints[-1]),
    }


# -- convergence study helper ---------------------------------------------------------------


def fixed_step_error(field, y0, t0: float, t1: float, n_steps: int, reference) -> float:
    """Global error of the 5th-order step at fixed step size (order study)."""
    y = np.asarray(y0, dtype=complex)
    h = (t1 - t0) / n_steps
    s = t0
    for _ in range(n_steps):
        y, _unused = _dp_step(lambda ss, yy: np.asarray(field(ss, yy)), s, y, h)
        s += h
    return float(np.max(np.abs(y - np.asarray(reference))))
