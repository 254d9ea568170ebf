"""Flow integration and flow-level diagnostics.

Integration is classical fixed-step RK4, batched over leading axes so that
displaced-initial-condition bundles (used for flow Jacobians) cost one
integration.  Diagnostics quantify what the generated fields promise:
vanishing divergence, unit flow-Jacobian determinant, the Lie derivative
of the symplectic form, and the observable-derivative identity relating
df/dt along the flow to an exterior product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .exterior import KForm, omega_power, wedge, d_at_point, trace_of
from .forms import (
    FD_STEP,
    FieldEvaluationError,
    ScalarField,
    TwoFormField,
    as_points,
)
from .generator import GeneratedField, generate

__all__ = [
    "Trajectory",
    "integrate",
    "flow_jacobian_det",
    "flow_jacobian_dets",
    "divergence_at",
    "lie_derivative_omega",
    "poisson_bracket",
    "gradient_one_form",
    "check_dotf",
    "poisson_trace_residual",
    "FlowDiagnostics",
    "monitor",
]


@dataclass
class Trajectory:
    """Sampled states of one or more integrated curves.

    `states` has shape (num_samples, ..., 2n) matching the batch shape of
    the initial condition.  If the integration produced non-finite values,
    `failed` is True and samples stop at `last_valid_index`.  `dt` and
    `field` record how the trajectory was produced.
    """

    times: np.ndarray
    states: np.ndarray
    failed: bool = False
    last_valid_index: Optional[int] = None
    dt: Optional[float] = None
    field: Optional[object] = None

    @property
    def n(self) -> int:
        return self.states.shape[-1] // 2

    @property
    def final_state(self) -> np.ndarray:
        idx = self.last_valid_index if self.failed else -1
        return self.states[idx]

    def q(self) -> np.ndarray:
        return self.states[..., : self.n]

    def p(self) -> np.ndarray:
        return self.states[..., self.n :]


def _rk4_step(field: Callable, x: np.ndarray, dt: float) -> np.ndarray:
    k1 = field(x)
    k2 = field(x + 0.5 * dt * k1)
    k3 = field(x + 0.5 * dt * k2)
    k4 = field(x + dt * k3)
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(field, x0, dt: float, steps: int, sample_every: int = 1) -> Trajectory:
    """Integrate xdot = field(x) with fixed-step RK4.

    Samples are recorded at step 0 and every `sample_every`-th step.  If a
    step produces a non-finite state the trajectory is truncated at the
    last finite sample and marked failed rather than raising.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be positive")
    dim = 2 * getattr(field, "n", 0) or None
    x = as_points(x0, dim).copy()
    dt = float(dt)

    sample_steps = list(range(0, steps + 1, sample_every))
    times = np.array([dt * k for k in sample_steps])
    states = np.empty((len(sample_steps),) + x.shape)
    states[0] = x
    write = 1
    failed = False

    for k in range(1, steps + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                x = _rk4_step(field, x, dt)
        except (FieldEvaluationError, FloatingPointError, OverflowError):
            failed = True
            break
        if not np.isfinite(x).all():
            failed = True
            break
        if (k % sample_every) == 0:
            states[write] = x
            write += 1

    if failed:
        return Trajectory(times[:write], states[:write], failed=True,
                          last_valid_index=write - 1, dt=dt, field=field)
    return Trajectory(times, states, dt=dt, field=field)


def flow_jacobian_dets(field, x0, dt: float, steps: int, sample_every: int = 1,
                       h: float = 1e-5) -> Tuple[np.ndarray, np.ndarray]:
    """det of the flow map's Jacobian at each sample time.

    Chain rule: the determinant over [0, T] is the product of one-step
    determinants det dPhi_dt(x_k) along the trajectory.  Each factor is
    taken by central differences re-centered at x_k with per-coordinate
    step h * (1 + |x_a|).  Re-centering keeps every factor well
    conditioned even when trajectories separate exponentially, where a
    single end-to-end difference would lose the determinant to roundoff.
    Returns (times, dets); volume preservation means dets close to one.
    """
    x0 = as_points(x0)
    if x0.ndim != 1:
        raise ValueError("flow_jacobian_dets expects a single initial point")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    dim = x0.shape[0]
    x = x0.copy()
    running = 1.0
    sample_steps = list(range(0, steps + 1, sample_every))
    times = np.array([dt * k for k in sample_steps])
    dets = np.empty(len(sample_steps))
    dets[0] = 1.0
    write = 1
    for k in range(1, steps + 1):
        hvec = h * (1.0 + np.abs(x))
        bundle = np.concatenate(
            [x[None, :], x[None, :] + np.diag(hvec), x[None, :] - np.diag(hvec)]
        )
        stepped = _rk4_step(field, bundle, dt)
        if not np.isfinite(stepped).all():
            raise FloatingPointError("flow bundle left the finite domain")
        x = stepped[0]
        # column b of the one-step Jacobian from the pair displaced along b
        step_jac = (stepped[1 : 1 + dim] - stepped[1 + dim :]).T / (2.0 * hvec)
        running *= float(np.linalg.det(step_jac))
        if k % sample_every == 0:
            dets[write] = running
            write += 1
    return times, dets[:write]


def flow_jacobian_det(field, x0, dt: float, steps: int, h: float = 1e-5) -> float:
    """det of the time-T flow map's Jacobian (T = steps * dt); see
    flow_jacobian_dets for the scheme."""
    if steps == 0:
        return 1.0
    _, dets = flow_jacobian_dets(field, x0, dt, steps, sample_every=steps, h=h)
    return float(dets[-1])


def divergence_at(field, x, h: float = FD_STEP) -> np.ndarray:
    """Divergence of the field by central differences, step scaled per coordinate."""
    pts = as_points(x)
    dim = pts.shape[-1]
    div = np.zeros(pts.shape[:-1])
    for a in range(dim):
        ha = h * (1.0 + np.abs(pts[..., a]))
        plus = pts.copy()
        minus = pts.copy()
        plus[..., a] = pts[..., a] + ha
        minus[..., a] = pts[..., a] - ha
        div = div + (field(plus)[..., a] - field(minus)[..., a]) / (2.0 * ha)
    return div


def _field_jacobian(field, x: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    """J[a, b] = dX^a/dx^b by central differences with scaled step."""
    dim = x.shape[-1]
    cols = []
    for b in range(dim):
        hb = h * (1.0 + abs(float(x[b])))
        plus = x.copy()
        minus = x.copy()
        plus[b] += hb
        minus[b] -= hb
        cols.append((field(plus) - field(minus)) / (2.0 * hb))
    return np.stack(cols, axis=-1)


def _omega_matrix(n: int) -> np.ndarray:
    out = np.zeros((2 * n, 2 * n))
    for i in range(n):
        out[n + i, i] = 1.0
        out[i, n + i] = -1.0
    return out


def lie_derivative_omega(field, x, n: Optional[int] = None, h: float = FD_STEP) -> KForm:
    """L_X omega at x as a 2-form, from the finite-difference Jacobian of X.

    For the constant-coefficient symplectic form, (L_X omega)(u, v) =
    u^T (J^T W + W J) v with W the matrix of omega and J = dX/dx.  A
    Hamiltonian field gives zero; the antisymmetric part of a linear
    system shows up as a q-q block.
    """
    pts = as_points(x)
    if n is None:
        n = pts.shape[-1] // 2
    J = _field_jacobian(field, pts, h)
    W = _omega_matrix(n)
    L = J.T @ W + W @ J
    coeffs = {}
    for a in range(2 * n):
        for b in range(a + 1, 2 * n):
            if L[a, b] != 0.0:
                coeffs[(a, b)] = L[a, b]
    return KForm(2 * n, 2, coeffs)


def poisson_bracket(f: ScalarField, g: ScalarField, x):
    """{f, g}(x) = sum_i (df/dq^i dg/dp_i - df/dp_i dg/dq^i) at x.

    Batched points give batched brackets.  Exact when the operands carry
    exact gradients (polynomials); finite-difference otherwise.
    """
    pts = as_points(x)
    n = pts.shape[-1] // 2
    gf = f.gradient(pts)
    gg = g.gradient(pts)
    out = np.einsum("...i,...i->...", gf[..., :n], gg[..., n:]) - np.einsum(
        "...i,...i->...", gf[..., n:], gg[..., :n]
    )
    return float(out) if out.ndim == 0 else out


def gradient_one_form(grad: np.ndarray) -> KForm:
    """The 1-form df from a gradient vector (df = sum_a (df/dx^a) dx^a)."""
    grad = np.asarray(grad, dtype=float)
    if grad.ndim != 1:
        raise ValueError("expected a single gradient vector")
    return KForm(grad.shape[0], 1, {(a,): v for a, v in enumerate(grad) if v != 0.0})


def check_dotf(alpha: TwoFormField, f: ScalarField, x) -> float:
    """Residual |fdot - n(n-1) [d(alpha) ^ df ^ omega^{n-2}] / omega^n| at x.

    fdot is df contracted with the generated field of alpha; the right
    side is the coefficient of the volume form in the exterior product,
    computed through the dense oracle.  Along any integral curve these
    agree, so the return value is a direct check of the derivative-of-
    observable identity.
    """
    n = alpha.n
    pts = as_points(x, 2 * n)
    if pts.ndim != 1:
        raise ValueError("expected a single point")
    X = generate(alpha)
    lhs = float(np.dot(X(pts), f.gradient(pts)))
    full = tuple(range(2 * n))
    rhs_form = wedge(
        wedge(d_at_point(alpha.jet_at(pts)), gradient_one_form(f.gradient(pts))),
        omega_power(n, n - 2),
    )
    rhs = n * (n - 1) * rhs_form.coeffs.get(full, 0.0) / omega_power(n, n).coeffs[full]
    return abs(lhs - rhs)


def poisson_trace_residual(f: ScalarField, g: ScalarField, x) -> float:
    """Residual of {f, g} = tr(dg ^ df) at x (trace paired against omega)."""
    pts = as_points(x)
    if pts.ndim != 1:
        raise ValueError("expected a single point")
    n = pts.shape[-1] // 2
    bracket = float(poisson_bracket(f, g, pts))
    form = wedge(gradient_one_form(g.gradient(pts)), gradient_one_form(f.gradient(pts)))
    tr = trace_of(form, n)
    return abs(bracket - tr)


@dataclass
class FlowDiagnostics:
    """Per-sample health measurements of an integrated flow.

    `volume_dets` are flow-Jacobian determinants at the sample times (a
    volume-preserving flow keeps them at one, and always positive);
    `divergence_samples` is the field divergence along the trajectory;
    `energy_samples` tracks the observable named "H" when present;
    `identity_residuals` holds named residual series, e.g. the max
    coefficient of the numeric Lie derivative of the symplectic form.
    """

    times: np.ndarray
    states: np.ndarray
    volume_dets: np.ndarray
    divergence_samples: np.ndarray
    energy_samples: Optional[np.ndarray]
    observable_series: Dict[str, np.ndarray]
    identity_residuals: Dict[str, np.ndarray]
    failed: bool

    def max_volume_error(self) -> float:
        if self.volume_dets.size == 0:
            return float("nan")
        return float(np.max(np.abs(self.volume_dets - 1.0)))

    def dets_positive(self) -> bool:
        return bool(np.all(self.volume_dets > 0.0))

    def max_divergence(self) -> float:
        if self.divergence_samples.size == 0:
            return float("nan")
        return float(np.max(np.abs(self.divergence_samples)))

    def max_energy_drift(self) -> float:
        if self.energy_samples is None or self.energy_samples.size == 0:
            return 0.0
        return float(np.max(np.abs(self.energy_samples - self.energy_samples[0])))

    def max_lie_omega(self) -> float:
        series = self.identity_residuals.get("lie_omega_max_abs")
        if series is None or series.size == 0:
            return float("nan")
        return float(np.max(series))


def monitor(field, x0, dt: float, steps: int, sample_every: int = 100,
            observables: Optional[Dict[str, ScalarField]] = None,
            jacobian_h: float = 1e-5) -> FlowDiagnostics:
    """Integrate and collect volume, divergence, observable, and identity series.

    The observable named "H" doubles as the energy series.  The identity
    series "lie_omega_max_abs" records the largest coefficient of the
    numeric Lie derivative of the symplectic form at each sample; it stays
    at zero iff the field is (numerically) symplectic.
    """
    traj = integrate(field, x0, dt, steps, sample_every)
    observables = observables or {}
    if traj.failed:
        empty = np.zeros(0)
        return FlowDiagnostics(traj.times, traj.states, empty, empty, None, {}, {},
                               True)
    _, dets = flow_jacobian_dets(field, x0, dt, steps, sample_every, jacobian_h)
    div = divergence_at(field, traj.states)
    series = {name: np.asarray(f.value(traj.states), dtype=float)
              for name, f in observables.items()}
    energy = series.get("H")
    n = traj.states.shape[-1] // 2
    lie = np.array([
        lie_derivative_omega(field, state, n).max_abs() for state in traj.states
    ])
    residuals = {"lie_omega_max_abs": lie}
    return FlowDiagnostics(traj.times, traj.states, dets, div, energy, series,
                           residuals, False)
