"""Time stepping for the damped wave system.

Main scheme: semi-implicit leapfrog.  Each step kicks the velocity with the
explicit 3/5-point Laplacian, then resolves the superlinear damping exactly
per node (the damping term is pointwise, so no global nonlinear system
exists), then drifts the displacement:

    w  = v + dt * Lap_h(u)
    v' = root of  v' + dt a(x) |v'|^(r-1) v' = w     (per node)
    u' = u + dt * v'

The nodal solve is monotone with a guaranteed bracket [0, |w|], handled by
safeguarded Newton/bisection.  With a == 0 the scheme is plain leapfrog and
conserves the two-level quadratic form

    E* = 1/2 ||v||^2 + 1/2 <K u, u> - dt/2 <K v, u>

exactly (up to roundoff); with a >= 0 each step subtracts a nonnegative
dissipation from it.  That form is the per-step energy monitor; the
continuum energy's nodal quadrature lives in `functionals.energy`.

A fully implicit midpoint integrator (`reference_solve`) cross-validates the
main stepper on small instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import CutoffPsi, DampingProfile, ExteriorGrid
from .weights import Regime, WeightFamily

__all__ = [
    "WaveState", "SolverParams", "ConeSpec", "RunResult", "ReferenceResult",
    "SupportConeError", "solve_damping_scalar", "step", "run",
    "make_initial_compact", "make_initial_weighted", "reference_solve",
    "laplacian", "edge_form", "solver_energy", "support_radius",
    "save_snapshot", "load_snapshot",
]


class SupportConeError(RuntimeError):
    """Numerical support escaped the declared propagation cone."""


@dataclass
class WaveState:
    """Displacement, velocity and clock; Dirichlet nodes pinned at zero."""
    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def copy(self) -> "WaveState":
        return WaveState(self.u.copy(), self.v.copy(), self.t)


@dataclass(frozen=True)
class SolverParams:
    dt: float
    cfl: float
    r: float
    damping_tol: float = 1e-12
    T_max: float = 0.0

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if not self.r > 1.0:
            raise ValueError("damping exponent r must exceed 1")
        if not self.damping_tol > 0.0:
            raise ValueError("damping_tol must be positive")

    @staticmethod
    def for_grid(grid: ExteriorGrid, cfl: float, r: float, T_max: float,
                 damping_tol: float = 1e-12) -> "SolverParams":
        """dt from the CFL bound: cfl*h in 1D, cfl*h/sqrt(2) in 2D."""
        dt = cfl * grid.h / math.sqrt(grid.dim)
        return SolverParams(dt=dt, cfl=cfl, r=r, damping_tol=damping_tol,
                            T_max=T_max)


@dataclass(frozen=True)
class ConeSpec:
    """Support-cone declaration for compact initial data.

    The numerical support (threshold ``threshold_rel`` of the initial
    amplitude) must stay within R + t + 2h + 2dt; with ``enforce`` a
    violation aborts the run.
    """
    R: float
    threshold_rel: float = 1e-12
    enforce: bool = True


# ---------------------------------------------------------------------------
# nodal damping solve
# ---------------------------------------------------------------------------

def _solve_damping_field(c, w, r, tol, max_iter=90):
    """Vector root of v + c|v|^(r-1) v = w: safeguarded Newton on |v|."""
    sign = np.sign(w)
    aw = np.abs(w)
    lo = np.zeros_like(aw)
    hi = aw.copy()
    v = aw / (1.0 + c * aw ** (r - 1.0))
    for _ in range(max_iter):
        g = v + c * v ** r - aw
        if np.max(np.abs(g)) <= tol:
            break
        hi = np.where(g > 0.0, v, hi)
        lo = np.where(g > 0.0, lo, v)
        newton = v - g / (1.0 + r * c * v ** (r - 1.0))
        outside = (newton <= lo) | (newton >= hi)
        v = np.where(outside, 0.5 * (lo + hi), newton)
    return sign * v


def solve_damping_scalar(c: float, w: float, r: float, tol: float = 1e-12) -> float:
    """Unique root v of v + c |v|^(r-1) v = w (c >= 0, r > 1).

    The map is strictly increasing, so sign(v) = sign(w) and |v| <= |w|;
    bisection on [0, |w|] always brackets, Newton accelerates inside it.
    """
    if c < 0.0:
        raise ValueError("damping scale c must be nonnegative")
    if not tol > 0.0:
        raise ValueError("tolerance must be positive")
    if c == 0.0 or w == 0.0:
        return w
    out = _solve_damping_field(np.asarray([c], dtype=float),
                               np.asarray([w], dtype=float), r, tol)
    return float(out[0])


# ---------------------------------------------------------------------------
# spatial operators and the solver's energy form
# ---------------------------------------------------------------------------

def laplacian(grid: ExteriorGrid, u: np.ndarray) -> np.ndarray:
    """Discrete Laplacian on fluid nodes (3-point / 5-point), zero elsewhere.

    Dirichlet data enters through the pinned zeros of u itself.
    """
    out = np.zeros_like(u)
    h2 = grid.h * grid.h
    if grid.dim == 1:
        out[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
    else:
        out[1:-1, 1:-1] = (
            u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
            - 4.0 * u[1:-1, 1:-1]) / h2
    out[~grid.fluid] = 0.0
    return out


def edge_form(grid: ExteriorGrid, u1: np.ndarray, u2: np.ndarray) -> float:
    """<K u1, u2>_h: the edge-based Dirichlet form matching `laplacian`."""
    scale = grid.h ** (grid.dim - 2)
    if grid.dim == 1:
        return scale * float(np.sum(np.diff(u1) * np.diff(u2)))
    return scale * (
        float(np.sum(np.diff(u1, axis=0) * np.diff(u2, axis=0)))
        + float(np.sum(np.diff(u1, axis=1) * np.diff(u2, axis=1))))


def solver_energy(grid: ExteriorGrid, state: WaveState, dt: float) -> float:
    """Two-level leapfrog energy: exactly conserved by the undamped scheme."""
    vol = grid.cell_volume
    kin = 0.5 * vol * float(np.sum(state.v * state.v))
    return (kin + 0.5 * edge_form(grid, state.u, state.u)
            - 0.5 * dt * edge_form(grid, state.v, state.u))


def support_radius(grid: ExteriorGrid, state: WaveState, threshold: float) -> float:
    """Largest |x| carrying |u| + |v| above the threshold; -inf if none."""
    act = (np.abs(state.u) + np.abs(state.v)) > threshold
    if not act.any():
        return -math.inf
    return float(np.max(grid.radius[act]))


# ---------------------------------------------------------------------------
# stepping
# ---------------------------------------------------------------------------

def step(state: WaveState, grid: ExteriorGrid, damping: DampingProfile,
         params: SolverParams) -> tuple[WaveState, float]:
    """One semi-implicit leapfrog step; returns (new state, dissipation increment).

    The increment is dt * sum h^d a |v'|^(r+1), the discrete counterpart of
    the energy-identity dissipation over the step.
    """
    dt = params.dt
    w = state.v + dt * laplacian(grid, state.u)
    grid.clamp_dirichlet(w)
    v_new = _solve_damping_field(dt * damping.values, w, params.r,
                                 params.damping_tol)
    grid.clamp_dirichlet(v_new)
    u_new = state.u + dt * v_new
    grid.clamp_dirichlet(u_new)
    peak = max(float(np.max(np.abs(u_new))), float(np.max(np.abs(v_new))))
    if not math.isfinite(peak) or peak > 1e100:
        raise FloatingPointError(
            f"field magnitude {peak:.3g} at t = {state.t + dt:.6g}; "
            "check the CFL bound and damping parameters")
    diss = dt * grid.cell_volume * float(
        np.sum(damping.values * np.abs(v_new) ** (params.r + 1.0)))
    return WaveState(u_new, v_new, state.t + dt), diss


@dataclass
class RunResult:
    samples: list
    final_state: WaveState
    E_steps: np.ndarray          # solver energy at every step, E_steps[0] = t0
    diss_steps: np.ndarray       # per-step dissipation increments
    D_cum: float
    n_steps: int
    dt: float
    mono_violations: int = 0
    mono_worst: float = 0.0
    cone_worst_overshoot: float = -math.inf
    cone_ok: bool = True


def run(grid: ExteriorGrid, damping: DampingProfile, psi: CutoffPsi | None,
        initial: WaveState, params: SolverParams, tracker=None,
        cone: ConeSpec | None = None, sample_stride: int = 10) -> RunResult:
    """March to T_max, sampling functionals every `sample_stride` steps.

    `tracker` is any object with sample(state, D_cum, E_solver) returning a
    record to collect (see functionals.SampleTracker); with tracker=None the
    records are (t, E_solver) pairs.  When `cone` declares compact data the
    numerical support is checked at every sample against R + t + 2h + 2dt and
    a violation is a hard error (truncation contamination would follow).
    Deterministic for fixed inputs.
    """
    state = initial.copy()
    grid.clamp_dirichlet(state.u)
    grid.clamp_dirichlet(state.v)
    n_steps = int(round(params.T_max / params.dt)) if params.T_max > 0 else 0
    if cone is not None:
        amp0 = max(float(np.max(np.abs(state.u))),
                   float(np.max(np.abs(state.v))))
        cone_thresh = cone.threshold_rel * amp0 if amp0 > 0 else math.inf
        cone_slack = 2.0 * grid.h + 2.0 * params.dt

    E = np.empty(n_steps + 1)
    diss_steps = np.empty(n_steps)
    E[0] = solver_energy(grid, state, params.dt)
    D_cum = 0.0
    result = RunResult(samples=[], final_state=state, E_steps=E,
                       diss_steps=diss_steps, D_cum=0.0, n_steps=n_steps,
                       dt=params.dt)

    def take_sample(st, n):
        if tracker is None:
            result.samples.append((st.t, float(E[n])))
        else:
            result.samples.append(tracker.sample(st, D_cum, float(E[n])))

    def check_cone(st):
        rad = support_radius(grid, st, cone_thresh)
        over = rad - (cone.R + st.t)
        result.cone_worst_overshoot = max(result.cone_worst_overshoot, over)
        if over > cone_slack:
            result.cone_ok = False
            if cone.enforce:
                raise SupportConeError(
                    f"support radius {rad:.4g} exceeds cone "
                    f"{cone.R + st.t + cone_slack:.4g} at t = {st.t:.4g}: "
                    "truncation contamination")

    if cone is not None:
        check_cone(state)
    take_sample(state, 0)

    for n in range(1, n_steps + 1):
        state, diss = step(state, grid, damping, params)
        D_cum += diss
        diss_steps[n - 1] = diss
        E[n] = solver_energy(grid, state, params.dt)
        if E[n] > E[n - 1] * (1.0 + 1e-12) and E[n - 1] > 0.0:
            result.mono_violations += 1
            result.mono_worst = max(result.mono_worst, E[n] / E[n - 1] - 1.0)
        if n % sample_stride == 0:
            if cone is not None:
                check_cone(state)
            take_sample(state, n)

    result.final_state = state
    result.D_cum = D_cum
    return result


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def make_initial_compact(grid: ExteriorGrid, center, radius: float,
                         amplitude: float, mode: str = "bump_u",
                         R: float | None = None) -> WaveState:
    """C^2 bump amplitude*(1 - (d/radius)^2)^3, exactly supported in the ball.

    The closed support ball must stay inside the fluid region, and inside
    B_R when the scenario declares a support radius R.
    """
    if mode not in ("bump_u", "bump_v", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.size != grid.dim:
        raise ValueError(f"center must have {grid.dim} coordinates")
    if grid.dim == 1:
        dist = np.abs(grid.coords[0] - center[0])
    else:
        dist = np.sqrt((grid.coords[0] - center[0]) ** 2
                       + (grid.coords[1] - center[1]) ** 2)
    inside = dist < radius
    if np.any(inside & ~grid.fluid):
        raise ValueError("bump support touches a Dirichlet node "
                         "(obstacle or truncation boundary)")
    if R is not None:
        reach = float(np.linalg.norm(center)) + radius
        if reach > R + 1e-12:
            raise ValueError(f"bump support B({center}, {radius}) leaves the "
                             f"declared ball B_R, R = {R} (reach {reach:.4g})")
    z = np.where(inside, dist / radius, 1.0)
    bump = amplitude * np.where(inside, (1.0 - z * z) ** 3, 0.0)
    u = bump if mode in ("bump_u", "both") else grid.zeros()
    v = bump if mode in ("bump_v", "both") else grid.zeros()
    return WaveState(u.copy(), v.copy(), 0.0)


def make_initial_weighted(grid: ExteriorGrid, sigma: float,
                          weight_check: WeightFamily | None, gamma: float,
                          amplitude: float = 1.0,
                          oscillation: float = 2.0) -> WaveState:
    """Polynomially decaying data (1+|x|^2)^(-sigma/2) times a fixed oscillation.

    sigma must make the declared weighted norms finite on the untruncated
    domain: sigma > (d + gamma)/2 for polynomial weights, sigma > d/2 for
    logarithmic ones (log factors cost no decay).
    """
    growth = 0.0
    if weight_check is not None and weight_check.regime in (
            Regime.POLY, Regime.COMPACT_POLY):
        growth = 1.0
    need = (grid.dim + gamma * growth) / 2.0
    if not sigma > need:
        norm = ("(1+q)^gamma-weighted gradient/velocity norm" if growth
                else "ln^gamma(b+q)-weighted gradient/velocity norm")
        raise ValueError(
            f"sigma = {sigma} too small: the {norm} diverges on the exterior "
            f"domain unless sigma > (d + gamma*growth)/2 = {need}")
    envelope = amplitude * (1.0 + grid.radius ** 2) ** (-sigma / 2.0)
    if grid.dim == 1:
        phase = oscillation * (grid.coords[0] - grid.alpha)
    else:
        phase = oscillation * (grid.radius - grid.rho_obstacle)
    u = envelope * np.sin(phase)
    v = envelope * np.cos(phase)
    grid.clamp_dirichlet(u)
    grid.clamp_dirichlet(v)
    return WaveState(u, v, 0.0)


# ---------------------------------------------------------------------------
# binary state snapshots
# ---------------------------------------------------------------------------

_SNAP_MAGIC = b"WDSNAP01"
_SNAP_HEADER = 32  # magic(8) + dim u32 + pad u32 + count u64 + t f64


def save_snapshot(path, state: WaveState, grid: ExteriorGrid) -> None:
    """Flat u then v as little-endian float64 after a 32-byte header."""
    import struct
    count = state.u.size
    header = _SNAP_MAGIC + struct.pack("<IIQd", grid.dim, 0, count, state.t)
    assert len(header) == _SNAP_HEADER
    with open(path, "wb") as f:
        f.write(header)
        f.write(state.u.astype("<f8").tobytes())
        f.write(state.v.astype("<f8").tobytes())


def load_snapshot(path, grid: ExteriorGrid) -> WaveState:
    import struct
    with open(path, "rb") as f:
        header = f.read(_SNAP_HEADER)
        if header[:8] != _SNAP_MAGIC:
            raise ValueError(f"{path}: not a state snapshot")
        dim, _, count, t = struct.unpack("<IIQd", header[8:])
        if dim != grid.dim or count != int(np.prod(grid.shape)):
            raise ValueError(f"{path}: snapshot shape does not match the grid")
        raw = np.frombuffer(f.read(2 * count * 8), dtype="<f8")
    u = raw[:count].reshape(grid.shape).astype(float)
    v = raw[count:].reshape(grid.shape).astype(float)
    return WaveState(u, v, float(t))


# ---------------------------------------------------------------------------
# implicit midpoint reference integrator
# ---------------------------------------------------------------------------

@dataclass
class ReferenceResult:
    ts: np.ndarray
    E: np.ndarray
    final_state: WaveState
    max_fixed_point_iters: int


def reference_solve(grid: ExteriorGrid, damping: DampingProfile,
                    initial: WaveState, params_fine: SolverParams,
                    sample_stride: int = 1, fp_tol: float = 1e-12,
                    fp_max_iter: int = 200) -> ReferenceResult:
    """Implicit midpoint with fixed-point iteration on the damping.

    Oracle-grade but small-instance only (<= 10^4 nodes).  Samples the plain
    discrete energy every `sample_stride` steps so curves can be compared
    against the main stepper at shared times.
    """
    if grid.fluid.size > 10_000:
        raise ValueError("reference integrator is restricted to <= 10^4 nodes")
    state = initial.copy()
    grid.clamp_dirichlet(state.u)
    grid.clamp_dirichlet(state.v)
    dt, r, a = params_fine.dt, params_fine.r, damping.values
    n_steps = int(round(params_fine.T_max / dt))

    def plain_energy(st):
        return (0.5 * grid.cell_volume * float(np.sum(st.v * st.v))
                + 0.5 * edge_form(grid, st.u, st.u))

    ts = [0.0]
    Es = [plain_energy(state)]
    worst_iters = 0
    u, v = state.u, state.v
    for n in range(1, n_steps + 1):
        um, vm = u.copy(), v.copy()
        for it in range(1, fp_max_iter + 1):
            um_next = u + 0.5 * dt * vm
            vm_next = v + 0.5 * dt * (laplacian(grid, um)
                                      - a * np.abs(vm) ** (r - 1.0) * vm)
            grid.clamp_dirichlet(um_next)
            grid.clamp_dirichlet(vm_next)
            delta = max(float(np.max(np.abs(um_next - um))),
                        float(np.max(np.abs(vm_next - vm))))
            um, vm = um_next, vm_next
            if delta <= fp_tol:
                break
        else:
            raise RuntimeError(
                f"midpoint fixed-point failed to converge in {fp_max_iter} "
                f"iterations at step {n}")
        worst_iters = max(worst_iters, it)
        u = 2.0 * um - u
        v = 2.0 * vm - v
        grid.clamp_dirichlet(u)
        grid.clamp_dirichlet(v)
        if n % sample_stride == 0:
            ts.append(n * dt)
            Es.append(plain_energy(WaveState(u, v, n * dt)))
    return ReferenceResult(ts=np.asarray(ts), E=np.asarray(Es),
                           final_state=WaveState(u, v, n_steps * dt),
                           max_fixed_point_iters=worst_iters)
