"""Energies, auxiliary functionals, and cumulative weighted integrals.

Everything the decay estimates reference is computed here by grid quadrature:
the plain energy, the weighted energy E_phi, the four-term auxiliary
functional X(t) of the active regime, the initial-data functionals I, and the
per-theorem "bundle" of weighted integrals whose boundedness over infinite
time is the desk-scale falsifiable content of the estimates.

Space integrals are midpoint quadrature (node value times h^d over fluid
nodes); time integrals accumulate by the trapezoid rule over the uniform
sampling stride.  Bundle members are kept in a named registry; cumulative
members store their running integral, instantaneous members are evaluated
fresh at each sample.  Registry names double as CSV column names.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grids import CutoffPsi, DampingProfile, ExteriorGrid
from .solver import WaveState, laplacian
from .weights import (Regime, TheoremConstants, WeightFamily, WeightKind,
                      WeightOverflowError, eval_weight)

__all__ = [
    "FunctionalSample", "DataFunctionals", "Prop1Config", "ObsConfig",
    "TrackerConfig", "SampleTracker", "Prop1Report", "ObsReport",
    "HighEnergyReport", "energy", "grad_sq", "weighted_energy",
    "weighted_energy_log", "X_functional", "data_functionals",
    "prop1_inequality_check", "observability_ratio", "high_energy_check",
    "write_series_csv", "read_series_csv",
]


def grad_sq(grid: ExteriorGrid, u: np.ndarray) -> np.ndarray:
    """|grad_h u|^2 per node: the two one-sided edge differences averaged.

    Every fluid node has in-array neighbors (Dirichlet zeros included), so
    inward one-sided differences double as the boundary formula; averaging
    their squares keeps the nodal density consistent with the edge-based
    Dirichlet form used by `energy` and the solver.
    """
    out = np.zeros_like(u)
    h2 = grid.h * grid.h
    if grid.dim == 1:
        d = np.diff(u)
        out[1:-1] = 0.5 * (d[:-1] ** 2 + d[1:] ** 2) / h2
    else:
        dx = np.diff(u, axis=0)
        dy = np.diff(u, axis=1)
        out[1:-1, 1:-1] = 0.5 * (
            dx[:-1, 1:-1] ** 2 + dx[1:, 1:-1] ** 2
            + dy[1:-1, :-1] ** 2 + dy[1:-1, 1:]**2) / h2
    out[~grid.fluid] = 0.0
    return out


def energy(state: WaveState, grid: ExteriorGrid) -> float:
    """E_u(t) = (h^d/2) (sum over fluid of v^2) + 1/2 <K u, u>.

    The gradient part is the edge-midpoint Dirichlet form matching the
    discrete Laplacian: one-sided edge differences carry the boundary layer,
    interior edges the second-order bulk quadrature.
    """
    from .solver import edge_form
    kin = grid.cell_volume * float(
        np.sum(np.where(grid.fluid, state.v * state.v, 0.0)))
    return 0.5 * (kin + edge_form(grid, state.u, state.u))


def _phi_log_values(family: WeightFamily, s):
    """ln of the phi-role weight at argument s."""
    if family.regime is Regime.LOG:
        return (family.beta + 1.0) * np.log(family.ln_bs(s))
    base = 1.0 if family.regime is Regime.POLY else family.R
    return (family.beta + 1.0) * np.log(base + s)


def weighted_energy(state: WaveState, grid: ExteriorGrid,
                    family: WeightFamily, mu: float, lam: float) -> float:
    """E_phi(t) = (h^d/2) sum phi(mu q + lam t) (|grad u|^2 + v^2).

    Raises WeightOverflowError carrying ln E_phi when phi leaves the double
    range; use `weighted_energy_log` directly for such regimes.
    """
    if mu < 0.0 or lam < 0.0:
        raise ValueError("mu and lambda must be nonnegative")
    s = mu * grid.q() + lam * state.t
    try:
        w = eval_weight(family, WeightKind.PHI, s)
    except WeightOverflowError as exc:
        raise WeightOverflowError(
            "phi exceeds the double range; ln E_phi supplied",
            weighted_energy_log(state, grid, family, mu, lam)) from exc
    dens = grad_sq(grid, state.u) + np.where(grid.fluid, state.v**2, 0.0)
    return 0.5 * grid.cell_volume * float(np.sum(w * dens))


def weighted_energy_log(state: WaveState, grid: ExteriorGrid,
                        family: WeightFamily, mu: float, lam: float) -> float:
    """ln E_phi computed fully in log space (stable for extreme weights)."""
    s = mu * grid.q() + lam * state.t
    ln_w = _phi_log_values(family, s)
    dens = grad_sq(grid, state.u) + np.where(grid.fluid, state.v**2, 0.0)
    pos = dens > 0.0
    if not pos.any():
        return -math.inf
    terms = ln_w[pos] + np.log(dens[pos])
    m = float(np.max(terms))
    return (m + math.log(float(np.sum(np.exp(terms - m))))
            + math.log(0.5 * grid.cell_volume))


_REGIME_FOR = {"T1": Regime.LOG, "T2": Regime.POLY, "T3": Regime.COMPACT_POLY}


def X_functional(state: WaveState, grid: ExteriorGrid, psi: CutoffPsi,
                 damping: DampingProfile, constants: TheoremConstants,
                 family: WeightFamily) -> float:
    """The active regime's four-term auxiliary functional.

    With v = (1-psi) u and e = |grad u|^2 + |u_t|^2:

      T1:  int f(q+t) v v_t + (k1/2) int f1(q+t) a u^2
           + int a f2(q+t) |u|^(r+1) + (k/2) int phi(q+t) e
      T2:  same shape with (1+q+t) powers and coefficients k1/2, k2, k/2
      T3:  scalar (R+t) powers: (R+t)^b int v v_t + (k1/2)(R+t)^(b-1) int a u^2
           + k2 (R+t)^(b-r+1) int a |u|^(r+1) + k (R+t)^(b+1) E_u(t)
    """
    if family.regime is not _REGIME_FOR[constants.theorem]:
        raise ValueError(f"{constants.theorem} constants require a "
                         f"{_REGIME_FOR[constants.theorem].value} family, "
                         f"got {family.regime.value}")
    if family.r is not None and abs(family.r - constants.r) > 1e-12:
        raise ValueError("family r disagrees with the constant pack")
    vol = grid.cell_volume
    one_m_psi = 1.0 - psi.values
    vv = one_m_psi * state.u
    vvt = one_m_psi * state.v
    a = damping.values
    u2 = state.u * state.u
    ur1 = np.abs(state.u) ** (constants.r + 1.0)
    e = grad_sq(grid, state.u) + np.where(grid.fluid, state.v**2, 0.0)
    k, k1, k2 = constants.k, constants.k1, constants.k2

    if family.regime is Regime.COMPACT_POLY:
        b = family.beta
        Rt = family.R + state.t
        E_u = 0.5 * vol * float(np.sum(e))
        return (Rt**b * vol * float(np.sum(vv * vvt))
                + 0.5 * k1 * Rt**(b - 1.0) * vol * float(np.sum(a * u2))
                + k2 * Rt**(b - constants.r + 1.0) * vol * float(np.sum(a * ur1))
                + k * Rt**(b + 1.0) * E_u)

    s = grid.q() + state.t
    f = eval_weight(family, WeightKind.F, s)
    f1 = eval_weight(family, WeightKind.F1, s)
    f2 = eval_weight(family, WeightKind.F2, s)
    phi = eval_weight(family, WeightKind.PHI, s)
    return vol * (float(np.sum(f * vv * vvt))
                  + 0.5 * k1 * float(np.sum(f1 * a * u2))
                  + k2 * float(np.sum(a * f2 * ur1))
                  + 0.5 * k * float(np.sum(phi * e)))


# ---------------------------------------------------------------------------
# initial-data functionals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DataFunctionals:
    theorem: str
    value: float
    components: dict

    @property
    def core(self) -> float:
        """The H^2 x H^1 block that scales the high-energy bound."""
        return (self.components["u0_H2_sq"] + self.components["u1_H1_sq"]
                + self.components["u1_H1_2r"])


def data_functionals(initial: WaveState, grid: ExteriorGrid,
                     family: WeightFamily | None,
                     constants: TheoremConstants) -> DataFunctionals:
    """Assemble I_0 / I_1 / I_2 with discrete norms.

    H^2 uses the grid Laplacian as the second-order block; weighted members
    use the family's phi-role at s = q(x).  All components are nonnegative
    and the trailing +1 makes I >= 1.
    """
    vol = grid.cell_volume
    r, p = constants.r, constants.p
    u0, u1 = initial.u, initial.v
    g0 = grad_sq(grid, u0)
    lap0 = laplacian(grid, u0)
    comp = {
        "u0_H2_sq": vol * float(np.sum(u0**2 + g0 + lap0**2)),
        "u1_H1_sq": vol * float(np.sum(u1**2 + grad_sq(grid, u1))),
        "u0_Lr1": vol * float(np.sum(np.abs(u0) ** (r + 1.0))),
    }
    comp["u1_H1_2r"] = comp["u1_H1_sq"] ** r
    if constants.theorem in ("T1", "T2"):
        if family is None:
            raise ValueError(f"{constants.theorem} data functionals need the "
                             "weight family")
        s = grid.q()
        w = eval_weight(family, WeightKind.PHI, s)
        comp["weighted_grad_u0"] = vol * float(np.sum(w * g0))
        comp["weighted_u1"] = vol * float(np.sum(np.where(grid.fluid, w * u1**2, 0.0)))
        for name in ("weighted_grad_u0", "weighted_u1"):
            if not math.isfinite(comp[name]):
                raise ValueError(f"non-finite weighted data norm {name}")
    core = comp["u0_H2_sq"] + comp["u1_H1_sq"] + comp["u1_H1_2r"]
    comp["core_p_half"] = core ** (p / 2.0)
    value = sum(comp.values()) + 1.0
    return DataFunctionals(theorem=constants.theorem, value=value,
                           components=comp)


# ---------------------------------------------------------------------------
# per-sample record and the tracker
# ---------------------------------------------------------------------------

@dataclass
class FunctionalSample:
    t: float
    E: float
    E_phi: float
    X: float
    D_cum: float
    D_weighted_cum: float
    bundle: dict
    high_energy: float


@dataclass(frozen=True)
class Prop1Config:
    family: WeightFamily
    mu: float = 1.0
    lam: float = 1.0


@dataclass(frozen=True)
class ObsConfig:
    R0: float


@dataclass
class TrackerConfig:
    grid: ExteriorGrid
    damping: DampingProfile
    psi: CutoffPsi | None
    r: float
    family: WeightFamily | None = None          # drives X and E_phi
    constants: TheoremConstants | None = None
    bundle_sets: list = field(default_factory=list)  # (prefix, family) pairs
    prop1: Prop1Config | None = None
    obs: ObsConfig | None = None
    trunc_band_width: float | None = None  # default 4h


class _Member:
    __slots__ = ("name", "cumulative", "fn")

    def __init__(self, name, cumulative, fn):
        self.name = name
        self.cumulative = cumulative
        self.fn = fn


def _log_pow(family: WeightFamily, A: float, M: float, s):
    """ln^A(b+s) / (b+s)^M in log space; underflows to 0."""
    L = family.ln_bs(s)
    val = A * np.log(L) - M * L
    return np.exp(np.minimum(val, 700.0))


def _theorem_members(prefix: str, family: WeightFamily,
                     constants: TheoremConstants) -> list:
    """The 'moreover' bundle of the regime, as named registry members.

    Members whose display is instantaneous are tracked both instantaneously
    and (for the neighbouring time-integrated display) cumulatively, matching
    the alternation of the displays.
    """
    g, r = constants.gamma, constants.r
    reg = family.regime

    if reg is Regime.COMPACT_POLY:
        R = family.R

        def m(P):
            return lambda c: (R + c.t) ** P

        return [
            _Member(f"{prefix}.energy_tail_cum", True,
                    lambda c: m(g - 1.0)(c) * c.E),
            _Member(f"{prefix}.disp_weighted_cum", True,
                    lambda c: m(g)(c) * c.sum_a_vel_r1),
            _Member(f"{prefix}.au2_inst", False,
                    lambda c: m(g - 2.0)(c) * c.sum_a_u2),
            _Member(f"{prefix}.au2_cum", True,
                    lambda c: m(g - 3.0)(c) * c.sum_a_u2),
            _Member(f"{prefix}.aur_inst", False,
                    lambda c: m(g - r)(c) * c.sum_a_ur1),
            _Member(f"{prefix}.aur_cum", True,
                    lambda c: m(g - r - 1.0)(c) * c.sum_a_ur1),
        ]

    if reg is Regime.LOG:
        # members have the shape ln^A(b+q+t)/(b+q+t)^M
        def w(A, M):
            return lambda c: _log_pow(family, A, M, c.s_qt)

        specs = [
            ("energy_weighted_inst", False, w(g, 0.0), "e"),
            ("energy_f_cum", True, w(g - 1.0, 1.0), "e"),
            ("disp_weighted_cum", True, w(g, 0.0), "a_vel_r1"),
            ("au2_inst", False, w(g - 1.0, 2.0), "a_u2"),
            ("au2_cum", True, w(g - 1.0, 3.0), "a_u2"),
            ("aur_inst", False, w(g - r, r), "a_ur1"),
            ("aur_cum", True, w(g - r, r + 1.0), "a_ur1"),
        ]
    else:
        # members carry the single power (1+q+t)^P
        def w(P):
            return lambda c: (1.0 + c.s_qt) ** P

        specs = [
            ("energy_weighted_inst", False, w(g), "e"),
            ("energy_f_cum", True, w(g - 1.0), "e"),
            ("disp_weighted_cum", True, w(g), "a_vel_r1"),
            ("au2_inst", False, w(g - 2.0), "a_u2"),
            ("au2_cum", True, w(g - 3.0), "a_u2"),
            ("aur_inst", False, w(g - r), "a_ur1"),
            ("aur_cum", True, w(g - r - 1.0), "a_ur1"),
        ]

    def make(weight_fn, dens_name):
        def fn(c):
            return c.vol * float(np.sum(weight_fn(c) * getattr(c, dens_name)))
        return fn

    return [_Member(f"{prefix}.{n}", cum, make(wf, dens))
            for n, cum, wf, dens in specs]


class _SampleContext:
    """Precomputed per-sample fields shared by all members."""

    def __init__(self, cfg: TrackerConfig, state: WaveState, E_plain: float):
        grid = cfg.grid
        self.t = state.t
        self.vol = grid.cell_volume
        self.E = E_plain
        self.s_qt = grid.q() + state.t
        fluid = grid.fluid
        self.e = grad_sq(grid, state.u) + np.where(fluid, state.v**2, 0.0)
        a = cfg.damping.values
        self.a_u2 = a * state.u**2
        self.a_ur1 = a * np.abs(state.u) ** (cfg.r + 1.0)
        self.a_vel_r1 = a * np.abs(state.v) ** (cfg.r + 1.0)
        self.a_vel_2 = a * state.v**2
        self.a_vel_2r = a * np.abs(state.v) ** (2.0 * cfg.r)
        self.sum_a_u2 = self.vol * float(np.sum(self.a_u2))
        self.sum_a_ur1 = self.vol * float(np.sum(self.a_ur1))
        self.sum_a_vel_r1 = self.vol * float(np.sum(self.a_vel_r1))
        self.state = state


def _prop1_members(cfg: TrackerConfig) -> list:
    """Window-inequality ingredients, tied to the prop1 family's own E_phi."""
    p = cfg.prop1
    fam, mu, lam = p.family, p.mu, p.lam
    grid = cfg.grid

    def ephi(c):
        s = mu * grid.q() + lam * c.t
        w = eval_weight(fam, WeightKind.PHI, s)
        return 0.5 * c.vol * float(np.sum(w * c.e))

    def disp(c):
        s = mu * grid.q() + lam * c.t
        w = eval_weight(fam, WeightKind.PHI, s)
        return c.vol * float(np.sum(w * c.a_vel_r1))

    def absphip(c):
        s = mu * grid.q() + lam * c.t
        # phi' of the phi-role: d/ds of the family's phi
        w = np.abs((fam.beta + 1.0) * eval_weight(fam, WeightKind.F, s))
        return c.vol * float(np.sum(w * c.e))

    return [_Member("prop1.E_phi", False, ephi),
            _Member("prop1.disp_cum", True, disp),
            _Member("prop1.absphip_cum", True, absphip)]


def _obs_members(cfg: TrackerConfig) -> list:
    fam = cfg.family
    grid = cfg.grid
    inside = grid.fluid & (grid.radius <= cfg.obs.R0)

    if fam.regime is Regime.COMPACT_POLY:
        def lhs(c):
            return (fam.R + c.t) ** fam.beta * c.vol * float(np.sum(c.e[inside]))

        def rhs_disp(c):
            return (fam.R + c.t) ** fam.beta * c.vol * float(
                np.sum(c.a_vel_2 + c.a_vel_2r))

        def rhs_u2(c):
            return (fam.R + c.t) ** (fam.beta - 2.0) * c.sum_a_u2
    else:
        def f_of(c):
            return eval_weight(fam, WeightKind.F, c.s_qt)

        def u2w_of(c):
            if fam.regime is Regime.LOG:
                return -eval_weight(fam, WeightKind.F1_PRIME, c.s_qt)
            return (1.0 + c.s_qt) ** (fam.beta - 2.0)

        def lhs(c):
            return c.vol * float(np.sum((f_of(c) * c.e)[inside]))

        def rhs_disp(c):
            return c.vol * float(np.sum(f_of(c) * (c.a_vel_2 + c.a_vel_2r)))

        def rhs_u2(c):
            a = cfg.damping.values
            return c.vol * float(np.sum(u2w_of(c) * a * c.state.u**2))

    return [_Member("obs.lhs_cum", True, lhs),
            _Member("obs.rhs_disp_cum", True, rhs_disp),
            _Member("obs.rhs_u2_cum", True, rhs_u2)]


class SampleTracker:
    """Builds the FunctionalSample series along a run.

    Cumulative bundle members accumulate by the trapezoid rule over the
    uniform sampling stride; the stride is fixed by the first two samples and
    enforced afterwards.
    """

    def __init__(self, cfg: TrackerConfig):
        self.cfg = cfg
        self.members: list[_Member] = []
        for prefix, fam in cfg.bundle_sets:
            if cfg.constants is None:
                raise ValueError("bundle sets need a constant pack")
            self.members += _theorem_members(prefix, fam, cfg.constants)
        self._disp_key = (f"{cfg.bundle_sets[0][0]}.disp_weighted_cum"
                          if cfg.bundle_sets else None)
        if cfg.prop1 is not None:
            self.members += _prop1_members(cfg)
        if cfg.obs is not None and cfg.family is not None:
            self.members += _obs_members(cfg)
        band = cfg.trunc_band_width
        band = 4.0 * cfg.grid.h if band is None else band
        band_mask = cfg.grid.boundary_band(band)
        self.members.append(_Member(
            "diag.trunc_band_energy", False,
            lambda c: 0.5 * c.vol * float(np.sum(c.e[band_mask]))))
        self._names = [m.name for m in self.members]
        self._prev_t = None
        self._stride = None
        self._prev_integrand = {}
        self._cum = {m.name: 0.0 for m in self.members if m.cumulative}
        self._E_solver_0 = None

    @property
    def bundle_names(self) -> list[str]:
        return self._names + ["diag.E_solver", "diag.identity_defect"]

    def sample(self, state: WaveState, D_cum: float,
               E_solver: float) -> FunctionalSample:
        cfg = self.cfg
        E_plain = energy(state, cfg.grid)
        ctx = _SampleContext(cfg, state, E_plain)

        if self._prev_t is not None:
            dt_s = state.t - self._prev_t
            if self._stride is None:
                self._stride = dt_s
            elif abs(dt_s - self._stride) > 1e-9 * max(1.0, abs(self._stride)):
                raise ValueError(
                    f"sample stride changed from {self._stride} to {dt_s}; "
                    "cumulative members need a uniform stride")

        bundle = {}
        for m in self.members:
            val = m.fn(ctx)
            if m.cumulative:
                if self._prev_t is not None:
                    dt_s = state.t - self._prev_t
                    self._cum[m.name] += 0.5 * dt_s * (
                        self._prev_integrand[m.name] + val)
                self._prev_integrand[m.name] = val
                bundle[m.name] = self._cum[m.name]
            else:
                bundle[m.name] = val
        self._prev_t = state.t

        if self._E_solver_0 is None:
            self._E_solver_0 = E_solver
        defect = abs(E_solver + D_cum - self._E_solver_0)
        if self._E_solver_0 > 0.0:
            defect /= self._E_solver_0
        bundle["diag.E_solver"] = E_solver
        bundle["diag.identity_defect"] = defect

        if cfg.family is None:
            E_phi, X = E_plain, 0.0
        else:
            # compact lemma weights depend on t alone; the others on q(x)+t
            mu = 0.0 if cfg.family.regime is Regime.COMPACT_POLY else 1.0
            E_phi = weighted_energy(state, cfg.grid, cfg.family, mu, 1.0)
            X = X_functional(state, cfg.grid, cfg.psi, cfg.damping,
                             cfg.constants, cfg.family)

        D_weighted = bundle.get(self._disp_key, 0.0) if self._disp_key else 0.0

        return FunctionalSample(
            t=state.t, E=E_plain, E_phi=E_phi, X=X, D_cum=D_cum,
            D_weighted_cum=D_weighted, bundle=bundle,
            high_energy=self._high_energy(state, ctx))

    def _high_energy(self, state: WaveState, ctx) -> float:
        """||grad v||^2 + ||u_tt||^2 with u_tt rebuilt from the equation."""
        cfg = self.cfg
        utt = laplacian(cfg.grid, state.u) - cfg.damping.values * np.abs(
            state.v) ** (cfg.r - 1.0) * state.v
        utt[~cfg.grid.fluid] = 0.0
        return ctx.vol * float(
            np.sum(grad_sq(cfg.grid, state.v))
            + np.sum(utt * utt))


# ---------------------------------------------------------------------------
# series-level checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Prop1Report:
    max_defect: float
    n_windows: int
    window_T: float
    degenerate: bool = False


def prop1_inequality_check(series: list, window_T: float,
                           mu: float = 1.0, lam: float = 1.0) -> Prop1Report:
    """Max normalized defect of the weighted-energy window inequality.

    For every window [t, t+T] in the series:

        defect = [E_phi(t+T) + int int a phi |u_t|^{r+1}]
                 - [E_phi(t) + (lam+mu)/2 int int |phi'| (|grad u|^2+|u_t|^2)]

    normalized by E_phi(0).  Nonpositive defects mean the inequality holds
    discretely; positive values are discretization error and must shrink
    under refinement.
    """
    if not series or "prop1.disp_cum" not in series[0].bundle:
        raise ValueError("series carries no prop1 accumulators")
    ts = np.array([s.t for s in series])
    E_phi = np.array([s.bundle["prop1.E_phi"] for s in series])
    disp = np.array([s.bundle["prop1.disp_cum"] for s in series])
    phip = np.array([s.bundle["prop1.absphip_cum"] for s in series])
    stride = ts[1] - ts[0] if len(ts) > 1 else 0.0
    wlen = int(round(window_T / stride)) if stride > 0 else 0
    if wlen < 1 or wlen >= len(ts):
        raise ValueError(f"window T = {window_T} does not fit the series")
    scale = E_phi[0]
    if scale <= 0.0:
        return Prop1Report(0.0, 0, window_T, degenerate=True)
    worst = -math.inf
    n = 0
    for i in range(len(ts) - wlen):
        j = i + wlen
        lhs = E_phi[j] + (disp[j] - disp[i])
        rhs = E_phi[i] + 0.5 * (lam + mu) * (phip[j] - phip[i])
        worst = max(worst, (lhs - rhs) / scale)
        n += 1
    return Prop1Report(max_defect=worst, n_windows=n, window_T=window_T)


@dataclass(frozen=True)
class ObsReport:
    ratios: tuple
    degenerate: bool
    spread: float


def observability_ratio(series: list, window_T: float,
                        n_starts: int = 10) -> ObsReport:
    """Windowed LHS/RHS ratios of the localized-energy observability display.

    Diagnostic only: the controlling constant is nonconstructive, so the
    assertable content is finiteness and cross-window stability of the ratio.
    Zero-dissipation windows are flagged degenerate (ratio inf).
    """
    if not series or "obs.lhs_cum" not in series[0].bundle:
        raise ValueError("series carries no observability accumulators")
    ts = np.array([s.t for s in series])
    lhs = np.array([s.bundle["obs.lhs_cum"] for s in series])
    rhs = np.array([s.bundle["obs.rhs_disp_cum"] for s in series]) + \
        np.array([s.bundle["obs.rhs_u2_cum"] for s in series])
    stride = ts[1] - ts[0] if len(ts) > 1 else 0.0
    wlen = int(round(window_T / stride)) if stride > 0 else 0
    if wlen < 1 or wlen >= len(ts):
        raise ValueError(f"window T = {window_T} does not fit the series")
    starts = np.unique(np.linspace(0, len(ts) - wlen - 1, n_starts, dtype=int))
    ratios = []
    degenerate = False
    for i in starts:
        j = i + wlen
        dl, dr = lhs[j] - lhs[i], rhs[j] - rhs[i]
        if dr <= 1e-300:
            degenerate = True
            ratios.append(math.inf)
        else:
            ratios.append(dl / dr)
    finite = [x for x in ratios if math.isfinite(x)]
    spread = (max(finite) / min(finite)) if finite and min(finite) > 0 else math.inf
    return ObsReport(ratios=tuple(ratios), degenerate=degenerate, spread=spread)


@dataclass(frozen=True)
class HighEnergyReport:
    bound: float
    worst_value: float
    worst_t: float

    def holds(self, slack: float = 1.0) -> bool:
        return self.worst_value <= slack * self.bound


def high_energy_check(series: list, data: DataFunctionals,
                      a_inf: float) -> HighEnergyReport:
    """Compare sup_t of the high-energy surrogate with its a-priori bound.

    bound = 2 (1 + ||a||_inf) (||u0||_H2^2 + ||u1||_H1^2 + ||u1||_H1^2r).
    """
    bound = 2.0 * (1.0 + a_inf) * data.core
    worst_value, worst_t = -math.inf, 0.0
    for s in series:
        if s.high_energy > worst_value:
            worst_value, worst_t = s.high_energy, s.t
    return HighEnergyReport(bound=bound, worst_value=worst_value,
                            worst_t=worst_t)


# ---------------------------------------------------------------------------
# CSV serialization
# ---------------------------------------------------------------------------

_FIXED_COLUMNS = ["t", "E", "E_phi", "X", "D_cum", "D_weighted_cum"]


def write_series_csv(dest, series: list, bundle_names: list[str]):
    """Columns: t, E, E_phi, X, D_cum, D_weighted_cum, bundle..., high_energy.

    `dest` may be a path or an open text stream; floats carry 17 significant
    digits so reruns reproduce fits bit-identically.
    """
    lines = [",".join(_FIXED_COLUMNS + bundle_names + ["high_energy"])]
    for s in series:
        row = [s.t, s.E, s.E_phi, s.X, s.D_cum, s.D_weighted_cum]
        row += [s.bundle.get(n, 0.0) for n in bundle_names]
        row.append(s.high_energy)
        lines.append(",".join(f"{x:.17g}" for x in row))
    text = "\n".join(lines) + "\n"
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as f:
            f.write(text)


def read_series_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as f:
        header = f.readline().strip().split(",")
        data = np.loadtxt(f, delimiter=",", ndmin=2)
    return header, data
