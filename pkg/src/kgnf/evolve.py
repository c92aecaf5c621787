"""Method-of-lines time integration: classical four-stage Runge-Kutta on the
first-order system (u, u_t), with collocation nonlinearities, 2/3-rule
truncation, blow-up detection, and a linearized flow along a stored
background trajectory.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model import ModelSpec
from .spectral import Field, Grid, State, to_physical, to_spectral


class BlowUpError(FloatingPointError):
    """Raised internally when the nonlinear evaluation leaves float range."""


@dataclass
class Trajectory:
    """Time-ordered sequence of sampled states plus observer records."""

    grid: Grid
    dt: float
    sample_every: int
    model: ModelSpec
    states: list = field(default_factory=list)
    records: list = field(default_factory=list)
    blew_up: bool = False

    @property
    def times(self):
        return np.array([s.time for s in self.states])

    def state_at(self, t: float) -> State:
        """Background state linearly interpolated in time between samples."""
        times = self.times
        if t < times[0] - 1e-12 or t > times[-1] + 1e-12:
            raise ValueError(f"time {t} outside stored trajectory range")
        j = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
        t0, t1 = times[j], times[j + 1]
        lam = float(np.clip((t - t0) / (t1 - t0), 0.0, 1.0))
        s0, s1 = self.states[j], self.states[j + 1]
        pos = Field(self.grid, (1 - lam) * s0.pos.coeffs + lam * s1.pos.coeffs)
        vel = Field(self.grid, (1 - lam) * s0.vel.coeffs + lam * s1.vel.coeffs)
        return State(pos, vel, t)


# ---------------------------------------------------------------------------
# right-hand sides on raw half-spectrum arrays (hot loop)
# ---------------------------------------------------------------------------


def _depends_on(func, var: str) -> bool:
    axis = {"u": 0, "ut": 1, "ux": 2}[var]
    if hasattr(func, "num"):
        return any(p[axis] > 0 for p, _ in func.num.terms + func.den.terms)
    return any(p[axis] > 0 for p, _ in func.terms)


class _Workspace:
    """Precomputed multipliers for the rfft-based inner loop.

    Transforms of state components a model never reads are skipped; the
    mass term is applied spectrally.
    """

    def __init__(self, grid: Grid, model: ModelSpec, dealias: bool):
        self.grid = grid
        self.model = model
        self.n = grid.n
        k = np.arange(grid.n // 2 + 1) * (2.0 * np.pi / grid.length)
        self.ik = 1j * k
        self.ik2 = (1j * k) ** 2
        self.keep = np.ones(grid.n // 2 + 1, dtype=bool)
        if dealias:
            self.keep = np.arange(grid.n // 2 + 1) <= grid.n // 3
        self.linear = model.is_flat()
        comps = (model.g01, model.g11, model.f)
        self.need_ut = any(_depends_on(c, "ut") for c in comps)
        self.need_ux = any(_depends_on(c, "ux") for c in comps)
        self.need_utx = not model.g01.is_zero()

    def rhs(self, uc, vc):
        """u_tt spectral coefficients from (u, u_t) spectral coefficients."""
        md = self.model
        if self.linear:
            return self.ik2 * uc - md.m * uc
        n = self.n
        u = np.fft.irfft(uc, n)
        ut = np.fft.irfft(vc, n) if self.need_ut else 0.0
        ux = np.fft.irfft(self.ik * uc, n) if self.need_ux else 0.0
        uxx = np.fft.irfft(self.ik2 * uc, n)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = md.g11(u, ut, ux) * uxx
            if self.need_utx:
                utx = np.fft.irfft(self.ik * vc, n)
                vals = vals + 2.0 * md.g01(u, ut, ux) * utx
            if not md.f.is_zero():
                vals = vals + md.f(u, ut, ux)
        if not np.isfinite(np.sum(vals)):
            raise BlowUpError("non-finite nonlinear evaluation")
        out = np.fft.rfft(vals)
        out[~self.keep] = 0.0
        return out - md.m * uc


def _rk4(uc, vc, dt, rhs):
    k1v = rhs(uc, vc)
    u2 = uc + 0.5 * dt * vc
    v2 = vc + 0.5 * dt * k1v
    k2v = rhs(u2, v2)
    u3 = uc + 0.5 * dt * v2
    v3 = vc + 0.5 * dt * k2v
    k3v = rhs(u3, v3)
    u4 = uc + dt * v3
    v4 = vc + dt * k3v
    k4v = rhs(u4, v4)
    un = uc + dt / 6.0 * (vc + 2.0 * v2 + 2.0 * v3 + v4)
    vn = vc + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return un, vn


def _to_half(state: State):
    return np.fft.rfft(to_physical(state.pos)), np.fft.rfft(to_physical(state.vel))


def _from_half(grid, uc, vc, t):
    n = grid.n
    return State(to_spectral(np.fft.irfft(uc, n), grid),
                 to_spectral(np.fft.irfft(vc, n), grid), t)


def max_wave_speed(state: State, model: ModelSpec) -> float:
    """Largest characteristic speed |g01| + sqrt(g01^2 + g11) on the state."""
    u = to_physical(state.pos)
    ut = to_physical(state.vel)
    ux = to_physical(Field(state.grid, state.pos.coeffs * (1j * state.grid.xi)))
    g01 = model.g01(u, ut, ux)
    g11 = model.g11(u, ut, ux)
    disc = np.sqrt(np.maximum(g01**2 + g11, 0.0))
    return float(np.max(np.abs(g01) + disc))


def check_cfl(state: State, model: ModelSpec, dt: float, safety: float = 0.5,
              proceed: bool = True) -> bool:
    """Check dt against safety * dx / (max wave speed); warn or raise."""
    dx_grid = state.grid.length / state.grid.n
    limit = safety * dx_grid / max(max_wave_speed(state, model), 1e-12)
    if abs(dt) > limit:
        msg = f"dt={dt:g} exceeds the advective limit {limit:g}"
        if not proceed:
            raise ValueError(msg)
        warnings.warn(msg, stacklevel=2)
        return False
    return True


def step_rk4(state: State, model: ModelSpec, dt: float, dealias: bool = True,
             cfl_proceed: bool = True) -> State:
    """One four-stage step of the first-order system."""
    check_cfl(state, model, dt, proceed=cfl_proceed)
    ws = _Workspace(state.grid, model, dealias)
    uc, vc = _to_half(state)
    uc, vc = _rk4(uc, vc, dt, ws.rhs)
    return _from_half(state.grid, uc, vc, state.time + dt)


def evolve(state0: State, model: ModelSpec, T: float, dt: float, observers=(),
           sample_every: int | None = None, dealias: bool = True,
           cfl_proceed: bool = True, norm_stop=None) -> Trajectory:
    """Integrate to time T, sampling states and observer records.

    ``observers`` are pure functions State -> dict merged into one record
    per sample.  ``norm_stop`` is an optional predicate State -> bool that
    ends the run early (used for doubling-time probes).  On blow-up the
    partial trajectory is returned with ``blew_up`` set.
    """
    if T <= 0:
        raise ValueError("final time must be positive")
    nsteps = int(round(T / abs(dt)))
    if sample_every is None:
        sample_every = max(1, nsteps // 256)
    check_cfl(state0, model, dt, proceed=cfl_proceed)
    ws = _Workspace(state0.grid, model, dealias)
    traj = Trajectory(grid=state0.grid, dt=dt, sample_every=sample_every, model=model)

    uc, vc = _to_half(state0)
    t = state0.time

    def sample(uc, vc, t):
        st = _from_half(state0.grid, uc, vc, t)
        traj.states.append(st)
        rec = {"t": t}
        for obs in observers:
            rec.update(obs(st))
        traj.records.append(rec)
        return st

    st = sample(uc, vc, t)
    if norm_stop is not None and norm_stop(st):
        return traj
    for i in range(nsteps):
        try:
            uc, vc = _rk4(uc, vc, dt, ws.rhs)
        except BlowUpError:
            traj.blew_up = True
            break
        t = state0.time + (i + 1) * dt
        if (i + 1) % sample_every == 0 or (i + 1) == nsteps:
            st = sample(uc, vc, t)
            if norm_stop is not None and norm_stop(st):
                break
    return traj


# ---------------------------------------------------------------------------
# linearized flow along a stored background
# ---------------------------------------------------------------------------


class _LinearizedRhs:
    def __init__(self, background: Trajectory, model: ModelSpec, dealias: bool):
        self.bg = background
        self.model = model
        grid = background.grid
        self.grid = grid
        k = np.arange(grid.n // 2 + 1) * (2.0 * np.pi / grid.length)
        self.ik = 1j * k
        self.ik2 = (1j * k) ** 2
        self.keep = np.arange(grid.n // 2 + 1) <= grid.n // 3 if dealias \
            else np.ones(grid.n // 2 + 1, dtype=bool)

    def coeffs_at(self, t: float):
        md = self.model
        bg = self.bg.state_at(t)
        u = to_physical(bg.pos)
        ut = to_physical(bg.vel)
        ux = to_physical(Field(self.grid, bg.pos.coeffs * (1j * self.grid.xi)))
        utx = to_physical(Field(self.grid, bg.vel.coeffs * (1j * self.grid.xi)))
        uxx = to_physical(Field(self.grid, bg.pos.coeffs * (1j * self.grid.xi) ** 2))

        def channel(var):
            return (2.0 * md.g01.deriv(var)(u, ut, ux) * utx
                    + md.g11.deriv(var)(u, ut, ux) * uxx
                    + md.f.deriv(var)(u, ut, ux))

        return (md.g01(u, ut, ux), md.g11(u, ut, ux),
                channel("ut"), channel("ux"), channel("u"))

    def rhs(self, vc, vtc, t):
        g01, g11, F0, F1, Fl = self.coeffs_at(t)
        n = self.grid.n
        v = np.fft.irfft(vc, n)
        vt = np.fft.irfft(vtc, n)
        vx = np.fft.irfft(self.ik * vc, n)
        vtx = np.fft.irfft(self.ik * vtc, n)
        vxx = np.fft.irfft(self.ik2 * vc, n)
        vals = (2.0 * g01 * vtx + g11 * vxx - self.model.m * v
                + F0 * vt + F1 * vx + Fl * v)
        if not np.all(np.isfinite(vals)):
            raise BlowUpError("non-finite linearized evaluation")
        out = np.fft.rfft(vals)
        out[~self.keep] = 0.0
        return out


def evolve_linearized(background: Trajectory, v0: State, dt: float,
                      observers=(), sample_every: int | None = None,
                      dealias: bool = True) -> Trajectory:
    """Integrate the linearized flow with coefficients interpolated linearly
    in time between stored background states."""
    if v0.grid != background.grid:
        raise ValueError("linearized data must live on the background grid")
    t0 = background.states[0].time
    t_end = background.states[-1].time
    nsteps = int(round((t_end - t0) / dt))
    if sample_every is None:
        sample_every = max(1, nsteps // 256)
    lin = _LinearizedRhs(background, background.model, dealias)
    traj = Trajectory(grid=v0.grid, dt=dt, sample_every=sample_every,
                      model=background.model)
    vc, vtc = _to_half(v0)
    grid = v0.grid

    def sample(vc, vtc, t):
        st = _from_half(grid, vc, vtc, t)
        traj.states.append(st)
        rec = {"t": t}
        for obs in observers:
            rec.update(obs(st))
        traj.records.append(rec)

    sample(vc, vtc, t0)
    for i in range(nsteps):
        t = t0 + i * dt
        k1v = lin.rhs(vc, vtc, t)
        u2 = vc + 0.5 * dt * vtc
        v2 = vtc + 0.5 * dt * k1v
        k2v = lin.rhs(u2, v2, t + 0.5 * dt)
        u3 = vc + 0.5 * dt * v2
        v3 = vtc + 0.5 * dt * k2v
        k3v = lin.rhs(u3, v3, t + 0.5 * dt)
        u4 = vc + dt * v3
        v4 = vtc + dt * k3v
        k4v = lin.rhs(u4, v4, t + dt)
        vc = vc + dt / 6.0 * (vtc + 2.0 * v2 + 2.0 * v3 + v4)
        vtc = vtc + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if (i + 1) % sample_every == 0 or (i + 1) == nsteps:
            sample(vc, vtc, t0 + (i + 1) * dt)
    return traj


def evolve_linear_exact(state0: State, m: float, t: float) -> State:
    """Exact single-mode propagator of the flat flow, applied spectrally."""
    xi = state0.grid.xi
    om = np.sqrt(xi**2 + m)
    c, s = np.cos(om * t), np.sin(om * t)
    pos = Field(state0.grid, c * state0.pos.coeffs + (s / om) * state0.vel.coeffs)
    vel = Field(state0.grid, -om * s * state0.pos.coeffs + c * state0.vel.coeffs)
    return State(pos, vel, state0.time + t)
