"""Numerical cross-validation of conservation laws at desk scale.

Periodic pseudo-spectral discretization in x with classical four-stage
Runge-Kutta in time.  The u_tt shape integrates the first-order system in
(u, u_t); the u_tx shape evolves u_t = D_x^{-1} g(u) with the inverse
derivative realized spectrally under zero-mean projection.  Conserved
quantities are periodic trapezoid integrals of the density over the grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import U, is_indep, is_kernel_atom
from .pde import PdeSpec
from .laws import ConservationLaw


class IntegrationBlowUp(RuntimeError):
    def __init__(self, t, norm):
        super().__init__("field norm %.3e at t=%.4f; unstable configuration" % (norm, t))
        self.t = t
        self.norm = norm


@dataclass(frozen=True)
class GridConfig:
    length: float
    n: int
    dt: float
    t_end: float
    save_every: int = 0  # 0: choose automatically (~80 snapshots)

    def __post_init__(self):
        if self.n < 64:
            raise ValueError("grid must have at least 64 points")
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")


@dataclass
class Trajectory:
    pde: PdeSpec
    cfg: GridConfig
    x: np.ndarray
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)  # dict coord-array snapshots


def grid(cfg: GridConfig) -> np.ndarray:
    return np.linspace(-cfg.length / 2, cfg.length / 2, cfg.n, endpoint=False)


def _wavenumbers(n: int, length: float) -> np.ndarray:
    return 2.0 * np.pi * np.fft.rfftfreq(n, d=length / n)


def spectral_derivative(u: np.ndarray, length: float, order: int) -> np.ndarray:
    if order == 0:
        return u
    k = _wavenumbers(u.shape[0], length)
    return np.fft.irfft((1j * k) ** order * np.fft.rfft(u), n=u.shape[0])


def spectral_antiderivative(f: np.ndarray, length: float) -> np.ndarray:
    """Zero-mean antiderivative in x; the mean mode is projected out."""
    k = _wavenumbers(f.shape[0], length)
    fh = np.fft.rfft(f)
    out = np.zeros_like(fh)
    out[1:] = fh[1:] / (1j * k[1:])
    return np.fft.irfft(out, n=f.shape[0])


def _atom_array(a, u: np.ndarray) -> np.ndarray:
    arg = float(a[1]) * u + float(a[2])
    if a[0] == "exp":
        return np.exp(arg)
    if a[0] == "sin":
        return np.sin(arg)
    if a[0] == "cos":
        return np.cos(arg)
    if a[0] == "pow":
        return arg ** float(a[3])
    raise ValueError("cannot evaluate atom %r on a grid" % (a,))


def evaluate_on_grid(expr, t: float, x: np.ndarray, jets: dict) -> np.ndarray:
    """Vectorized expression evaluation; jets maps jet coordinates to arrays.

    Singular values become inf/nan here and are reported by the callers."""
    out = np.zeros_like(x)
    u = jets.get(U)
    with np.errstate(all="ignore"):
        for (mono, atoms), c in expr.terms.items():
            term = np.full_like(x, float(c))
            for k, p in mono:
                if k == "t":
                    term = term * t ** p
                elif k == "x":
                    term = term * x ** p
                else:
                    term = term * jets[k] ** p
            for a, p in atoms:
                if not is_kernel_atom(a):
                    raise ValueError("formal atom in numeric evaluation")
                term = term * _atom_array(a, u) ** p
            out += term
    return out


def _required_orders(exprs, t_order: int) -> int:
    m = 0
    for e in exprs:
        for (a, b) in e.jets():
            if a == t_order:
                m = max(m, b)
    return m


def _jet_arrays(pde: PdeSpec, exprs, u, length, ut=None) -> dict:
    jets: dict = {}
    for b in range(_required_orders(exprs, 0) + 1):
        jets[(0, b)] = spectral_derivative(u, length, b)
    if ut is not None:
        for b in range(_required_orders(exprs, 1) + 1):
            jets[(1, b)] = spectral_derivative(ut, length, b)
    return jets


def integrate_pde(pde: PdeSpec, initial, cfg: GridConfig) -> Trajectory:
    """Time series of fields for the three supported shapes.

    initial: array u0 for u_t/u_tx leading; tuple (u0, v0) for u_tt leading.
    """
    x = grid(cfg)
    length = cfg.length
    leading = pde.leading
    nsteps = int(round(cfg.t_end / cfg.dt))
    stride = cfg.save_every or max(1, nsteps // 80)
    traj = Trajectory(pde=pde, cfg=cfg, x=x)

    if leading == (2, 0):
        u0, v0 = initial
        y = np.stack([np.asarray(u0, float), np.asarray(v0, float)])

        def rhs(t, y):
            jets = _jet_arrays(pde, [pde.rhs], y[0], length, ut=y[1])
            return np.stack([y[1], evaluate_on_grid(pde.rhs, t, x, jets)])

        def snapshot(y):
            return {"u": y[0].copy(), "ut": y[1].copy()}
    elif leading == (1, 0):
        y = np.asarray(initial, float)

        def rhs(t, y):
            jets = _jet_arrays(pde, [pde.rhs], y, length)
            return evaluate_on_grid(pde.rhs, t, x, jets)

        def snapshot(y):
            return {"u": y.copy()}
    else:
        y = np.asarray(initial, float)

        def rhs(t, y):
            jets = _jet_arrays(pde, [pde.rhs], y, length)
            g = evaluate_on_grid(pde.rhs, t, x, jets)
            return spectral_antiderivative(g - g.mean(), length)

        def snapshot(y):
            return {"u": y.copy()}

    def record(t, y):
        traj.times.append(t)
        traj.states.append(snapshot(y))

    record(0.0, y)
    t = 0.0
    dt = cfg.dt
    for step in range(1, nsteps + 1):
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2, y + dt / 2 * k1)
        k3 = rhs(t + dt / 2, y + dt / 2 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = step * dt
        if step % 25 == 0 or step == nsteps:
            norm = float(np.max(np.abs(y)))
            if not np.isfinite(norm) or norm > 1e8:
                raise IntegrationBlowUp(t, norm)
        if step % stride == 0 or step == nsteps:
            record(t, y)
    return traj


def _state_jets(pde: PdeSpec, exprs, state: dict, length: float,
                t: float, x: np.ndarray) -> dict:
    u = state["u"]
    if pde.leading == (2, 0):
        return _jet_arrays(pde, exprs, u, length, ut=state["ut"])
    if pde.leading == (1, 1):
        need_t = any(a >= 1 for e in exprs for (a, b) in e.jets())
        if need_t:
            jets = _jet_arrays(pde, [pde.rhs] + list(exprs), u, length)
            g = evaluate_on_grid(pde.rhs, t, x, jets)
            ut = spectral_antiderivative(g - g.mean(), length)
            jets.update(_jet_arrays(pde, exprs, u, length, ut=ut))
            return jets
    return _jet_arrays(pde, exprs, u, length)


def quantity_series(cl: ConservationLaw, traj: Trajectory):
    """Rows (t, Q, drift) with Q the periodic trapezoid integral of Phi^t."""
    dx = traj.cfg.length / traj.cfg.n
    exprs = [cl.density_t, cl.pde.rhs]
    rows = []
    q0 = None
    for t, state in zip(traj.times, traj.states):
        jets = _state_jets(cl.pde, exprs, state, traj.cfg.length, t, traj.x)
        density = evaluate_on_grid(cl.density_t, t, traj.x, jets)
        if not np.all(np.isfinite(density)):
            bad = int(np.argmin(np.isfinite(density)))
            raise ValueError(
                "density evaluation singular at t=%.4f, x=%.4f" % (t, traj.x[bad]))
        q = float(density.sum() * dx)
        if q0 is None:
            q0 = q
        rows.append((t, q, abs(q - q0) / max(1.0, abs(q0))))
    return rows


def conserved_drift(cl: ConservationLaw, traj: Trajectory) -> float:
    """max_t |Q(t) - Q(0)| / max(1, |Q(0)|)."""
    return max(row[2] for row in quantity_series(cl, traj))


def refinement_drifts(pde: PdeSpec, initial, cfg: GridConfig,
                      laws, levels: int = 3):
    """Drifts of each law under successive halvings of dt (fixed grid).

    Returns a list per law: [drift at dt, drift at dt/2, ...].  With spectral
    space differences the observed decay order is that of the RK4 stepper.
    """
    out = [[] for _ in laws]
    for level in range(levels):
        scaled = GridConfig(length=cfg.length, n=cfg.n, dt=cfg.dt / 2 ** level,
                            t_end=cfg.t_end, save_every=cfg.save_every)
        traj = integrate_pde(pde, initial, scaled)
        for i, cl in enumerate(laws):
            out[i].append(conserved_drift(cl, traj))
    return out


def convergence_orders(drifts) -> list:
    """Observed orders log2(d_k / d_{k+1}) along a refinement sequence."""
    out = []
    for a, b in zip(drifts, drifts[1:]):
        if b == 0:
            out.append(float("inf"))
        else:
            out.append(float(np.log2(a / b)))
    return out


# -- canonical desk-scale initial data ---------------------------------------

def kdv_soliton(x: np.ndarray, speed: float = 4.0, center: float = 0.0) -> np.ndarray:
    """Solitary wave 3c sech^2(sqrt(c)/2 (x - x0)) for u_t + u u_x + u_xxx = 0."""
    arg = 0.5 * np.sqrt(speed) * (x - center)
    return 3.0 * speed / np.cosh(arg) ** 2


def gaussian_bump(x: np.ndarray, base: float = 2.0, amplitude: float = 0.3,
                  width: float = 1.0) -> np.ndarray:
    return base + amplitude * np.exp(-((x / width) ** 2))


def odd_harmonic_profile(x: np.ndarray, length: float,
                         amplitudes=(1.1, 0.3)) -> np.ndarray:
    """Half-period antisymmetric profile: u(x + L/2) = -u(x).

    Built from odd harmonics only, so the mean of any odd function of u
    vanishes exactly; the zero-mean projection in the u_tx chart is inactive.
    """
    k0 = 2.0 * np.pi / length
    out = np.zeros_like(x)
    for j, a in enumerate(amplitudes):
        mode = 2 * j + 1
        out = out + a * np.sin(mode * k0 * x) + 0.3 * a * np.cos(mode * k0 * x)
    return out
