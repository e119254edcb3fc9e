"""Time integration of the semi-discrete closed loop and energy audits.

The generator acts in rescaled coordinates; this module owns the way back.
With x = x~/s_x and t = t~/s_t the stored grid samples give the physical
fields through v = s_t * v~ and w_x = s_x * dw~/dx~, so the energy ledger

    Hbar  = 1/2 int P w_x^2 + rho v^2 dx + 1/2 m_p v(L)^2
    Vbar  = chi1 Hbar + 1/2 chi2 w(0)^2
    V     = Vbar + 1/2 (v(0) + chi2 w(0) - chi1 P(0) w_x(0))^2

and its balance dV/dt = -v(0)^2 - chi3 s^2 are evaluated in the original
physical variables.  The time stepper is Crank-Nicolson with the step
matrix factored once; the identity check compares one-step differences of
V against midpoint averages of the right-hand side, which keeps both sides
second-order consistent at t_{n+1/2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from heavychain.discretization import GeneratorSystem
from heavychain.model import ControllerGains, PhysicalParams
from heavychain.operator import diff_matrix, trapezoid_weights

__all__ = [
    "C_LYAPUNOV",
    "ENERGY_COLUMNS",
    "Trajectory",
    "EnergyTrace",
    "IdentityReport",
    "DecayFit",
    "simulate",
    "energies",
    "verify_energy_identity",
    "decay_fit",
]

ENERGY_COLUMNS = ("t", "Hbar", "Vbar", "V", "dVdt_lhs", "dVdt_rhs", "norm_H")

# Allowance for the energy-balance residual, residual <= C * (dt^2 + dx^2)
# * max|V|, with dt and dx in physical units.  Calibrated on the reference
# configuration (observed constant ~615, dominated by the dx^2 part across
# N = 100..400) and frozen at roughly twice that value.
C_LYAPUNOV = 1200.0


@dataclass
class Trajectory:
    """Stored Crank-Nicolson states on one grid, rescaled time axis."""

    system: GeneratorSystem
    times: np.ndarray
    states: np.ndarray  # (len(times), 2*(n+1))
    dt: float

    def norm_history(self, gram: np.ndarray | None = None) -> np.ndarray:
        m = self.system.M_H if gram is None else gram
        vals = np.einsum("ij,jk,ik->i", np.conj(self.states), m, self.states).real
        return np.sqrt(np.maximum(vals, 0.0))


def simulate(z0: np.ndarray, sys: GeneratorSystem, t_final: float,
             dt: float | None = None, store_every: int = 1) -> Trajectory:
    """Crank-Nicolson run z_{n+1} = (I - dt/2 A)^{-1} (I + dt/2 A) z_n.

    dt defaults to dx over the largest wave speed.  The step matrix is
    factored once and reused; complex initial data is propagated as such
    (useful for eigenmode tracking).
    """
    if dt is None:
        dt = sys.grid.dx / float(np.sqrt(sys.model.tension0))
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    z0 = np.asarray(z0)
    if z0.shape != (sys.grid.size,):
        raise ValueError("initial state does not match the grid")
    dtype = complex if np.iscomplexobj(z0) else float
    eye = np.eye(sys.grid.size, dtype=dtype)
    lhs = eye - 0.5 * dt * sys.A
    step_rhs = eye + 0.5 * dt * sys.A
    lu, piv = lu_factor(lhs)
    if np.min(np.abs(np.diag(lu))) == 0.0:
        raise np.linalg.LinAlgError("singular time-step matrix")

    steps = max(1, int(round(t_final / dt)))
    z = z0.astype(dtype)
    stored = [z.copy()]
    stored_t = [0.0]
    for k in range(1, steps + 1):
        z = lu_solve((lu, piv), step_rhs @ z)
        if k % store_every == 0 or k == steps:
            stored.append(z.copy())
            stored_t.append(k * dt)
    return Trajectory(system=sys, times=np.array(stored_t), states=np.array(stored), dt=dt)


@dataclass
class EnergyTrace:
    """Energy ledger of a run, everything in physical units."""

    t: np.ndarray
    hbar: np.ndarray
    vbar: np.ndarray
    total: np.ndarray
    dvdt_lhs: np.ndarray
    dvdt_rhs: np.ndarray
    norm_h: np.ndarray
    dt: float
    dx: float

    def rows(self) -> np.ndarray:
        return np.column_stack(
            [self.t, self.hbar, self.vbar, self.total,
             self.dvdt_lhs, self.dvdt_rhs, self.norm_h]
        )


def energies(tr: Trajectory, p: PhysicalParams, gains: ControllerGains) -> EnergyTrace:
    """Physical energy ledger along a trajectory (real part of the states)."""
    m = tr.system.model
    grid = tr.system.grid
    npts = grid.n + 1
    w_vals = np.real(tr.states[:, :npts])
    v_vals = np.real(tr.states[:, npts:])

    d1 = diff_matrix(grid.n, grid.dx)
    wx = m.s_x * (w_vals @ d1.T)
    v_phys = m.s_t * v_vals
    quad = trapezoid_weights(grid.n, grid.dx) / m.s_x
    tension = m.tension(grid.x)

    hbar = 0.5 * ((tension * wx**2 + p.rho * v_phys**2) @ quad)
    hbar = hbar + 0.5 * p.m_p * v_phys[:, -1] ** 2
    w0 = w_vals[:, 0]
    v0 = v_phys[:, 0]
    sliding = v0 + gains.chi2 * w0 - gains.chi1 * tension[0] * wx[:, 0]
    vbar = gains.chi1 * hbar + 0.5 * gains.chi2 * w0**2
    total = vbar + 0.5 * sliding**2
    rhs = -(v0**2) - gains.chi3 * sliding**2

    t_phys = tr.times / m.s_t
    lhs = np.gradient(total, t_phys, edge_order=2)
    return EnergyTrace(
        t=t_phys,
        hbar=hbar,
        vbar=vbar,
        total=total,
        dvdt_lhs=lhs,
        dvdt_rhs=rhs,
        norm_h=tr.norm_history(),
        dt=float(t_phys[1] - t_phys[0]) if len(t_phys) > 1 else 0.0,
        dx=grid.dx / m.s_x,
    )


@dataclass(frozen=True)
class IdentityReport:
    residual: float
    bound: float
    constant: float
    scale: float
    dt: float
    dx: float
    satisfied: bool


def verify_energy_identity(et: EnergyTrace, constant: float = C_LYAPUNOV) -> IdentityReport:
    """Check dV/dt against the dissipation rate along the trace.

    Both sides are matched at the half steps: one-step differences of V
    versus midpoint averages of the stored right-hand side.  Passes when
    the largest residual stays below constant * (dt^2 + dx^2) * max|V|.
    """
    if len(et.t) < 2:
        raise ValueError("trace too short")
    dv = np.diff(et.total) / np.diff(et.t)
    rhs_mid = 0.5 * (et.dvdt_rhs[1:] + et.dvdt_rhs[:-1])
    residual = float(np.max(np.abs(dv - rhs_mid)))
    scale = float(np.max(np.abs(et.total)))
    bound = constant * (et.dt**2 + et.dx**2) * scale
    return IdentityReport(
        residual=residual,
        bound=bound,
        constant=constant,
        scale=scale,
        dt=et.dt,
        dx=et.dx,
        satisfied=residual <= bound,
    )


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponential envelope |z(t)| <= prefactor |z0| e^{-omega t}."""

    omega: float
    prefactor: float
    t_start: float
    t_end: float

    def __iter__(self):
        yield self.omega
        yield self.prefactor


def decay_fit(tr: Trajectory, gram: np.ndarray | None = None) -> DecayFit:
    """Fit the decay rate of log |z(t)|_H on the tail half of the run.

    Requires an overall drop of at least 10x so the fit window sits in the
    asymptotic regime; degenerate or non-decaying input is rejected.
    """
    norms = tr.norm_history(gram)
    if norms[0] <= 0.0:
        raise ValueError("zero initial state: nothing to fit")
    if norms[-1] > 0.1 * norms[0]:
        raise ValueError("norm drops by less than 10x; run longer before fitting")
    half = len(tr.times) // 2
    t_tail = tr.times[half:]
    with np.errstate(divide="ignore"):
        y = np.log(norms[half:])
    if not np.all(np.isfinite(y)):
        raise ValueError("norm history hit zero inside the fit window")
    slope, _ = np.polyfit(t_tail, y, 1)
    if slope >= 0.0:
        raise ValueError("tail is not decaying")
    omega = float(-slope)
    prefactor = float(np.max(norms * np.exp(omega * tr.times)) / norms[0])
    return DecayFit(
        omega=omega,
        prefactor=max(1.0, prefactor),
        t_start=float(t_tail[0]),
        t_end=float(t_tail[-1]),
    )
