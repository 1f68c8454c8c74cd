"""Bracket functions: the expansion coefficients of the exponential kernel.

Spin: ``K = Σ_m ([φ^m] + η̄_f [φ^m η]) / m!``.
Jaynes-Cummings: ``K = Σ_m z̄_f^m ([z^m] + η̄_f [z^m η]) / m!``.

Each bracket is held as a pair ``(u, v)``: ``u`` multiplies the scalar
monomial and ``v`` multiplies η_i. Arrays ``phi_brackets`` and
``eta_brackets`` have shape ``(m_max + 1, 2)``; for Jaynes-Cummings they hold
``[z^m]`` and ``[z^m η]``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from grasspath.models import JaynesCummingsModel, SpinFieldModel, TimeGrid, field_at
from grasspath.oracle import JcKernelTable, SpinKernel

DEFAULT_M_MAX_SPIN = 16
DEFAULT_M_MAX_JC = 12
TRUNCATION_TOL = 1e-8


class TruncationWarning(UserWarning):
    pass


class BracketPair(NamedTuple):
    u: complex
    v: complex


@dataclass(frozen=True)
class BracketState:
    model_tag: str
    m_max: int
    phi_brackets: np.ndarray
    eta_brackets: np.ndarray
    t: float = 0.0
    z_i: complex = 0j

    def phi(self, m: int) -> BracketPair:
        return BracketPair(*self.phi_brackets[m])

    def eta(self, m: int) -> BracketPair:
        return BracketPair(*self.eta_brackets[m])


def initial_state(model, m_max: int | None = None, z_i: complex = 0) -> BracketState:
    """Brackets of the overlap kernel at t = 0."""
    spin = isinstance(model, SpinFieldModel)
    if m_max is None:
        m_max = DEFAULT_M_MAX_SPIN if spin else DEFAULT_M_MAX_JC
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    phi = np.zeros((m_max + 1, 2), dtype=complex)
    eta = np.zeros((m_max + 1, 2), dtype=complex)
    if spin:
        phi[0, 0] = 1
        eta[0, 1] = 1
        z_i = 0j
    else:
        powers = complex(z_i) ** np.arange(m_max + 1)
        phi[:, 0] = powers
        eta[:, 1] = powers
    return BracketState(model.tag, m_max, phi, eta, 0.0, complex(z_i))


def _closure(state_z_i, m_max, omega, t):
    # free evolution of the missing [z^{m_max+1}]
    k = m_max + 1
    return np.array([state_z_i**k * np.exp(-1j * k * omega * t), 0j])


def step_discrete(state: BracketState, model, j: int, eps: float) -> BracketState:
    """One forward-difference slice ending at ``t_j = j * eps``."""
    phi, eta = state.phi_brackets, state.eta_brackets
    m = np.arange(state.m_max + 1)[:, None]
    t = j * eps
    if isinstance(model, SpinFieldModel):
        b = field_at(model, t)
        shifted = np.zeros_like(eta)
        shifted[1:] = eta[:-1]
        new_phi = phi - 1j * m * b.conjugate() * eps * shifted
        new_eta = (1 - 1j * model.omega * eps) * eta - 1j * b * eps * phi
    else:
        lam, w, w0 = model.lam, model.omega, model.omega_o
        lower = np.zeros_like(eta)
        lower[1:] = eta[:-1]
        upper = np.empty_like(phi)
        upper[:-1] = phi[1:]
        upper[-1] = _closure(state.z_i, state.m_max, w, state.t)
        new_phi = (1 - 1j * m * w * eps) * phi - 1j * m * lam * eps * lower
        new_eta = (1 - 1j * m * w * eps - 1j * w0 * eps) * eta - 1j * lam * eps * upper
    return replace(state, phi_brackets=new_phi, eta_brackets=new_eta, t=t)


def run_discrete(model, grid: TimeGrid, m_max: int | None = None, z_i: complex = 0) -> BracketState:
    state = initial_state(model, m_max, z_i)
    for j in range(1, grid.n_steps + 1):
        state = step_discrete(state, model, j, grid.eps)
    return state


def _rhs(model, m_max, z_i):
    m = np.arange(m_max + 1)[:, None]
    if isinstance(model, SpinFieldModel):
        omega = model.omega

        def f(t, y):
            phi, eta = y
            b = field_at(model, t)
            out = np.empty_like(y)
            out[0, 0] = 0
            out[0, 1:] = -1j * m[1:] * b.conjugate() * eta[:-1]
            out[1] = -1j * omega * eta - 1j * b * phi
            return out

        return f

    lam, w, w0 = model.lam, model.omega, model.omega_o

    def f(t, y):
        z, zeta = y
        out = np.empty_like(y)
        lower = np.zeros_like(zeta)
        lower[1:] = zeta[:-1]
        upper = np.empty_like(z)
        upper[:-1] = z[1:]
        upper[-1] = _closure(z_i, m_max, w, t)
        out[0] = -1j * m * w * z - 1j * m * lam * lower
        out[1] = -1j * (m * w + w0) * zeta - 1j * lam * upper
        return out

    return f


def ode_trajectory(state: BracketState, model, t_final: float, dt: float):
    """Classical RK4 from ``state.t`` to ``t_final`` with step ``<= dt``.

    Returns ``(times, y)`` with ``y[k] = [phi_brackets, eta_brackets]`` at
    ``times[k]``; the step is shrunk so the last point lands on ``t_final``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < state.t:
        raise ValueError("t_final precedes the current state time")
    n = max(1, math.ceil((t_final - state.t) / dt - 1e-9))
    h = (t_final - state.t) / n
    f = _rhs(model, state.m_max, state.z_i)
    y = np.stack([state.phi_brackets, state.eta_brackets])
    ys = np.empty((n + 1,) + y.shape, dtype=complex)
    ys[0] = y
    t0 = state.t
    for k in range(n):
        t = t0 + k * h
        k1 = f(t, y)
        k2 = f(t + h / 2, y + (h / 2) * k1)
        k3 = f(t + h / 2, y + (h / 2) * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[k + 1] = y
    return t0 + h * np.arange(n + 1), ys


def integrate_ode(state: BracketState, model, t_final: float, dt: float) -> BracketState:
    _, ys = ode_trajectory(state, model, t_final, dt)
    return replace(state, phi_brackets=ys[-1, 0], eta_brackets=ys[-1, 1], t=t_final)


def _weights(m_max):
    return 1.0 / np.array([math.factorial(m) for m in range(m_max + 1)], dtype=float)


def truncation_tail(state: BracketState) -> float:
    """Largest ``|bracket| / m!`` at ``m = m_max`` across the four sectors."""
    w = 1.0 / math.factorial(state.m_max)
    return float(max(np.abs(state.phi_brackets[-1]).max(), np.abs(state.eta_brackets[-1]).max()) * w)


def _warn_tail(state, tol):
    tail = truncation_tail(state)
    if tail > tol:
        warnings.warn(
            f"bracket series not converged: last term {tail:.3g} > {tol:.3g} at m_max={state.m_max}",
            TruncationWarning,
            stacklevel=3,
        )


def assemble_kernel_spin(state: BracketState, tol: float = TRUNCATION_TOL) -> SpinKernel:
    """``U00 = Σ u[φ^m]/m!``, ``U01 = Σ v[φ^m]/m!``, ``U10 = Σ u[φ^m η]/m!``, ``U11 = Σ v[φ^m η]/m!``."""
    if state.model_tag != SpinFieldModel.tag:
        raise ValueError("not a spin bracket state")
    _warn_tail(state, tol)
    w = _weights(state.m_max)
    u = np.array([w @ state.phi_brackets, w @ state.eta_brackets])
    return SpinKernel(u)


def assemble_kernel_jc(state: BracketState, tol: float = TRUNCATION_TOL) -> JcKernelTable:
    if state.model_tag != JaynesCummingsModel.tag:
        raise ValueError("not a Jaynes-Cummings bracket state")
    _warn_tail(state, tol)
    w = _weights(state.m_max)
    return JcKernelTable(
        a=state.phi_brackets[:, 0] * w,
        b=state.phi_brackets[:, 1] * w,
        c=state.eta_brackets[:, 0] * w,
        d=state.eta_brackets[:, 1] * w,
    )


def _derivative(ys, h):
    # 4th-order central differences, interior points only
    return (ys[:-4] - 8 * ys[1:-3] + 8 * ys[3:-1] - ys[4:]) / (12 * h)


def bracket_residuals(model, t_final: float, dt: float, m_max: int | None = None, z_i: complex = 0):
    """Residuals of the bracket equations of motion along an RK4 solution.

    The time derivative is taken numerically from the trajectory. Returns
    ``(phi_residual, eta_residual)`` arrays of shape ``(samples, rows, 2)``:
    for spin ``i d[φ^m]/dt - m B* [φ^{m-1}η]`` and
    ``i d[φ^mη]/dt - ω[φ^mη] - B[φ^m]``; for Jaynes-Cummings
    ``i d[z^m]/dt - mω[z^m] - mλ[z^{m-1}η]`` and
    ``i d[z^mη]/dt - (mω + ω0)[z^mη] - λ[z^{m+1}]`` for ``m < m_max``.
    """
    state = initial_state(model, m_max, z_i)
    times, ys = ode_trajectory(state, model, t_final, dt)
    h = times[1] - times[0]
    dy = _derivative(ys, h)
    y = ys[2:-2]
    tt = times[2:-2]
    m = np.arange(state.m_max + 1)[None, :, None]
    if isinstance(model, SpinFieldModel):
        b = np.array([field_at(model, t) for t in tt])[:, None, None]
        phi, eta = y[:, 0], y[:, 1]
        lower = np.zeros_like(eta)
        lower[:, 1:] = eta[:, :-1]
        r_phi = 1j * dy[:, 0] - m * b.conj() * lower
        r_eta = 1j * dy[:, 1] - model.omega * eta - b * phi
        return r_phi, r_eta
    z, zeta = y[:, 0], y[:, 1]
    lower = np.zeros_like(zeta)
    lower[:, 1:] = zeta[:, :-1]
    r_z = 1j * dy[:, 0] - m * model.omega * z - m * model.lam * lower
    r_zeta = 1j * dy[:, 1, :-1] - (m[:, :-1] * model.omega + model.omega_o) * zeta[:, :-1] - model.lam * z[:, 1:]
    return r_z[:, :-1], r_zeta


def kernel_schrodinger_residual(model, t_final: float, dt: float, m_max: int | None = None, z_i: complex = 0):
    """``max |i dK/dt - H K|`` with ``H`` applied in the matrix representation.

    Spin: ``K`` is the assembled 2x2 kernel. Jaynes-Cummings: rows of the
    kernel table are rescaled to Fock amplitudes ``sqrt(m!) * table[m]`` and
    ``H`` acts in the truncated Fock basis; rows ``m >= m_max`` are excluded
    since they couple outside the table.
    """
    state = initial_state(model, m_max, z_i)
    times, ys = ode_trajectory(state, model, t_final, dt)
    h = times[1] - times[0]
    w = _weights(state.m_max)
    # rows: final sector (phi -> ↓ / [z^m], eta -> ↑ / [z^m η])
    if isinstance(model, SpinFieldModel):
        u = np.einsum("m,ksmc->ksc", w, ys)
        du = _derivative(u, h)
        res = 0.0
        for k, t in enumerate(times[2:-2]):
            b = field_at(model, t)
            hmat = np.array([[0, b.conjugate()], [b, model.omega]])
            res = max(res, np.abs(1j * du[k] - hmat @ u[k + 2]).max())
        return res
    amp = ys * (np.sqrt(w)[None, None, :, None])
    damp = _derivative(amp, h)
    amp = amp[2:-2]
    mm = np.arange(state.m_max + 1)[:, None]
    down, up = amp[:, 0], amp[:, 1]
    sq = np.sqrt(np.arange(state.m_max + 2))
    h_down = mm * model.omega * down
    h_down[:, 1:] += model.lam * sq[1:-1, None] * up[:, :-1]
    h_up = (mm * model.omega + model.omega_o) * up
    h_up[:, :-1] += model.lam * sq[1:-1, None] * down[:, 1:]
    r_down = 1j * damp[:, 0, :-1] - h_down[:, :-1]
    r_up = 1j * damp[:, 1, :-1] - h_up[:, :-1]
    return float(max(np.abs(r_down).max(), np.abs(r_up).max()))
