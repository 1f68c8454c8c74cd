"""Reference propagators computed directly in Hilbert space.

Spin basis: index 0 = |↓⟩, 1 = |↑⟩. Jaynes-Cummings basis: index ``2 n + s``
for Fock level ``n`` and spin ``s`` (0 = ↓, 1 = ↑).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from grasspath.models import JaynesCummingsModel, SpinFieldModel, field_at

DEFAULT_SPIN_DT = 1e-4
DEFAULT_N_MAX = 40
CLOSED_FORM_TOL = 1e-10


@dataclass(frozen=True)
class SpinKernel:
    """2x2 propagator; ``K = U00 + η̄_f U10 + U01 η_i + η̄_f η_i U11``."""

    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError("spin kernel must be 2x2")
        object.__setattr__(self, "u", u)

    def unitarity_error(self) -> float:
        return float(np.abs(self.u.conj().T @ self.u - np.eye(2)).max())

    def max_deviation(self, other: "SpinKernel") -> float:
        return float(np.abs(self.u - other.u).max())


@dataclass(frozen=True)
class FockPropagator:
    n_max: int
    u: np.ndarray

    @staticmethod
    def index(n: int, s: int) -> int:
        return 2 * n + s

    def element(self, n_out: int, s_out: int, n_in: int, s_in: int) -> complex:
        return complex(self.u[2 * n_out + s_out, 2 * n_in + s_in])


@dataclass(frozen=True)
class JcKernelTable:
    """``K = Σ_m z̄_f^m (A_m + η̄_f C_m + B_m η_i + η̄_f η_i D_m)``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        arrs = [np.asarray(x, dtype=complex) for x in (self.a, self.b, self.c, self.d)]
        if len({x.shape for x in arrs}) != 1 or arrs[0].ndim != 1:
            raise ValueError("sector arrays must be 1-D and of equal length")
        if not all(np.isfinite(x).all() for x in arrs):
            raise ValueError("non-finite kernel coefficient")
        for name, x in zip("abcd", arrs):
            object.__setattr__(self, name, x)

    @property
    def m_max(self) -> int:
        return len(self.a) - 1

    def sectors(self) -> dict[str, np.ndarray]:
        return {"A": self.a, "B": self.b, "C": self.c, "D": self.d}

    def max_deviation(self, other: "JcKernelTable") -> float:
        m = min(self.m_max, other.m_max) + 1
        return float(
            max(np.abs(x[:m] - y[:m]).max() for x, y in zip(self.sectors().values(), other.sectors().values()))
        )


def _spin_rk4(model: SpinFieldModel, t0: float, t: float, n: int) -> np.ndarray:
    # scalar arithmetic: the 2x2 system is far too small for numpy to pay off
    w = model.omega
    f = model.field

    def rhs(tt, a, b, c, d):
        bb = f(tt)
        bc = bb.conjugate()
        # -i H U with H = [[0, B*], [B, ω]], U = [[a, b], [c, d]]
        return (
            -1j * (bc * c),
            -1j * (bc * d),
            -1j * (bb * a + w * c),
            -1j * (bb * b + w * d),
        )

    h = (t - t0) / n
    y = (1 + 0j, 0j, 0j, 1 + 0j)
    for k in range(n):
        tk = t0 + k * h
        k1 = rhs(tk, *y)
        k2 = rhs(tk + h / 2, *(yi + h / 2 * ki for yi, ki in zip(y, k1)))
        k3 = rhs(tk + h / 2, *(yi + h / 2 * ki for yi, ki in zip(y, k2)))
        k4 = rhs(tk + h, *(yi + h * ki for yi, ki in zip(y, k3)))
        y = tuple(yi + h / 6 * (a + 2 * b + 2 * c + d) for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
    return np.array([[y[0], y[1]], [y[2], y[3]]])


def _expm_hermitian_2x2(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian 2x2 ``h`` in closed form."""
    mean = (h[0, 0] + h[1, 1]).real / 2
    traceless = h - mean * np.eye(2)
    omega = math.sqrt(((h[0, 0] - h[1, 1]).real / 2) ** 2 + abs(h[0, 1]) ** 2)
    sinc = np.sinc(omega * t / math.pi) * t  # sin(Ωt)/Ω, finite at Ω = 0
    return cmath.exp(-1j * mean * t) * (math.cos(omega * t) * np.eye(2) - 1j * sinc * traceless)


def spin_closed_form(model: SpinFieldModel, t: float) -> SpinKernel:
    """Exact propagator for a constant field."""
    if not model.is_constant():
        raise ValueError("closed form needs a constant field")
    b = field_at(model, 0.0)
    h = np.array([[0, b.conjugate()], [b, model.omega]])
    return SpinKernel(_expm_hermitian_2x2(h, t))


def propagate_spin_exact(
    model: SpinFieldModel, t: float, dt: float = DEFAULT_SPIN_DT, t0: float = 0.0
) -> SpinKernel:
    """Solve ``i dU/dt = H(t) U`` from ``U(t0) = I`` with classical RK4.

    The step is shrunk so that an integer number of steps lands on ``t``.
    For a constant field the result is checked against the closed form.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t == t0:
        return SpinKernel(np.eye(2))
    n = max(1, math.ceil(abs(t - t0) / dt - 1e-9))
    kernel = SpinKernel(_spin_rk4(model, t0, t, n))
    if model.is_constant():
        exact = spin_closed_form(model, t - t0)
        dev = kernel.max_deviation(exact)
        if dev > CLOSED_FORM_TOL:
            raise AssertionError(f"RK4 and closed form disagree by {dev:.3g}")
    return kernel


def spin_halving_ratios(model: SpinFieldModel, t: float, dts=(0.05, 0.025, 0.0125)) -> list[float]:
    """Successive self-convergence ratios ``|U(h) - U(h/2)| / |U(h/2) - U(h/4)|``."""
    grids = list(dts) + [dts[-1] / 2]
    us = [_spin_rk4(model, 0.0, t, max(1, round(t / h))) for h in grids]
    errs = [np.abs(a - b).max() for a, b in zip(us, us[1:])]
    return [e0 / e1 for e0, e1 in zip(errs, errs[1:])]


def propagate_jc_exact(model: JaynesCummingsModel, t: float, n_max: int = DEFAULT_N_MAX) -> FockPropagator:
    """Block-wise exact propagator on Fock levels ``0..n_max``.

    Blocks pair ``|n,↑⟩`` with ``|n+1,↓⟩`` (coupling ``λ sqrt(n+1)``); ``|0,↓⟩``
    is a zero-energy singlet and ``|n_max,↑⟩`` is left uncoupled because its
    partner lies above the cut.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    w, w0, lam = model.omega, model.omega_o, model.lam
    dim = 2 * (n_max + 1)
    u = np.zeros((dim, dim), dtype=complex)
    u[0, 0] = 1.0
    for n in range(n_max):
        h = np.array([[n * w + w0, lam * math.sqrt(n + 1)], [lam * math.sqrt(n + 1), (n + 1) * w]])
        idx = [2 * n + 1, 2 * (n + 1)]
        u[np.ix_(idx, idx)] = _expm_hermitian_2x2(h, t)
    top = 2 * n_max + 1
    u[top, top] = cmath.exp(-1j * (n_max * w + w0) * t)
    return FockPropagator(n_max, u)


def kernel_table_from_matrix(prop: FockPropagator, z_i: complex, m_max: int) -> JcKernelTable:
    """Coherent-state kernel coefficients from a Fock-space propagator.

    With unnormalised ``|z⟩ = Σ z^n / sqrt(n!) |n⟩``, e.g.
    ``A_m = Σ_j z_i^j U[(m,↓),(j,↓)] / sqrt(m! j!)``; ``B``, ``C``, ``D`` take
    the (↓,↑), (↑,↓) and (↑,↑) spin sectors (row, column).
    """
    if m_max > prop.n_max - 2:
        raise ValueError(f"m_max={m_max} exceeds truncation guard n_max-2={prop.n_max - 2}")
    n = prop.n_max + 1
    j = np.arange(n)
    col = complex(z_i) ** j / np.sqrt([float(math.factorial(k)) for k in j])
    row = 1 / np.sqrt([float(math.factorial(k)) for k in range(m_max + 1)])
    u = prop.u.reshape(n, 2, n, 2)

    def sector(s_out, s_in):
        return row * (u[: m_max + 1, s_out, :, s_in] @ col)

    return JcKernelTable(a=sector(0, 0), b=sector(0, 1), c=sector(1, 0), d=sector(1, 1))
