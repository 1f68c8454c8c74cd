"""Model parameters, field waveforms and one-slice coherent-state kernels.

Units: ħ = 1, all frequencies in rad per unit time. The constant ``-ω/2``
offset of the spin Hamiltonian is dropped, so the spin Hamiltonian in the
basis (|↓⟩, |↑⟩) reads ``ω|↑⟩⟨↑| + B|↑⟩⟨↓| + B*|↓⟩⟨↑|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from grasspath.algebra import AlgebraElement, GeneratorKind, exp_element, make_generator


@dataclass(frozen=True)
class ConstantField:
    value: complex

    def __call__(self, t: float) -> complex:
        return complex(self.value)


@dataclass(frozen=True)
class SinusoidField:
    """``B(t) = amplitude * cos(frequency * t + phase)``; amplitude may be complex."""

    amplitude: complex
    frequency: float
    phase: float = 0.0

    def __call__(self, t: float) -> complex:
        return complex(self.amplitude) * math.cos(self.frequency * t + self.phase)


@dataclass(frozen=True)
class SampledField:
    """Piecewise-linear interpolation of ``(t, B)`` samples."""

    times: tuple[float, ...]
    values: tuple[complex, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or len(self.times) < 2:
            raise ValueError("sampled field needs at least two (t, value) pairs")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, complex]]) -> "SampledField":
        return cls(tuple(float(t) for t, _ in pairs), tuple(complex(v) for _, v in pairs))

    def covers(self, t0: float, t1: float) -> bool:
        return self.times[0] <= t0 and t1 <= self.times[-1]

    def __call__(self, t: float) -> complex:
        if not self.times[0] <= t <= self.times[-1]:
            raise ValueError(f"t={t} outside sampled field domain [{self.times[0]}, {self.times[-1]}]")
        v = np.asarray(self.values)
        return complex(np.interp(t, self.times, v.real) + 1j * np.interp(t, self.times, v.imag))


def cartesian_field(bx: float, by: float) -> ConstantField:
    """Complex field from Cartesian transverse components, ``B = (Bx - i By) / 2``."""
    return ConstantField((bx - 1j * by) / 2)


@dataclass(frozen=True)
class SpinFieldModel:
    omega: float
    field: ConstantField | SinusoidField | SampledField = field(default_factory=lambda: ConstantField(0))

    tag = "spin_field"

    def is_constant(self) -> bool:
        return isinstance(self.field, ConstantField)


@dataclass(frozen=True)
class JaynesCummingsModel:
    omega_o: float
    omega: float
    lam: float

    tag = "jaynes_cummings"

    def __post_init__(self):
        if isinstance(self.lam, complex):
            if self.lam.imag != 0:
                raise ValueError("coupling must be real")
            object.__setattr__(self, "lam", self.lam.real)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform slicing ``t_j = j * eps`` for ``j = 0..n_steps``.

    ``t_total`` is re-derived as ``eps * n_steps`` so the product is exact.
    """

    t_total: float
    n_steps: int

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be positive")
        if self.t_total < 0:
            raise ValueError("t_total must be non-negative")
        object.__setattr__(self, "t_total", (self.t_total / self.n_steps) * self.n_steps)

    @property
    def eps(self) -> float:
        return self.t_total / self.n_steps

    def time(self, j: int) -> float:
        return j * self.eps


def field_at(model: SpinFieldModel, t: float) -> complex:
    return model.field(t)


def _check_slice(j: int, grid: TimeGrid):
    if not 1 <= j <= grid.n_steps:
        raise IndexError(f"slice {j} outside 1..{grid.n_steps}")


def left_bar(j: int, grid: TimeGrid) -> AlgebraElement:
    """η̄_j, or η̄_f on the last slice."""
    if j == grid.n_steps:
        return make_generator(GeneratorKind.ETA_BAR_OUT, j)
    return make_generator(GeneratorKind.ETA_BAR_STEP, j)


def right_eta(j: int) -> AlgebraElement:
    """η_j, or η_i for j = 0."""
    if j == 0:
        return make_generator(GeneratorKind.ETA_IN, 0)
    return make_generator(GeneratorKind.ETA_STEP, j)


def spin_step_exponent(
    model: SpinFieldModel, j: int, grid: TimeGrid, symbolic_field: bool = True
) -> AlgebraElement:
    """Exponent of the slice-``j`` kernel, ``(1-iωε) η̄_j η_{j-1} - iε B_j η̄_j - iε B_j* η_{j-1}``.

    With ``symbolic_field`` the field terms carry the partners ``B_j`` and
    ``B*_j`` (coefficient ``-iε`` times the field value at ``t_j``); without it
    the field enters as a plain commuting number.
    """
    _check_slice(j, grid)
    eps = grid.eps
    b = field_at(model, grid.time(j))
    bar, eta = left_bar(j, grid), right_eta(j - 1)
    expo = (1 - 1j * model.omega * eps) * (bar * eta)
    if symbolic_field:
        expo = expo + (-1j * eps * b) * (bar * make_generator(GeneratorKind.FIELD_B, j))
        expo = expo + (-1j * eps * b.conjugate()) * (make_generator(GeneratorKind.FIELD_B_CONJ, j) * eta)
    else:
        expo = expo + (-1j * eps * b) * bar + (-1j * eps * b.conjugate()) * eta
    return expo


def one_step_kernel_spin(
    model: SpinFieldModel, j: int, grid: TimeGrid, symbolic_field: bool = True
) -> AlgebraElement:
    return exp_element(spin_step_exponent(model, j, grid, symbolic_field))


@dataclass(frozen=True)
class JcStepParts:
    """Slice exponent ``c z̄_j z_{j-1} + z̄_j P + Q z_{j-1} + R``.

    ``c`` is the free boson factor; ``P``, ``Q``, ``R`` are even elements.
    """

    c: complex
    p: AlgebraElement
    q: AlgebraElement
    r: AlgebraElement

    def exponent(self, z_prev: complex, z_bar_next: complex) -> AlgebraElement:
        return (self.c * z_bar_next * z_prev) + z_bar_next * self.p + self.q * z_prev + self.r


def jc_step_parts(model: JaynesCummingsModel, j: int, grid: TimeGrid) -> JcStepParts:
    _check_slice(j, grid)
    eps = grid.eps
    lam = make_generator(GeneratorKind.COUPLING_LAMBDA, j)
    bar, eta = left_bar(j, grid), right_eta(j - 1)
    g = -1j * eps * model.lam
    return JcStepParts(
        c=1 - 1j * model.omega * eps,
        p=g * (lam * eta),
        q=g * (bar * lam),
        r=(1 - 1j * model.omega_o * eps) * (bar * eta),
    )


def one_step_kernel_jc(
    model: JaynesCummingsModel, j: int, grid: TimeGrid, z_prev: complex, z_bar_next: complex
) -> AlgebraElement:
    """Slice kernel with numeric boson amplitudes and partner ``λ_j``."""
    return exp_element(jc_step_parts(model, j, grid).exponent(z_prev, z_bar_next))
