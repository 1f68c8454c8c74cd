"""N-slice propagators: single-exponential recursion, direct composition, stationary path.

Three independent routes to the same kernel:

* :func:`recurse_exponent` + :func:`assemble_propagator` carry the exponent
  ``η̄_f η_N + φ_N`` (spin) or ``η̄_f η_N + z̄_f z_N`` (Jaynes-Cummings) forward
  one slice at a time and exponentiate once at the end.
* :func:`compose_discrete` multiplies slice kernels and integrates out every
  intermediate coherent-state pair.
* :func:`stationary_path` solves the forward/backward stationarity equations of
  the discrete action and evaluates the action on that path.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb

import numpy as np

from grasspath.algebra import (
    ONE,
    ZERO,
    AlgebraElement,
    GeneratorKind,
    berezin_integrate_pair,
    coefficient_of,
    degrassmannize,
    exp_element,
    GeneratorId,
    Monomial,
    make_generator,
)
from grasspath.models import (
    JaynesCummingsModel,
    SpinFieldModel,
    TimeGrid,
    field_at,
    jc_step_parts,
    left_bar,
    one_step_kernel_spin,
    right_eta,
)

N_MAX_SYMBOLIC = 8
MONOMIAL_BUDGET = 2**18


class CompositionOverflow(RuntimeError):
    """Raised when an intermediate kernel exceeds the monomial budget."""


@dataclass(frozen=True)
class ExponentState:
    """Recursion variables after ``step`` slices.

    ``phi_or_z`` is φ_j for the spin model and the boson amplitude z_j (scalar
    part plus partner-graded corrections) for Jaynes-Cummings.
    """

    model_tag: str
    eta: AlgebraElement
    phi_or_z: AlgebraElement
    step: int


def _is_spin(model) -> bool:
    return isinstance(model, SpinFieldModel)


def initial_state(model, z_i: complex = 0) -> ExponentState:
    eta0 = make_generator(GeneratorKind.ETA_IN, 0)
    if _is_spin(model):
        return ExponentState(model.tag, eta0, ZERO, 0)
    return ExponentState(model.tag, eta0, AlgebraElement.scalar(z_i), 0)


def advance(state: ExponentState, model, grid: TimeGrid, commuting_field: bool = False) -> ExponentState:
    """One slice of the recursion ``(η_{j-1}, φ_{j-1}) -> (η_j, φ_j)``."""
    j = state.step + 1
    eps = grid.eps
    if _is_spin(model):
        a = 1 - 1j * model.omega * eps
        b = field_at(model, grid.time(j))
        if commuting_field:
            beta, beta_bar = ONE, ONE
        else:
            beta = make_generator(GeneratorKind.FIELD_B, j)
            beta_bar = make_generator(GeneratorKind.FIELD_B_CONJ, j)
        eta = a * state.eta + (-1j * eps * b) * beta
        phi = state.phi_or_z + (-1j * eps * b.conjugate()) * (beta_bar * state.eta)
        return ExponentState(model.tag, eta, phi, j)
    a = 1 - 1j * model.omega_o * eps
    c = 1 - 1j * model.omega * eps
    g = -1j * eps * model.lam
    lam = make_generator(GeneratorKind.COUPLING_LAMBDA, j)
    eta = a * state.eta + g * (lam * state.phi_or_z)
    z = c * state.phi_or_z + g * (lam * state.eta)
    return ExponentState(model.tag, eta, z, j)


def recurse_exponent(
    model, grid: TimeGrid, z_i: complex = 0, commuting_field: bool = False
) -> ExponentState:
    """Run the exponent recursion over all ``grid.n_steps`` slices."""
    state = initial_state(model, z_i)
    for _ in range(grid.n_steps):
        state = advance(state, model, grid, commuting_field)
    return state


def assemble_propagator(state: ExponentState, z_bar_f: complex = 0) -> AlgebraElement:
    """Expand ``exp(η̄_f η_N + φ_N)`` or ``exp(η̄_f η_N + z̄_f z_N)`` with all truncations."""
    bar_f = make_generator(GeneratorKind.ETA_BAR_OUT, state.step)
    if state.model_tag == SpinFieldModel.tag:
        return exp_element(bar_f * state.eta + state.phi_or_z)
    return exp_element(bar_f * state.eta + z_bar_f * state.phi_or_z)


def _check_budget(k: AlgebraElement, budget: int, j: int):
    if len(k) > budget:
        raise CompositionOverflow(f"{len(k)} monomials after slice {j} exceed budget {budget}")


def compose_discrete(
    model,
    grid: TimeGrid,
    z_i: complex = 0,
    z_bar_f: complex = 0,
    commuting_field: bool = False,
    budget: int = MONOMIAL_BUDGET,
) -> AlgebraElement:
    """Multiply slice kernels and integrate out all intermediate pairs.

    For Jaynes-Cummings the intermediate boson amplitudes are removed with the
    coherent-state reproducing property, see :func:`_compose_jc`.
    """
    if grid.n_steps > N_MAX_SYMBOLIC:
        raise ValueError(f"symbolic composition limited to N <= {N_MAX_SYMBOLIC}")
    if not _is_spin(model):
        if commuting_field:
            raise ValueError("commuting-field mode is only defined for the spin model")
        return _compose_jc(model, grid, z_i, z_bar_f, budget)
    symbolic = not commuting_field
    k = one_step_kernel_spin(model, 1, grid, symbolic)
    for j in range(2, grid.n_steps + 1):
        k = one_step_kernel_spin(model, j, grid, symbolic) * k
        k = berezin_integrate_pair(k, j - 1)
        _check_budget(k, budget, j)
    return k


def _binomial_shift(coeffs, c, q):
    """Coefficients of ``G(c z̄ + Q)`` in powers of z̄, given ``G(z̄) = Σ z̄^n F_n``."""
    q_pows = [ONE]
    while len(q_pows) < len(coeffs):
        nxt = q_pows[-1] * q
        if nxt.is_zero():
            break
        q_pows.append(nxt)
    out = [ZERO] * len(coeffs)
    for n, f in enumerate(coeffs):
        if f.is_zero():
            continue
        for k in range(n + 1):
            r = n - k
            if r >= len(q_pows):
                continue
            out[k] = out[k] + (comb(n, k) * c**k) * (q_pows[r] * f)
    return out


def _poly_exp(p: AlgebraElement) -> list[AlgebraElement]:
    """Coefficients of ``exp(z̄ P) = Σ_l z̄^l P^l / l!`` for nilpotent even ``P``."""
    out = [ONE]
    term = ONE
    l = 0
    while True:
        l += 1
        term = (term * p) / l
        if term.is_zero():
            return out
        out.append(term)


def _poly_mul(a: list[AlgebraElement], b: list[AlgebraElement]) -> list[AlgebraElement]:
    out = [ZERO] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for k, y in enumerate(b):
            out[i + k] = out[i + k] + x * y
    return out


def _compose_jc(model, grid, z_i, z_bar_f, budget):
    # Partial kernel K_j(z̄_j) = exp(rate * z̄_j) * Σ_n z̄_j^n coeffs[n].
    parts = jc_step_parts(model, 1, grid)
    rate = parts.c * z_i
    rest = exp_element(parts.q * z_i + parts.r)
    coeffs = [rest * p for p in _poly_exp(parts.p)]
    for j in range(2, grid.n_steps + 1):
        parts = jc_step_parts(model, j, grid)
        # ∫dμ(z) e^{(c z̄_j + Q) z} G(z̄) = G(c z̄_j + Q)
        shifted = _binomial_shift(coeffs, parts.c, parts.q)
        prefactor = exp_element(rate * parts.q + parts.r)
        rate = rate * parts.c
        coeffs = _poly_mul([prefactor * f for f in shifted], _poly_exp(parts.p))
        coeffs = [berezin_integrate_pair(f, j - 1) for f in coeffs]
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        if sum(len(f) for f in coeffs) > budget:
            raise CompositionOverflow(f"slice {j}: coefficient table exceeds budget {budget}")
    total = ZERO
    for n, f in enumerate(coeffs):
        total = total + f * (z_bar_f**n)
    return total * cmath.exp(rate * z_bar_f)


def stationary_path(model, grid: TimeGrid, z_i: complex = 0, z_bar_f: complex = 0) -> AlgebraElement:
    """Kernel from the discrete action evaluated on its stationary path.

    The forward equations fix η_j (and z_j), the backward equations fix η̄_j
    (and z̄_j) from the final boundary; the action is then summed slice by slice
    with those values and exponentiated.
    """
    n = grid.n_steps
    eps = grid.eps
    if _is_spin(model):
        a = 1 - 1j * model.omega * eps
        fields = [None] + [field_at(model, grid.time(j)) for j in range(1, n + 1)]
        beta = [None] + [make_generator(GeneratorKind.FIELD_B, j) for j in range(1, n + 1)]
        beta_bar = [None] + [make_generator(GeneratorKind.FIELD_B_CONJ, j) for j in range(1, n + 1)]
        eta = [right_eta(0)]
        for j in range(1, n + 1):
            eta.append(a * eta[j - 1] + (-1j * eps * fields[j]) * beta[j])
        bar = [None] * (n + 1)
        bar[n] = left_bar(n, grid)
        for j in range(n - 1, 0, -1):
            bar[j] = a * bar[j + 1] + (-1j * eps * fields[j + 1].conjugate()) * beta_bar[j + 1]
        action = ZERO
        for j in range(1, n + 1):
            action = action + a * (bar[j] * eta[j - 1])
            action = action + (-1j * eps * fields[j]) * (bar[j] * beta[j])
            action = action + (-1j * eps * fields[j].conjugate()) * (beta_bar[j] * eta[j - 1])
        for j in range(1, n):
            action = action - bar[j] * eta[j]
        return exp_element(action)

    a = 1 - 1j * model.omega_o * eps
    c = 1 - 1j * model.omega * eps
    g = -1j * eps * model.lam
    lam = [None] + [make_generator(GeneratorKind.COUPLING_LAMBDA, j) for j in range(1, n + 1)]
    eta = [right_eta(0)]
    z = [AlgebraElement.scalar(z_i)]
    for j in range(1, n + 1):
        z.append(c * z[j - 1] + g * (lam[j] * eta[j - 1]))
        eta.append(a * eta[j - 1] + g * (lam[j] * z[j - 1]))
    bar = [None] * (n + 1)
    zbar = [None] * (n + 1)
    bar[n] = left_bar(n, grid)
    zbar[n] = AlgebraElement.scalar(z_bar_f)
    for j in range(n - 1, 0, -1):
        zbar[j] = c * zbar[j + 1] + g * (bar[j + 1] * lam[j + 1])
        bar[j] = a * bar[j + 1] + g * (zbar[j + 1] * lam[j + 1])
    action = ZERO
    for j in range(1, n + 1):
        action = action + c * (zbar[j] * z[j - 1]) + a * (bar[j] * eta[j - 1])
        action = action + g * (bar[j] * lam[j] * z[j - 1]) + g * (zbar[j] * lam[j] * eta[j - 1])
    for j in range(1, n):
        action = action - zbar[j] * z[j] - bar[j] * eta[j]
    return exp_element(action)


def kernel_sectors(k: AlgebraElement, n_steps: int) -> np.ndarray:
    """2x2 matrix ``U`` read from ``K = U00 + η̄_f U10 + U01 η_i + η̄_f η_i U11``.

    Partners are stripped with :func:`degrassmannize` first. Rows index the
    final spin, columns the initial spin, 0 = ↓ and 1 = ↑.
    """
    flat = degrassmannize(k)
    eta_i = GeneratorId(0, GeneratorKind.ETA_IN)
    bar_f = GeneratorId(n_steps, GeneratorKind.ETA_BAR_OUT)
    u = np.empty((2, 2), dtype=complex)
    u[0, 0] = coefficient_of(flat, Monomial())
    u[1, 0] = coefficient_of(flat, Monomial.of(bar_f))
    u[0, 1] = coefficient_of(flat, Monomial.of(eta_i))
    # canonical storage is η_i η̄_f = -η̄_f η_i
    u[1, 1] = -coefficient_of(flat, Monomial.of(eta_i, bar_f))
    return u
