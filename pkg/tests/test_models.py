import cmath
import math

import numpy as np
import pytest

from grasspath.algebra import GeneratorKind, coefficient_of, GeneratorId
from grasspath.models import (
    ConstantField,
    JaynesCummingsModel,
    SampledField,
    SinusoidField,
    SpinFieldModel,
    TimeGrid,
    cartesian_field,
    jc_step_parts,
    left_bar,
    one_step_kernel_jc,
    one_step_kernel_spin,
    right_eta,
    spin_step_exponent,
)
from grasspath.oracle import propagate_spin_exact
from grasspath.recursion import kernel_sectors


def test_fields():
    assert ConstantField(0.5 + 0.1j)(3.0) == 0.5 + 0.1j
    s = SinusoidField(2.0, 3.0, 0.5)
    assert s(1.0) == pytest.approx(2.0 * math.cos(3.5))
    assert cartesian_field(1.0, 2.0).value == pytest.approx(0.5 - 1.0j)


def test_sampled_field_interpolates_and_guards_domain():
    f = SampledField.from_pairs([(0.0, 0), (1.0, 1 + 1j), (2.0, 0)])
    assert f(0.5) == pytest.approx(0.5 + 0.5j)
    assert f.covers(0.0, 2.0) and not f.covers(0.0, 2.5)
    with pytest.raises(ValueError):
        f(2.5)
    with pytest.raises(ValueError):
        SampledField((0.0, 0.0), (1, 2))


def test_time_grid():
    g = TimeGrid(1.0, 3)
    assert g.eps * g.n_steps == g.t_total
    assert g.time(3) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        TimeGrid(1.0, 0)
    with pytest.raises(ValueError):
        TimeGrid(-1.0, 2)


def test_jc_coupling_must_be_real():
    assert JaynesCummingsModel(1, 1, 0.5 + 0j).lam == 0.5
    with pytest.raises(ValueError):
        JaynesCummingsModel(1, 1, 0.5j)


def test_boundary_generators():
    g = TimeGrid(1.0, 2)
    assert left_bar(2, g).generators() == [GeneratorId(2, GeneratorKind.ETA_BAR_OUT)]
    assert left_bar(1, g).generators() == [GeneratorId(1, GeneratorKind.ETA_BAR_STEP)]
    assert right_eta(0).generators() == [GeneratorId(0, GeneratorKind.ETA_IN)]


def test_slice_index_checked():
    m = SpinFieldModel(1.0, ConstantField(0.3))
    with pytest.raises(IndexError):
        spin_step_exponent(m, 0, TimeGrid(1.0, 2))
    with pytest.raises(IndexError):
        jc_step_parts(JaynesCummingsModel(1, 1, 1), 3, TimeGrid(1.0, 2))


def test_zero_field_carries_no_partners():
    m = SpinFieldModel(1.0, ConstantField(0))
    k = one_step_kernel_spin(m, 1, TimeGrid(0.1, 1))
    kinds = {g.kind for g in k.generators()}
    assert kinds == {GeneratorKind.ETA_IN, GeneratorKind.ETA_BAR_OUT}


def test_one_step_spin_kernel_is_first_order_expansion():
    m = SpinFieldModel(0.7, ConstantField(0.4 - 0.2j))
    eps = 0.1
    u = kernel_sectors(one_step_kernel_spin(m, 1, TimeGrid(eps, 1)), 1)
    b = 0.4 - 0.2j
    h = np.array([[0, b.conjugate()], [b, 0.7]])
    assert np.abs(u - (np.eye(2) - 1j * eps * h)).max() < 1e-15


def test_one_step_spin_error_is_second_order():
    m = SpinFieldModel(0.9, SinusoidField(0.6 + 0.2j, 1.3, 0.2))
    errs = []
    for eps in (0.04, 0.02, 0.01):
        u = kernel_sectors(one_step_kernel_spin(m, 1, TimeGrid(eps, 1)), 1)
        errs.append(np.abs(u - propagate_spin_exact(m, eps, 1e-5).u).max())
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    assert all(3.5 < r < 4.5 for r in ratios)


def test_commuting_field_kernel_has_odd_linear_terms():
    m = SpinFieldModel(0.0, ConstantField(0.5))
    k = one_step_kernel_spin(m, 1, TimeGrid(0.2, 1), symbolic_field=False)
    assert coefficient_of(k, [GeneratorId(1, GeneratorKind.ETA_BAR_OUT)]) == pytest.approx(-0.1j)
    assert k.parity() is None


def test_jc_one_step_kernel_by_hand():
    model = JaynesCummingsModel(1.3, 0.8, 0.7)
    grid = TimeGrid(1.1, 1)
    zi, zf = 0.4 + 0.2j, 0.3 - 0.5j
    k = one_step_kernel_jc(model, 1, grid, zi, zf)
    eps = 1.1
    c = 1 - 0.8j * eps
    g = -1j * eps * 0.7
    s = cmath.exp(c * zf * zi)
    eta_i = GeneratorId(0, GeneratorKind.ETA_IN)
    bar_f = GeneratorId(1, GeneratorKind.ETA_BAR_OUT)
    lam = GeneratorId(1, GeneratorKind.COUPLING_LAMBDA)
    # z̄_f g λ η_i = -z̄_f g η_i λ in canonical order
    assert coefficient_of(k, []) == pytest.approx(s)
    assert coefficient_of(k, [eta_i, lam]) == pytest.approx(-zf * g * s)
    assert coefficient_of(k, [bar_f, lam]) == pytest.approx(g * zi * s)
    assert coefficient_of(k, [eta_i, bar_f]) == pytest.approx(-(1 - 1.3j * eps) * s)
    assert len(k) == 4
