import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grasspath.algebra import ONE, GeneratorKind, exp_element, make_generator, max_coefficient_deviation
from grasspath.models import ConstantField, JaynesCummingsModel, SinusoidField, SpinFieldModel, TimeGrid
from grasspath.recursion import (
    CompositionOverflow,
    assemble_propagator,
    compose_discrete,
    kernel_sectors,
    recurse_exponent,
    stationary_path,
)

SPIN = SpinFieldModel(0.7, SinusoidField(0.8 + 0.3j, 1.1, 0.4))
JC = JaynesCummingsModel(1.3, 0.8, 0.7)
ZI, ZF = 0.6 + 0.2j, 0.4 - 0.3j


def exact(model, grid, zi=0, zf=0):
    return assemble_propagator(recurse_exponent(model, grid, zi), zf)


@pytest.mark.parametrize("n", range(1, 7))
def test_spin_composition_equals_recursion(n):
    grid = TimeGrid(1.3, n)
    assert max_coefficient_deviation(compose_discrete(SPIN, grid), exact(SPIN, grid)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_jc_composition_equals_recursion(n):
    grid = TimeGrid(1.1, n)
    got = compose_discrete(JC, grid, ZI, ZF)
    assert max_coefficient_deviation(got, exact(JC, grid, ZI, ZF)) <= 1e-12


def test_single_slice_composition_is_the_slice_kernel():
    grid = TimeGrid(0.5, 1)
    assert max_coefficient_deviation(compose_discrete(SPIN, grid), exact(SPIN, grid)) == 0


def test_free_spin_composition_is_power_of_phase():
    model = SpinFieldModel(1.0, ConstantField(0))
    grid = TimeGrid(1.0, 4)
    a = 1 - 1j * grid.eps
    bar = make_generator(GeneratorKind.ETA_BAR_OUT, 4)
    eta = make_generator(GeneratorKind.ETA_IN, 0)
    want = exp_element(a**4 * (bar * eta))
    assert max_coefficient_deviation(compose_discrete(model, grid), want) < 1e-15


def test_commuting_field_breaks_single_exponential():
    grid = TimeGrid(1.3, 2)
    comp = compose_discrete(SPIN, grid, commuting_field=True)
    rec = assemble_propagator(recurse_exponent(SPIN, grid, commuting_field=True))
    b2 = max(abs(SPIN.field(grid.time(j))) ** 2 for j in (1, 2))
    assert max_coefficient_deviation(comp, rec) > 1e-6 * grid.eps**2 * b2


def test_commuting_field_composition_is_matrix_product():
    # numeric odd fields still compose exactly; only the single exponent fails
    grid = TimeGrid(1.3, 3)
    u = kernel_sectors(compose_discrete(SPIN, grid, commuting_field=True), 3)
    prod = np.eye(2)
    for j in range(1, 4):
        b = SPIN.field(grid.time(j))
        prod = (np.eye(2) - 1j * grid.eps * np.array([[0, b.conjugate()], [b, SPIN.omega]])) @ prod
    assert np.abs(u - prod).max() < 1e-14


def test_commuting_field_rejected_for_jc():
    with pytest.raises(ValueError):
        compose_discrete(JC, TimeGrid(1.0, 2), commuting_field=True)


@pytest.mark.parametrize("n", range(1, 9))
def test_stationary_path_is_exact(n):
    grid = TimeGrid(1.2, n)
    assert max_coefficient_deviation(stationary_path(SPIN, grid), exact(SPIN, grid)) <= 1e-12
    got = stationary_path(JC, grid, ZI, ZF)
    assert max_coefficient_deviation(got, exact(JC, grid, ZI, ZF)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 4),
    st.floats(0, 2),
    st.complex_numbers(max_magnitude=1, allow_nan=False, allow_infinity=False),
    st.floats(0.1, 2),
)
def test_three_routes_agree_spin(n, omega, b, t):
    model = SpinFieldModel(omega, ConstantField(b))
    grid = TimeGrid(t, n)
    ref = exact(model, grid)
    assert max_coefficient_deviation(compose_discrete(model, grid), ref) <= 1e-12
    assert max_coefficient_deviation(stationary_path(model, grid), ref) <= 1e-12


def test_zero_steps_state_is_overlap():
    grid = TimeGrid(1.0, 1)
    k = exact(SPIN, TimeGrid(0.0, 1))
    bar = make_generator(GeneratorKind.ETA_BAR_OUT, 1)
    eta = make_generator(GeneratorKind.ETA_IN, 0)
    assert max_coefficient_deviation(k, ONE + bar * eta) == 0
    assert grid.n_steps == 1


def test_symbolic_limit_and_budget():
    with pytest.raises(ValueError):
        compose_discrete(SPIN, TimeGrid(1.0, 9))
    with pytest.raises(CompositionOverflow):
        compose_discrete(SPIN, TimeGrid(1.0, 5), budget=10)


def test_spin_kernel_sectors_match_first_order_product():
    for n in range(1, 6):
        grid = TimeGrid(1.3, n)
        u = kernel_sectors(exact(SPIN, grid), n)
        prod = np.eye(2)
        for j in range(1, n + 1):
            b = SPIN.field(grid.time(j))
            prod = (np.eye(2) - 1j * grid.eps * np.array([[0, b.conjugate()], [b, SPIN.omega]])) @ prod
        assert np.abs(u - prod).max() < 1e-14
