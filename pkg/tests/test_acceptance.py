"""Exit criteria, one test per criterion.

Each test records a PASS/FAIL line in ``RESULTS``; ``conftest.py`` prints the
lines in the terminal summary. Run as a script to print them directly::

    python3 tests/test_acceptance.py
"""

import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings

from grasspath import brackets as br
from grasspath.algebra import berezin_integrate_pair, make_generator, max_coefficient_deviation, GeneratorKind
from grasspath.models import ConstantField, JaynesCummingsModel, SinusoidField, SpinFieldModel, TimeGrid
from grasspath.oracle import kernel_table_from_matrix, propagate_jc_exact, propagate_spin_exact
from grasspath.recursion import assemble_propagator, compose_discrete, recurse_exponent, stationary_path

pytestmark = pytest.mark.acceptance

RESULTS: dict[int, str] = {}

SPIN = SpinFieldModel(0.7, SinusoidField(0.8 + 0.3j, 1.1, 0.4))
JC = JaynesCummingsModel(1.3, 0.8, 0.7)
ZI, ZF = 0.6 + 0.2j, 0.4 - 0.3j

SPIN_GRID = [
    (SpinFieldModel(0.0, ConstantField(0.5)), 3.0),
    (SpinFieldModel(1.0, ConstantField(1.0)), 3.0),
    (SpinFieldModel(0.7, ConstantField(0.6 + 0.8j)), 3.0),
    (SpinFieldModel(0.7, SinusoidField(0.8 + 0.3j, 1.1, 0.4)), 3.0),
    (SpinFieldModel(1.5, SinusoidField(1.0, 2.0, 0.0)), 3.0),
]


def record(n: int, title: str, passed: bool, detail: str, elapsed: float, limit: float | None):
    within = limit is None or elapsed < limit
    ok = passed and within
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    RESULTS[n] = f"criterion {n} [{'PASS' if ok else 'FAIL'}] {title}: {detail}; {elapsed:.2f} s{budget}"
    return ok


def _exact(model, grid, zi=0, zf=0):
    return assemble_propagator(recurse_exponent(model, grid, zi), zf)


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(1, 6):
        worst = max(worst, max_coefficient_deviation(compose_discrete(SPIN, TimeGrid(1.3, n)), _exact(SPIN, TimeGrid(1.3, n))))
        grid = TimeGrid(1.1, n)
        worst = max(worst, max_coefficient_deviation(compose_discrete(JC, grid, ZI, ZF), _exact(JC, grid, ZI, ZF)))
    return record(1, "composition equals single exponential", worst <= 1e-12,
                  f"max dev {worst:.2e} <= 1e-12", time.perf_counter() - t0, 10)


def criterion_2():
    t0 = time.perf_counter()
    grid = TimeGrid(1.3, 2)
    comp = compose_discrete(SPIN, grid, commuting_field=True)
    rec = assemble_propagator(recurse_exponent(SPIN, grid, commuting_field=True))
    dev = max_coefficient_deviation(comp, rec)
    floor = 1e-6 * grid.eps**2 * max(abs(SPIN.field(grid.time(j))) ** 2 for j in (1, 2))
    return record(2, "commuting fields break the single exponential", dev > floor,
                  f"dev {dev:.3e} > {floor:.3e}", time.perf_counter() - t0, 1)


def criterion_3():
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for omega, b in itertools.product((0, 1, 2), (0, 0.3, 1)):
        model = SpinFieldModel(omega, ConstantField(b * np.exp(0.4j)))
        for n in range(1, 9):
            grid = TimeGrid(1.0, n)
            worst = max(worst, max_coefficient_deviation(stationary_path(model, grid), _exact(model, grid)))
            cases += 1
    for omega, omega0, lam in itertools.product((0, 1, 2), (0, 1, 2), (0, 0.3, 1)):
        model = JaynesCummingsModel(omega0, omega, lam)
        for n in range(1, 9):
            grid = TimeGrid(1.0, n)
            k = stationary_path(model, grid, ZI, ZF)
            worst = max(worst, max_coefficient_deviation(k, _exact(model, grid, ZI, ZF)))
            cases += 1
    return record(3, "stationary path is exact", worst <= 1e-12,
                  f"{cases} cases, max dev {worst:.2e} <= 1e-12", time.perf_counter() - t0, 30)


def criterion_4():
    t0 = time.perf_counter()
    r_phi, r_eta = br.bracket_residuals(SPIN, 5.0, 1e-3, 16)
    spin = max(np.abs(r_phi[:, :9]).max(), np.abs(r_eta[:, :9]).max())
    jc_model = JaynesCummingsModel(1.3, 0.8, 1.0)
    r_z, r_zeta = br.bracket_residuals(jc_model, 5.0, 1e-3, 12, 0.5)
    jc = max(np.abs(r_z).max(), np.abs(r_zeta).max())
    worst = max(spin, jc)
    return record(4, "Schroedinger residuals of the bracket chains", worst <= 1e-8,
                  f"spin {spin:.2e}, jc {jc:.2e} <= 1e-8", time.perf_counter() - t0, 10)


def _spin_sweep():
    ode_dev, unitary = 0.0, 0.0
    for model, t in SPIN_GRID:
        state = br.initial_state(model, 16)
        for tk in (1.0, 2.0, t):
            state = br.integrate_ode(state, model, tk, 1e-3)
            u = br.assemble_kernel_spin(state)
            ode_dev = max(ode_dev, u.max_deviation(propagate_spin_exact(model, tk)))
            unitary = max(unitary, u.unitarity_error())
    return ode_dev, unitary


def criterion_5():
    t0 = time.perf_counter()
    ode_dev, _ = _spin_sweep()
    ratios = []
    for model, t in (SPIN_GRID[1], SPIN_GRID[3]):
        ref = propagate_spin_exact(model, t)
        devs = [br.assemble_kernel_spin(br.run_discrete(model, TimeGrid(t, n), 16)).max_deviation(ref)
                for n in (200, 400, 800, 1600)]
        ratios += [a / b for a, b in zip(devs, devs[1:])]
    ok = ode_dev <= 1e-6 and all(1.8 <= r <= 2.2 for r in ratios)
    detail = f"ode max dev {ode_dev:.2e} <= 1e-6, halving ratios {min(ratios):.3f}..{max(ratios):.3f} in [1.8, 2.2]"
    return record(5, "spin kernels match the 2x2 oracle", ok, detail, time.perf_counter() - t0, 30)


def criterion_6():
    t0 = time.perf_counter()
    worst = 0.0
    for (w0, w), lam, zi in itertools.product(((1.0, 1.0), (1.3, 0.8)), (0.3, 1.0), (0, 0.5, 1.0, 0.6 + 0.8j)):
        model = JaynesCummingsModel(w0, w, lam)
        state = br.initial_state(model, 12, zi)
        for t in (1.0, 2.5, 5.0):
            state = br.integrate_ode(state, model, t, 1e-3)
            tab = br.assemble_kernel_jc(state)
            ref = kernel_table_from_matrix(propagate_jc_exact(model, t, 40), zi, 12)
            worst = max(worst, tab.max_deviation(ref))
    flip = 0.0
    for lam in (0.3, 1.0):
        model = JaynesCummingsModel(1.0, 1.0, lam)
        state = br.initial_state(model, 12)
        for t in np.linspace(0.5, 5.0, 10):
            state = br.integrate_ode(state, model, t, 1e-3)
            p = abs(br.assemble_kernel_jc(state).b[1]) ** 2
            flip = max(flip, abs(p - math.sin(lam * t) ** 2))
    ok = worst <= 1e-6 and flip <= 1e-6
    detail = f"table max dev {worst:.2e} <= 1e-6, flip probability dev {flip:.2e} <= 1e-6"
    return record(6, "Jaynes-Cummings tables match the Fock oracle", ok, detail, time.perf_counter() - t0, 60)


def criterion_7():
    from conftest import elements, spin_kernel_element

    t0 = time.perf_counter()
    failures = []

    def close(a, b):
        scale = max(1.0, max((abs(c) for c in a.terms.values()), default=0))
        return max_coefficient_deviation(a, b) <= 1e-12 * scale

    @settings(max_examples=1000, deadline=None, database=None)
    @given(elements(), elements(), elements())
    def laws(a, b, c):
        assert close((a * b) * c, a * (b * c))
        assert close(a * (b + c), a * b + a * c)
        for p, q in itertools.product((0, 1), repeat=2):
            x, y = a.graded_part(p), b.graded_part(q)
            assert close(x * y, (-1 if p and q else 1) * (y * x))

    try:
        laws()
    except AssertionError as exc:
        failures.append(f"algebra law: {exc}")
    out_bar = make_generator(GeneratorKind.ETA_BAR_OUT, 2)
    in_eta = make_generator(GeneratorKind.ETA_IN, 0)
    eta, bar = make_generator(GeneratorKind.ETA_STEP, 1), make_generator(GeneratorKind.ETA_BAR_STEP, 1)
    units = [np.eye(2)[[r]].T @ np.eye(2)[[c]] for r in range(2) for c in range(2)]
    sectors = 0
    for left, right in itertools.product(units, repeat=2):
        got = berezin_integrate_pair(spin_kernel_element(left, out_bar, eta) * spin_kernel_element(right, bar, in_eta), 1)
        if max_coefficient_deviation(got, spin_kernel_element(left @ right, out_bar, in_eta)) == 0:
            sectors += 1
    ok = not failures and sectors == 16
    detail = f"1000 random cases {'ok' if not failures else 'FAILED'}, reproducing identity exact in {sectors}/16 sectors"
    return record(7, "algebra laws and Berezin reproducing kernel", ok, detail, time.perf_counter() - t0, 10)


def criterion_8():
    t0 = time.perf_counter()
    _, unitary = _spin_sweep()
    return record(8, "assembled spin kernels are unitary", unitary <= 1e-8,
                  f"max |U^dag U - I| {unitary:.2e} <= 1e-8", time.perf_counter() - t0, None)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(criterion):
    ok = criterion()
    n = CRITERIA.index(criterion) + 1
    assert ok, RESULTS[n]


if __name__ == "__main__":
    import sys
    from pathlib import Path

    sys.path.insert(0, str(Path(__file__).parent))
    results = [c() for c in CRITERIA]
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(0 if all(results) else 1)
