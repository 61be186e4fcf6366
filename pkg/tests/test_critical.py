from __future__ import annotations

import math

import numpy as np
import pytest

from kmsphase import (
    abscissa_estimate,
    beta_c,
    build_model,
    evaluate,
    perron_vector,
    spectral_radius,
    transfer_matrix,
)
from kmsphase.errors import NotIrreducibleError

from conftest import cycle_model, full_model, golden_mean_model, random_irreducible

PHI = (1 + math.sqrt(5)) / 2


class TestSpectralRadius:
    def test_rank_one_closed_form(self):
        m = full_model(2)
        for beta in (0.0, 1.0, 2.0, 3.5):
            assert spectral_radius(m, beta) == pytest.approx(2.0 ** (1 - beta), rel=1e-10)

    def test_two_cycle_uses_fallback(self):
        # the permutation matrix makes plain power iteration oscillate
        m = cycle_model()
        assert spectral_radius(m, 1.0) == pytest.approx(0.5, rel=1e-10)

    def test_at_beta_zero_at_least_one(self, rng):
        for _ in range(10):
            m = random_irreducible(rng, 5)
            assert spectral_radius(m, 0.0) >= 1.0 - 1e-12

    def test_zero_at_ground(self):
        assert spectral_radius(golden_mean_model(), math.inf) == 0.0

    def test_strictly_decreasing_in_beta(self, rng):
        for _ in range(5):
            m = random_irreducible(rng, 4, energy_range=(1.5, 4.0))
            grid = np.linspace(0.0, 4.0, 9)
            values = [spectral_radius(m, b) for b in grid]
            assert all(a > b for a, b in zip(values, values[1:]))


class TestBetaC:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_full_matrix_log_n(self, n):
        m = full_model(n, energy=math.e)
        assert beta_c(m).beta_c == pytest.approx(math.log(n), abs=1e-9)

    def test_golden_mean(self):
        rep = beta_c(golden_mean_model())
        assert rep.beta_c == pytest.approx(math.log(PHI), abs=1e-9)
        assert rep.coincide and rep.interval_open_at_left and not rep.permutation_like

    def test_permutation_clamped_to_zero(self):
        rep = beta_c(cycle_model())
        assert rep.beta_c == 0.0 and rep.permutation_like

    def test_radius_one_at_critical(self, rng):
        for _ in range(5):
            m = random_irreducible(rng, 5, non_permutation=True, energy_range=(1.5, 4.0))
            rep = beta_c(m)
            assert spectral_radius(m, rep.beta_c) == pytest.approx(1.0, abs=1e-8)

    def test_convergence_exactly_above_critical(self, rng):
        for _ in range(5):
            m = random_irreducible(rng, 4, non_permutation=True, energy_range=(1.5, 4.0))
            bc = beta_c(m).beta_c
            for db in (0.05, 0.4, 1.0):
                assert evaluate(m, bc + db).convergent
                if bc - db > 0:
                    assert not evaluate(m, bc - db).convergent


class TestAbscissaEstimate:
    def test_full_matrix_ratio_is_exact(self):
        est = abscissa_estimate(full_model(2), 10)
        assert est.estimate == pytest.approx(1.0, abs=1e-9)

    def test_permutation_estimates_zero(self):
        est = abscissa_estimate(cycle_model(), 10)
        assert est.estimate == 0.0

    def test_golden_mean_converges(self):
        est = abscissa_estimate(golden_mean_model(), 20)
        assert est.estimate == pytest.approx(math.log(PHI), abs=1e-2)

    def test_agrees_with_beta_c_on_random_models(self, rng):
        for _ in range(4):
            m = random_irreducible(rng, 4, max_row_ones=2, energy_range=(1.6, 3.5))
            est = abscissa_estimate(m, 20)
            assert abs(est.estimate - beta_c(m).beta_c) <= 5e-2


class TestPerronVector:
    def test_full_matrix_symmetric(self):
        v = perron_vector(full_model(2), 1.0)
        assert v == pytest.approx([1.0, 1.0], rel=1e-12)
        assert (2.0 ** -1.0) * v.sum() == pytest.approx(1.0, abs=1e-15)

    def test_golden_mean_hand_value(self):
        m = golden_mean_model()
        v = perron_vector(m, math.log(PHI))
        assert v == pytest.approx([1 / PHI, 1.0], rel=1e-9)

    def test_eigen_equation_residual(self, rng):
        for _ in range(6):
            m = random_irreducible(rng, 5, energy_range=(1.5, 4.0))
            beta = float(rng.uniform(0.2, 2.0))
            v = perron_vector(m, beta)
            entries = transfer_matrix(m, beta).entries
            r = spectral_radius(m, beta)
            assert np.abs(entries @ v - r * v).max() <= 1e-10 * max(1.0, np.abs(v).max())
            assert (m.energies ** -beta) @ v == pytest.approx(1.0, abs=1e-12)
            assert v.min() > 0

    def test_requires_irreducible(self):
        m = build_model([[1, 1], [0, 1]], [2.0, 2.0])
        with pytest.raises(NotIrreducibleError):
            perron_vector(m, 1.0)
