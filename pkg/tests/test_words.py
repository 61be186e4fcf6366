from __future__ import annotations

import numpy as np
import pytest

from kmsphase import build_model, enumerate_words, partial_series, shell_sum
from kmsphase.errors import LengthTooLargeError

from conftest import cycle_model, full_model, golden_mean_model, random_matrix


class TestEnumerate:
    def test_full_matrix_admits_everything(self):
        out = enumerate_words(full_model(2), 3)
        assert len(out) == 8
        assert out[0].letters == (0, 0, 0)
        assert out == sorted(out, key=lambda w: w.letters)

    def test_two_cycle_forces_alternation(self):
        out = enumerate_words(cycle_model(), 3)
        assert [w.letters for w in out] == [(0, 1, 0), (1, 0, 1)]

    def test_forbidden_pair_excluded(self):
        out = enumerate_words(golden_mean_model(), 2)
        assert [w.letters for w in out] == [(0, 1), (1, 0), (1, 1)]

    def test_empty_word(self):
        out = enumerate_words(full_model(2), 0)
        assert len(out) == 1 and out[0].letters == () and out[0].weight_exponent == 0.0

    def test_weight_exponent_is_log_energy_sum(self):
        m = build_model([[1, 1], [1, 1]], [2.0, 3.0])
        for w in enumerate_words(m, 3):
            assert w.weight_exponent == pytest.approx(
                sum(np.log([2.0, 3.0][i]) for i in w.letters)
            )

    def test_cap_enforced(self):
        with pytest.raises(LengthTooLargeError):
            enumerate_words(full_model(4), 10, cap=1000)

    def test_count_matches_path_count(self, rng):
        for _ in range(10):
            mm = int(rng.integers(2, 5))
            a = random_matrix(rng, mm)
            model = build_model(a, [2.0] * mm)
            for n in range(1, 5):
                count = len(enumerate_words(model, n))
                ones = np.ones(mm, dtype=object)
                expected = int(ones @ np.linalg.matrix_power(a.astype(object), n - 1) @ ones)
                assert count == expected


class TestShellSum:
    def test_full_uniform_shell(self):
        assert shell_sum(full_model(2), 2.0, 2) == pytest.approx(4 * 2.0 ** -4, rel=1e-14)

    def test_empty_shell_is_one(self):
        assert shell_sum(golden_mean_model(), 5.0, 0) == 1.0
        assert shell_sum(golden_mean_model(), 5.0, 0, source=0) == 0.0

    def test_source_and_target_restriction(self):
        assert shell_sum(full_model(2), 2.0, 2, source=0, target=0) == pytest.approx(
            2.0 ** -4, rel=1e-14
        )

    def test_full_uniform_closed_form(self, rng):
        for m, beta, n in [(2, 1.5, 5), (3, 2.0, 4), (4, 3.0, 3)]:
            model = full_model(m, energy=2.0)
            assert shell_sum(model, beta, n) == pytest.approx(
                m ** n * 2.0 ** (-n * beta), rel=1e-12
            )

    def test_source_target_decomposition(self, rng):
        for _ in range(8):
            mm = int(rng.integers(2, 5))
            model = build_model(random_matrix(rng, mm), rng.uniform(1.5, 4.0, mm))
            for n in (1, 2, 4):
                total = shell_sum(model, 1.7, n)
                split = sum(
                    shell_sum(model, 1.7, n, source=s, target=t)
                    for s in range(mm)
                    for t in range(mm)
                )
                assert split == pytest.approx(total, rel=1e-12)

    def test_matches_direct_enumeration(self, rng):
        model = build_model(random_matrix(rng, 4), rng.uniform(1.5, 4.0, 4))
        beta = 2.3
        for n in range(5):
            direct = sum(w.weight(beta) for w in enumerate_words(model, n))
            assert shell_sum(model, beta, n) == pytest.approx(direct, rel=1e-12, abs=1e-300)


class TestPartialSeries:
    def test_geometric_shells(self):
        assert partial_series(full_model(2), 2.0, 3) == pytest.approx(1.875, rel=1e-14)

    def test_l_zero(self):
        assert partial_series(golden_mean_model(), 3.0, 0) == 1.0

    def test_two_cycle_worked_value(self):
        assert partial_series(cycle_model(), 1.0, 4) == pytest.approx(2.875, rel=1e-14)

    def test_constrained_series_starts_at_length_one(self):
        m = full_model(2)
        val = partial_series(m, 2.0, 2, target=0)
        expected = shell_sum(m, 2.0, 1, target=0) + shell_sum(m, 2.0, 2, target=0)
        assert val == pytest.approx(expected, rel=1e-14)

    def test_cap_enforced(self):
        with pytest.raises(LengthTooLargeError):
            partial_series(full_model(5), 2.0, 12, cap=10_000)
