from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmsphase import (
    RootMeasure,
    beta_c,
    column_space,
    finite_type_state,
    fixed_point_from_state,
    invariant_state_from_fixed_point,
    is_subinvariant,
    qstate_from_atoms,
)
from kmsphase.errors import (
    NegativeEntryError,
    NotFixedPointError,
    NotInvariantError,
    NotNormalizedError,
    TooLargeForExhaustiveError,
)
from kmsphase.states import FINITE

from conftest import full_model, golden_mean_model, random_irreducible

PHI = (1 + math.sqrt(5)) / 2


class TestIsSubinvariant:
    def test_critical_perron_state_is_invariant(self):
        m = full_model(2)
        state = invariant_state_from_fixed_point(m, 1.0, [1.0, 1.0])
        verdict = is_subinvariant(m, 1.0, state, exhaustive=True)
        assert verdict.subinvariant and verdict.invariant
        assert max(abs(g) for g in verdict.atom_gaps) <= 1e-12

    def test_finite_type_state_has_strict_gap(self):
        m = full_model(2)
        space = column_space(m)
        state = finite_type_state(m, 2.0, RootMeasure.delta(space, 0))
        verdict = is_subinvariant(m, 2.0, state, exhaustive=True)
        assert verdict.subinvariant and not verdict.invariant
        assert verdict.atom_gaps == pytest.approx((0.5,))

    def test_normalization_special_case(self, rng):
        # the empty-pair inequality: sum_z N(z)^-beta q_z <= 1
        m = random_irreducible(rng, 4, energy_range=(1.5, 3.0))
        beta = beta_c(m).beta_c + 0.5
        space = column_space(m)
        state = finite_type_state(m, beta, RootMeasure.uniform(space))
        assert float((m.energies ** -beta) @ state.q) <= 1.0 + 1e-12

    def test_ground_temperature_convention(self):
        m = golden_mean_model()
        space = column_space(m)
        state = qstate_from_atoms(space, math.inf, [0.5, 0.5], FINITE)
        verdict = is_subinvariant(m, math.inf, state)
        assert verdict.subinvariant and not verdict.invariant

    def test_exhaustive_cap(self):
        m = full_model(13)
        space = column_space(m)
        state = qstate_from_atoms(space, 2.0, [1.0], FINITE)
        with pytest.raises(TooLargeForExhaustiveError):
            is_subinvariant(m, 2.0, state, exhaustive=True)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_atom_and_exhaustive_checks_agree(self, m_size, seed):
        # is_subinvariant raises internally if the two disagree
        rng = np.random.default_rng(seed)
        model = random_irreducible(rng, m_size)
        space = column_space(model)
        atoms = rng.dirichlet(np.ones(space.d))
        beta = float(rng.uniform(0.2, 3.0))
        state = qstate_from_atoms(space, beta, atoms, FINITE)
        is_subinvariant(model, beta, state, exhaustive=True)

    def test_monotone_in_beta(self, rng):
        for _ in range(6):
            m = random_irreducible(rng, 4, energy_range=(1.5, 3.5))
            beta = beta_c(m).beta_c + float(rng.uniform(0.1, 0.8))
            space = column_space(m)
            w = rng.uniform(0.05, 1.0, space.d)
            state = finite_type_state(m, beta, RootMeasure(tuple(w)))
            assert is_subinvariant(m, beta, state).subinvariant
            for db in (0.3, 1.0, 4.0):
                assert is_subinvariant(m, beta + db, state).subinvariant


class TestFixedPointBijection:
    def test_golden_mean_atoms(self):
        m = golden_mean_model()
        bc = math.log(PHI)
        state = invariant_state_from_fixed_point(m, bc, [1 / PHI, 1.0])
        assert state.atom_masses == pytest.approx((PHI ** -2, PHI ** -1), rel=1e-9)
        assert state.q_values == pytest.approx((1 / PHI, 1.0), rel=1e-9)
        assert state.type_tag.kind == "infinite"

    def test_round_trip_vector_state_vector(self, rng):
        for _ in range(5):
            m = random_irreducible(rng, 5, non_permutation=True, energy_range=(1.5, 4.0))
            rep = beta_c(m)
            v = rep.perron_at_critical
            state = invariant_state_from_fixed_point(m, rep.beta_c, v)
            back = fixed_point_from_state(m, rep.beta_c, state)
            assert back == pytest.approx(v, rel=1e-10)

    def test_round_trip_state_vector_state(self):
        m = full_model(2)
        state = invariant_state_from_fixed_point(m, 1.0, [1.0, 1.0])
        v = fixed_point_from_state(m, 1.0, state)
        again = invariant_state_from_fixed_point(m, 1.0, v)
        assert again.atom_masses == pytest.approx(state.atom_masses, abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(NotNormalizedError):
            invariant_state_from_fixed_point(full_model(2), 1.0, [0.0, 0.0])

    def test_negative_entry_rejected(self):
        with pytest.raises(NegativeEntryError):
            invariant_state_from_fixed_point(full_model(2), 1.0, [3.0, -1.0])

    def test_non_fixed_point_rejected(self):
        m = golden_mean_model()
        v = np.array([1.0, 1.0])
        v = v / float((m.energies ** -1.0) @ v)
        with pytest.raises(NotFixedPointError):
            invariant_state_from_fixed_point(m, 1.0, v)

    def test_finite_type_state_is_not_invariant(self):
        m = full_model(2)
        space = column_space(m)
        state = finite_type_state(m, 2.0, RootMeasure.delta(space, 0))
        with pytest.raises(NotInvariantError):
            fixed_point_from_state(m, 2.0, state)
