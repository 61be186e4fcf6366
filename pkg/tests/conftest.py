"""Shared fixtures and model generators for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from kmsphase import build_model, properties
from kmsphase.critical import matrix_spectral_radius


def golden_mean_model(energy=np.e):
    return build_model([[0, 1], [1, 1]], [energy, energy])


def full_model(m, energy=2.0):
    return build_model(np.ones((m, m), dtype=int), [energy] * m)


def cycle_model(energies=(2.0, 2.0)):
    return build_model([[0, 1], [1, 0]], list(energies))


def random_matrix(rng, m, max_row_ones=None):
    """Random 0-1 matrix with no zero rows."""
    a = np.zeros((m, m), dtype=int)
    for x in range(m):
        k = rng.integers(1, (max_row_ones or m) + 1)
        cols = rng.choice(m, size=min(k, m), replace=False)
        a[x, cols] = 1
    return a


def random_irreducible(rng, m, non_permutation=False, max_row_ones=None,
                       energy_range=None, max_tries=500):
    """Random irreducible model, optionally forced non-permutation-like."""
    for _ in range(max_tries):
        a = random_matrix(rng, m, max_row_ones=max_row_ones)
        if energy_range is None:
            energies = np.full(m, np.e)
        else:
            lo, hi = energy_range
            energies = rng.uniform(lo, hi, size=m)
        try:
            model = build_model(a, energies)
        except Exception:
            continue
        if not properties(model).irreducible:
            continue
        if non_permutation and matrix_spectral_radius(a.astype(float)) <= 1.0 + 1e-9:
            continue
        return model
    raise RuntimeError("failed to sample an irreducible model")


def random_duplicate_columns_model(rng, m, k, energy_range=(1.5, 4.0), max_tries=2000):
    """Random irreducible model whose matrix has exactly k distinct columns."""
    from kmsphase import column_space

    for _ in range(max_tries):
        patterns = set()
        while len(patterns) < k:
            bits = tuple(int(b) for b in rng.integers(0, 2, size=m))
            if any(bits):
                patterns.add(bits)
        patterns = list(patterns)
        assign = list(range(k)) + [int(rng.integers(0, k)) for _ in range(m - k)]
        rng.shuffle(assign)
        a = np.zeros((m, m), dtype=int)
        for y, p in enumerate(assign):
            a[:, y] = patterns[p]
        if not a.any(axis=1).all():
            continue
        model_try = build_model(a, rng.uniform(*energy_range, size=m))
        if not properties(model_try).irreducible:
            continue
        if matrix_spectral_radius(a.astype(float)) <= 1.0 + 1e-9:
            continue
        if column_space(model_try).d != k:
            continue
        return model_try
    raise RuntimeError("failed to sample a duplicate-column model")


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)
