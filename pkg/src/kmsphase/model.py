"""Dynamical-system input model: transition matrix, energies, column space.

A system is a pair (A, N): a 0-1 transition matrix A over m generators with
no identically zero rows, and energies N(x) > 1 per generator.  All other
modules consume the validated :class:`SystemModel` produced here, together
with the column space of ``A`` (its set of distinct columns), which indexes
the atoms of every state the toolkit manipulates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionMismatchError,
    EnergyNotAboveOneError,
    ZeroRowError,
)

__all__ = [
    "SystemModel",
    "PropertyReport",
    "ColumnSpace",
    "build_model",
    "properties",
    "column_space",
    "a_xyz",
    "v_xy_points",
]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """A validated transition matrix with per-generator energies.

    Generators are the integer indices 0..m-1; external labels, when given,
    are carried along purely for reporting.
    """

    matrix: np.ndarray          # (m, m) int8, entries 0/1, no zero row
    energies: np.ndarray        # (m,) float, every entry > 1
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        self.matrix.setflags(write=False)
        self.energies.setflags(write=False)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    def successors(self, x: int) -> np.ndarray:
        """Indices y with a transition x -> y."""
        return np.flatnonzero(self.matrix[x])


@dataclass(frozen=True)
class PropertyReport:
    """Structural properties of a system, as booleans plus witnesses.

    ``finite_target_set`` is a greedy (not necessarily minimal) set of
    generators hit by every row.  ``ta_equals_oa`` records whether the
    Toeplitz algebra coincides with its Cuntz-Krieger quotient; this needs
    every column neighborhood to repeat infinitely often, which is
    impossible over a finite index set, so it is always False here.
    """

    irreducible: bool
    no_zero_column: bool
    finite_target_set: tuple[int, ...]
    energy_gap: float
    ta_equals_oa: bool = False


@dataclass(frozen=True)
class ColumnSpace:
    """The distinct columns of A, in lexicographic order.

    ``points[i]`` is a 0/1 bit-vector of length m; ``column_of[z]`` is the
    index into ``points`` of generator z's column.  ``d`` counts the points:
    the simplex of KMS states above criticality has dimension d - 1.
    """

    points: tuple[tuple[int, ...], ...]
    column_of: tuple[int, ...]
    d: int
    contains_zero: bool

    def members(self, point: int) -> tuple[int, ...]:
        """Generators whose column equals ``points[point]``."""
        return tuple(z for z, c in enumerate(self.column_of) if c == point)

    def bit_matrix(self) -> np.ndarray:
        """(d, m) array: row i is points[i]; entry [i, x] says whether x is in point i."""
        return np.array(self.points, dtype=float)


def build_model(
    matrix: Sequence[Sequence[int]] | np.ndarray,
    energies: Sequence[float] | np.ndarray,
    labels: Sequence[str] | None = None,
) -> SystemModel:
    """Validate and freeze a dynamical-system input.

    Raises :class:`DimensionMismatchError`, :class:`ZeroRowError` or
    :class:`EnergyNotAboveOneError` on bad input.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatchError(f"matrix must be square and nonempty, got shape {a.shape}")
    if not np.isin(a, (0, 1)).all():
        raise DimensionMismatchError("matrix entries must be 0 or 1")
    n = np.asarray(energies, dtype=float)
    if n.shape != (a.shape[0],):
        raise DimensionMismatchError(
            f"energies must have length {a.shape[0]}, got shape {n.shape}"
        )
    for i in range(a.shape[0]):
        if not a[i].any():
            raise ZeroRowError(i)
    for i, v in enumerate(n):
        if not v > 1.0:
            raise EnergyNotAboveOneError(i, float(v))
    if labels is not None:
        if len(labels) != a.shape[0]:
            raise DimensionMismatchError("labels must match the matrix dimension")
        labels = tuple(str(s) for s in labels)
    return SystemModel(matrix=a.astype(np.int8), energies=n, labels=labels)


def properties(model: SystemModel) -> PropertyReport:
    """Compute irreducibility, column nonvanishing, a finite target set and the energy gap."""
    a = model.matrix
    ncomp, _ = connected_components(a, directed=True, connection="strong")
    irreducible = ncomp == 1
    no_zero_column = bool(a.any(axis=0).all())

    # Greedy cover: pick the column hitting the most uncovered rows.  Exact
    # minimal covers are NP-hard and only the existence flag matters.
    uncovered = np.ones(model.m, dtype=bool)
    witness: list[int] = []
    while uncovered.any():
        gains = (a[uncovered, :] == 1).sum(axis=0)
        y = int(np.argmax(gains))
        witness.append(y)
        uncovered &= a[:, y] == 0

    return PropertyReport(
        irreducible=bool(irreducible),
        no_zero_column=no_zero_column,
        finite_target_set=tuple(sorted(witness)),
        energy_gap=float(model.energies.min()),
    )


def column_space(model: SystemModel) -> ColumnSpace:
    """Deduplicate the columns of A into canonically ordered points."""
    cols = [tuple(int(b) for b in model.matrix[:, z]) for z in range(model.m)]
    points = tuple(sorted(set(cols)))
    index = {c: i for i, c in enumerate(points)}
    column_of = tuple(index[c] for c in cols)
    zero = tuple([0] * model.m)
    return ColumnSpace(
        points=points,
        column_of=column_of,
        d=len(points),
        contains_zero=zero in index,
    )


def a_xyz(model: SystemModel, X: Iterable[int], Y: Iterable[int], z: int) -> int:
    """Product indicator: 1 iff A(x, z) = 1 for all x in X and A(y, z) = 0 for all y in Y.

    Equivalently, 1 iff the column of z has every bit of X set and every bit
    of Y clear.
    """
    a = model.matrix
    out = 1
    for x in X:
        out *= int(a[x, z])
    for y in Y:
        out *= 1 - int(a[y, z])
    return out


def v_xy_points(space: ColumnSpace, X: Iterable[int], Y: Iterable[int]) -> tuple[int, ...]:
    """Indices of column-space points containing every bit of X and no bit of Y."""
    xs, ys = tuple(X), tuple(Y)
    out = []
    for i, c in enumerate(space.points):
        if all(c[x] for x in xs) and not any(c[y] for y in ys):
            out.append(i)
    return tuple(out)
