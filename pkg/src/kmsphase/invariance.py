"""Subinvariance and invariance certificates for states on the column space.

A state rho with generator values q is beta-subinvariant when, for every
pair of finite generator sets (X, Y),

    sum_z A(X, Y, z) N(z)^-beta q_z  <=  rho(q(X, Y)),

with equality characterizing invariance.  Over a finite generator set each
singleton column point is itself a set of the form V(X, Y), so the pair
inequalities aggregate from per-atom defects; the exhaustive mode checks
every pair directly and must agree with the atom check.

Invariant states biject with nonnegative, normalized fixed points of the
transfer matrix via rho -> (q_x)_x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    NegativeEntryError,
    NotFixedPointError,
    NotInvariantError,
    NotNormalizedError,
    TooLargeForExhaustiveError,
)
from .model import SystemModel, column_space
from .partition import transfer_matrix
from .states import INFINITE, QState, qstate_from_atoms

__all__ = [
    "InvarianceVerdict",
    "is_subinvariant",
    "invariant_state_from_fixed_point",
    "fixed_point_from_state",
    "GAP_TOL_DEFAULT",
    "EXHAUSTIVE_MAX_M",
]

GAP_TOL_DEFAULT = 1e-10
EXHAUSTIVE_MAX_M = 12


@dataclass(frozen=True)
class InvarianceVerdict:
    """Outcome of a subinvariance check.

    ``atom_gaps[c]`` is rho({c}) minus the inflow at column point c; all
    gaps >= -tol certifies subinvariance, all |gaps| <= tol certifies
    invariance.  ``worst_violation`` names the most violated pair when one
    exists.
    """

    subinvariant: bool
    invariant: bool
    atom_gaps: tuple[float, ...]
    worst_violation: tuple[tuple[int, ...], tuple[int, ...], float] | None


def is_subinvariant(
    model: SystemModel,
    beta: float,
    state: QState,
    exhaustive: bool = False,
    tol: float = GAP_TOL_DEFAULT,
) -> InvarianceVerdict:
    """Certify beta-(sub)invariance of a state.

    At beta = +inf everything is subinvariant by convention, and nothing is
    invariant (the equality would force the unit to vanish).  Exhaustive
    mode enumerates all 4^m pairs (X, Y) and cross-checks the atom-level
    aggregation; it is capped at m <= 12.
    """
    space = column_space(model)
    if math.isinf(beta) and beta > 0:
        gaps = tuple(float(v) for v in state.atoms)
        return InvarianceVerdict(
            subinvariant=True, invariant=False, atom_gaps=gaps, worst_violation=None
        )

    nw = model.energies ** (-beta)
    inflow = np.zeros(space.d)
    for z, c in enumerate(space.column_of):
        inflow[c] += nw[z] * state.q[z]
    gaps = state.atoms - inflow
    sub = bool((gaps >= -tol).all())
    inv = bool((np.abs(gaps) <= tol).all())

    worst = None
    if not inv:
        c = int(np.argmin(gaps)) if not sub else int(np.argmax(np.abs(gaps)))
        point = space.points[c]
        x_set = tuple(i for i, b in enumerate(point) if b)
        y_set = tuple(i for i, b in enumerate(point) if not b)
        worst = (x_set, y_set, float(gaps[c]))

    if exhaustive:
        if model.m > EXHAUSTIVE_MAX_M:
            raise TooLargeForExhaustiveError(f"exhaustive check capped at m <= {EXHAUSTIVE_MAX_M}")
        col_masks = [sum(1 << i for i, b in enumerate(p) if b) for p in space.points]
        inflow_by_col = inflow
        atoms = state.atoms
        sub_ex, inv_ex = True, True
        for x_mask, y_mask in product(range(1 << model.m), repeat=2):
            lhs = rhs = 0.0
            for c, mask in enumerate(col_masks):
                if (mask & x_mask) == x_mask and (mask & y_mask) == 0:
                    lhs += inflow_by_col[c]
                    rhs += atoms[c]
            gap = rhs - lhs
            if gap < -tol:
                sub_ex = False
                if worst is None or gap < worst[2]:
                    xs = tuple(i for i in range(model.m) if x_mask >> i & 1)
                    ys = tuple(i for i in range(model.m) if y_mask >> i & 1)
                    worst = (xs, ys, float(gap))
            if abs(gap) > tol:
                inv_ex = False
        if sub_ex != sub or inv_ex != inv:
            raise AssertionError("atom-level and exhaustive pair checks disagree")

    return InvarianceVerdict(
        subinvariant=sub,
        invariant=inv,
        atom_gaps=tuple(float(v) for v in gaps),
        worst_violation=worst,
    )


def invariant_state_from_fixed_point(
    model: SystemModel,
    beta: float,
    v,
    rtol: float = 1e-9,
) -> QState:
    """The invariant state whose generator values are the fixed point v.

    Requires v >= 0, (A N^-beta) v = v within rtol, and the normalization
    sum_x N(x)^-beta v_x = 1.  The atoms place N(z)^-beta v_z at the column
    of each generator z.
    """
    if not (0 < beta < math.inf):
        raise ValueError("invariant states need finite positive beta")
    v = np.asarray(v, dtype=float)
    if v.shape != (model.m,):
        raise ValueError(f"fixed point must have length {model.m}")
    if (v < 0).any():
        raise NegativeEntryError("fixed point must be nonnegative")
    nw = model.energies ** (-beta)
    norm = float(nw @ v)
    if abs(norm - 1.0) > 1e-9:
        raise NotNormalizedError(f"sum N(x)^-beta v_x = {norm}, expected 1")
    entries = transfer_matrix(model, beta).entries
    residual = float(np.abs(entries @ v - v).max())
    if residual > rtol * max(1.0, float(np.abs(v).max())):
        raise NotFixedPointError(f"transfer-matrix residual {residual}")

    space = column_space(model)
    atoms = np.zeros(space.d)
    for z, c in enumerate(space.column_of):
        atoms[c] += nw[z] * v[z]
    state = qstate_from_atoms(space, beta, atoms, INFINITE)
    # By construction q_values[x] = sum_z A(x,z) N(z)^-beta v_z = v_x.
    if np.abs(state.q - v).max() > 1e-8:
        raise NotFixedPointError("derived generator values drifted from the fixed point")
    return state


def fixed_point_from_state(model: SystemModel, beta: float, state: QState) -> np.ndarray:
    """Extract the fixed point (the generator values) of an invariant state."""
    verdict = is_subinvariant(model, beta, state)
    if not verdict.invariant:
        raise NotInvariantError(
            f"state is not invariant at beta={beta}; worst gap {verdict.worst_violation}"
        )
    v = state.q.copy()
    entries = transfer_matrix(model, beta).entries
    residual = float(np.abs(entries @ v - v).max())
    if residual > 1e-8:
        raise NotFixedPointError(f"transfer-matrix residual {residual}")
    return v
