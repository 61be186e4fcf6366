"""Brute-force admissible-word enumeration and direct Dirichlet partial sums.

This module is the independent oracle for every closed form elsewhere in
the package: it never touches linear algebra.  A word mu = (mu_1, ..., mu_n)
is admissible when A(mu_i, mu_{i+1}) = 1 for all consecutive pairs; its
weight is N(mu)^-beta with N(mu) the product of the letter energies.  The
empty word is admissible with weight 1.

Sums are accumulated with Kahan compensation so that shells of mixed
magnitude combine at ~1e-16 relative accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum, log

import numpy as np

from .errors import LengthTooLargeError
from .model import SystemModel

__all__ = ["AdmissibleWord", "WORD_CAP_DEFAULT", "enumerate_words", "shell_sum", "partial_series"]

WORD_CAP_DEFAULT = 10_000_000


@dataclass(frozen=True)
class AdmissibleWord:
    letters: tuple[int, ...]
    weight_exponent: float  # log N(mu) = sum of log N(letter)

    @property
    def length(self) -> int:
        return len(self.letters)

    def weight(self, beta: float) -> float:
        return float(np.exp(-beta * self.weight_exponent))


class Kahan:
    """Compensated accumulator for float sums."""

    __slots__ = ("total", "_c")

    def __init__(self):
        self.total = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        y = x - self._c
        t = self.total + y
        self._c = (t - self.total) - y
        self.total = t


def enumerate_words(model: SystemModel, n: int, cap: int = WORD_CAP_DEFAULT) -> list[AdmissibleWord]:
    """All admissible words of length n, in lexicographic order.

    n = 0 yields just the empty word.  Raises LengthTooLargeError if the
    output would exceed ``cap`` words.
    """
    if n < 0:
        raise ValueError("word length must be nonnegative")
    if n == 0:
        return [AdmissibleWord(letters=(), weight_exponent=0.0)]

    succ = [tuple(int(y) for y in model.successors(x)) for x in range(model.m)]
    logn = [log(v) for v in model.energies]
    count = _shell_count(model, n)
    if count > cap:
        raise LengthTooLargeError(count, cap)

    out: list[AdmissibleWord] = []
    # Iterative depth-first extension; only admissible prefixes are kept.
    stack: list[tuple[tuple[int, ...], float]] = [
        ((x,), logn[x]) for x in range(model.m - 1, -1, -1)
    ]
    while stack:
        prefix, w = stack.pop()
        if len(prefix) == n:
            out.append(AdmissibleWord(letters=prefix, weight_exponent=w))
            continue
        last = prefix[-1]
        for y in reversed(succ[last]):
            stack.append((prefix + (y,), w + logn[y]))
    return out


def _shell_count(model: SystemModel, n: int) -> int:
    """Number of admissible words of length n (exact, integer path count)."""
    if n == 0:
        return 1
    a = model.matrix.astype(object)  # exact integer arithmetic
    v = np.ones(model.m, dtype=object)
    for _ in range(n - 1):
        v = a @ v
    return int(v.sum())


def _shell_weights(model, beta, n, source):
    """Per-word weights of shell n, grouped by last letter.

    Returns a dict last_letter -> 1-d array with one entry per word; this is
    genuine enumeration (each admissible word contributes its own entry),
    vectorized over extensions.
    """
    nw = model.energies ** (-beta)
    if source is None:
        frontier = {x: np.array([nw[x]]) for x in range(model.m)}
    else:
        frontier = {source: np.array([nw[source]])}
    for _ in range(n - 1):
        new: dict[int, list[np.ndarray]] = {}
        for x, arr in frontier.items():
            for y in model.successors(x):
                y = int(y)
                new.setdefault(y, []).append(arr * nw[y])
        frontier = {y: np.concatenate(parts) for y, parts in new.items()}
    return frontier


def shell_sum(
    model: SystemModel,
    beta: float,
    n: int,
    source: int | None = None,
    target: int | None = None,
    cap: int = WORD_CAP_DEFAULT,
) -> float:
    """Sum of N(mu)^-beta over admissible words of length n.

    ``source``/``target`` restrict to words with that first/last letter.
    For n = 0 the value is 1 when both constraints are absent (the empty
    word) and 0 otherwise.
    """
    if n < 0:
        raise ValueError("shell index must be nonnegative")
    if n == 0:
        return 1.0 if source is None and target is None else 0.0
    count = _shell_count(model, n)
    if count > cap:
        raise LengthTooLargeError(count, cap)
    frontier = _shell_weights(model, beta, n, source)
    acc = Kahan()
    for y in sorted(frontier):
        if target is not None and y != target:
            continue
        acc.add(fsum(frontier[y].tolist()))
    return acc.total


def partial_series(
    model: SystemModel,
    beta: float,
    L: int,
    source: int | None = None,
    target: int | None = None,
    cap: int = WORD_CAP_DEFAULT,
) -> float:
    """Truncated Dirichlet series: shells n = 0..L summed directly.

    The length-0 term (the empty word, weight 1) belongs only to the
    unconstrained series; the fixed-source/fixed-target series start at n=1.
    """
    if L < 0:
        raise ValueError("truncation length must be nonnegative")
    acc = Kahan()
    if source is None and target is None:
        acc.add(1.0)
    total_words = 0
    for n in range(1, L + 1):
        total_words += _shell_count(model, n)
        if total_words > cap:
            raise LengthTooLargeError(total_words, cap)
        acc.add(shell_sum(model, beta, n, source=source, target=target, cap=cap))
    return acc.total
