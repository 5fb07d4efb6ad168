"""Empirical types and strong typicality over finite alphabets.

A joint sequence is a bundle of equal-length index arrays, one per
variable.  Typicality is total-variation typicality: the L1 distance
between the empirical type and the reference pmf must not exceed the
radius, optionally with a strict zero-support rule (no symbol of
probability zero may occur at all).

The central exact fact used by the simulation tests: for a sequence of
empirical type t, the log-probability under any law q is
``-N * (D(t||q) + H(t))`` bits, with no asymptotics involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .probcore import DomainError, JointPmf, VariableId

__all__ = ["Sequence", "TypicalityParams", "empirical_type", "is_typical", "log_prob_under"]


@dataclass(frozen=True)
class Sequence:
    """Equal-length symbol arrays for one or more variables."""

    variables: tuple[VariableId, ...]
    symbols: tuple[np.ndarray, ...]
    cardinalities: tuple[int, ...]

    def __post_init__(self):
        if len(self.variables) != len(self.symbols) or len(self.variables) != len(self.cardinalities):
            raise DomainError("one symbol array and cardinality per variable")
        if not self.symbols:
            raise DomainError("sequence needs at least one variable")
        arrays = []
        n = None
        for arr, card in zip(self.symbols, self.cardinalities):
            a = np.asarray(arr, dtype=np.int64)
            if a.ndim != 1:
                raise DomainError("symbol arrays must be one-dimensional")
            if n is None:
                n = len(a)
            elif len(a) != n:
                raise DomainError("symbol arrays must share one length")
            if len(a) == 0:
                raise DomainError("empty sequences are disallowed")
            if a.min() < 0 or a.max() >= card:
                raise DomainError("symbol index out of alphabet range")
            a = np.ascontiguousarray(a)
            a.setflags(write=False)
            arrays.append(a)
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "symbols", tuple(arrays))
        object.__setattr__(self, "cardinalities", tuple(int(c) for c in self.cardinalities))

    @property
    def length(self) -> int:
        return len(self.symbols[0])


@dataclass(frozen=True)
class TypicalityParams:
    """Radius and support rule for typical-set membership."""

    epsilon: float
    zero_support_strict: bool = True

    def __post_init__(self):
        if not 0 < self.epsilon <= 2:
            raise DomainError("epsilon must lie in (0, 2]")


def _counts(seq: Sequence) -> np.ndarray:
    flat = np.zeros(seq.length, dtype=np.int64)
    for arr, card in zip(seq.symbols, seq.cardinalities):
        flat = flat * card + arr
    total = int(np.prod(seq.cardinalities))
    return np.bincount(flat, minlength=total).reshape(seq.cardinalities)


def empirical_type(seq: Sequence) -> JointPmf:
    """Symbol frequencies as a joint pmf over the sequence's variables."""
    return JointPmf(seq.variables, _counts(seq) / seq.length)


def is_typical(seq: Sequence, p: JointPmf, params: TypicalityParams) -> bool:
    if tuple(p.cardinalities) != seq.cardinalities:
        raise DomainError("sequence and pmf alphabets must match")
    if len(p.variables) != len(seq.variables):
        raise DomainError("sequence and pmf variable counts must match")
    counts = _counts(seq)
    type_mass = counts / seq.length
    if params.zero_support_strict and np.any(counts[p.mass <= 0] > 0):
        return False
    # inclusive radius with rounding slack, so exact-boundary types get
    # the same verdict as the count-space enumerations
    return float(np.abs(type_mass - p.mass).sum()) <= params.epsilon + 1e-12


def log_prob_under(seq: Sequence, q: JointPmf) -> float:
    """log2 probability of the whole sequence under iid draws from q.

    Minus infinity when the sequence visits a symbol q gives zero mass.
    Computed from counts, so it equals ``-N*(D(t||q)+H(t))`` for the
    empirical type t exactly (up to float rounding).
    """
    if tuple(q.cardinalities) != seq.cardinalities:
        raise DomainError("sequence and pmf alphabets must match")
    counts = _counts(seq)
    occupied = counts > 0
    if np.any(q.mass[occupied] <= 0):
        return float("-inf")
    return float((counts[occupied] * np.log2(q.mass[occupied])).sum())
