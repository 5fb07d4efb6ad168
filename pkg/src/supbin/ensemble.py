"""Exact ensemble probabilities for typical-set events.

Codebooks of size 2^{N R} are far beyond enumeration at interesting
blocklengths, but the success and error events of the random-coding
experiments depend on the draws only through typical-set hit
probabilities, and those are exact finite sums over empirical types.
This module computes the per-candidate hit probabilities by type
enumeration and turns them into at-least-one-hit probabilities for
astronomically large candidate counts, so experiments can sample the
ensemble events exactly in distribution.

All probabilities are handled as log2 values; enumeration prunes count
vectors as soon as their partial L1 deviation exceeds the typicality
radius.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .probcore import DomainError, JointPmf
from .typicality import TypicalityParams

__all__ = [
    "log2_typical_prob",
    "log2_conditional_hit_prob",
    "log2_joint_binning_success",
    "prob_any_hit",
]

_LN2 = math.log(2.0)


def _log2_multinomial(counts: np.ndarray) -> float:
    n = int(counts.sum())
    return float(gammaln(n + 1) - gammaln(counts + 1).sum()) / _LN2


def _log2_sum(vals: list[float]) -> float:
    if not vals:
        return float("-inf")
    m = max(vals)
    if m == float("-inf"):
        return m
    return m + math.log2(sum(2.0 ** (v - m) for v in vals))


def log2_typical_prob(p: JointPmf, q: JointPmf, n: int, params: TypicalityParams) -> float:
    """log2 P(an iid q-sequence of length n has type within the radius of p).

    Exact sum over the count vectors inside the L1 ball (and obeying
    the strict-support rule when set).  Intended for small alphabets;
    the enumeration is pruned by the remaining deviation budget.
    """
    if p.mass.shape != q.mass.shape:
        raise DomainError("p and q must share an alphabet")
    if n <= 0:
        raise DomainError("blocklength must be positive")
    targets = p.mass.reshape(-1) * n
    qflat = q.mass.reshape(-1)
    pflat = p.mass.reshape(-1)
    budget = params.epsilon * n
    k = len(qflat)
    terms: list[float] = []
    counts = np.zeros(k, dtype=np.int64)

    def rec(i: int, remaining: int, dev: float):
        if dev > budget + 1e-12:
            return
        if i == k - 1:
            c = remaining
            if params.zero_support_strict and pflat[i] == 0 and c > 0:
                return
            d = dev + abs(c - targets[i])
            if d > budget + 1e-12:
                return
            counts[i] = c
            if qflat[i] <= 0 and c > 0:
                return
            lw = _log2_multinomial(counts)
            occ = counts > 0
            lw += float((counts[occ] * np.log2(qflat[occ])).sum())
            terms.append(lw)
            return
        # remaining deviation from later cells is at least |sum later targets - remaining|
        later_target = targets[i + 1:].sum()
        lo = 0
        hi = remaining
        if params.zero_support_strict and pflat[i] == 0:
            hi = 0
        for c in range(lo, hi + 1):
            d = dev + abs(c - targets[i])
            if d > budget + 1e-12:
                if c > targets[i]:
                    break
                continue
            rem = remaining - c
            if d + abs(later_target - rem) > budget + 1e-12:
                continue
            if qflat[i] <= 0 and c > 0:
                break
            counts[i] = c
            rec(i + 1, rem, d)
        counts[i] = 0

    rec(0, n, 0.0)
    return _log2_sum(terms)


def log2_conditional_hit_prob(
    p_joint: JointPmf,
    q_u: JointPmf,
    y_counts: np.ndarray,
    params: TypicalityParams,
) -> float:
    """log2 P(iid q_u candidate is jointly typical with a fixed y-sequence).

    ``p_joint`` is the typicality target over (U, Y) with the U variables
    first; ``q_u`` the candidate's law over the U variables alone;
    ``y_counts`` the fixed sequence's symbol counts over the Y alphabet.
    The sum runs over joint count matrices whose Y-margins equal
    ``y_counts``, each weighted by the probability that the candidate
    realizes that matrix (a product of per-Y-symbol multinomials).
    """
    nu = int(np.prod(q_u.cardinalities))
    joint = p_joint.mass.reshape(nu, -1)
    ycts = np.asarray(y_counts, dtype=np.int64).reshape(-1)
    if joint.shape[1] != len(ycts):
        raise DomainError("y_counts length must match the Y alphabet of p_joint")
    n = int(ycts.sum())
    if n <= 0:
        raise DomainError("y_counts must describe a nonempty sequence")
    qflat = q_u.mass.reshape(-1)
    targets = joint * n  # target counts per (u, y) cell
    budget = params.epsilon * n
    ny = len(ycts)
    terms: list[float] = []
    col = np.zeros(nu, dtype=np.int64)

    def col_options(y: int):
        """All splits of column y with their deviation and log2 weight."""
        total = int(ycts[y])
        opts: list[tuple[float, float]] = []
        cur = np.zeros(nu, dtype=np.int64)

        def rec(i: int, remaining: int, dev: float):
            if dev > budget + 1e-12:
                return
            if i == nu - 1:
                c = remaining
                if params.zero_support_strict and joint[i, y] == 0 and c > 0:
                    return
                if qflat[i] <= 0 and c > 0:
                    return
                d = dev + abs(c - targets[i, y])
                if d > budget + 1e-12:
                    return
                cur[i] = c
                lw = _log2_multinomial(cur)
                occ = cur > 0
                lw += float((cur[occ] * np.log2(qflat[occ])).sum())
                opts.append((d, lw))
                cur[i] = 0
                return
            hi = remaining
            if params.zero_support_strict and joint[i, y] == 0:
                hi = 0
            if qflat[i] <= 0:
                hi = 0
            for c in range(0, hi + 1):
                d = dev + abs(c - targets[i, y])
                if d > budget + 1e-12 and c > targets[i, y]:
                    break
                if d > budget + 1e-12:
                    continue
                cur[i] = c
                rec(i + 1, remaining - c, d)
            cur[i] = 0

        rec(0, total, 0.0)
        return opts

    per_col = [col_options(y) for y in range(ny)]

    def combine(y: int, dev: float, lw: float):
        if y == ny:
            terms.append(lw)
            return
        for d, w in per_col[y]:
            if dev + d <= budget + 1e-12:
                combine(y + 1, dev + d, lw + w)

    combine(0, 0.0, 0.0)
    return _log2_sum(terms)


def log2_joint_binning_success(
    pe: JointPmf,
    pc: JointPmf,
    log2_b1: int,
    log2_b2: int,
    n: int,
    params: TypicalityParams,
) -> float:
    """log2 P(some bin pair is jointly pe-typical), single message per side.

    Base codewords are iid from the pc first marginal, partners iid from
    the pc conditional given the base symbol.  Partner successes against
    one base codeword depend on it only through its type, so
    ``P(fail) = (E_type[(1 - s(type))^{B2}])^{B1}`` exactly, with the
    inner expectation evaluated as ``1 - E[any-hit]`` for stability.
    """
    if pe.mass.shape != pc.mass.shape:
        raise DomainError("pe and pc must share an alphabet")
    p1 = pc.mass.sum(axis=1)
    cond = pc.mass / np.where(p1[:, None] > 0, p1[:, None], 1.0)
    c1 = len(p1)
    # miss probability averaged over the base codeword's type
    miss_terms: list[float] = []  # log2 of w(t) * any-hit(t)
    counts = np.zeros(c1, dtype=np.int64)

    def rec(i: int, remaining: int):
        if i == c1 - 1:
            counts[i] = remaining
            if np.any((p1 <= 0) & (counts > 0)):
                counts[i] = 0
                return
            occ = counts > 0
            lw = _log2_multinomial(counts) + float(
                (counts[occ] * np.log2(p1[occ])).sum()
            )
            p_joint = JointPmf(pe.variables, pe.mass)
            q_rows = cond  # per-base-symbol partner law
            log2_s = _log2_hit_given_counts(p_joint, q_rows, counts.copy(), params)
            hit = prob_any_hit(log2_s, float(log2_b2))
            if hit > 0:
                miss_terms.append(lw + math.log2(hit))
            counts[i] = 0
            return
        for c in range(remaining + 1):
            if p1[i] <= 0 and c > 0:
                break
            counts[i] = c
            rec(i + 1, remaining - c)
        counts[i] = 0

    rec(0, n)
    log2_delta = _log2_sum(miss_terms)  # P(one base codeword covers)
    return math.log2(max(prob_any_hit(log2_delta, float(log2_b1)), 5e-324)) \
        if log2_delta != float("-inf") else float("-inf")


def _log2_hit_given_counts(
    p_joint: JointPmf,
    q_rows: np.ndarray,
    base_counts: np.ndarray,
    params: TypicalityParams,
) -> float:
    """Hit probability for a partner drawn per-symbol from ``q_rows[base]``.

    Same count-matrix sum as :func:`log2_conditional_hit_prob`, but the
    conditioning variable is the joint's FIRST axis and the candidate its
    second, with a per-row candidate law.
    """
    joint = p_joint.mass  # (c1, c2)
    n = int(base_counts.sum())
    c1, c2 = joint.shape
    targets = joint * n
    budget = params.epsilon * n
    terms: list[float] = []

    def col_options(i: int):
        total = int(base_counts[i])
        opts: list[tuple[float, float]] = []
        cur = np.zeros(c2, dtype=np.int64)

        def rec(j: int, remaining: int, dev: float):
            if dev > budget + 1e-12:
                return
            if j == c2 - 1:
                c = remaining
                if params.zero_support_strict and joint[i, j] == 0 and c > 0:
                    return
                if q_rows[i, j] <= 0 and c > 0:
                    return
                d = dev + abs(c - targets[i, j])
                if d > budget + 1e-12:
                    return
                cur[j] = c
                occ = cur > 0
                lw = _log2_multinomial(cur) + float(
                    (cur[occ] * np.log2(q_rows[i, occ])).sum()
                )
                opts.append((d, lw))
                cur[j] = 0
                return
            hi = remaining
            if params.zero_support_strict and joint[i, j] == 0:
                hi = 0
            if q_rows[i, j] <= 0:
                hi = 0
            for c in range(0, hi + 1):
                d = dev + abs(c - targets[i, j])
                if d > budget + 1e-12 and c > targets[i, j]:
                    break
                if d > budget + 1e-12:
                    continue
                cur[j] = c
                rec(j + 1, remaining - c, d)
            cur[j] = 0

        rec(0, total, 0.0)
        return opts

    per_col = [col_options(i) for i in range(c1)]

    def combine(i: int, dev: float, lw: float):
        if i == c1:
            terms.append(lw)
            return
        for d, w in per_col[i]:
            if dev + d <= budget + 1e-12:
                combine(i + 1, dev + d, lw + w)

    combine(0, 0.0, 0.0)
    return _log2_sum(terms)


def prob_any_hit(log2_s: float, log2_count: float) -> float:
    """P(at least one success among 2^log2_count independent Bernoulli(s)).

    ``s = 2^log2_s``.  Stable across the whole range: exact
    ``1-(1-s)^K`` when both numbers are representable, the Poisson-style
    limit when the count is astronomically large and s tiny.
    """
    if log2_count == float("-inf") or log2_s == float("-inf"):
        return 0.0
    if log2_s > 0:
        raise DomainError("a probability cannot exceed 1")
    if log2_count <= 52 and log2_s >= -500:
        k = 2.0 ** log2_count
        s = 2.0 ** log2_s
        if s >= 1.0:
            return 1.0
        return float(-math.expm1(k * math.log1p(-s)))
    x_log2 = log2_s + log2_count
    if x_log2 >= 9:
        return 1.0
    return float(-math.expm1(-(2.0 ** x_log2)))
