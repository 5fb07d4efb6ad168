"""Finite-alphabet joint distributions and scalar information quantities.

All logarithms are base 2; every rate or divergence in this package is in
bits.  Distributions are dense tensors over a product of small named
alphabets.  Values are immutable after construction and safe to share
across workers.

Two distributions play a special role throughout the package: the
*codebook* distribution (the law codewords are drawn from) and the
*encoding* distribution (the law the selected codewords are forced to
emulate).  Divergences between the two are always taken as expectations
under the encoding law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "VariableId",
    "JointPmf",
    "ConditionalKernel",
    "CIStatement",
    "DomainError",
    "CODEBOOK",
    "ENCODING",
    "marginal",
    "conditional",
    "entropy",
    "mutual_information",
    "kl",
    "conditional_kl",
    "inaccuracy",
    "cross_entropy",
    "check_factorization",
    "product_pmf",
]

#: Valid distribution labels ("c" = codebook, "e" = encoding).
CODEBOOK = "c"
ENCODING = "e"

_SUM_TOL_STRICT = 1e-12
_SUM_TOL_RENORM = 1e-9
_MAX_JOINT_SIZE = 10**7


class DomainError(ValueError):
    """Raised when an operation is called with incompatible arguments."""


@dataclass(frozen=True)
class VariableId:
    """A named coordinate of a joint pmf.

    ``index`` is the position of the variable inside its pmf; ``label``
    is only for display (e.g. ``"U1"`` or ``"Y2"``).
    """

    index: int
    label: str = ""

    def __post_init__(self):
        if self.index < 0:
            raise DomainError(f"variable index must be >= 0, got {self.index}")
        if not self.label:
            object.__setattr__(self, "label", f"v{self.index}")


def _as_indices(vs: Iterable[VariableId | int]) -> tuple[int, ...]:
    out = []
    for v in vs:
        out.append(v.index if isinstance(v, VariableId) else int(v))
    return tuple(out)


@dataclass(frozen=True)
class JointPmf:
    """Dense joint pmf over a product of finite alphabets.

    ``mass`` has one axis per variable, in ``variables`` order.  Entries
    are validated nonnegative; the total mass must be within 1e-9 of 1
    and is renormalized on ingestion (exact unit mass is not required of
    hand-authored configs).
    """

    variables: tuple[VariableId, ...]
    mass: np.ndarray

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        indices = [v.index for v in variables]
        if sorted(indices) != list(range(len(variables))):
            raise DomainError(
                f"variable indices must be distinct and contiguous from 0, got {indices}"
            )
        mass = np.asarray(self.mass, dtype=float)
        if mass.ndim != len(variables):
            raise DomainError(
                f"mass has {mass.ndim} axes but {len(variables)} variables are declared"
            )
        if mass.size > _MAX_JOINT_SIZE:
            raise DomainError(
                f"joint alphabet size {mass.size} exceeds the {_MAX_JOINT_SIZE} entry cap"
            )
        if np.any(mass < 0):
            raise DomainError("pmf entries must be nonnegative")
        total = float(mass.sum())
        if abs(total - 1.0) > _SUM_TOL_RENORM:
            raise DomainError(f"pmf mass sums to {total!r}, not 1 within {_SUM_TOL_RENORM}")
        if abs(total - 1.0) > _SUM_TOL_STRICT:
            mass = mass / total
        mass = np.ascontiguousarray(mass)
        mass.setflags(write=False)
        object.__setattr__(self, "mass", mass)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return self.mass.shape

    def axis_of(self, v: VariableId | int) -> int:
        idx = v.index if isinstance(v, VariableId) else int(v)
        for ax, var in enumerate(self.variables):
            if var.index == idx:
                return ax
        raise DomainError(f"unknown variable index {idx}")

    def var(self, idx: int) -> VariableId:
        return self.variables[self.axis_of(idx)]

    def indices(self) -> frozenset[int]:
        return frozenset(v.index for v in self.variables)


@dataclass(frozen=True)
class ConditionalKernel:
    """Rows P(of | given); one row per conditioning symbol.

    ``table`` has the ``given`` axes first, then the ``of`` axes.  Rows
    whose conditioning symbol has zero marginal mass carry uniform
    placeholder values and are flagged in ``unsupported``.
    """

    given_vars: tuple[VariableId, ...]
    of_vars: tuple[VariableId, ...]
    table: np.ndarray
    unsupported: np.ndarray  # boolean, one entry per conditioning symbol

    def row(self, given_symbol: tuple[int, ...]) -> np.ndarray:
        return self.table[given_symbol]


@dataclass(frozen=True)
class CIStatement:
    """Conditional-independence statement ``a`` independent of ``b`` given ``c``."""

    a: frozenset[int]
    b: frozenset[int]
    given: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "a", frozenset(self.a))
        object.__setattr__(self, "b", frozenset(self.b))
        object.__setattr__(self, "given", frozenset(self.given))
        if not self.a or not self.b:
            raise DomainError("CI statement needs nonempty sides")
        if self.a & self.b or self.a & self.given or self.b & self.given:
            raise DomainError("CI statement sets must be pairwise disjoint")


def product_pmf(*parts: JointPmf) -> JointPmf:
    """Independent product of pmfs; variables are renumbered consecutively.

    Part axes are concatenated in the given order and assigned fresh
    contiguous indices, keeping each variable's display label.
    """
    if not parts:
        raise DomainError("product_pmf needs at least one part")
    variables: list[VariableId] = []
    mass = np.ones(())
    for p in parts:
        mass = np.multiply.outer(mass, p.mass)
        for v in p.variables:
            variables.append(VariableId(len(variables), v.label))
    return JointPmf(tuple(variables), mass)


def marginal(p: JointPmf, keep: Iterable[VariableId | int]) -> JointPmf:
    """Sum out all variables not in ``keep``; keeps original axis order."""
    keep_idx = set(_as_indices(keep))
    unknown = keep_idx - set(p.indices())
    if unknown:
        raise DomainError(f"unknown variables {sorted(unknown)}")
    kept_axes = [ax for ax, v in enumerate(p.variables) if v.index in keep_idx]
    drop_axes = tuple(ax for ax in range(len(p.variables)) if ax not in kept_axes)
    mass = p.mass.sum(axis=drop_axes) if drop_axes else p.mass
    kept_vars = [p.variables[ax] for ax in kept_axes]
    # reindex contiguously, preserving order
    new_vars = tuple(
        VariableId(i, v.label) for i, v in enumerate(kept_vars)
    )
    return JointPmf(new_vars, mass)


def _marginal_array(p: JointPmf, keep_idx: Sequence[int]) -> np.ndarray:
    """Marginal mass over ``keep_idx`` (sorted by variable index), raw array."""
    keep_sorted = sorted(set(keep_idx))
    axes = [p.axis_of(i) for i in keep_sorted]
    drop = tuple(ax for ax in range(len(p.variables)) if ax not in axes)
    mass = p.mass.sum(axis=drop) if drop else p.mass
    # axes of the reduced array appear in original axis order; permute to keep_sorted
    remaining = [ax for ax in range(len(p.variables)) if ax not in drop]
    perm = [remaining.index(ax) for ax in axes]
    return mass.transpose(perm)


def conditional(
    p: JointPmf,
    of: Iterable[VariableId | int],
    given: Iterable[VariableId | int],
) -> ConditionalKernel:
    """Kernel P(of | given) with unsupported rows flagged, not raised."""
    of_idx = _as_indices(of)
    given_idx = _as_indices(given)
    if set(of_idx) & set(given_idx):
        raise DomainError("`of` and `given` must be disjoint")
    for i in (*of_idx, *given_idx):
        p.axis_of(i)  # raises on unknown
    of_sorted = sorted(set(of_idx))
    given_sorted = sorted(set(given_idx))
    joint = _marginal_array(p, given_sorted + of_sorted)  # axes: given then of? no: sorted union
    # _marginal_array sorts indices; rebuild with given axes first, of axes after
    union_sorted = sorted(set(of_sorted) | set(given_sorted))
    perm = [union_sorted.index(i) for i in given_sorted + of_sorted]
    joint = joint.transpose(perm)
    n_given = len(given_sorted)
    given_shape = joint.shape[:n_given]
    of_shape = joint.shape[n_given:]
    flat = joint.reshape(int(np.prod(given_shape, dtype=int)) or 1, -1)
    row_mass = flat.sum(axis=1)
    unsupported = row_mass <= 0.0
    safe = np.where(unsupported, 1.0, row_mass)
    table = flat / safe[:, None]
    table[unsupported] = 1.0 / flat.shape[1]
    table = table.reshape(given_shape + of_shape)
    table.setflags(write=False)
    flags = unsupported.reshape(given_shape or (1,))
    flags.setflags(write=False)
    return ConditionalKernel(
        given_vars=tuple(p.var(i) for i in given_sorted),
        of_vars=tuple(p.var(i) for i in of_sorted),
        table=table,
        unsupported=flags,
    )


def _neg_sum_p_log_q(p_arr: np.ndarray, q_arr: np.ndarray) -> float:
    """-sum p log2 q with 0 log 0 = 0; +inf when q=0 where p>0."""
    pos = p_arr > 0
    if np.any(q_arr[pos] <= 0):
        return float("inf")
    return float(-(p_arr[pos] * np.log2(q_arr[pos])).sum())


def entropy(p: JointPmf, of: Iterable[VariableId | int] | None = None) -> float:
    """Shannon entropy (bits) of the marginal on ``of`` (all variables if None)."""
    idx = sorted(p.indices()) if of is None else sorted(set(_as_indices(of)))
    m = _marginal_array(p, idx)
    return _neg_sum_p_log_q(m, m)


def cross_entropy(p: JointPmf, q: JointPmf, of: Iterable[VariableId | int] | None = None) -> float:
    """-sum P_p log2 P_q over the shared marginal; +inf on support violation."""
    idx = sorted(p.indices()) if of is None else sorted(set(_as_indices(of)))
    pm = _marginal_array(p, idx)
    qm = _marginal_array(q, idx)
    if pm.shape != qm.shape:
        raise DomainError("mismatched alphabets")
    return _neg_sum_p_log_q(pm, qm)


def mutual_information(
    p: JointPmf,
    a: Iterable[VariableId | int],
    b: Iterable[VariableId | int],
    given: Iterable[VariableId | int] = (),
) -> float:
    """I(a; b | given) in bits, via the four-entropy decomposition."""
    ai, bi, gi = set(_as_indices(a)), set(_as_indices(b)), set(_as_indices(given))
    if ai & bi or ai & gi or bi & gi:
        raise DomainError("a, b, given must be pairwise disjoint")
    h = lambda s: entropy(p, s) if s else 0.0
    return h(ai | gi) + h(bi | gi) - h(ai | bi | gi) - h(gi)


def kl(p: JointPmf, q: JointPmf) -> float:
    """D(p||q) in bits; +inf when p is not absolutely continuous w.r.t. q."""
    if p.mass.shape != q.mass.shape:
        raise DomainError("mismatched alphabets")
    return cross_entropy(p, q) - entropy(p)


def conditional_kl(
    pe: JointPmf,
    pc: JointPmf,
    of: Iterable[VariableId | int],
    given: Iterable[VariableId | int] = (),
) -> float:
    """D(P_e(of) || P_c(of) | P_e(given)), expectation under the encoding law.

    Equals ``sum_{given,of} P_e(of,given) log2[P_e(of|given)/P_c(of|given)]``;
    +inf when the codebook conditional vanishes on encoding support.
    """
    of_idx = set(_as_indices(of))
    given_idx = set(_as_indices(given))
    if of_idx & given_idx:
        raise DomainError("`of` and `given` must be disjoint")
    if pe.mass.shape != pc.mass.shape:
        raise DomainError("pe and pc must share variables and alphabets")
    both = of_idx | given_idx
    num = cross_entropy(pe, pc, both) - entropy(pe, both)
    if not given_idx:
        return num
    return num - (cross_entropy(pe, pc, given_idx) - entropy(pe, given_idx))


def inaccuracy(p: JointPmf, q: JointPmf) -> float:
    """Cross-entropy -sum p log2 q = D(p||q) + H(p), in bits."""
    if p.mass.shape != q.mass.shape:
        raise DomainError("mismatched alphabets")
    return cross_entropy(p, q)


def check_factorization(p: JointPmf, statement: CIStatement, tol: float = 1e-9) -> bool:
    """True iff p's marginal on the statement's variables factorizes as stated.

    The reconstruction P(c) P(a|c) P(b|c) is compared to the marginal in
    max norm.  Variables of ``p`` outside the statement are summed out
    first.
    """
    ai = sorted(statement.a)
    bi = sorted(statement.b)
    gi = sorted(statement.given)
    all_idx = sorted(statement.a | statement.b | statement.given)
    unknown = set(all_idx) - set(p.indices())
    if unknown:
        raise DomainError(f"statement references unknown variables {sorted(unknown)}")
    joint = _marginal_array(p, all_idx)  # axes in sorted index order
    pag = _marginal_array(p, sorted(set(ai) | set(gi)))
    pbg = _marginal_array(p, sorted(set(bi) | set(gi)))
    recon_num = _place(pag, sorted(set(ai) | set(gi)), all_idx) * _place(
        pbg, sorted(set(bi) | set(gi)), all_idx
    )
    if gi:
        pg_full = _place(_marginal_array(p, gi), gi, all_idx)
        recon = np.where(pg_full > 0, recon_num / np.where(pg_full > 0, pg_full, 1.0), 0.0)
    else:
        recon = recon_num
    return float(np.max(np.abs(recon - joint))) <= tol


def _place(arr: np.ndarray, arr_idx: list[int], all_idx: list[int]) -> np.ndarray:
    """Insert broadcast axes so ``arr`` (axes = sorted arr_idx) aligns with all_idx."""
    sl = tuple(slice(None) if i in arr_idx else np.newaxis for i in all_idx)
    return arr[sl]
