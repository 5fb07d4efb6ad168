"""Exact symbolic information expressions.

Every constant appearing on the right-hand side of a rate inequality in
this package is a rational linear combination of two atom families:

* ``ENT(label, S)`` -- entropy of the variable set S under the codebook
  (``c``) or encoding (``e``) distribution;
* ``XENT(S)`` -- cross-entropy ``-sum P_e(S) log2 P_c(S)`` (expectation
  always under the encoding law, log always of the codebook law).

This basis is closed under all the entropy / mutual-information /
divergence constants the region builders need, and coefficients are
`fractions.Fraction`, so Fourier-Motzkin elimination stays exact.

Canonicalization rewrites atoms under declared structural facts about
the distributions: conditional independences (which split a joint
entropy) and marginal equalities between the two laws (which collapse
cross-entropy and codebook-entropy atoms onto encoding-entropy atoms).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from . import probcore
from .probcore import CODEBOOK, ENCODING, DomainError, JointPmf

__all__ = [
    "Atom",
    "InfoExpr",
    "CIIdentity",
    "MarginalEquality",
    "Identity",
    "ZERO",
    "ent",
    "xent",
    "expr_entropy",
    "expr_mutual_information",
    "expr_kl_cond",
    "evaluate",
    "canonicalize",
]

_ENT = "ENT"
_XENT = "XENT"


@dataclass(frozen=True)
class Atom:
    """One basis quantity: ENT(label, varset) or XENT(varset)."""

    kind: str
    varset: frozenset[int]
    label: str | None = None  # "c"/"e" for ENT, None for XENT

    def __post_init__(self):
        object.__setattr__(self, "varset", frozenset(self.varset))
        if not self.varset:
            raise DomainError("atoms over the empty variable set are disallowed")
        if self.kind == _ENT:
            if self.label not in (CODEBOOK, ENCODING):
                raise DomainError(f"ENT atom needs label c or e, got {self.label!r}")
        elif self.kind == _XENT:
            if self.label is not None:
                raise DomainError("XENT atoms carry no label")
        else:
            raise DomainError(f"unknown atom kind {self.kind!r}")

    def sort_key(self):
        return (self.kind, self.label or "", tuple(sorted(self.varset)))

    def render(self) -> str:
        vs = ",".join(str(i) for i in sorted(self.varset))
        if self.kind == _ENT:
            return f"H_{self.label}{{{vs}}}"
        return f"X{{{vs}}}"


def ent(label: str, varset: Iterable[int]) -> Atom:
    return Atom(_ENT, frozenset(varset), label)


def xent(varset: Iterable[int]) -> Atom:
    return Atom(_XENT, frozenset(varset))


def _frac(x) -> Fraction:
    if isinstance(x, float):
        raise DomainError("InfoExpr coefficients must be exact (int/Fraction)")
    return Fraction(x)


@dataclass(frozen=True)
class InfoExpr:
    """Sparse rational combination of atoms plus a scalar constant (bits)."""

    terms: Mapping[Atom, Fraction]
    scalar: Fraction = Fraction(0)

    def __post_init__(self):
        clean = {a: _frac(c) for a, c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", _FrozenTerms(clean))
        object.__setattr__(self, "scalar", _frac(self.scalar))

    # -- exact arithmetic ------------------------------------------------
    def __add__(self, other: "InfoExpr") -> "InfoExpr":
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, Fraction(0)) + c
        return InfoExpr(terms, self.scalar + other.scalar)

    def __sub__(self, other: "InfoExpr") -> "InfoExpr":
        return self + (-other)

    def __neg__(self) -> "InfoExpr":
        return self.scale(-1)

    def scale(self, k) -> "InfoExpr":
        k = _frac(k)
        return InfoExpr({a: c * k for a, c in self.terms.items()}, self.scalar * k)

    def __rmul__(self, k) -> "InfoExpr":
        return self.scale(k)

    def is_zero(self) -> bool:
        return not self.terms and self.scalar == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, InfoExpr):
            return NotImplemented
        return dict(self.terms) == dict(other.terms) and self.scalar == other.scalar

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.scalar))

    def sorted_terms(self) -> list[tuple[Atom, Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key())

    def render(self) -> str:
        """Stable text form, e.g. ``+1 H_e{1,2} -1 X{1,2} +3/2 H_c{0}``."""
        parts = []
        for a, c in self.sorted_terms():
            sign = "+" if c > 0 else "-"
            parts.append(f"{sign}{abs(c)} {a.render()}")
        if self.scalar != 0 or not parts:
            sign = "+" if self.scalar >= 0 else "-"
            parts.append(f"{sign}{abs(self.scalar)}")
        return " ".join(parts)

    def __repr__(self):
        return f"InfoExpr({self.render()})"


class _FrozenTerms(dict):
    def _blocked(self, *a, **k):
        raise TypeError("InfoExpr terms are immutable")

    __setitem__ = __delitem__ = pop = popitem = clear = update = setdefault = _blocked


ZERO = InfoExpr({})


def expr_entropy(label: str, varset: Iterable[int]) -> InfoExpr:
    vs = frozenset(varset)
    if not vs:
        return ZERO
    return InfoExpr({ent(label, vs): Fraction(1)})


def expr_xent(varset: Iterable[int]) -> InfoExpr:
    vs = frozenset(varset)
    if not vs:
        return ZERO
    return InfoExpr({xent(vs): Fraction(1)})


def expr_mutual_information(
    label: str,
    a: Iterable[int],
    b: Iterable[int],
    given: Iterable[int] = (),
) -> InfoExpr:
    """I(a; b | given) under one distribution label, as entropy atoms."""
    ai, bi, gi = frozenset(a), frozenset(b), frozenset(given)
    if ai & bi or ai & gi or bi & gi:
        raise DomainError("a, b, given must be pairwise disjoint")
    return (
        expr_entropy(label, ai | gi)
        + expr_entropy(label, bi | gi)
        - expr_entropy(label, ai | bi | gi)
        - expr_entropy(label, gi)
    )


def expr_kl_cond(of: Iterable[int], given: Iterable[int] = ()) -> InfoExpr:
    """D(P_e(of) || P_c(of) | P_e(given)) as atoms.

    Expectation under the encoding law, log-ratio of conditionals with
    the codebook law in the denominator; ``given=()`` is the plain
    divergence of the ``of`` marginals.
    """
    oi, gi = frozenset(of), frozenset(given)
    if oi & gi:
        raise DomainError("`of` and `given` must be disjoint")
    expr = expr_xent(oi | gi) - expr_entropy(ENCODING, oi | gi)
    if gi:
        expr = expr - (expr_xent(gi) - expr_entropy(ENCODING, gi))
    return expr


# -- numeric evaluation -------------------------------------------------

def _atom_value(atom: Atom, pe: JointPmf, pc: JointPmf) -> float:
    vs = sorted(atom.varset)
    if atom.kind == _ENT:
        p = pe if atom.label == ENCODING else pc
        return probcore.entropy(p, vs)
    return probcore.cross_entropy(pe, pc, vs)


def evaluate(expr: InfoExpr, pe: JointPmf, pc: JointPmf) -> float:
    """Numeric value in bits; +inf when an XENT atom hits a support violation.

    ``pe`` must cover every atom's variables; ``pc`` must cover the
    variables of XENT and codebook-entropy atoms (it may omit channel
    outputs, which never appear in divergences).
    """
    total = float(expr.scalar)
    for atom, coeff in expr.terms.items():
        v = _atom_value(atom, pe, pc)
        if v == float("inf"):
            return float("inf") if coeff > 0 else float("-inf")
        total += float(coeff) * v
    return total


# -- canonicalization ---------------------------------------------------

@dataclass(frozen=True)
class CIIdentity:
    """a independent of b given c under distribution ``label``.

    Rewrites ``ENT(label, a|b|c-union)`` into the three smaller entropy
    atoms; when the label is the codebook, the same split applies to
    XENT atoms (their log argument is the codebook law).
    """

    label: str
    a: frozenset[int]
    b: frozenset[int]
    given: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "a", frozenset(self.a))
        object.__setattr__(self, "b", frozenset(self.b))
        object.__setattr__(self, "given", frozenset(self.given))
        if self.label not in (CODEBOOK, ENCODING):
            raise DomainError(f"identity label must be c or e, got {self.label!r}")
        if not self.a or not self.b:
            raise DomainError("CI identity needs nonempty sides")
        if self.a & self.b or self.a & self.given or self.b & self.given:
            raise DomainError("CI identity sets must be pairwise disjoint")

    @property
    def union(self) -> frozenset[int]:
        return self.a | self.b | self.given

    def statement(self) -> probcore.CIStatement:
        return probcore.CIStatement(self.a, self.b, self.given)

    def sort_key(self):
        return ("ci", self.label, tuple(sorted(self.a)), tuple(sorted(self.b)), tuple(sorted(self.given)))


@dataclass(frozen=True)
class MarginalEquality:
    """P_e equals P_c on ``varset`` (hence on every subset of it).

    Collapses ``XENT(S)`` and ``ENT(c, S)`` onto ``ENT(e, S)`` for all
    S inside the declared set.
    """

    varset: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "varset", frozenset(self.varset))
        if not self.varset:
            raise DomainError("marginal equality over the empty set is vacuous")

    def sort_key(self):
        return ("eq", "", tuple(sorted(self.varset)), (), ())


Identity = Union[CIIdentity, MarginalEquality]


def _rewrite_atom(atom: Atom, identities: list[Identity]) -> InfoExpr | None:
    """One rewrite step for a single atom, or None if no identity applies."""
    for ident in identities:
        if isinstance(ident, MarginalEquality):
            if atom.varset <= ident.varset and not (
                atom.kind == _ENT and atom.label == ENCODING
            ):
                return expr_entropy(ENCODING, atom.varset)
        else:
            if atom.varset != ident.union:
                continue
            if atom.kind == _ENT and atom.label == ident.label:
                return (
                    expr_entropy(ident.label, ident.a | ident.given)
                    + expr_entropy(ident.label, ident.b | ident.given)
                    - expr_entropy(ident.label, ident.given)
                )
            if atom.kind == _XENT and ident.label == CODEBOOK:
                return (
                    expr_xent(ident.a | ident.given)
                    + expr_xent(ident.b | ident.given)
                    - expr_xent(ident.given)
                )
    return None


_MAX_REWRITE_ROUNDS = 10_000


def canonicalize(expr: InfoExpr, identities: Iterable[Identity] = ()) -> InfoExpr:
    """Deterministic normal form under the declared identities.

    Applies rewrites to a fixpoint, largest variable sets first.  Every
    rewrite strictly shrinks an atom's variable set or collapses its
    label, so the process terminates; the round cap only guards against
    malformed identity implementations.
    """
    idents = sorted(identities, key=lambda i: i.sort_key())
    current = expr
    for _ in range(_MAX_REWRITE_ROUNDS):
        changed = False
        terms = dict(current.terms)
        for atom in sorted(terms, key=lambda a: (-len(a.varset), a.sort_key())):
            repl = _rewrite_atom(atom, idents)
            if repl is not None:
                coeff = terms[atom]
                current = current + (repl - InfoExpr({atom: Fraction(1)})).scale(coeff)
                changed = True
                break
        if not changed:
            return current
    raise DomainError("canonicalization did not terminate; identities are inconsistent")
