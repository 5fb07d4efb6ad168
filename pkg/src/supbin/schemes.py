"""Builders for the achievable-rate regions of the coding schemes.

Each builder returns a :class:`~supbin.region.RateRegion` over a fixed
variable-index convention, with the structural identities of the scheme
attached and the divergence constants recorded in ``constants`` so
specialization checks can inspect them by name.

Index conventions (auxiliary codewords first, channel outputs last):

==========  =======================================================
bc-cm       U1=0, U2=1, Y1=2, Y2=3
mac-cm      Z0=0, Z1=1, Z2=2, Y1=3
bc/marton   V0=0, V1=1, V2=2, Y1=3, Y2=4
ifc/hk      W1=0, V1=1, W2=2, V2=3, Y1=4, Y2=5
==========  =======================================================

The broadcast builders superpose private codewords on a common one and
bin everything; the interference builders bin each transmitter's pair
of codewords jointly.  Every region uses total-rate symbols ``L`` at
construction and substitutes ``L = R + Rho`` before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import infoexpr as ix
from . import region as rg
from .infoexpr import CIIdentity, InfoExpr, MarginalEquality
from .probcore import (
    CODEBOOK,
    ENCODING,
    DomainError,
    JointPmf,
    VariableId,
)
from .region import RateInequality, RateRegion, RateSymbol, geq, leq

__all__ = [
    "SchemeSpec",
    "SplitSpec",
    "build_bc_cm",
    "build_mac_cm",
    "build_mac_capacity",
    "build_bc",
    "build_marton",
    "build_ifc",
    "build_han_kobayashi",
    "build_superposition",
    "apply_split",
    "specialize_equal_laws",
    "d_bc_rs",
    "channel_extend",
    "SCHEME_BUILDERS",
]


@dataclass(frozen=True)
class SchemeSpec:
    """Structure of a scheme: codeword roles, superposition edges, binning.

    ``codewords`` fixes the variable-index convention (role i is joint
    variable i); ``outputs`` are the channel outputs, indexed after the
    codewords.  ``superposition`` lists (base, satellite) generation
    edges; ``binned`` lists the roles that carry bin indices.
    """

    codewords: tuple[str, ...]
    outputs: tuple[str, ...]
    superposition: tuple[tuple[str, str], ...] = ()
    binned: tuple[str, ...] = ()

    def __post_init__(self):
        roles = self.codewords
        if len(set(roles)) != len(roles) or len(set(self.outputs)) != len(self.outputs):
            raise DomainError("role names must be unique")
        if set(roles) & set(self.outputs):
            raise DomainError("codeword and output roles must not overlap")
        for base, sat in self.superposition:
            if base not in roles or sat not in roles:
                raise DomainError(f"superposition edge ({base},{sat}) uses unknown roles")
        if set(self.binned) - set(roles):
            raise DomainError("only codeword roles can be binned")
        # acyclicity of the superposition order
        order: list[str] = []
        edges = set(self.superposition)
        pending = set(roles)
        while pending:
            free = {
                r for r in pending
                if not any(sat == r and base in pending for base, sat in edges)
            }
            if not free:
                raise DomainError("superposition edges form a cycle")
            order.extend(sorted(free))
            pending -= free

    def index(self, role: str) -> int:
        all_roles = self.codewords + self.outputs
        if role not in all_roles:
            raise DomainError(f"unknown role {role!r}")
        return all_roles.index(role)


@dataclass(frozen=True)
class SplitSpec:
    """Rate-splitting parameters.

    ``alpha`` splits a common message between the two private rates in
    the broadcast mapping; ``beta`` plays the same role for the second
    user of the interference mapping.  Both must be exact rationals in
    [0, 1] so splits stay inside the exact-arithmetic pipeline.
    """

    alpha: Fraction = Fraction(1, 2)
    beta: Fraction = Fraction(1, 2)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        for v in (self.alpha, self.beta):
            if not 0 <= v <= 1:
                raise DomainError("split parameters must lie in [0, 1]")


def _require(spec: SchemeSpec | None, default: SchemeSpec) -> SchemeSpec:
    if spec is None:
        return default
    if spec != default:
        raise DomainError(
            f"scheme structure {spec} does not match the required layout {default}"
        )
    return spec


def _Dkl(of: Iterable[int], given: Iterable[int] = ()) -> InfoExpr:
    return ix.expr_kl_cond(of, given)


def _I(a: Iterable[int], b: Iterable[int], given: Iterable[int] = ()) -> InfoExpr:
    return ix.expr_mutual_information(ENCODING, a, b, given)


def _substitute_totals(region: RateRegion, pairs: list[tuple[str, str, str]]) -> RateRegion:
    """Replace each total symbol L by R + Rho."""
    out = region
    for total, rate, binning in pairs:
        out = rg.substitute(out, total, {rate: 1, binning: 1})
    return out


# -- broadcast with common message --------------------------------------

BC_CM_SPEC = SchemeSpec(
    codewords=("U1", "U2"),
    outputs=("Y1", "Y2"),
    superposition=(("U1", "U2"),),
    binned=("U1", "U2"),
)


def build_bc_cm(spec: SchemeSpec | None = None) -> RateRegion:
    """Two-message broadcast region with a binned superposition codebook.

    Decoder 1 recovers the base codeword from Y1; decoder 2 recovers
    both codewords from Y2.  Bin rates pay for steering the codebook
    law onto the encoding law.
    """
    _require(spec, BC_CM_SPEC)
    U1, U2, Y1, Y2 = 0, 1, 2, 3
    D_joint = _Dkl({U1, U2})
    D_base = _Dkl({U1})
    D_sat = _Dkl({U2}, {U1})
    symbols = (
        RateSymbol("R1"), RateSymbol("R2"),
        RateSymbol("Rho1", "binning"), RateSymbol("Rho2", "binning"),
        RateSymbol("L1", "total"), RateSymbol("L2", "total"),
    )
    ineqs = (
        geq({"Rho1": 1, "Rho2": 1}, D_joint),
        leq({"L1": 1}, _I({Y1}, {U1}) + D_base),
        leq({"L2": 1}, _I({Y2}, {U2}, {U1}) + D_sat),
        leq({"L1": 1, "L2": 1}, _I({Y2}, {U1, U2}) + D_joint),
    )
    region = RateRegion(
        symbols,
        ineqs,
        identities=(),
        constants=(
            ("D_joint", D_joint),
            ("D_base", D_base),
            ("D_sat", D_sat),
        ),
    )
    return _substitute_totals(region, [("L1", "R1", "Rho1"), ("L2", "R2", "Rho2")])


def build_superposition() -> RateRegion:
    """Superposition special case: equal laws, no bin rates left."""
    U1, U2, Y1, Y2 = 0, 1, 2, 3
    symbols = (RateSymbol("R1"), RateSymbol("R2"))
    ineqs = (
        leq({"R1": 1}, _I({Y1}, {U1})),
        leq({"R2": 1}, _I({Y2}, {U2}, {U1})),
        leq({"R1": 1, "R2": 1}, _I({Y2}, {U1, U2})),
    )
    return RateRegion(symbols, ineqs, identities=(MarginalEquality(frozenset({U1, U2})),))


# -- multi-access with common message -----------------------------------

MAC_CM_SPEC = SchemeSpec(
    codewords=("Z0", "Z1", "Z2"),
    outputs=("Y1",),
    superposition=(("Z0", "Z1"), ("Z0", "Z2")),
    binned=("Z1", "Z2"),
)

_MAC_IDENTITIES = (
    CIIdentity(CODEBOOK, frozenset({1}), frozenset({2}), frozenset({0})),
    CIIdentity(ENCODING, frozenset({1}), frozenset({2}), frozenset({0})),
    MarginalEquality(frozenset({0})),
)


def build_mac_cm(spec: SchemeSpec | None = None) -> RateRegion:
    """Two-transmitter multi-access region with a shared common codeword.

    Each transmitter superposes its private codeword on the common one
    and bins it; the private codewords are conditionally independent
    given the common codeword under both laws, and the common codeword
    itself is drawn from the encoding law directly.
    """
    _require(spec, MAC_CM_SPEC)
    Z0, Z1, Z2, Y1 = 0, 1, 2, 3
    D1 = _Dkl({Z1}, {Z0})
    D2 = _Dkl({Z2}, {Z0})
    symbols = (
        RateSymbol("R0"), RateSymbol("R1"), RateSymbol("R2"),
        RateSymbol("Rho1", "binning"), RateSymbol("Rho2", "binning"),
        RateSymbol("L1", "total"), RateSymbol("L2", "total"),
    )
    ineqs = (
        geq({"Rho1": 1}, D1),
        geq({"Rho2": 1}, D2),
        leq({"R0": 1, "L1": 1, "L2": 1}, _I({Y1}, {Z0, Z1, Z2}) + D1 + D2),
        leq({"L1": 1, "L2": 1}, _I({Y1}, {Z1, Z2}, {Z0}) + D1 + D2),
        leq({"L1": 1}, _I({Y1}, {Z1}, {Z0, Z2}) + D1),
        leq({"L2": 1}, _I({Y1}, {Z2}, {Z0, Z1}) + D2),
    )
    region = RateRegion(
        symbols,
        ineqs,
        identities=_MAC_IDENTITIES,
        constants=(("D_1", D1), ("D_2", D2)),
    )
    return _substitute_totals(region, [("L1", "R1", "Rho1"), ("L2", "R2", "Rho2")])


def build_mac_capacity() -> RateRegion:
    """Hand-built multi-access capacity region with a common message."""
    Z0, Z1, Z2, Y1 = 0, 1, 2, 3
    symbols = (RateSymbol("R0"), RateSymbol("R1"), RateSymbol("R2"))
    ineqs = (
        leq({"R0": 1, "R1": 1, "R2": 1}, _I({Y1}, {Z0, Z1, Z2})),
        leq({"R1": 1, "R2": 1}, _I({Y1}, {Z1, Z2}, {Z0})),
        leq({"R1": 1}, _I({Y1}, {Z1}, {Z0, Z2})),
        leq({"R2": 1}, _I({Y1}, {Z2}, {Z0, Z1})),
    )
    return RateRegion(symbols, ineqs, identities=_MAC_IDENTITIES)


# -- broadcast without common message (rate splitting) -------------------

BC_SPEC = SchemeSpec(
    codewords=("V0", "V1", "V2"),
    outputs=("Y1", "Y2"),
    superposition=(("V0", "V1"), ("V0", "V2")),
    binned=("V0", "V1", "V2"),
)

_BC_IDENTITIES = (
    CIIdentity(CODEBOOK, frozenset({1}), frozenset({2}), frozenset({0})),
)


def build_bc(spec: SchemeSpec | None = None, split: SplitSpec | None = None) -> RateRegion:
    """Three-codeword broadcast region: common V0 plus two binned satellites.

    When ``split`` is given, the per-receiver rate symbols Rp1, Rp2 are
    attached per the splitting map so the region can be projected onto
    the two original message rates.
    """
    _require(spec, BC_SPEC)
    V0, V1, V2, Y1, Y2 = 0, 1, 2, 3, 4
    D012 = _Dkl({V0, V1, V2})
    D01 = _Dkl({V0, V1})
    D02 = _Dkl({V0, V2})
    D0 = _Dkl({V0})
    D1c = _Dkl({V1}, {V0})
    D2c = _Dkl({V2}, {V0})
    symbols = (
        RateSymbol("R0"), RateSymbol("R1"), RateSymbol("R2"),
        RateSymbol("Rho0", "binning"),
        RateSymbol("Rho1", "binning"), RateSymbol("Rho2", "binning"),
        RateSymbol("L0", "total"), RateSymbol("L1", "total"), RateSymbol("L2", "total"),
    )
    ineqs = (
        geq({"Rho0": 1, "Rho1": 1, "Rho2": 1}, D012),
        geq({"Rho0": 1, "Rho1": 1}, D01),
        geq({"Rho0": 1, "Rho2": 1}, D02),
        geq({"Rho0": 1}, D0),
        leq({"L0": 1, "L1": 1}, _I({Y1}, {V0, V1}) + D01),
        leq({"L1": 1}, _I({Y1}, {V1}, {V0}) + D1c),
        leq({"L0": 1, "L2": 1}, _I({Y2}, {V0, V2}) + D02),
        leq({"L2": 1}, _I({Y2}, {V2}, {V0}) + D2c),
    )
    region = RateRegion(
        symbols,
        ineqs,
        identities=_BC_IDENTITIES,
        constants=(
            ("D_012", D012), ("D_01", D01), ("D_02", D02), ("D_0", D0),
            ("D_1c", D1c), ("D_2c", D2c),
        ),
    )
    region = _substitute_totals(
        region, [("L0", "R0", "Rho0"), ("L1", "R1", "Rho1"), ("L2", "R2", "Rho2")]
    )
    if split is not None:
        region = apply_split(region, split)
    return region


def d_bc_rs() -> InfoExpr:
    """Divergence correction surviving the bin-rate elimination.

    Equals D({0,1}) + D({0,2}) - D({0,1,2}) - D({0}); under the codebook
    conditional independence of the two satellites it collapses to minus
    the encoding-law conditional mutual information between them.
    """
    return _Dkl({0, 1}) + _Dkl({0, 2}) - _Dkl({0, 1, 2}) - _Dkl({0})


def build_marton() -> RateRegion:
    """Hand-built target for the bin-eliminated broadcast region."""
    V0, V1, V2, Y1, Y2 = 0, 1, 2, 3, 4
    a = _I({Y1}, {V0, V1})
    b = _I({Y1}, {V1}, {V0})
    c = _I({Y2}, {V0, V2})
    d = _I({Y2}, {V2}, {V0})
    D1c = _Dkl({V1}, {V0})
    D2c = _Dkl({V2}, {V0})
    corr = d_bc_rs()
    symbols = (RateSymbol("R0"), RateSymbol("R1"), RateSymbol("R2"))
    ineqs = (
        leq({"R1": 1}, b + D1c),
        leq({"R2": 1}, d + D2c),
        leq({"R0": 1, "R1": 1}, a),
        leq({"R0": 1, "R2": 1}, c),
        leq({"R0": 1, "R1": 1, "R2": 1}, a + d + corr),
        leq({"R0": 1, "R1": 1, "R2": 1}, c + b + corr),
        leq({"R0": 2, "R1": 1, "R2": 1}, a + c + corr),
    )
    return RateRegion(symbols, ineqs, identities=_BC_IDENTITIES)


# -- interference channel ------------------------------------------------

IFC_SPEC = SchemeSpec(
    codewords=("W1", "V1", "W2", "V2"),
    outputs=("Y1", "Y2"),
    superposition=(("W1", "V1"), ("W2", "V2")),
    binned=("W1", "V1", "W2", "V2"),
)

_IFC_IDENTITIES = (
    CIIdentity(CODEBOOK, frozenset({0, 1}), frozenset({2, 3})),
    CIIdentity(ENCODING, frozenset({0, 1}), frozenset({2, 3})),
)


def build_ifc(spec: SchemeSpec | None = None, split: SplitSpec | None = None) -> RateRegion:
    """Two-pair interference region with common/private codeword pairs.

    Each receiver decodes its own pair plus the other transmitter's
    common codeword.  The transmitters are independent under both laws,
    so each decoder's divergence payments involve only the codewords of
    the transmitter it fully decodes.
    """
    _require(spec, IFC_SPEC)
    W1, V1, W2, V2, Y1, Y2 = 0, 1, 2, 3, 4, 5
    Da = _Dkl({W1, V1})
    Dav = _Dkl({V1}, {W1})
    Db = _Dkl({W2, V2})
    Dbv = _Dkl({V2}, {W2})
    symbols = tuple(
        RateSymbol(n, k)
        for n, k in (
            ("Rw1", "message"), ("Rv1", "message"),
            ("Rw2", "message"), ("Rv2", "message"),
            ("Rhow1", "binning"), ("Rhov1", "binning"),
            ("Rhow2", "binning"), ("Rhov2", "binning"),
            ("Lw1", "total"), ("Lv1", "total"),
            ("Lw2", "total"), ("Lv2", "total"),
        )
    )
    ineqs = (
        geq({"Rhow1": 1, "Rhov1": 1}, Da),
        geq({"Rhov1": 1}, Dav),
        geq({"Rhow2": 1, "Rhov2": 1}, Db),
        geq({"Rhov2": 1}, Dbv),
        leq({"Lw1": 1, "Lv1": 1, "Lw2": 1}, _I({Y1}, {W1, V1, W2}) + Da),
        leq({"Lv1": 1, "Lw2": 1}, _I({Y1}, {V1, W2}, {W1}) + Dav),
        leq({"Lw1": 1, "Lv1": 1}, _I({Y1}, {W1, V1}, {W2}) + Da),
        leq({"Lv1": 1}, _I({Y1}, {V1}, {W1, W2}) + Dav),
        leq({"Lw1": 1, "Lv2": 1, "Lw2": 1}, _I({Y2}, {W1, W2, V2}) + Db),
        leq({"Lv2": 1, "Lw2": 1}, _I({Y2}, {W2, V2}, {W1}) + Db),
        leq({"Lw1": 1, "Lv2": 1}, _I({Y2}, {W1, V2}, {W2}) + Dbv),
        leq({"Lv2": 1}, _I({Y2}, {V2}, {W1, W2}) + Dbv),
    )
    region = RateRegion(
        symbols,
        ineqs,
        identities=_IFC_IDENTITIES,
        constants=(
            ("D_1", Da), ("D_1v", Dav), ("D_2", Db), ("D_2v", Dbv),
        ),
    )
    region = _substitute_totals(
        region,
        [
            ("Lw1", "Rw1", "Rhow1"), ("Lv1", "Rv1", "Rhov1"),
            ("Lw2", "Rw2", "Rhow2"), ("Lv2", "Rv2", "Rhov2"),
        ],
    )
    if split is not None:
        region = apply_split(region, split)
    return region


def build_han_kobayashi(split: SplitSpec | None = None) -> RateRegion:
    """Compact common/private interference region used as a numeric target."""
    W1, V1, W2, V2, Y1, Y2 = 0, 1, 2, 3, 4, 5
    symbols = tuple(RateSymbol(n) for n in ("Rw1", "Rv1", "Rw2", "Rv2"))
    ineqs = (
        leq({"Rv1": 1}, _I({Y1}, {V1}, {W1, W2})),
        leq({"Rw1": 1, "Rv1": 1}, _I({Y1}, {W1, V1}, {W2})),
        leq({"Rv1": 1, "Rw2": 1}, _I({Y1}, {V1, W2}, {W1})),
        leq({"Rw1": 1, "Rv1": 1, "Rw2": 1}, _I({Y1}, {W1, V1, W2})),
        leq({"Rv2": 1}, _I({Y2}, {V2}, {W1, W2})),
        leq({"Rw2": 1, "Rv2": 1}, _I({Y2}, {W2, V2}, {W1})),
        leq({"Rv2": 1, "Rw1": 1}, _I({Y2}, {V2, W1}, {W2})),
        leq({"Rw2": 1, "Rv2": 1, "Rw1": 1}, _I({Y2}, {W1, W2, V2})),
    )
    region = RateRegion(
        symbols,
        ineqs,
        identities=_IFC_IDENTITIES + (MarginalEquality(frozenset({0, 1, 2, 3})),),
    )
    if split is not None:
        region = apply_split(region, split)
    return region


# -- splits and specialization -------------------------------------------

def apply_split(region: RateRegion, split: SplitSpec) -> RateRegion:
    """Attach per-receiver rate symbols Rp1, Rp2 via the splitting map.

    Broadcast layout (symbols R0, R1, R2): Rp1 = R1 + alpha*R0 and
    Rp2 = R2 + (1-alpha)*R0.  Interference layout (Rw/Rv pairs):
    Rp_i = Rw_i + Rv_i; ``beta`` governs how a target pair would be
    split back into components, which the re-assembly map does not need.
    """
    names = set(region.names())
    if {"Rp1", "Rp2"} & names:
        raise DomainError("region already carries split symbols")
    if {"R0", "R1", "R2"} <= names:
        rows = {
            "Rp1": {"R1": Fraction(1), "R0": split.alpha},
            "Rp2": {"R2": Fraction(1), "R0": Fraction(1) - split.alpha},
        }
    elif {"Rw1", "Rv1", "Rw2", "Rv2"} <= names:
        rows = {
            "Rp1": {"Rw1": Fraction(1), "Rv1": Fraction(1)},
            "Rp2": {"Rw2": Fraction(1), "Rv2": Fraction(1)},
        }
    else:
        raise DomainError("region symbols match no known splitting layout")
    symbols = region.symbols + (RateSymbol("Rp1", "total"), RateSymbol("Rp2", "total"))
    extra = []
    for new, combo in rows.items():
        lhs = {new: Fraction(1)}
        lhs.update({n: -c for n, c in combo.items()})
        extra.append(leq(lhs, ix.ZERO))
        extra.append(geq(lhs, ix.ZERO))
    return RateRegion(
        symbols,
        region.inequalities + tuple(extra),
        region.identities,
        region.constants,
    )


def specialize_equal_laws(region: RateRegion) -> RateRegion:
    """Declare the encoding and codebook laws equal on all codeword variables."""
    varsets = [a.varset for iq in region.inequalities for a in iq.rhs.terms if a.kind == "XENT"]
    covered = frozenset().union(*varsets) if varsets else frozenset()
    if not covered:
        return region
    return RateRegion(
        region.symbols,
        region.inequalities,
        region.identities + (MarginalEquality(covered),),
        region.constants,
    )


# -- numeric plumbing ----------------------------------------------------

def channel_extend(
    pe: JointPmf,
    input_map: np.ndarray,
    kernel: np.ndarray,
    output_labels: tuple[str, ...],
) -> JointPmf:
    """Joint law of (codewords, channel outputs) induced by an encoding law.

    ``input_map`` assigns a channel-input symbol to each codeword tuple
    (shape = pe alphabet); ``kernel`` has the channel-input axis first
    and one axis per output.  Output variables are appended after the
    codeword variables.
    """
    imap = np.asarray(input_map, dtype=int)
    if imap.shape != pe.mass.shape:
        raise DomainError("input map shape must match the codeword alphabet")
    kern = np.asarray(kernel, dtype=float)
    if len(output_labels) != kern.ndim - 1:
        raise DomainError("kernel needs one axis per output after the input axis")
    if imap.min() < 0 or imap.max() >= kern.shape[0]:
        raise DomainError("input map symbol out of kernel range")
    rows = kern.reshape(kern.shape[0], -1)
    sums = rows.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise DomainError("channel kernel rows must sum to 1")
    joint = pe.mass[..., None] * rows[imap]
    joint = joint.reshape(pe.mass.shape + kern.shape[1:])
    n = len(pe.variables)
    variables = pe.variables + tuple(
        VariableId(n + i, lbl) for i, lbl in enumerate(output_labels)
    )
    return JointPmf(variables, joint)


SCHEME_BUILDERS: dict[str, Callable[[], RateRegion]] = {
    "bc-cm": build_bc_cm,
    "mac-cm": build_mac_cm,
    "bc": build_bc,
    "marton": build_marton,
    "ifc": build_ifc,
    "hk": build_han_kobayashi,
}
