"""Rate regions: linear inequality systems with symbolic constants.

A region is a finite list of inequalities over named rate symbols whose
right-hand sides are :class:`~supbin.infoexpr.InfoExpr` values.  All
left-hand coefficients are exact rationals, so Fourier-Motzkin
projection is a symbolic identity, not a numeric approximation.

Region comparison is symbolic: two regions are equal when each
inequality of one is derivable from the other as a nonnegative rational
combination, allowing slack from expressions that are nonnegative for
every admissible distribution pair (divergences, and conditional mutual
informations).  Plain canonical-set identity is checked first as a fast
path; the derivation check is what makes post-elimination systems with
harmless redundancies compare equal to hand-built fixtures.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import infoexpr as ix
from .exactlp import feasible as _lp_feasible
from .infoexpr import CIIdentity, Identity, InfoExpr, MarginalEquality, canonicalize
from .probcore import CODEBOOK, ENCODING, DomainError, JointPmf

__all__ = [
    "RateSymbol",
    "RateInequality",
    "RateRegion",
    "NumericPolytope",
    "Boundary2D",
    "substitute",
    "fme_eliminate",
    "simplify_symbolic",
    "region_equal",
    "instantiate",
    "contains_point",
    "numeric_fme",
    "boundary_2d",
    "region_to_json",
    "region_from_json",
    "boundary_to_csv",
]

LEQ = "<="
GEQ = ">="

MEMBERSHIP_SLACK = 1e-9


@dataclass(frozen=True)
class RateSymbol:
    """A named rate coordinate: message rate, binning rate, or total."""

    name: str
    kind: str = "message"  # message | binning | total

    def __post_init__(self):
        if self.kind not in ("message", "binning", "total"):
            raise DomainError(f"unknown rate symbol kind {self.kind!r}")


@dataclass(frozen=True)
class RateInequality:
    """``sum lhs[name] * rate  (<=|>=)  rhs`` with an exact-rational lhs."""

    lhs: tuple[tuple[str, Fraction], ...]
    sense: str
    rhs: InfoExpr

    def __post_init__(self):
        lhs = tuple((n, Fraction(c)) for n, c in self.lhs if c != 0)
        if not lhs:
            raise DomainError("inequality needs a nonempty lhs")
        if self.sense not in (LEQ, GEQ):
            raise DomainError(f"sense must be {LEQ} or {GEQ}")
        object.__setattr__(self, "lhs", lhs)

    def coeff(self, name: str) -> Fraction:
        for n, c in self.lhs:
            if n == name:
                return c
        return Fraction(0)

    def as_leq(self) -> tuple[dict[str, Fraction], InfoExpr]:
        """Coefficients and rhs in ``<=`` orientation."""
        coeffs = dict(self.lhs)
        if self.sense == LEQ:
            return coeffs, self.rhs
        return {n: -c for n, c in coeffs.items()}, -self.rhs

    def render(self) -> str:
        parts = []
        for n, c in self.lhs:
            sign = "+" if c > 0 else "-"
            mag = "" if abs(c) == 1 else f"{abs(c)} "
            parts.append(f"{sign} {mag}{n}")
        lhs = " ".join(parts).lstrip("+ ")
        return f"{lhs} {self.sense} {self.rhs.render()}"


def _make_ineq(coeffs: dict[str, Fraction], sense: str, rhs: InfoExpr, order: Sequence[str]) -> RateInequality:
    """Normalize: symbols in region order, leading coefficient positive."""
    items = [(n, coeffs[n]) for n in order if coeffs.get(n, 0) != 0]
    if not items:
        raise DomainError("inequality lost all symbols")
    if items[0][1] < 0:
        items = [(n, -c) for n, c in items]
        rhs = -rhs
        sense = GEQ if sense == LEQ else LEQ
    return RateInequality(tuple(items), sense, rhs)


@dataclass(frozen=True)
class RateRegion:
    """Inequality system over rate symbols, with distribution identities in force.

    Nonnegativity of every message/binning symbol is implied and added
    at construction.  ``constants`` is optional metadata naming the
    divergence constants a scheme builder used (handy for specialization
    checks); it does not affect the geometry.
    """

    symbols: tuple[RateSymbol, ...]
    inequalities: tuple[RateInequality, ...]
    identities: tuple[Identity, ...] = ()
    constants: tuple[tuple[str, InfoExpr], ...] = ()

    def __post_init__(self):
        symbols = tuple(self.symbols)
        names = [s.name for s in symbols]
        if len(set(names)) != len(names):
            raise DomainError("rate symbol names must be unique")
        order = names
        ineqs = []
        seen = set()
        for iq in self.inequalities:
            unknown = {n for n, _ in iq.lhs} - set(names)
            if unknown:
                raise DomainError(f"inequality uses unknown symbols {sorted(unknown)}")
            iq = _make_ineq(dict(iq.lhs), iq.sense, iq.rhs, order)
            key = (iq.lhs, iq.sense, iq.rhs)
            if key not in seen:
                seen.add(key)
                ineqs.append(iq)
        # Implied nonnegativity for rate and binning coordinates.
        for s in symbols:
            if s.kind in ("message", "binning"):
                iq = RateInequality(((s.name, Fraction(1)),), GEQ, ix.ZERO)
                key = (iq.lhs, iq.sense, iq.rhs)
                if key not in seen:
                    seen.add(key)
                    ineqs.append(iq)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "inequalities", tuple(ineqs))
        object.__setattr__(self, "identities", tuple(self.identities))
        object.__setattr__(self, "constants", tuple(self.constants))

    def symbol(self, name: str) -> RateSymbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise DomainError(f"unknown rate symbol {name!r}")

    def names(self) -> list[str]:
        return [s.name for s in self.symbols]

    def constant(self, name: str) -> InfoExpr:
        for n, e in self.constants:
            if n == name:
                return e
        raise DomainError(f"unknown constant {name!r}")

    def render(self) -> str:
        return "\n".join(iq.render() for iq in self.inequalities)


def leq(coeffs: dict[str, int | Fraction], rhs: InfoExpr) -> RateInequality:
    return RateInequality(tuple((n, Fraction(c)) for n, c in coeffs.items()), LEQ, rhs)


def geq(coeffs: dict[str, int | Fraction], rhs: InfoExpr) -> RateInequality:
    return RateInequality(tuple((n, Fraction(c)) for n, c in coeffs.items()), GEQ, rhs)


# -- symbol substitution ------------------------------------------------

def substitute(
    region: RateRegion,
    victim: str,
    replacement: dict[str, int | Fraction],
    rhs_shift: InfoExpr = ix.ZERO,
) -> RateRegion:
    """Replace ``victim`` by ``sum replacement[name]*name + rhs_shift`` everywhere.

    Used for the ``L = R + binning-rate`` bookkeeping substitutions; the
    victim symbol disappears from the region.
    """
    region.symbol(victim)
    repl = {n: Fraction(c) for n, c in replacement.items()}
    for n in repl:
        if n == victim:
            raise DomainError("replacement must not mention the victim")
    new_symbols = tuple(s for s in region.symbols if s.name != victim)
    known = {s.name for s in new_symbols}
    if set(repl) - known:
        raise DomainError(f"replacement uses unknown symbols {sorted(set(repl) - known)}")
    order = [s.name for s in new_symbols]
    out = []
    for iq in region.inequalities:
        coeffs, rhs = iq.as_leq()
        a = coeffs.pop(victim, Fraction(0))
        if a != 0:
            for n, c in repl.items():
                coeffs[n] = coeffs.get(n, Fraction(0)) + a * c
            rhs = rhs - rhs_shift.scale(a)
        if any(c != 0 for c in coeffs.values()):
            out.append(_make_ineq(coeffs, LEQ, rhs, order))
    return RateRegion(new_symbols, tuple(out), region.identities, region.constants)


# -- Fourier-Motzkin ----------------------------------------------------

def fme_eliminate(region: RateRegion, victim: str) -> RateRegion:
    """Exact projection of the region onto the remaining symbols."""
    region.symbol(victim)
    uppers = []  # victim coeff > 0 in <= form
    lowers = []  # victim coeff < 0 in <= form
    keep = []
    for iq in region.inequalities:
        coeffs, rhs = iq.as_leq()
        a = coeffs.get(victim, Fraction(0))
        if a > 0:
            uppers.append((coeffs, rhs, a))
        elif a < 0:
            lowers.append((coeffs, rhs, a))
        else:
            keep.append((coeffs, rhs))
    new_symbols = tuple(s for s in region.symbols if s.name != victim)
    order = [s.name for s in new_symbols]
    out = []
    for coeffs, rhs in keep:
        if any(n != victim and c != 0 for n, c in coeffs.items()):
            out.append(_make_ineq(coeffs, LEQ, rhs, order))
    for (cu, ru, au), (cl, rl, al) in itertools.product(uppers, lowers):
        coeffs: dict[str, Fraction] = {}
        for n in set(cu) | set(cl):
            c = cu.get(n, Fraction(0)) / au + cl.get(n, Fraction(0)) / (-al)
            if n != victim and c != 0:
                coeffs[n] = c
        rhs = ru.scale(Fraction(1, 1) / au) + rl.scale(Fraction(1, 1) / (-al))
        if coeffs:
            out.append(_make_ineq(coeffs, LEQ, rhs, order))
        elif rhs.is_zero():
            continue
        # a pure-constant consequence (0 <= expr) carries no rate content; drop
    return RateRegion(new_symbols, tuple(out), region.identities, region.constants)


def fme_eliminate_all(region: RateRegion, victims: Iterable[str]) -> RateRegion:
    out = region
    for v in victims:
        out = fme_eliminate(out, v)
    return out


# -- nonnegativity certificates -----------------------------------------

def _divergence_certificates(varsets: set[frozenset[int]]) -> list[InfoExpr]:
    """All conditional divergences over the variables seen in XENT atoms."""
    universe = sorted(set().union(*varsets)) if varsets else []
    certs = []
    for r in range(1, len(universe) + 1):
        for of in itertools.combinations(universe, r):
            rest = [v for v in universe if v not in of]
            for k in range(len(rest) + 1):
                for given in itertools.combinations(rest, k):
                    certs.append(ix.expr_kl_cond(of, given))
    return certs


def _mi_certificates(universe: Sequence[int]) -> list[InfoExpr]:
    """Conditional mutual informations (pairs of singletons) under both labels."""
    certs = []
    for label in (CODEBOOK, ENCODING):
        for a, b in itertools.combinations(universe, 2):
            rest = [v for v in universe if v not in (a, b)]
            for k in range(len(rest) + 1):
                for given in itertools.combinations(rest, k):
                    certs.append(ix.expr_mutual_information(label, {a}, {b}, given))
    return certs


def _certificates(exprs: list[InfoExpr], identities: Sequence[Identity]) -> list[InfoExpr]:
    atoms = {a for e in exprs for a in e.terms}
    xent_sets = {a.varset for a in atoms if a.kind == "XENT"}
    universe = sorted({v for a in atoms for v in a.varset})
    raw = _divergence_certificates(xent_sets) + _mi_certificates(universe)
    present = set(atoms)
    out = []
    seen = set()
    for c in raw:
        c = canonicalize(c, identities)
        if c.is_zero() or c in seen:
            continue
        if not set(c.terms) <= present:
            continue  # would introduce atoms the systems never mention
        seen.add(c)
        out.append(c)
    return out


# -- symbolic implication and equality ----------------------------------

def _implied(
    target: tuple[dict[str, Fraction], InfoExpr],
    system: list[tuple[dict[str, Fraction], InfoExpr]],
    certs: list[InfoExpr],
    names: Sequence[str],
) -> bool:
    """Is target derivable as nonneg combo of system plus nonneg certificates?"""
    t_coeffs, t_rhs = target
    atoms = sorted(
        {a for _, r in system for a in r.terms}
        | set(t_rhs.terms)
        | {a for c in certs for a in c.terms},
        key=lambda a: a.sort_key(),
    )
    rows: list[list[Fraction]] = []
    b: list[Fraction] = []
    ncols = len(system) + len(certs) + 1  # + scalar slack
    for n in names:
        rows.append(
            [s[0].get(n, Fraction(0)) for s in system]
            + [Fraction(0)] * (len(certs) + 1)
        )
        b.append(t_coeffs.get(n, Fraction(0)))
    for a in atoms:
        rows.append(
            [s[1].terms.get(a, Fraction(0)) for s in system]
            + [c.terms.get(a, Fraction(0)) for c in certs]
            + [Fraction(0)]
        )
        b.append(t_rhs.terms.get(a, Fraction(0)))
    rows.append(
        [s[1].scalar for s in system] + [c.scalar for c in certs] + [Fraction(1)]
    )
    b.append(t_rhs.scalar)
    return _lp_feasible(rows, b)


def _canonical_leq_system(region: RateRegion, identities: Sequence[Identity]):
    out = []
    seen = set()
    for iq in region.inequalities:
        coeffs, rhs = iq.as_leq()
        rhs = canonicalize(rhs, identities)
        key = (tuple(sorted(coeffs.items())), rhs)
        if key not in seen:
            seen.add(key)
            out.append((coeffs, rhs))
    return out


def _sort_key(item, names):
    coeffs, rhs = item
    return (tuple(coeffs.get(n, Fraction(0)) for n in names), rhs.render())


def _irredundant(system, certs, names):
    """Drop every inequality derivable from the rest (deterministic order)."""
    current = sorted(system, key=lambda it: _sort_key(it, names))
    i = 0
    while i < len(current):
        rest = current[:i] + current[i + 1:]
        if rest and _implied(current[i], rest, certs, names):
            current.pop(i)
        else:
            i += 1
    return current


def simplify_symbolic(region: RateRegion) -> RateRegion:
    """Remove duplicates and pairwise-dominated inequalities.

    Dominance is deliberately conservative: identical lhs, and an rhs
    gap that is certifiably nonnegative (a combination of divergence /
    conditional-MI certificates).  Subtler redundancy is left in place.
    """
    system = _canonical_leq_system(region, region.identities)
    certs = _certificates([r for _, r in system], region.identities)
    names = region.names()
    keep = []
    for i, (ci, ri) in enumerate(system):
        dominated = False
        for j, (cj, rj) in enumerate(system):
            if i == j or ci != cj:
                continue
            gap = ri - rj  # ri = rj + gap with gap >= 0 makes i redundant
            if gap.is_zero():
                if j < i:
                    dominated = True
                    break
                continue
            if _cert_cone_member(gap, certs):
                dominated = True
                break
        if not dominated:
            keep.append((ci, ri))
    order = names
    ineqs = tuple(_make_ineq(dict(c), LEQ, r, order) for c, r in keep)
    return RateRegion(region.symbols, ineqs, region.identities, region.constants)


def _cert_cone_member(expr: InfoExpr, certs: list[InfoExpr]) -> bool:
    """Is expr a nonneg combination of certificates (plus nonneg scalar)?"""
    return _implied(({}, expr), [], certs, [])


def region_equal(a: RateRegion, b: RateRegion, extra_identities: Sequence[Identity] = ()) -> bool:
    """Symbolic equality of two regions over the same rate symbols.

    Canonicalizes both systems under the union of their declared
    identities, strips redundancy, and compares: equal iff the two
    irredundant cores are identical as sets.  Redundancy and comparison
    both use exact rational derivability with nonnegativity
    certificates, so e.g. a region straight out of Fourier-Motzkin
    compares equal to its hand-simplified form.
    """
    if {(s.name, s.kind) for s in a.symbols} != {(s.name, s.kind) for s in b.symbols}:
        raise DomainError("regions must share their rate symbols")
    identities = _merge_identities(
        list(a.identities) + list(b.identities) + list(extra_identities)
    )
    names = sorted(a.names())
    sys_a = _canonical_leq_system(a, identities)
    sys_b = _canonical_leq_system(b, identities)
    certs = _certificates([r for _, r in sys_a + sys_b], identities)
    core_a = _irredundant(sys_a, certs, names)
    core_b = _irredundant(sys_b, certs, names)
    def freeze(sys):
        return {(tuple(sorted(c.items())), r) for c, r in sys}
    if freeze(core_a) == freeze(core_b):
        return True
    # Cores may differ in presentation while still being mutually derivable.
    for item in core_a:
        if not _implied(item, core_b, certs, names):
            return False
    for item in core_b:
        if not _implied(item, core_a, certs, names):
            return False
    return True


def _merge_identities(identities: Iterable[Identity]) -> tuple[Identity, ...]:
    out = []
    seen = set()
    for ident in sorted(identities, key=lambda i: i.sort_key()):
        if ident.sort_key() not in seen:
            seen.add(ident.sort_key())
            out.append(ident)
    return tuple(out)


# -- numeric instantiation ----------------------------------------------

@dataclass(frozen=True)
class NumericPolytope:
    """Plain float system ``A x <= b`` over named coordinates."""

    names: tuple[str, ...]
    A: np.ndarray
    b: np.ndarray
    infeasible: bool = False

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float).reshape(-1, len(self.names))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)


def instantiate(region: RateRegion, pe: JointPmf, pc: JointPmf) -> NumericPolytope:
    """Evaluate every rhs; vacuous (+inf upper) bounds are dropped, an
    unsatisfiable (+inf lower) bound marks the polytope infeasible."""
    names = tuple(region.names())
    rows, rhs = [], []
    infeasible = False
    for iq in region.inequalities:
        coeffs, r = iq.as_leq()
        val = ix.evaluate(r, pe, pc)
        if val == float("inf"):
            continue  # vacuously true upper bound
        if val == float("-inf"):
            infeasible = True
            continue
        rows.append([float(coeffs.get(n, Fraction(0))) for n in names])
        rhs.append(val)
    return NumericPolytope(names, np.array(rows), np.array(rhs), infeasible)


def contains_point(poly: NumericPolytope, point: Sequence[float], slack: float = MEMBERSHIP_SLACK) -> bool:
    x = np.asarray(point, dtype=float)
    if x.shape != (len(poly.names),):
        raise DomainError(f"point dimension {x.shape} != {len(poly.names)}")
    if poly.infeasible:
        return False
    if poly.A.size == 0:
        return True
    return bool(np.all(poly.A @ x <= poly.b + slack))


def _dedupe_rows(A: np.ndarray, b: np.ndarray, tol: float = 1e-9):
    """Drop duplicate rows and rows dominated by one with the same lhs."""
    if len(b) == 0:
        return A, b, []
    norms = np.max(np.abs(A), axis=1)
    norms[norms == 0] = 1.0
    An = A / norms[:, None]
    bn = b / norms
    order = np.lexsort(np.column_stack([bn, An]).T[::-1])
    keep = []
    for i in order:
        if keep and np.allclose(An[keep[-1]], An[i], atol=tol) and bn[keep[-1]] <= bn[i] + tol:
            continue
        keep.append(int(i))
    keep = sorted(keep)
    return A[keep], b[keep], keep


def numeric_fme(poly: NumericPolytope, keep: Sequence[str], tol: float = 1e-12) -> NumericPolytope:
    """Float Fourier-Motzkin projection onto the ``keep`` coordinates.

    Growth is controlled with Imbert's acceleration: each derived row
    remembers which original rows it combines, and a row built from more
    than ``eliminated + 1`` originals is provably redundant and dropped.
    """
    names = list(poly.names)
    for n in keep:
        if n not in names:
            raise DomainError(f"unknown coordinate {n!r}")
    A, b = np.array(poly.A), np.array(poly.b)
    infeasible = poly.infeasible
    hist = [frozenset([i]) for i in range(len(b))]
    elim = [frozenset() for _ in range(len(b))]
    victims = [n for n in names if n not in keep]
    while victims:
        # cheapest victim first (fewest pairings)
        costs = []
        for v in victims:
            col = A[:, names.index(v)]
            costs.append((int((col > tol).sum()) * int((col < -tol).sum()), v))
        _, victim = min(costs)
        vi = names.index(victim)
        col = A[:, vi]
        pos = np.where(col > tol)[0]
        neg = np.where(col < -tol)[0]
        zer = np.where(np.abs(col) <= tol)[0]
        rows = [np.delete(A[k], vi)[None, :] for k in zer]
        rhs = [b[k] for k in zer]
        nh = [hist[k] for k in zer]
        ne = [elim[k] for k in zer]
        for i in pos:
            ai = col[i]
            for j in neg:
                h = hist[i] | hist[j]
                e = elim[i] | elim[j] | {victim}
                if len(h) > len(e) + 1:
                    continue
                aj = -col[j]
                row = A[i] / ai + A[j] / aj
                rows.append(np.delete(row, vi)[None, :])
                rhs.append(b[i] / ai + b[j] / aj)
                nh.append(h)
                ne.append(e)
        A = np.vstack(rows) if rows else np.zeros((0, len(names) - 1))
        b = np.asarray(rhs, dtype=float)
        hist, elim = nh, ne
        names.pop(vi)
        victims.remove(victim)
        if len(b):
            nz = np.any(np.abs(A) > tol, axis=1)
            if np.any(b[~nz] < -1e-9):
                infeasible = True
            A, b = A[nz], b[nz]
            hist = [h for h, z in zip(hist, nz) if z]
            elim = [e for e, z in zip(elim, nz) if z]
            A, b, keep_idx = _dedupe_rows(A, b)
            hist = [hist[k] for k in keep_idx]
            elim = [elim[k] for k in keep_idx]
    perm = [names.index(n) for n in keep]
    return NumericPolytope(tuple(keep), A[:, perm], b, infeasible)


@dataclass(frozen=True)
class Boundary2D:
    """Support sweep of a 2-D projection.

    ``directions`` are angles theta in radians; ``points`` the argmax
    vertex per direction (nan when unbounded); ``support`` the support
    value per direction; ``vertices`` the deduped Pareto vertices in
    angular order.
    """

    axes: tuple[str, str]
    directions: np.ndarray
    points: np.ndarray       # (n, 2)
    support: np.ndarray      # (n,)
    unbounded: np.ndarray    # (n,) bool
    vertices: np.ndarray     # (m, 2)


def _polygon_vertices(A: np.ndarray, b: np.ndarray, slack: float = MEMBERSHIP_SLACK) -> np.ndarray:
    verts = []
    m = len(b)
    for i in range(m):
        for j in range(i + 1, m):
            M = np.array([A[i], A[j]])
            det = np.linalg.det(M)
            if abs(det) < 1e-12:
                continue
            v = np.linalg.solve(M, np.array([b[i], b[j]]))
            if np.all(A @ v <= b + slack * (1 + np.abs(b))):
                verts.append(v)
    if not verts:
        return np.zeros((0, 2))
    V = np.array(verts)
    # dedupe
    keep = []
    for v in V:
        if not any(np.allclose(v, V[k], atol=1e-9) for k in keep):
            keep.append(int(np.where((V == v).all(axis=1))[0][0]))
    V = V[sorted(set(keep))]
    return V


def _direction_bounded(A: np.ndarray, d: np.ndarray) -> bool:
    """Bounded iff no recession ray u (A u <= 0) has d . u > 0."""
    if len(A) == 0:
        return False
    cands = []
    for a in A:
        n = np.linalg.norm(a)
        if n == 0:
            continue
        r = np.array([-a[1], a[0]]) / n
        cands.extend([r, -r])
    cands.append(d)
    for u in cands:
        if np.all(A @ u <= 1e-12) and float(d @ u) > 1e-12:
            return False
    return True


def boundary_2d(
    poly: NumericPolytope,
    axes: tuple[str, str],
    directions: int = 720,
) -> Boundary2D:
    """Upper-right Pareto frontier of the projection onto two coordinates.

    Sweeps ``directions`` support directions through the open first
    quadrant; directions in which the projection is unbounded are
    flagged rather than raised.
    """
    if len(axes) != 2:
        raise DomainError("boundary_2d needs exactly two axes")
    proj = numeric_fme(poly, list(axes))
    thetas = (np.arange(directions) + 0.5) * (np.pi / 2) / directions
    ds = np.column_stack([np.cos(thetas), np.sin(thetas)])
    verts = _polygon_vertices(proj.A, proj.b)
    points = np.full((directions, 2), np.nan)
    support = np.full(directions, np.nan)
    unbounded = np.zeros(directions, dtype=bool)
    if proj.infeasible:
        return Boundary2D(tuple(axes), thetas, points, support, unbounded, np.zeros((0, 2)))
    hull_pts = []
    for k, d in enumerate(ds):
        if not _direction_bounded(proj.A, d):
            unbounded[k] = True
            continue
        if len(verts) == 0:
            continue
        vals = verts @ d
        best = int(np.argmax(vals))
        points[k] = verts[best]
        support[k] = vals[best]
        hull_pts.append(best)
    chosen = sorted(set(hull_pts))
    V = verts[chosen] if chosen else np.zeros((0, 2))
    if len(V):
        ang = np.arctan2(V[:, 1], V[:, 0] + 1e-300)
        V = V[np.argsort(-ang)]  # sweep from y-axis toward x-axis
    return Boundary2D(tuple(axes), thetas, points, support, unbounded, V)


# -- serialization -------------------------------------------------------

def _expr_to_json(e: InfoExpr) -> dict:
    terms = []
    for a, c in e.sorted_terms():
        terms.append(
            {
                "kind": a.kind,
                "label": a.label,
                "varset": sorted(a.varset),
                "num": c.numerator,
                "den": c.denominator,
            }
        )
    return {"terms": terms, "scalar": {"num": e.scalar.numerator, "den": e.scalar.denominator}}


def _expr_from_json(d: dict) -> InfoExpr:
    terms = {}
    for t in d["terms"]:
        a = ix.Atom(t["kind"], frozenset(t["varset"]), t.get("label"))
        terms[a] = Fraction(t["num"], t["den"])
    return InfoExpr(terms, Fraction(d["scalar"]["num"], d["scalar"]["den"]))


def region_to_json(region: RateRegion) -> dict:
    idents = []
    for i in region.identities:
        if isinstance(i, CIIdentity):
            idents.append(
                {"type": "ci", "label": i.label, "a": sorted(i.a), "b": sorted(i.b), "given": sorted(i.given)}
            )
        else:
            idents.append({"type": "marginal-equality", "varset": sorted(i.varset)})
    return {
        "symbols": [{"name": s.name, "kind": s.kind} for s in region.symbols],
        "inequalities": [
            {
                "lhs": [{"name": n, "num": c.numerator, "den": c.denominator} for n, c in iq.lhs],
                "sense": iq.sense,
                "rhs": _expr_to_json(iq.rhs),
            }
            for iq in region.inequalities
        ],
        "identities": idents,
    }


def region_from_json(doc: dict) -> RateRegion:
    symbols = tuple(RateSymbol(s["name"], s["kind"]) for s in doc["symbols"])
    ineqs = []
    for d in doc["inequalities"]:
        lhs = tuple((t["name"], Fraction(t["num"], t["den"])) for t in d["lhs"])
        ineqs.append(RateInequality(lhs, d["sense"], _expr_from_json(d["rhs"])))
    idents: list[Identity] = []
    for d in doc["identities"]:
        if d["type"] == "ci":
            idents.append(CIIdentity(d["label"], frozenset(d["a"]), frozenset(d["b"]), frozenset(d["given"])))
        else:
            idents.append(MarginalEquality(frozenset(d["varset"])))
    return RateRegion(symbols, tuple(ineqs), tuple(idents))


def boundary_to_csv(boundary: Boundary2D) -> str:
    lines = ["x,y"]
    for x, y in boundary.vertices:
        lines.append(f"{x + 0.0:.9g},{y + 0.0:.9g}")
    return "\n".join(lines) + "\n"
