"""End-to-end random-coding simulation of the binned superposition scheme.

One trial: draw a fresh codebook (base codewords plus satellites drawn
conditionally on their base), pick bin indices making the selected pair
typical under the encoding law, push the deterministic channel input
through the channel kernel, and decode both receivers by exhaustive
joint-typicality scans.

Codebook sizes are 2^{round(N*R)}.  When the full codebook fits the
memory guard every stage is simulated directly.  When it does not but
the bin sizes are trivial (no binning), the decoder-1 error event is
sampled exactly in distribution instead: the wrong-codeword hit
probability is an exact type sum (see :mod:`supbin.ensemble`), so the
Bernoulli draw has the true ensemble probability even when the codebook
holds 2^400 entries.  Anything else is refused.

Reproducibility: every random stage draws from
``np.random.default_rng([seed, trial, stage])``, so trial results are
independent of execution order and worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import ensemble, probcore
from .probcore import DomainError, JointPmf, VariableId
from .schemes import channel_extend
from .typicality import Sequence, TypicalityParams, empirical_type, is_typical

__all__ = [
    "SimConfig",
    "Codebook",
    "TrialReport",
    "CampaignReport",
    "ResourceRefusal",
    "MEMORY_GUARD",
    "generate_codebook",
    "encode",
    "transmit",
    "decode1",
    "decode2",
    "run_trial",
    "run_campaign",
    "covering_experiment",
    "inaccuracy_experiment",
    "wilson_interval",
]

MEMORY_GUARD = 2 ** 26

STAGE_CODEBOOK = 0
STAGE_ENCODE = 1
STAGE_CHANNEL = 2
STAGE_ANALYTIC = 3

_TOL = 1e-12


class ResourceRefusal(RuntimeError):
    """A requested experiment exceeds the enumeration budget."""


@dataclass(frozen=True)
class SimConfig:
    """Everything one campaign needs; immutable and hashable by content.

    ``pe``/``pc`` are laws over the two codeword variables (base first).
    ``channel`` maps a channel-input symbol to the two outputs:
    axis 0 is the input, axes 1..2 the outputs.  ``input_map`` assigns
    an input symbol to each codeword pair.  ``margin`` is the slack
    added to thresholds in sweep presets, standing in for the vanishing
    typicality penalty.
    """

    n: int
    rates: Mapping[str, float]  # R1, R2, Rho1, Rho2
    epsilon: float
    trials: int
    seed: int
    pe: JointPmf
    pc: JointPmf
    channel: np.ndarray
    input_map: np.ndarray
    margin: float = 0.1
    zero_support_strict: bool = True

    def __post_init__(self):
        if self.n <= 0 or self.n > 5000:
            raise DomainError("blocklength must be in 1..5000")
        if self.trials < 0:
            raise DomainError("trial count must be nonnegative")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if self.margin < 0:
            raise DomainError("margin must be nonnegative")
        rates = dict(self.rates)
        for k in ("R1", "R2", "Rho1", "Rho2"):
            rates.setdefault(k, 0.0)
            if rates[k] < 0:
                raise DomainError(f"rate {k} must be nonnegative")
        unknown = set(rates) - {"R1", "R2", "Rho1", "Rho2"}
        if unknown:
            raise DomainError(f"unknown rate symbols {sorted(unknown)}")
        object.__setattr__(self, "rates", rates)
        if self.pe.mass.shape != self.pc.mass.shape or len(self.pe.variables) != 2:
            raise DomainError("pe and pc must share a two-variable codeword alphabet")
        chan = np.asarray(self.channel, dtype=float)
        if chan.ndim != 3:
            raise DomainError("channel kernel needs input, Y1 and Y2 axes")
        rows = chan.reshape(chan.shape[0], -1)
        if np.any(np.abs(rows.sum(axis=1) - 1.0) > 1e-9) or np.any(chan < 0):
            raise DomainError("channel kernel rows must be pmfs")
        chan = np.ascontiguousarray(chan)
        chan.setflags(write=False)
        imap = np.asarray(self.input_map, dtype=np.int64)
        if imap.shape != self.pe.mass.shape:
            raise DomainError("input map shape must match the codeword alphabet")
        if imap.min() < 0 or imap.max() >= chan.shape[0]:
            raise DomainError("input map symbol outside the channel input alphabet")
        imap = np.ascontiguousarray(imap)
        imap.setflags(write=False)
        object.__setattr__(self, "channel", chan)
        object.__setattr__(self, "input_map", imap)
        TypicalityParams(self.epsilon)  # validates the radius

    def size(self, key: str) -> int:
        return 2 ** int(round(self.n * self.rates[key]))

    def log2_size(self, key: str) -> int:
        return int(round(self.n * self.rates[key]))

    @property
    def params(self) -> TypicalityParams:
        return TypicalityParams(self.epsilon, self.zero_support_strict)

    def full_law(self) -> JointPmf:
        """Encoding-law joint over (U1, U2, Y1, Y2)."""
        return channel_extend(self.pe, self.input_map, self.channel, ("Y1", "Y2"))


@dataclass(frozen=True)
class Codebook:
    """base[w1, b1] is a U1-sequence; sat[w2, b2, w1, b1] a U2-sequence."""

    base: np.ndarray  # (M1, B1, N)
    sat: np.ndarray   # (M2, B2, M1, B1, N)


@dataclass(frozen=True)
class TrialReport:
    trial: int
    encode_ok: bool
    b1: int
    b2: int
    dec1_ok: bool
    dec2_ok: bool
    dec1_ambiguous: bool = False
    dec2_ambiguous: bool = False
    typical_bins: int = 0
    analytic: bool = False


@dataclass(frozen=True)
class CampaignReport:
    trials: tuple[TrialReport, ...]
    encode_rate: float
    encode_ci: tuple[float, float]
    dec1_rate: float
    dec1_ci: tuple[float, float]
    dec2_rate: float
    dec2_ci: tuple[float, float]
    mean_typical_bins: float
    sizes: dict


def wilson_interval(successes: int, total: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion at 95% coverage."""
    if total == 0:
        return (0.0, 1.0)
    phat = successes / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _rng(cfg: SimConfig, trial: int, stage: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, trial, stage])


def _sample_iid(rng: np.random.Generator, pmf_flat: np.ndarray, shape) -> np.ndarray:
    cdf = np.cumsum(pmf_flat)
    cdf[-1] = 1.0
    u = rng.random(shape)
    return np.searchsorted(cdf, u, side="right").astype(np.int64)


def _codebook_cells(cfg: SimConfig) -> int:
    # stored symbols, not codeword slots: every slot is a length-n array
    return cfg.size("R1") * cfg.size("Rho1") * cfg.size("R2") * cfg.size("Rho2") * cfg.n


def generate_codebook(cfg: SimConfig, trial: int) -> Codebook:
    """Fresh codebook for one trial, drawn from the codebook law."""
    if _codebook_cells(cfg) > MEMORY_GUARD:
        raise ResourceRefusal(
            f"codebook holds {_codebook_cells(cfg)} symbols, "
            f"budget is {MEMORY_GUARD}"
        )
    rng = _rng(cfg, trial, STAGE_CODEBOOK)
    m1, b1 = cfg.size("R1"), cfg.size("Rho1")
    m2, b2 = cfg.size("R2"), cfg.size("Rho2")
    p1 = cfg.pc.mass.sum(axis=1)
    base = _sample_iid(rng, p1, (m1, b1, cfg.n))
    cond = probcore.conditional(cfg.pc, of=[1], given=[0]).table  # (c1, c2)
    cdfs = np.cumsum(cond, axis=1)
    cdfs[:, -1] = 1.0
    u = rng.random((m2, b2, m1, b1, cfg.n))
    sat = (u[..., None] > cdfs[base][None, None, ...]).sum(axis=-1).astype(np.int64)
    return Codebook(base=base, sat=sat)


def _l1_hits(
    rows: np.ndarray,
    n_cells: int,
    target: np.ndarray,
    n: int,
    params: TypicalityParams,
) -> np.ndarray:
    """Boolean typicality per row of combined symbol indices (shape (K, N))."""
    k = rows.shape[0]
    flat = rows + (np.arange(k, dtype=np.int64) * n_cells)[:, None]
    counts = np.bincount(flat.ravel(), minlength=k * n_cells).reshape(k, n_cells)
    dev = np.abs(counts / n - target.reshape(-1)[None, :]).sum(axis=1)
    ok = dev <= params.epsilon + _TOL
    if params.zero_support_strict:
        zero = target.reshape(-1) <= 0
        if zero.any():
            ok &= (counts[:, zero] == 0).all(axis=1)
    return ok


def encode(cb: Codebook, cfg: SimConfig, w1: int, w2: int, trial: int):
    """First bin pair (row-major) whose codeword pair is typical under pe.

    Returns ``(b1, b2, encode_ok, typical_bins)``; on failure the bins
    are drawn uniformly at random, as the scheme prescribes.
    """
    b1n, b2n = cfg.size("Rho1"), cfg.size("Rho2")
    c2 = cfg.pe.mass.shape[1]
    u1 = cb.base[w1]                      # (B1, N)
    u2 = cb.sat[w2, :, w1, :, :]          # (B2, B1, N)
    combined = u1[None, :, :] * c2 + u2   # (B2, B1, N)
    rows = combined.transpose(1, 0, 2).reshape(b1n * b2n, cfg.n)
    ok = _l1_hits(rows, cfg.pe.mass.size, cfg.pe.mass, cfg.n, cfg.params)
    hits = np.flatnonzero(ok)
    if len(hits):
        first = int(hits[0])
        return first // b2n, first % b2n, True, int(ok.sum())
    rng = _rng(cfg, trial, STAGE_ENCODE)
    return int(rng.integers(b1n)), int(rng.integers(b2n)), False, 0


def transmit(cb: Codebook, cfg: SimConfig, w1: int, b1: int, w2: int, b2: int, trial: int):
    """Channel outputs (y1, y2) for the selected codeword pair."""
    u1 = cb.base[w1, b1]
    u2 = cb.sat[w2, b2, w1, b1]
    x = cfg.input_map[u1, u2]
    rng = _rng(cfg, trial, STAGE_CHANNEL)
    ny1, ny2 = cfg.channel.shape[1], cfg.channel.shape[2]
    rows = cfg.channel.reshape(cfg.channel.shape[0], -1)
    cdfs = np.cumsum(rows, axis=1)
    cdfs[:, -1] = 1.0
    u = rng.random(cfg.n)
    joint = (u[:, None] > cdfs[x]).sum(axis=1)
    return (joint // ny2).astype(np.int64), (joint % ny2).astype(np.int64)


def decode1(cb: Codebook, cfg: SimConfig, y1: np.ndarray):
    """Scan every (w1, b1) for joint typicality of (U1, Y1).

    Returns ``(status, w1_hat, b1_hat)`` with status in
    {"ok", "none", "ambiguous"}; distinct bins of one message count as
    a single hit.
    """
    full = cfg.full_law()
    target = probcore._marginal_array(full, [0, 2])
    ny1 = target.shape[1]
    m1, b1n = cfg.size("R1"), cfg.size("Rho1")
    rows = cb.base.reshape(m1 * b1n, cfg.n) * ny1 + y1[None, :]
    ok = _l1_hits(rows, target.size, target, cfg.n, cfg.params)
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        return "none", -1, -1
    messages = np.unique(hits // b1n)
    if len(messages) > 1:
        return "ambiguous", -1, -1
    return "ok", int(messages[0]), int(hits[0] % b1n)


def decode2(cb: Codebook, cfg: SimConfig, y2: np.ndarray):
    """Scan every (w1, b1, w2, b2) for joint typicality of (U1, U2, Y2)."""
    full = cfg.full_law()
    target = probcore._marginal_array(full, [0, 1, 3])
    c2, ny2 = target.shape[1], target.shape[2]
    m1, b1n = cfg.size("R1"), cfg.size("Rho1")
    m2, b2n = cfg.size("R2"), cfg.size("Rho2")
    u1 = cb.base.reshape(1, 1, m1, b1n, cfg.n)
    combined = (u1 * c2 + cb.sat) * ny2 + y2.reshape(1, 1, 1, 1, cfg.n)
    rows = combined.reshape(m2 * b2n * m1 * b1n, cfg.n)
    ok = _l1_hits(rows, target.size, target, cfg.n, cfg.params)
    hits = np.flatnonzero(ok)
    if len(hits) == 0:
        return "none", -1, -1
    w2s = hits // (b2n * m1 * b1n)
    w1s = (hits // b1n) % m1
    pairs = np.unique(np.column_stack([w1s, w2s]), axis=0)
    if len(pairs) > 1:
        return "ambiguous", -1, -1
    return "ok", int(pairs[0, 0]), int(pairs[0, 1])


def _analytic_trial(cfg: SimConfig, trial: int) -> TrialReport:
    """Decoder-1 error event sampled exactly for unbinned huge codebooks.

    Valid when both bin sizes are 1: the transmitted pair is a single
    codebook draw, and every competing base codeword is an independent
    draw from the codebook law, so the any-wrong-hit probability is an
    exact conditional type sum given the received sequence.
    """
    rng = _rng(cfg, trial, STAGE_CODEBOOK)
    pair_flat = _sample_iid(rng, cfg.pc.mass.reshape(-1), cfg.n)
    c2 = cfg.pc.mass.shape[1]
    u1, u2 = pair_flat // c2, pair_flat % c2
    encode_ok = bool(
        _l1_hits((u1 * c2 + u2)[None, :], cfg.pe.mass.size, cfg.pe.mass, cfg.n, cfg.params)[0]
    )
    x = cfg.input_map[u1, u2]
    chan_rng = _rng(cfg, trial, STAGE_CHANNEL)
    rows = cfg.channel.reshape(cfg.channel.shape[0], -1)
    cdfs = np.cumsum(rows, axis=1)
    cdfs[:, -1] = 1.0
    draw = (chan_rng.random(cfg.n)[:, None] > cdfs[x]).sum(axis=1)
    ny2 = cfg.channel.shape[2]
    y1 = (draw // ny2).astype(np.int64)

    full = cfg.full_law()
    target1 = probcore._marginal_array(full, [0, 2])
    ny1 = target1.shape[1]
    true_hit = bool(
        _l1_hits((u1 * ny1 + y1)[None, :], target1.size, target1, cfg.n, cfg.params)[0]
    )
    # exact wrong-codeword hit probability given this received sequence
    vu = (VariableId(0, "U1"),)
    vy = (VariableId(1, "Y1"),)
    p_joint = JointPmf(vu + vy, target1)
    q_u = JointPmf(vu, cfg.pc.mass.sum(axis=1))
    y_counts = np.bincount(y1, minlength=ny1)
    log2_s = ensemble.log2_conditional_hit_prob(p_joint, q_u, y_counts, cfg.params)
    log2_wrong = math.log2(cfg.size("R1") - 1) if cfg.size("R1") > 1 else float("-inf")
    log2_wrong += cfg.log2_size("Rho1")
    p_wrong = ensemble.prob_any_hit(log2_s, log2_wrong)
    wrong_hit = bool(_rng(cfg, trial, STAGE_ANALYTIC).random() < p_wrong)
    dec1_ok = true_hit and not wrong_hit
    return TrialReport(
        trial=trial,
        encode_ok=encode_ok,
        b1=0,
        b2=0,
        dec1_ok=dec1_ok,
        dec2_ok=False,
        dec1_ambiguous=true_hit and wrong_hit,
        typical_bins=int(encode_ok),
        analytic=True,
    )


def run_trial(cfg: SimConfig, trial: int) -> TrialReport:
    """One end-to-end trial with message (0, 0); fresh codebook."""
    if _codebook_cells(cfg) > MEMORY_GUARD:
        if cfg.size("Rho1") == 1 and cfg.size("Rho2") == 1:
            return _analytic_trial(cfg, trial)
        raise ResourceRefusal(
            f"codebook holds {_codebook_cells(cfg)} symbols and binning "
            f"prevents the exact ensemble path; budget is {MEMORY_GUARD}"
        )
    cb = generate_codebook(cfg, trial)
    b1, b2, encode_ok, typ = encode(cb, cfg, 0, 0, trial)
    y1, y2 = transmit(cb, cfg, 0, b1, 0, b2, trial)
    s1, w1_hat, _ = decode1(cb, cfg, y1)
    s2, w1_hat2, w2_hat = decode2(cb, cfg, y2)
    return TrialReport(
        trial=trial,
        encode_ok=encode_ok,
        b1=b1,
        b2=b2,
        dec1_ok=(s1 == "ok" and w1_hat == 0),
        dec2_ok=(s2 == "ok" and w1_hat2 == 0 and w2_hat == 0),
        dec1_ambiguous=(s1 == "ambiguous"),
        dec2_ambiguous=(s2 == "ambiguous"),
        typical_bins=typ,
    )


def run_campaign(cfg: SimConfig, threads: int = 1) -> CampaignReport:
    """All trials, aggregated; deterministic for a fixed config and seed."""
    indices = list(range(cfg.trials))
    if threads > 1 and indices:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(lambda t: run_trial(cfg, t), indices))
    else:
        reports = [run_trial(cfg, t) for t in indices]
    reports.sort(key=lambda r: r.trial)
    n = len(reports)
    enc = sum(r.encode_ok for r in reports)
    d1 = sum(r.dec1_ok for r in reports)
    d2 = sum(r.dec2_ok for r in reports)
    return CampaignReport(
        trials=tuple(reports),
        encode_rate=enc / n if n else 0.0,
        encode_ci=wilson_interval(enc, n),
        dec1_rate=d1 / n if n else 0.0,
        dec1_ci=wilson_interval(d1, n),
        dec2_rate=d2 / n if n else 0.0,
        dec2_ci=wilson_interval(d2, n),
        mean_typical_bins=(sum(r.typical_bins for r in reports) / n) if n else 0.0,
        sizes={k: cfg.size(k) for k in ("R1", "Rho1", "R2", "Rho2")},
    )


def covering_experiment(
    p1: JointPmf,
    q2: JointPmf,
    rhat: float,
    n: int,
    epsilon: float,
    trials: int,
    seed: int,
    zero_support_strict: bool = True,
) -> tuple[float, list[bool]]:
    """Fraction of trials where one of 2^{round(n*rhat)} q2-draws is p1-typical.

    Small pools are drawn and tested directly; pools beyond the
    enumeration budget use the exact per-draw typicality probability and
    a single Bernoulli sample per trial, which has the same law.
    """
    if p1.mass.shape != q2.mass.shape:
        raise DomainError("p1 and q2 must share an alphabet")
    if rhat < 0:
        raise DomainError("bin rate must be nonnegative")
    params = TypicalityParams(epsilon, zero_support_strict)
    log2_k = int(round(n * rhat))
    k = 2 ** log2_k if log2_k <= 60 else None
    direct = k is not None and k * n <= MEMORY_GUARD
    outcomes: list[bool] = []
    if direct:
        q_flat = q2.mass.reshape(-1)
        for t in range(trials):
            rng = np.random.default_rng([seed, t, STAGE_CODEBOOK])
            rows = _sample_iid(rng, q_flat, (k, n))
            ok = _l1_hits(rows, p1.mass.size, p1.mass, n, params)
            outcomes.append(bool(ok.any()))
    else:
        log2_s = ensemble.log2_typical_prob(p1, q2, n, params)
        p_hit = ensemble.prob_any_hit(log2_s, float(log2_k))
        for t in range(trials):
            rng = np.random.default_rng([seed, t, STAGE_ANALYTIC])
            outcomes.append(bool(rng.random() < p_hit))
    rate = sum(outcomes) / trials if trials else 0.0
    return rate, outcomes


def binning_encode_experiment(
    pe: JointPmf,
    pc: JointPmf,
    rho1: float,
    rho2: float,
    n: int,
    epsilon: float,
    trials: int,
    seed: int,
    zero_support_strict: bool = True,
) -> tuple[float, list[bool]]:
    """Joint-binning encode success rate for a single message pair.

    Bin pools up to the memory guard are simulated directly; larger
    pools sample the exact ensemble success probability (see
    :func:`supbin.ensemble.log2_joint_binning_success`).
    """
    params = TypicalityParams(epsilon, zero_support_strict)
    lb1 = int(round(n * rho1))
    lb2 = int(round(n * rho2))
    direct = lb1 + lb2 <= 26 and (2 ** (lb1 + lb2)) * n <= MEMORY_GUARD
    outcomes: list[bool] = []
    if direct:
        b1n, b2n = 2 ** lb1, 2 ** lb2
        p1 = pc.mass.sum(axis=1)
        cond = probcore.conditional(pc, of=[1], given=[0]).table
        cdfs = np.cumsum(cond, axis=1)
        cdfs[:, -1] = 1.0
        c2 = pc.mass.shape[1]
        for t in range(trials):
            rng = np.random.default_rng([seed, t, STAGE_CODEBOOK])
            base = _sample_iid(rng, p1, (b1n, n))
            u = rng.random((b2n, b1n, n))
            sat = (u[..., None] > cdfs[base][None, ...]).sum(axis=-1)
            combined = (base[None, :, :] * c2 + sat).reshape(b1n * b2n, n)
            ok = _l1_hits(combined, pe.mass.size, pe.mass, n, params)
            outcomes.append(bool(ok.any()))
    else:
        log2_p = ensemble.log2_joint_binning_success(pe, pc, lb1, lb2, n, params)
        p_hit = 2.0 ** log2_p
        for t in range(trials):
            rng = np.random.default_rng([seed, t, STAGE_ANALYTIC])
            outcomes.append(bool(rng.random() < p_hit))
    rate = sum(outcomes) / trials if trials else 0.0
    return rate, outcomes


def inaccuracy_experiment(
    p: JointPmf,
    q: JointPmf,
    n: int,
    trials: int,
    seed: int,
) -> dict:
    """Per-symbol -log2 q-probability of iid p-sequences, against the
    exact inaccuracy value."""
    if p.mass.shape != q.mass.shape:
        raise DomainError("p and q must share an alphabet")
    from .typicality import log_prob_under

    p_flat = p.mass.reshape(-1)
    cards = p.mass.shape
    values = []
    for t in range(trials):
        rng = np.random.default_rng([seed, t, STAGE_CODEBOOK])
        flat = _sample_iid(rng, p_flat, n)
        arrays = []
        rem = flat
        for c in cards[::-1]:
            arrays.append(rem % c)
            rem = rem // c
        seq = Sequence(p.variables, tuple(arrays[::-1]), cards)
        values.append(-log_prob_under(seq, q) / n)
    values = np.asarray(values)
    return {
        "target": probcore.inaccuracy(p, q),
        "mean": float(values.mean()) if trials else float("nan"),
        "std": float(values.std(ddof=1)) if trials > 1 else 0.0,
        "min": float(values.min()) if trials else float("nan"),
        "max": float(values.max()) if trials else float("nan"),
        "values": values,
    }
