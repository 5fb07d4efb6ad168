"""One test per acceptance criterion; run with -v for per-criterion lines."""

import json
import time

import numpy as np
import pytest

from supbin import cli
from supbin import codingsim as cs
from supbin import infoexpr as ix
from supbin import probcore as pc
from supbin import region as rg
from supbin import schemes as sc
from supbin import typicality as tp
from supbin.probcore import JointPmf, VariableId
from supbin.region import NumericPolytope
from supbin.schemes import SplitSpec


def report(name, elapsed, limit):
    print(f"{name}: PASS ({elapsed:.2f}s, limit {limit:.0f}s)")
    assert elapsed < limit


def factorized_3law(seed):
    rng = np.random.default_rng(seed)
    p0 = rng.random(2) + 0.1
    p0 /= p0.sum()
    k1 = rng.random((2, 2)) + 0.1
    k1 /= k1.sum(1, keepdims=True)
    k2 = rng.random((2, 2)) + 0.1
    k2 /= k2.sum(1, keepdims=True)
    mass = p0[:, None, None] * k1[:, :, None] * k2[:, None, :]
    return JointPmf(tuple(VariableId(i) for i in range(3)), mass)


def rand_law(seed, shape):
    rng = np.random.default_rng(seed)
    m = rng.random(shape) + 0.05
    m /= m.sum()
    return JointPmf(tuple(VariableId(i) for i in range(len(shape))), m)


def test_a1_mac_capacity_endpoint():
    start = time.time()
    proj = rg.fme_eliminate_all(sc.build_mac_cm(), ["Rho1", "Rho2"])
    simp = rg.simplify_symbolic(proj)
    assert rg.region_equal(simp, sc.build_mac_capacity())
    report("A1", time.time() - start, 1.0)


def test_a2_marton_equivalence():
    start = time.time()
    proj = rg.fme_eliminate_all(sc.build_bc(), ["Rho0", "Rho1", "Rho2"])
    simp = rg.simplify_symbolic(proj)
    assert rg.region_equal(simp, sc.build_marton())
    corr = sc.d_bc_rs()
    for seed in range(100):
        pcb = factorized_3law(seed)
        pe = rand_law(seed + 10_000, (2, 2, 2))
        got = ix.evaluate(corr, pe, pcb)
        want = -pc.mutual_information(pe, [1], [2], given=[0])
        assert abs(got - want) <= 1e-9
    report("A2", time.time() - start, 10.0)


def test_a3_special_case_collapse():
    start = time.time()
    # every divergence payment is symbolically zero once the encoding and
    # codebook laws agree (equal laws also transfer codebook independence
    # to the encoding label)
    for name in ("bc-cm", "mac-cm", "bc", "ifc"):
        region = sc.SCHEME_BUILDERS[name]()
        transferred = tuple(
            ix.CIIdentity(pc.ENCODING, i.a, i.b, i.given)
            for i in region.identities
            if isinstance(i, ix.CIIdentity) and i.label == pc.CODEBOOK
        )
        for cname, expr in region.constants:
            varsets = [a.varset for a in expr.terms if a.kind == "XENT"]
            ident = ix.MarginalEquality(frozenset().union(*varsets))
            out = ix.canonicalize(expr, region.identities + transferred + (ident,))
            assert out.is_zero(), (name, cname)
    # two-codeword region with equal laws is plain superposition
    proj = rg.simplify_symbolic(
        rg.fme_eliminate_all(sc.build_bc_cm(), ["Rho1", "Rho2"])
    )
    assert rg.region_equal(sc.specialize_equal_laws(proj), sc.build_superposition())
    # independent-marginal codebook: the joint bin-rate floor is the
    # encoding-law mutual information between the two codewords
    d_joint = dict(sc.build_bc_cm().constants)["D_joint"]
    for seed in range(20):
        pe = rand_law(seed, (2, 2))
        pcb = JointPmf(pe.variables, np.outer(pe.mass.sum(1), pe.mass.sum(0)))
        got = ix.evaluate(d_joint, pe, pcb)
        want = pc.mutual_information(pe, [0], [1])
        assert abs(got - want) <= 1e-9
    report("A3", time.time() - start, 1.0)


def test_a4_sequence_probability_identity():
    start = time.time()
    # exact form on generated sequences
    q = JointPmf((VariableId(0),), np.array([0.5, 0.5]))
    rng = np.random.default_rng(42)
    for _ in range(20):
        n = int(rng.integers(10, 2000))
        arr = (rng.random(n) < 0.89).astype(np.int64)
        seq = tp.Sequence((VariableId(0),), (arr,), (2,))
        t = tp.empirical_type(seq)
        want = -n * (pc.kl(t, q) + pc.entropy(t))
        assert abs(tp.log_prob_under(seq, q) - want) <= 1e-9 * n
    # Monte Carlo form
    p = JointPmf((VariableId(0),), np.array([0.11, 0.89]))
    out = cs.inaccuracy_experiment(p, q, 1000, 500, seed=17)
    assert out["target"] == pytest.approx(1.0, abs=1e-12)
    assert abs(out["mean"] - 1.0) <= 0.02
    report("A4", time.time() - start, 30.0)


def test_a5_covering_threshold():
    start = time.time()
    p1 = JointPmf((VariableId(0),), np.array([0.11, 0.89]))
    q2 = JointPmf((VariableId(0),), np.array([0.5, 0.5]))
    hi, _ = cs.covering_experiment(p1, q2, 0.70, 500, 0.05, 200, seed=29)
    lo, _ = cs.covering_experiment(p1, q2, 0.30, 500, 0.05, 200, seed=29)
    assert hi >= 0.95
    assert lo <= 0.05
    report("A5", time.time() - start, 300.0)


def _broadcast_cfg(**overrides):
    uniform = JointPmf(
        (VariableId(0, "U1"), VariableId(1, "U2")), np.full((2, 2), 0.25)
    )
    chan = np.zeros((4, 4, 4))
    for x in range(4):
        chan[x, x, x] = 1.0
    base = dict(
        n=200,
        rates={"R1": 0.04, "R2": 0.04},
        epsilon=0.25,
        trials=100,
        seed=101,
        pe=uniform,
        pc=uniform,
        channel=chan,
        input_map=np.arange(4).reshape(2, 2),
    )
    base.update(overrides)
    return cs.SimConfig(**base)


def test_a6_end_to_end_broadcast():
    start = time.time()
    rep = cs.run_campaign(_broadcast_cfg(), threads=4)
    ok = sum(r.encode_ok and r.dec1_ok and r.dec2_ok for r in rep.trials)
    assert ok / len(rep.trials) >= 0.95
    # decoder 1 must drown once its total rate exceeds the bound by 0.2
    over = _broadcast_cfg(n=400, rates={"R1": 1.2}, epsilon=0.1, trials=40)
    rep2 = cs.run_campaign(over)
    dec1_err = sum(not r.dec1_ok for r in rep2.trials) / len(rep2.trials)
    assert dec1_err >= 0.5
    report("A6", time.time() - start, 600.0)


def test_a7_numeric_projection_soundness():
    start = time.time()
    rng = np.random.default_rng(7)
    for _ in range(100):
        d = 3
        m = int(rng.integers(3, 7))
        A = rng.integers(-2, 3, size=(m, d)).astype(float)
        b = rng.integers(0, 5, size=m).astype(float) + 2.0
        A = np.vstack([A, -np.eye(d)])
        b = np.concatenate([b, np.zeros(d)])
        poly = NumericPolytope(("a", "b", "c"), A, b)
        proj = rg.numeric_fme(poly, ["a", "b"])
        grid = np.linspace(0, 4, 9)
        zs = np.linspace(0, 4, 41)
        for x in grid:
            for y in grid:
                inside = rg.contains_point(proj, [x, y], slack=1e-6)
                witness = any(
                    np.all(A @ np.array([x, y, z]) <= b + 1e-6) for z in zs
                )
                if witness:
                    assert inside
                if not inside:
                    assert not witness
    report("A7", time.time() - start, 60.0)


def test_a8_reproducibility(tmp_path):
    start = time.time()
    doc = {
        "version": 1,
        "kind": "sim-bc-cm",
        "seed": 13,
        "n": 60,
        "rates": {"R1": 0.05, "R2": 0.05},
        "epsilon": 0.25,
        "trials": 12,
        "pe": {"cardinalities": [2, 2], "mass": [[0.25, 0.25], [0.25, 0.25]]},
        "pc": {"cardinalities": [2, 2], "mass": [[0.25, 0.25], [0.25, 0.25]]},
        "channel": np.array(
            [np.outer(r, r).tolist() for r in np.eye(4)]
        ).tolist(),
        "input_map": [[0, 1], [2, 3]],
    }
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps(doc))
    outputs = {}
    for name, threads in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / name
        args = ["run", str(cfg), "--out", str(out)]
        if threads > 1:
            args += ["--threads", str(threads)]
        assert cli.main(args) == 0
        outputs[name] = {
            p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.suffix == ".csv"
        }
    assert outputs["a"] == outputs["b"] == outputs["c"]
    # the covering sweep reruns byte-identical as well
    doc2 = {
        "version": 1, "kind": "sim-covering", "seed": 31,
        "p1": {"cardinalities": [2], "mass": [0.11, 0.89]},
        "q2": {"cardinalities": [2], "mass": [0.5, 0.5]},
        "n": 120, "epsilon": 0.1, "trials": 15,
        "rhat_grid": [0.2, 0.5, 0.8],
    }
    cfg2 = tmp_path / "config2.json"
    cfg2.write_text(json.dumps(doc2))
    sweeps = []
    for name in ("s1", "s2"):
        out = tmp_path / name
        assert cli.main(["run", str(cfg2), "--out", str(out)]) == 0
        sweeps.append((out / "sweep.csv").read_bytes())
    assert sweeps[0] == sweeps[1]
    report("A8", time.time() - start, 60.0)


def test_a9_interference_boundary_consistency():
    start = time.time()
    split = SplitSpec()
    ifc = sc.build_ifc(split=split)
    hk = sc.build_han_kobayashi(split=split)
    for seed in range(20):
        rng = np.random.default_rng([23, seed])
        pw1 = rng.random((2, 2)) + 0.05
        pw1 /= pw1.sum()
        pw2 = rng.random((2, 2)) + 0.05
        pw2 /= pw2.sum()
        pe4 = pc.product_pmf(
            JointPmf((VariableId(0, "W1"), VariableId(1, "V1")), pw1),
            JointPmf((VariableId(0, "W2"), VariableId(1, "V2")), pw2),
        )
        imap = np.arange(16).reshape(2, 2, 2, 2)
        kern = rng.random((16, 2, 2)) + 0.05
        kern /= kern.sum(axis=(1, 2), keepdims=True)
        full = sc.channel_extend(pe4, imap, kern, ("Y1", "Y2"))
        pi = rg.instantiate(ifc, full, pe4)
        ph = rg.instantiate(hk, full, pe4)
        bi = rg.boundary_2d(pi, ("Rp1", "Rp2"), directions=720)
        bh = rg.boundary_2d(ph, ("Rp1", "Rp2"), directions=720)
        assert not bi.unbounded.any() and not bh.unbounded.any()
        assert np.max(np.abs(bi.support - bh.support)) < 1e-6
    report("A9", time.time() - start, 300.0)
