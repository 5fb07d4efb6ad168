from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supbin import infoexpr as ix
from supbin import probcore as pc
from supbin.infoexpr import CIIdentity, InfoExpr, MarginalEquality
from supbin.probcore import DomainError, JointPmf, VariableId


def rand_pair(seed, shape=(2, 2)):
    rng = np.random.default_rng(seed)
    a = rng.random(shape) + 0.02
    a /= a.sum()
    b = rng.random(shape) + 0.02
    b /= b.sum()
    vs = tuple(VariableId(i) for i in range(len(shape)))
    return JointPmf(vs, a), JointPmf(vs, b)


class TestAtoms:
    def test_atom_validation(self):
        with pytest.raises(DomainError):
            ix.Atom("ENT", frozenset({0}), None)
        with pytest.raises(DomainError):
            ix.Atom("XENT", frozenset({0}), "c")
        with pytest.raises(DomainError):
            ix.Atom("ENT", frozenset(), "e")

    def test_render_grammar(self):
        e = ix.expr_kl_cond({0}, ())
        assert e.render() == "-1 H_e{0} +1 X{0}"
        e2 = ix.expr_kl_cond({1}, {0})
        assert e2.render() == "+1 H_e{0} -1 H_e{0,1} -1 X{0} +1 X{0,1}"
        assert ix.ZERO.render() == "+0"

    def test_float_coefficients_rejected(self):
        with pytest.raises(DomainError):
            InfoExpr({ix.ent("e", {0}): 0.5})


class TestArithmetic:
    def test_add_cancel(self):
        e = ix.expr_entropy("e", {0, 1})
        assert (e - e).is_zero()

    def test_scale_exact(self):
        e = ix.expr_entropy("c", {0}).scale(Fraction(2, 3))
        assert e.terms[ix.ent("c", {0})] == Fraction(2, 3)

    def test_mi_chain_rule_symbolic(self):
        # I(a; bc) = I(a; b) + I(a; c | b)
        lhs = ix.expr_mutual_information("e", {0}, {1, 2})
        rhs = ix.expr_mutual_information("e", {0}, {1}) + ix.expr_mutual_information(
            "e", {0}, {2}, {1}
        )
        assert (lhs - rhs).is_zero()

    def test_hashable_and_equal(self):
        a = ix.expr_entropy("e", {0}) + ix.expr_entropy("e", {1})
        b = ix.expr_entropy("e", {1}) + ix.expr_entropy("e", {0})
        assert a == b and hash(a) == hash(b)


class TestEvaluate:
    def test_kl_cond_matches_probcore(self):
        for seed in range(20):
            pe, pcb = rand_pair(seed)
            got = ix.evaluate(ix.expr_kl_cond({1}, {0}), pe, pcb)
            want = pc.conditional_kl(pe, pcb, of=[1], given=[0])
            assert got == pytest.approx(want, abs=1e-9)

    def test_infinite_on_support_violation(self):
        vs = (VariableId(0),)
        pe = JointPmf(vs, np.array([0.5, 0.5]))
        pcb = JointPmf(vs, np.array([1.0, 0.0]))
        assert ix.evaluate(ix.expr_kl_cond({0}), pe, pcb) == float("inf")
        assert ix.evaluate(-ix.expr_kl_cond({0}), pe, pcb) == float("-inf")

    def test_pc_may_omit_channel_outputs(self):
        # encoding law has an extra output variable the codebook law lacks
        rng = np.random.default_rng(3)
        m = rng.random((2, 2)) + 0.05
        m /= m.sum()
        pe = JointPmf((VariableId(0, "U"), VariableId(1, "Y")), m)
        pcb = JointPmf((VariableId(0, "U"),), m.sum(1))
        e = ix.expr_mutual_information("e", {1}, {0}) + ix.expr_kl_cond({0})
        assert np.isfinite(ix.evaluate(e, pe, pcb))


class TestCanonicalize:
    def test_ci_splits_entropy(self):
        ident = CIIdentity("c", frozenset({1}), frozenset({2}), frozenset({0}))
        e = ix.expr_entropy("c", {0, 1, 2})
        out = ix.canonicalize(e, [ident])
        want = (
            ix.expr_entropy("c", {0, 1})
            + ix.expr_entropy("c", {0, 2})
            - ix.expr_entropy("c", {0})
        )
        assert out == want

    def test_codebook_ci_splits_xent(self):
        ident = CIIdentity("c", frozenset({1}), frozenset({2}), frozenset({0}))
        out = ix.canonicalize(ix.expr_xent({0, 1, 2}), [ident])
        want = ix.expr_xent({0, 1}) + ix.expr_xent({0, 2}) - ix.expr_xent({0})
        assert out == want

    def test_encoding_ci_leaves_xent_alone(self):
        ident = CIIdentity("e", frozenset({1}), frozenset({2}), frozenset({0}))
        e = ix.expr_xent({0, 1, 2})
        assert ix.canonicalize(e, [ident]) == e

    def test_marginal_equality_collapses_divergence(self):
        ident = MarginalEquality(frozenset({0, 1}))
        assert ix.canonicalize(ix.expr_kl_cond({1}, {0}), [ident]).is_zero()
        assert ix.canonicalize(ix.expr_kl_cond({0, 1}), [ident]).is_zero()

    def test_canonicalize_idempotent(self):
        idents = [
            CIIdentity("c", frozenset({1}), frozenset({2}), frozenset({0})),
            MarginalEquality(frozenset({0})),
        ]
        e = ix.expr_xent({0, 1, 2}) - ix.expr_entropy("e", {0, 1, 2})
        once = ix.canonicalize(e, idents)
        assert ix.canonicalize(once, idents) == once

    def test_canonicalize_preserves_value(self):
        # rewriting under a true identity must not change the number
        rng = np.random.default_rng(5)
        p0 = rng.random(2) + 0.1
        p0 /= p0.sum()
        k1 = rng.random((2, 2)) + 0.1
        k1 /= k1.sum(1, keepdims=True)
        k2 = rng.random((2, 2)) + 0.1
        k2 /= k2.sum(1, keepdims=True)
        mass = p0[:, None, None] * k1[:, :, None] * k2[:, None, :]
        vs = tuple(VariableId(i) for i in range(3))
        pcb = JointPmf(vs, mass)
        m = rng.random((2, 2, 2)) + 0.1
        m /= m.sum()
        pe = JointPmf(vs, m)
        ident = CIIdentity("c", frozenset({1}), frozenset({2}), frozenset({0}))
        e = ix.expr_xent({0, 1, 2}) + ix.expr_entropy("c", {0, 1, 2}).scale(2)
        out = ix.canonicalize(e, [ident])
        assert out != e
        assert ix.evaluate(out, pe, pcb) == pytest.approx(
            ix.evaluate(e, pe, pcb), abs=1e-9
        )


@given(st.integers(0, 5000), st.integers(0, 5000))
@settings(max_examples=40, deadline=None)
def test_evaluate_linear_in_expressions(seed_a, seed_b):
    pe, pcb = rand_pair(seed_a)
    rng = np.random.default_rng(seed_b)
    exprs = [
        ix.expr_entropy("e", {0}),
        ix.expr_entropy("c", {0, 1}),
        ix.expr_xent({0, 1}),
        ix.expr_kl_cond({1}, {0}),
    ]
    coeffs = [Fraction(int(rng.integers(-3, 4))) for _ in exprs]
    combo = ix.ZERO
    for c, e in zip(coeffs, exprs):
        combo = combo + e.scale(c)
    direct = sum(float(c) * ix.evaluate(e, pe, pcb) for c, e in zip(coeffs, exprs))
    assert ix.evaluate(combo, pe, pcb) == pytest.approx(direct, abs=1e-9)
