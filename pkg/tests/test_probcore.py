import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supbin import probcore as pc
from supbin.probcore import CIStatement, DomainError, JointPmf, VariableId

# frozen oracle values (bits)
H_011 = 0.499915958164528           # H(0.11, 0.89)
KL_HALF_QUARTER = 0.207518749639422    # D((.5,.5)||(.25,.75))
MI_DSBC_01 = 0.5310044064107187     # 1 - h2(0.1)
XENT_HALF_QUARTER = 1.207518749639422


def pmf1(mass, label="U"):
    return JointPmf((VariableId(0, label),), np.asarray(mass, dtype=float))


def pmf2(mass):
    return JointPmf((VariableId(0, "A"), VariableId(1, "B")), np.asarray(mass, dtype=float))


def dsbc(eps):
    m = np.array([[(1 - eps) / 2, eps / 2], [eps / 2, (1 - eps) / 2]])
    return pmf2(m)


class TestJointPmf:
    def test_rejects_negative_mass(self):
        with pytest.raises(DomainError):
            pmf1([1.2, -0.2])

    def test_rejects_bad_total(self):
        with pytest.raises(DomainError):
            pmf1([0.5, 0.4])

    def test_renormalizes_tiny_drift(self):
        p = pmf1([0.5 + 2e-10, 0.5])
        assert abs(p.mass.sum() - 1.0) < 1e-15

    def test_rejects_noncontiguous_indices(self):
        with pytest.raises(DomainError):
            JointPmf((VariableId(1, "A"),), np.array([1.0]))

    def test_mass_is_readonly(self):
        p = pmf1([0.5, 0.5])
        with pytest.raises(ValueError):
            p.mass[0] = 1.0

    def test_axis_lookup(self):
        p = pmf2(np.full((2, 2), 0.25))
        assert p.axis_of(1) == 1
        with pytest.raises(DomainError):
            p.axis_of(7)


class TestMarginalConditional:
    def test_marginal_values(self):
        p = pmf2([[0.1, 0.2], [0.3, 0.4]])
        m = pc.marginal(p, [0])
        assert np.allclose(m.mass, [0.3, 0.7])

    def test_marginal_unknown_var(self):
        with pytest.raises(DomainError):
            pc.marginal(pmf1([0.5, 0.5]), [3])

    def test_conditional_rows(self):
        p = pmf2([[0.1, 0.2], [0.3, 0.4]])
        k = pc.conditional(p, of=[1], given=[0])
        assert np.allclose(k.table[0], [1 / 3, 2 / 3])
        assert not k.unsupported.any()

    def test_conditional_unsupported_row_flagged(self):
        p = pmf2([[0.5, 0.5], [0.0, 0.0]])
        k = pc.conditional(p, of=[1], given=[0])
        assert k.unsupported[1]
        assert np.allclose(k.table[1], [0.5, 0.5])

    def test_product_pmf_relabels(self):
        a = pmf1([0.3, 0.7], "X")
        b = pmf1([0.5, 0.5], "Y")
        prod = pc.product_pmf(a, b)
        assert [v.label for v in prod.variables] == ["X", "Y"]
        assert np.allclose(prod.mass, np.outer([0.3, 0.7], [0.5, 0.5]))


class TestScalars:
    def test_entropy_oracle(self):
        assert pc.entropy(pmf1([0.11, 0.89])) == pytest.approx(H_011, abs=1e-12)

    def test_entropy_point_mass_zero(self):
        assert pc.entropy(pmf1([1.0, 0.0])) == 0.0

    def test_kl_oracle(self):
        assert pc.kl(pmf1([0.5, 0.5]), pmf1([0.25, 0.75])) == pytest.approx(
            KL_HALF_QUARTER, abs=1e-12
        )

    def test_kl_infinite_on_support_violation(self):
        assert pc.kl(pmf1([0.5, 0.5]), pmf1([1.0, 0.0])) == float("inf")

    def test_inaccuracy_oracle(self):
        assert pc.inaccuracy(pmf1([0.5, 0.5]), pmf1([0.25, 0.75])) == pytest.approx(
            XENT_HALF_QUARTER, abs=1e-12
        )

    def test_inaccuracy_decomposes(self):
        p, q = pmf1([0.3, 0.7]), pmf1([0.6, 0.4])
        assert pc.inaccuracy(p, q) == pytest.approx(pc.kl(p, q) + pc.entropy(p), abs=1e-12)

    def test_mi_oracle(self):
        assert pc.mutual_information(dsbc(0.1), [0], [1]) == pytest.approx(
            MI_DSBC_01, abs=1e-12
        )

    def test_mi_independent_zero(self):
        assert pc.mutual_information(pmf2(np.full((2, 2), 0.25)), [0], [1]) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_conditional_kl_equals_mi_for_product_codebook(self):
        pe = dsbc(0.1)
        marg = np.outer(pe.mass.sum(1), pe.mass.sum(0))
        pcb = pmf2(marg)
        got = pc.conditional_kl(pe, pcb, of=[1], given=[0])
        assert got == pytest.approx(pc.mutual_information(pe, [0], [1]), abs=1e-12)

    def test_conditional_kl_zero_when_equal(self):
        p = dsbc(0.2)
        assert pc.conditional_kl(p, p, of=[1], given=[0]) == pytest.approx(0.0, abs=1e-12)


@st.composite
def random_pmf(draw, size=4):
    weights = draw(
        st.lists(st.floats(0.01, 1.0), min_size=size, max_size=size)
    )
    total = sum(weights)
    return [w / total for w in weights]


class TestProperties:
    @given(random_pmf())
    @settings(max_examples=60, deadline=None)
    def test_entropy_bounds(self, mass):
        h = pc.entropy(pmf1(mass))
        assert -1e-9 <= h <= np.log2(len(mass)) + 1e-9

    @given(random_pmf(), random_pmf())
    @settings(max_examples=60, deadline=None)
    def test_kl_nonnegative(self, a, b):
        assert pc.kl(pmf1(a), pmf1(b)) >= -1e-9

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_mi_symmetric_and_nonnegative(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.random((2, 3))
        m /= m.sum()
        p = JointPmf((VariableId(0), VariableId(1)), m)
        ab = pc.mutual_information(p, [0], [1])
        ba = pc.mutual_information(p, [1], [0])
        assert ab == pytest.approx(ba, abs=1e-9)
        assert ab >= -1e-9

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_mi_double_sum_form(self, seed):
        rng = np.random.default_rng(seed)
        m = rng.random((3, 3)) + 0.01
        m /= m.sum()
        p = JointPmf((VariableId(0), VariableId(1)), m)
        pa, pb = m.sum(1), m.sum(0)
        direct = float((m * np.log2(m / np.outer(pa, pb))).sum())
        assert pc.mutual_information(p, [0], [1]) == pytest.approx(direct, abs=1e-9)

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_conditional_kl_chain(self, seed):
        # D(of,given) = D(given) + D(of|given)
        rng = np.random.default_rng(seed)
        a = rng.random((2, 2)) + 0.02
        a /= a.sum()
        b = rng.random((2, 2)) + 0.02
        b /= b.sum()
        pe, pcb = pmf2(a), pmf2(b)
        joint = pc.conditional_kl(pe, pcb, of=[0, 1])
        chain = pc.conditional_kl(pe, pcb, of=[0]) + pc.conditional_kl(
            pe, pcb, of=[1], given=[0]
        )
        assert joint == pytest.approx(chain, abs=1e-9)


class TestFactorization:
    def test_independent_product(self):
        assert pc.check_factorization(
            pmf2(np.outer([0.3, 0.7], [0.4, 0.6])), CIStatement({0}, {1})
        )

    def test_correlated_pair_fails(self):
        assert not pc.check_factorization(dsbc(0.1), CIStatement({0}, {1}))

    def test_conditional_factorization(self):
        p0 = np.array([0.4, 0.6])
        k1 = np.array([[0.2, 0.8], [0.7, 0.3]])
        k2 = np.array([[0.9, 0.1], [0.5, 0.5]])
        mass = p0[:, None, None] * k1[:, :, None] * k2[:, None, :]
        p = JointPmf((VariableId(0), VariableId(1), VariableId(2)), mass)
        assert pc.check_factorization(p, CIStatement({1}, {2}, {0}))
        assert not pc.check_factorization(p, CIStatement({0}, {1}, {2}))
