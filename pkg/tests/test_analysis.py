import numpy as np
import pytest

from ojaflow.analysis import (
    AnalysisError,
    beta_probe_state,
    classify,
    consensus_vdot_formula,
    dissensus_closed_form,
    fd_jacobian,
    jacobian_Ai,
    lyap_consensus,
    lyap_three_agent,
    lyap_two_agent,
    reduced_field_row,
    three_agent_boundary_state,
    three_agent_terms,
)
from ojaflow.dynamics import AverageConsensus, OjaVaryingCovariance, raw_field
from ojaflow.geometry import PartitionSpec, consensus_state, dissensus_state, random_state
from ojaflow.verify import all_partitions


def test_jacobian_antipodal_pair_hand_value():
    # N=2 dissensus along s: A = -(s s^T + I)
    s = np.array([0.6, 0.8])
    v = np.array([s, -s])
    expected = -(np.outer(s, s) + np.eye(2))
    np.testing.assert_allclose(jacobian_Ai(v, 0), expected, atol=1e-15)
    np.testing.assert_allclose(jacobian_Ai(v, 1), expected, atol=1e-15)


def test_jacobian_vs_reduced_fd():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n, d = int(rng.choice([2, 3, 4, 6])), int(rng.choice([2, 3, 5]))
        v = random_state(rng, n, d)
        i = int(rng.integers(n))
        assert np.abs(jacobian_Ai(v, i) - fd_jacobian(v, i)).max() <= 1e-6


def test_jacobian_vs_ambient_fd_on_tangent_space():
    rng = np.random.default_rng(1)
    for _ in range(100):
        v = random_state(rng, 4, 3)
        i = int(rng.integers(4))
        proj = np.eye(3) - np.outer(v[i], v[i])
        diff = (jacobian_Ai(v, i) - fd_jacobian(v, i, extension="ambient")) @ proj
        assert np.abs(diff).max() <= 1e-6


def test_reduced_row_equals_field_on_sphere():
    rng = np.random.default_rng(2)
    for _ in range(100):
        v = random_state(rng, 5, 3)
        i = int(rng.integers(5))
        np.testing.assert_allclose(reduced_field_row(v, i, v[i]), raw_field(OjaVaryingCovariance(), v)[i],
                                   atol=1e-13, rtol=0)


def test_fd_step_bounds():
    v = random_state(np.random.default_rng(0), 3, 2)
    with pytest.raises(AnalysisError):
        fd_jacobian(v, 0, h=1e-2)
    with pytest.raises(AnalysisError):
        fd_jacobian(v, 0, extension="other")


@pytest.mark.parametrize(
    "n, p, side, m",
    [
        (2, 1, "group1", 1.0),
        (3, 2, "group1", 8 / 3 - 2 / 3),
        (3, 2, "group2", 8 / 3 - 4 / 3),
        (4, 2, "group1", 3.0),
        (4, 3, "group2", 3 - 1.5),
    ],
)
def test_dissensus_m_hand_values(n, p, side, m):
    assert dissensus_closed_form(n, p, (1, 0), side).m == pytest.approx(m, abs=1e-15)


@pytest.mark.parametrize("n", range(2, 9))
def test_closed_form_all_partitions(n):
    rng = np.random.default_rng(n)
    for d in (2, 3):
        s = rng.standard_normal(d)
        s /= np.linalg.norm(s)
        for part in all_partitions(n):
            v = dissensus_state(s, part)
            p = len(part.group1)
            for i in range(n):
                side = "group1" if i in part.group1 else "group2"
                form = dissensus_closed_form(n, p, s if side == "group1" else -s, side)
                a = jacobian_Ai(v, i)
                assert np.abs(a - form.matrix()).max() <= 1e-10
                assert form.m > 0
                assert np.linalg.eigvalsh(0.5 * (a + a.T)).max() <= -form.m + 1e-10


def test_closed_form_rejects_bad_inputs():
    with pytest.raises(AnalysisError):
        dissensus_closed_form(3, 0, (1, 0), "group1")
    with pytest.raises(AnalysisError):
        dissensus_closed_form(3, 1, (1, 0), "left")


@pytest.mark.parametrize("beta1, expected", [(1.0, 1.0), (0.5, 0.375), (0.1, 0.019)])
def test_consensus_formula_n2_values(beta1, expected):
    # N=2: (2N-2)/N = 1, so Vdot = beta^2 (2 - beta)
    assert consensus_vdot_formula(2, beta1) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n", [2, 3, 5, 10])
def test_consensus_chain_rule_matches_formula(n):
    for beta1 in np.arange(1, 20) / 10:
        v = beta_probe_state(n, beta1, (0.6, 0.8), (1, 0))
        assert abs(lyap_consensus(v).Vdot - consensus_vdot_formula(n, beta1)) <= 1e-10
        assert consensus_vdot_formula(n, beta1) > 0


def test_lyap_consensus_zero_at_consensus():
    ls = lyap_consensus(consensus_state((0, 1), 4))
    assert ls.V == 0 and ls.Vdot == 0


def test_two_agent_orthogonal_example():
    ls = lyap_two_agent(np.eye(2))
    # |v1+v2|^2 = 2, v^T C v = 1/2 each -> Vdot = -1
    assert ls.V == 1.0
    assert ls.Vdot == pytest.approx(-1.0, abs=1e-15)
    assert ls.components["vdot_chain"] == pytest.approx(-1.0, abs=1e-15)


def test_two_agent_random():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        v = random_state(rng, 2, int(rng.choice([2, 3, 5])))
        ls = lyap_two_agent(v)
        assert abs(ls.Vdot - ls.components["vdot_chain"]) <= 1e-10
        assert ls.Vdot <= 0


def test_lyap_size_checks():
    with pytest.raises(AnalysisError):
        lyap_two_agent(np.eye(3))
    with pytest.raises(AnalysisError):
        lyap_three_agent(np.eye(2))


def test_three_agent_terms_hand_values():
    t = three_agent_terms(1.0, -1.0, -1.0)  # v1 = v2 = -v3
    assert t["lambda1"] == pytest.approx(8 / 3)
    assert t["lambda3"] == pytest.approx(8 / 3)
    assert t["beta13"] == 0 and t["beta23"] == 0
    assert t["Q"] == pytest.approx((16 / 3) * 2)


def test_three_agent_consistency_random():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        c = lyap_three_agent(random_state(rng, 3, 2))
        comp = c.components
        for k in (1, 2, 3):
            assert abs(comp[f"lambda{k}"] - comp[f"lambda{k}_matrix"]) <= 1e-10
        assert abs(c.Vdot - comp["vdot_chain"]) <= 1e-10


@pytest.mark.parametrize("a, b", [(1e-4, 1e-4), (0.8, 1e-4)])
def test_three_agent_boundary(a, b):
    v = three_agent_boundary_state(a, b)
    g = v @ v.T
    assert g[0, 2] == pytest.approx(-a, abs=1e-15)
    assert g[1, 2] == pytest.approx(-b, abs=1e-15)
    assert g[0, 1] >= 0
    assert lyap_three_agent(v).Vdot < 0


def test_classify_examples():
    assert classify(consensus_state((1, 0), 4)).kind == "consensus"
    cls = classify([[0, 1], [0, -1], [0, 1]])
    assert cls.kind == "dissensus"
    assert cls.partition == PartitionSpec({0, 2}, {1})
    assert classify(np.eye(2)).kind == "non_equilibrium"
    assert classify([[1, 0], [0, 1], [-1, 0], [0, -1]]).kind == "stationary_orthogonal"


def test_classify_near_dissensus_tolerance():
    eps = 1e-2  # Gram entry off by about eps^2/2 = 5e-5
    v = np.array([[1, 0], [-np.cos(eps), np.sin(eps)]])
    assert classify(v, tol=1e-6).kind != "dissensus"
    assert classify(v, tol=1e-2).kind == "dissensus"
    with pytest.raises(AnalysisError):
        classify(v, tol=0.5)


def test_classify_consensus_under_baseline():
    cls = classify(consensus_state((1, 0), 3), spec=AverageConsensus())
    assert cls.kind == "consensus" and cls.residual == 0
