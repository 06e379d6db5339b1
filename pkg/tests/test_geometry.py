import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ojaflow.geometry import (
    GeometryError,
    PartitionSpec,
    angles,
    consensus_state,
    dissensus_state,
    gram,
    random_state,
    random_unit,
    renormalize,
    tangent_project,
)

SQ = 1 / np.sqrt(2)


@pytest.mark.parametrize(
    "v, u, expected",
    [
        ((1, 0), (3, 0), (0, 0)),
        ((1, 0), (0, 2), (0, 2)),
        ((SQ, SQ), (1, 0), (0.5, -0.5)),
    ],
)
def test_tangent_project_examples(v, u, expected):
    np.testing.assert_allclose(tangent_project(v, u), expected, atol=1e-15)


def test_tangent_project_dimension_mismatch():
    with pytest.raises(GeometryError):
        tangent_project((1, 0), (1, 0, 0))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_tangent_project_orthogonal_and_idempotent(d):
    rng = np.random.default_rng(d)
    for _ in range(1000):
        v = random_unit(rng, d)
        u = rng.standard_normal(d) * 10 ** rng.uniform(-3, 3)
        p = tangent_project(v, u)
        scale = max(1.0, np.linalg.norm(u))
        assert abs(v @ p) <= 1e-12 * scale
        np.testing.assert_allclose(tangent_project(v, p), p, atol=1e-12 * scale, rtol=0)


def test_renormalize_examples():
    np.testing.assert_allclose(renormalize((3, 4)), (0.6, 0.8), atol=1e-15)
    np.testing.assert_array_equal(renormalize((1, 0)), (1, 0))
    with pytest.raises(GeometryError):
        renormalize((1e-12, 0))


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=6).filter(lambda x: np.linalg.norm(x) > 1e-6))
def test_renormalize_unit_norm(x):
    assert abs(np.linalg.norm(renormalize(x)) - 1) <= 1e-12


def test_random_unit_deterministic():
    a = random_unit(np.random.default_rng(42), 2)
    b = random_unit(np.random.default_rng(42), 2)
    np.testing.assert_array_equal(a, b)
    assert abs(np.linalg.norm(a) - 1) <= 1e-12


def test_random_unit_uniform_mean():
    rng = np.random.default_rng(1)
    samples = np.array([random_unit(rng, 2) for _ in range(10_000)])
    assert np.linalg.norm(samples.mean(axis=0)) <= 0.05


def test_random_unit_rejects_d1():
    with pytest.raises(GeometryError):
        random_unit(np.random.default_rng(0), 1)


def test_gram_examples():
    np.testing.assert_array_equal(gram(consensus_state((0.3, 0.4), 4)), np.ones((4, 4)))
    np.testing.assert_array_equal(gram([[1, 0], [-1, 0]]), [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(gram([[1, 0], [0, 1]]), np.eye(2))


def test_gram_properties_and_rotation_invariance():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n, d = rng.integers(2, 9), rng.choice([2, 3, 5])
        v = random_state(rng, n, d)
        g = gram(v)
        np.testing.assert_array_equal(g, g.T)
        assert np.all(np.abs(np.diag(g) - 1) <= 1e-12)
        assert np.all(np.abs(g) <= 1 + 1e-12)
        q, r = np.linalg.qr(rng.standard_normal((d, d)))
        np.testing.assert_allclose(gram(v @ q.T), g, atol=1e-10, rtol=0)


def test_partition_validation():
    p = PartitionSpec({0, 2}, {1})
    assert p.sizes == (2, 1)
    np.testing.assert_array_equal(p.signs(), [1, -1, 1])
    with pytest.raises(GeometryError):
        PartitionSpec(set(), {0, 1})
    with pytest.raises(GeometryError):
        PartitionSpec({0, 1}, {1, 2})
    with pytest.raises(GeometryError):
        PartitionSpec({0}, {2})


def test_dissensus_state_and_angles():
    v = dissensus_state((0, 2), PartitionSpec({0, 1}, {2}))
    np.testing.assert_array_equal(v, [[0, 1], [0, 1], [0, -1]])
    np.testing.assert_allclose(angles(v), [np.pi / 2, np.pi / 2, -np.pi / 2])
    # (-1, 0) sits at +pi, not -pi
    assert angles(np.array([[-1.0, 0.0], [1.0, 0.0]]))[0] == np.pi


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_random_state_rows_are_unit(seed, d):
    v = random_state(np.random.default_rng(seed), 5, d)
    assert np.all(np.abs(np.linalg.norm(v, axis=1) - 1) <= 1e-12)
