import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spheredepth.sphere_core import (
    SparseUnitVector,
    apply_rotation,
    chord_distance,
    cosine_distance,
    geodesic_distance,
    normalize,
    random_rotation,
    rotation_matrix,
    sparse_dot,
    unit_dot,
    unit_vector,
    unit_vectors,
)


@st.composite
def unit_pair(draw):
    d = draw(st.integers(2, 8))
    coords = st.floats(-100.0, 100.0, allow_nan=False)
    x = np.array(draw(st.lists(coords, min_size=d, max_size=d)))
    y = np.array(draw(st.lists(coords, min_size=d, max_size=d)))
    if np.linalg.norm(x) < 1e-3 or np.linalg.norm(y) < 1e-3:
        x = x + np.eye(d)[0]
        y = y + np.eye(d)[1]
    return normalize(x), normalize(y)


class TestNormalize:
    def test_examples(self):
        assert np.allclose(normalize([3, 4]), [0.6, 0.8])
        assert np.array_equal(normalize([0, 0, 1]), [0, 0, 1])
        assert np.allclose(normalize([1, 1, 1, 1]), [0.5, 0.5, 0.5, 0.5])

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            normalize([0.0, 0.0, 0.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            normalize([np.nan, 1.0])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=2, max_size=12))
    def test_idempotent_exactly(self, coords):
        v = np.array(coords)
        if np.linalg.norm(v) < 1e-6:
            v = v + 1.0
        once = normalize(v)
        assert np.array_equal(normalize(once), once)

    def test_does_not_mutate_input(self):
        v = np.array([3.0, 4.0])
        normalize(v)
        assert np.array_equal(v, [3.0, 4.0])


class TestUnitVector:
    def test_renormalizes_within_tolerance(self):
        v = unit_vector([1.0 + 5e-7, 0.0])
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-10

    def test_rejects_far_from_unit(self):
        with pytest.raises(ValueError, match="unit"):
            unit_vector([1.0, 1.0])

    def test_rejects_d1(self):
        with pytest.raises(ValueError):
            unit_vector([1.0])

    def test_rows_variant(self):
        X = unit_vectors([[1, 0], [0.6, 0.8]])
        assert np.allclose(np.linalg.norm(X, axis=1), 1.0)
        with pytest.raises(ValueError, match="row 1"):
            unit_vectors([[1, 0], [2, 0]])


class TestDistances:
    @pytest.mark.parametrize(
        "dist,same,anti,orth",
        [
            (cosine_distance, 0.0, 2.0, 1.0),
            (geodesic_distance, 0.0, np.pi, np.pi / 2),
            (chord_distance, 0.0, 2.0, np.sqrt(2.0)),
        ],
    )
    def test_reference_pairs(self, dist, same, anti, orth):
        x = np.array([1.0, 0.0, 0.0])
        y = np.array([0.0, 1.0, 0.0])
        assert dist(x, x) == pytest.approx(same, abs=1e-12)
        assert dist(x, -x) == pytest.approx(anti, abs=1e-12)
        assert dist(x, y) == pytest.approx(orth, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            cosine_distance(np.array([1.0, 0.0]), np.array([1.0, 0.0, 0.0]))

    @settings(max_examples=150, deadline=None)
    @given(unit_pair())
    def test_chord_squared_is_twice_cosine(self, pair):
        x, y = pair
        assert chord_distance(x, y) ** 2 == pytest.approx(2.0 * cosine_distance(x, y), abs=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(unit_pair())
    def test_symmetry(self, pair):
        x, y = pair
        for dist in (cosine_distance, geodesic_distance, chord_distance):
            assert dist(x, y) == dist(y, x)

    def test_rotation_invariance(self):
        rng = np.random.default_rng(42)
        for trial in range(25):
            d = int(rng.integers(2, 9))
            x = normalize(rng.standard_normal(d))
            y = normalize(rng.standard_normal(d))
            R = random_rotation(d, trial)
            for dist in (cosine_distance, geodesic_distance, chord_distance):
                assert dist(R @ x, R @ y) == pytest.approx(dist(x, y), abs=1e-9)


class TestRotations:
    def test_orthogonal_and_deterministic(self):
        R1 = random_rotation(5, 7)
        R2 = random_rotation(5, 7)
        assert np.array_equal(R1, R2)
        assert np.allclose(R1.T @ R1, np.eye(5), atol=1e-10)
        assert abs(abs(np.linalg.det(R1)) - 1.0) < 1e-10

    def test_isometry(self):
        R = random_rotation(4, 0)
        x = normalize(np.arange(1.0, 5.0))
        assert abs(np.linalg.norm(R @ x) - 1.0) < 1e-10

    def test_d1_rejected(self):
        with pytest.raises(ValueError):
            random_rotation(1, 0)

    def test_validator(self):
        rotation_matrix(np.eye(3))
        rotation_matrix(random_rotation(6, 3))
        with pytest.raises(ValueError, match="orthogonal"):
            rotation_matrix(np.eye(3) * 2.0)

    def test_apply_to_sample_rows(self):
        rows = np.random.default_rng(0).standard_normal((5, 3)) + 2.0
        X = np.array([normalize(r) for r in rows])
        R = random_rotation(3, 1)
        out = apply_rotation(R, X)
        assert np.allclose(out[2], R @ X[2])


class TestSparse:
    def test_construction_invariants(self):
        v = SparseUnitVector(4, [0, 2], [0.6, 0.8])
        assert v.nnz == 2
        assert np.allclose(v.densify(), [0.6, 0.0, 0.8, 0.0])
        with pytest.raises(ValueError, match="increasing"):
            SparseUnitVector(4, [2, 0], [0.6, 0.8])
        with pytest.raises(ValueError, match="increasing"):
            SparseUnitVector(4, [1, 1], [0.6, 0.8])
        with pytest.raises(ValueError, match="unit"):
            SparseUnitVector(4, [0, 1], [1.0, 1.0])
        with pytest.raises(ValueError, match="entries"):
            SparseUnitVector(4, [], [])

    def test_renormalizes_within_tolerance(self):
        v = SparseUnitVector(3, [1], [1.0 + 1e-7])
        assert abs(np.linalg.norm(v.values) - 1.0) <= 1e-10

    def test_dot_examples(self):
        a = SparseUnitVector(2, [0], [1.0])
        b = SparseUnitVector(2, [0, 1], [0.6, 0.8])
        assert sparse_dot(a, a) == pytest.approx(1.0, abs=1e-10)
        assert sparse_dot(a, b) == pytest.approx(0.6, abs=1e-12)
        disjoint = SparseUnitVector(4, [3], [1.0])
        c = SparseUnitVector(4, [0, 1], [0.6, 0.8])
        assert sparse_dot(disjoint, c) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            sparse_dot(SparseUnitVector(2, [0], [1.0]), SparseUnitVector(3, [0], [1.0]))

    def test_matches_dense_dot(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            dim = int(rng.integers(4, 40))
            pair = []
            for _ in range(2):
                nnz = int(rng.integers(1, dim))
                idx = np.sort(rng.choice(dim, size=nnz, replace=False))
                val = rng.standard_normal(nnz)
                val /= np.linalg.norm(val)
                pair.append(SparseUnitVector(dim, idx, val))
            a, b = pair
            dense = float(a.densify() @ b.densify())
            assert sparse_dot(a, b) == pytest.approx(dense, abs=1e-12)

    def test_mixed_dense_sparse_dispatch(self):
        a = SparseUnitVector(3, [0, 2], [0.6, 0.8])
        y = np.array([0.0, 0.0, 1.0])
        assert unit_dot(a, y) == pytest.approx(0.8, abs=1e-12)
        assert unit_dot(y, a) == pytest.approx(0.8, abs=1e-12)
        assert geodesic_distance(a, y) == pytest.approx(np.arccos(0.8), abs=1e-12)

    def test_rotation_of_sparse(self):
        a = SparseUnitVector(3, [0, 2], [0.6, 0.8])
        R = random_rotation(3, 5)
        assert np.allclose(apply_rotation(R, a), R @ a.densify())
