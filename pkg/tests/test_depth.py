import math

import numpy as np
import pytest

import spheredepth.depth as depth_mod
from spheredepth.depth import (
    DepthKind,
    alpha_region,
    as_sample,
    deepest_point_index,
    depth_matrix,
    pairwise_similarity,
    sample_depth,
    sample_depths,
)
from spheredepth.sphere_core import (
    SparseUnitVector,
    chord_distance,
    cosine_distance,
    geodesic_distance,
    normalize,
    random_rotation,
)
from spheredepth.vmf import VmfParams, sample

KINDS = list(DepthKind)

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])

_DIST = {
    DepthKind.ARC: geodesic_distance,
    DepthKind.COSINE: cosine_distance,
    DepthKind.CHORD: chord_distance,
}


def oracle_depth(x, rows, kind):
    """Independent route: constant minus mean distance, via scalar distances."""
    dists = [_DIST[kind](x, w) for w in rows]
    return kind.max_value - float(np.mean(dists))


def test_oracle_matches_definition():
    # the oracle itself: pi - mean arc distance etc.
    rng = np.random.default_rng(0)
    X = rng.standard_normal((6, 3))
    X = np.array([normalize(r) for r in X])
    x = normalize(rng.standard_normal(3))
    for kind in KINDS:
        got = sample_depth(x, X, kind).value
        assert got == pytest.approx(oracle_depth(x, list(X), kind), abs=1e-12)


class TestSampleDepth:
    def test_point_mass_at_self(self):
        for kind, expected in [(DepthKind.COSINE, 2.0), (DepthKind.ARC, math.pi), (DepthKind.CHORD, 2.0)]:
            assert sample_depth(E1, [E1], kind).value == pytest.approx(expected, abs=1e-12)

    def test_point_mass_at_antipode_is_zero_exact(self):
        # vectors whose squared norm is exactly 1.0 in float64
        for x in (E1, np.array([0.6, 0.8, 0.0]), np.array([0.5, 0.5, 0.5, 0.5])):
            for kind in KINDS:
                assert sample_depth(x, [-x], kind).value == 0.0

    def test_two_orthogonal_points_cosine(self):
        assert sample_depth(E1, [E2, E3], DepthKind.COSINE).value == pytest.approx(1.0, abs=1e-12)

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            sample_depth(E1, np.empty((0, 3)), DepthKind.COSINE)

    def test_value_carries_kind(self):
        dv = sample_depth(E1, [E2], DepthKind.ARC)
        assert dv.kind is DepthKind.ARC

    def test_positivity_off_antipodal_point_mass(self):
        rng = np.random.default_rng(1)
        X = np.array([normalize(v) for v in rng.standard_normal((20, 4))])
        x = normalize(rng.standard_normal(4))
        for kind in KINDS:
            assert sample_depth(x, X, kind).value > 0.0


class TestPairwiseSimilarity:
    def test_reference_values(self):
        assert pairwise_similarity(E1, E1, DepthKind.COSINE) == pytest.approx(2.0, abs=1e-12)
        assert pairwise_similarity(E1, -E1, DepthKind.CHORD) == 0.0
        assert pairwise_similarity(E1, E2, DepthKind.ARC) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_equals_point_mass_depth(self):
        rng = np.random.default_rng(2)
        x = normalize(rng.standard_normal(5))
        y = normalize(rng.standard_normal(5))
        for kind in KINDS:
            assert pairwise_similarity(x, y, kind) == pytest.approx(
                sample_depth(x, [y], kind).value, abs=1e-12
            )

    def test_ranges(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            x = normalize(rng.standard_normal(3))
            y = normalize(rng.standard_normal(3))
            assert 0.0 <= pairwise_similarity(x, y, DepthKind.ARC) <= math.pi
            assert 0.0 <= pairwise_similarity(x, y, DepthKind.COSINE) <= 2.0
            assert 0.0 <= pairwise_similarity(x, y, DepthKind.CHORD) <= 2.0


class TestDeepestPoint:
    def test_duplicate_dominates(self):
        X = np.stack([E1, E1, -E1])
        for kind in KINDS:
            # brute-force oracle over all three candidates
            depths = [np.mean([pairwise_similarity(x, w, kind) for w in X]) for x in X]
            assert int(np.argmax(depths)) == 0
            assert deepest_point_index(X, kind) == 0

    def test_single_point(self):
        assert deepest_point_index([E1], DepthKind.CHORD) == 0

    def test_equilateral_tie_broken_by_index(self):
        # pairwise dots are exactly 0, so cosine depths are exactly equal
        X = np.stack([E1, E2, E3])
        depths = sample_depths(X, DepthKind.COSINE)
        assert depths[0] == depths[1] == depths[2]
        assert deepest_point_index(X, DepthKind.COSINE) == 0
        for kind in (DepthKind.ARC, DepthKind.CHORD):
            d = sample_depths(X, kind)
            assert np.all(np.abs(d - d[0]) < 1e-12)

    def test_duplicated_rows_tie(self):
        X = np.stack([E2, E2, E1])
        for kind in KINDS:
            d = sample_depths(X, kind)
            assert d[0] == d[1]
            assert deepest_point_index(X, kind) == 0

    def test_affine_link_to_min_distance(self):
        rng = np.random.default_rng(4)
        X = np.array([normalize(v) for v in rng.standard_normal((40, 3))])
        for kind in KINDS:
            mean_dist = [np.mean([_DIST[kind](x, w) for w in X]) for x in X]
            assert deepest_point_index(X, kind) == int(np.argmin(mean_dist))


class TestAlphaRegion:
    def test_alpha_above_max_empty(self):
        X = np.stack([E1, E2])
        region = alpha_region(X, DepthKind.COSINE, 2.01)
        assert region.member_indices.size == 0

    def test_small_alpha_includes_all(self):
        rng = np.random.default_rng(5)
        X = np.array([normalize(v) for v in rng.standard_normal((30, 3))])
        region = alpha_region(X, DepthKind.COSINE, 1e-9)
        assert region.member_indices.size == 30

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            alpha_region(np.stack([E1, E2]), DepthKind.COSINE, 0.0)

    def test_nested_on_vmf_sample(self):
        X = sample(VmfParams(E3, 15.0), 1000, 21)
        for kind in KINDS:
            depths = sample_depths(X, kind)
            grid = np.quantile(depths, [0.1, 0.3, 0.5, 0.7, 0.9])
            regions = [set(alpha_region(X, kind, a).member_indices.tolist()) for a in grid]
            for bigger, smaller in zip(regions, regions[1:]):
                assert smaller <= bigger


class TestDepthMatrix:
    def test_single_point(self):
        for kind in KINDS:
            S = depth_matrix([E1], kind)
            assert S.shape == (1, 1)
            assert S[0, 0] == pytest.approx(kind.max_value, abs=1e-12)

    def test_symmetric_and_diagonal(self):
        rng = np.random.default_rng(6)
        X = np.array([normalize(v) for v in rng.standard_normal((25, 4))])
        for kind in KINDS:
            S = depth_matrix(X, kind)
            assert np.allclose(S, S.T, atol=1e-12)
            assert np.allclose(np.diagonal(S), kind.max_value, atol=1e-12)

    def test_row_mean_is_sample_depth(self):
        rng = np.random.default_rng(7)
        X = np.array([normalize(v) for v in rng.standard_normal((15, 3))])
        for kind in KINDS:
            S = depth_matrix(X, kind)
            for i in (0, 7, 14):
                assert S[i].mean() == pytest.approx(sample_depth(X[i], X, kind).value, abs=1e-12)

    def test_streaming_path_matches(self, monkeypatch):
        rng = np.random.default_rng(8)
        X = np.array([normalize(v) for v in rng.standard_normal((64, 3))])
        dense = sample_depths(X, DepthKind.CHORD)
        monkeypatch.setattr(depth_mod, "MATERIALIZE_LIMIT", 10)
        streamed = sample_depths(X, DepthKind.CHORD, block_rows=7)
        assert np.allclose(dense, streamed, atol=1e-12)

    def test_sparse_sample_matches_dense(self):
        rows = [
            SparseUnitVector(5, [0, 2], [0.6, 0.8]),
            SparseUnitVector(5, [1], [1.0]),
            SparseUnitVector(5, [0, 4], [-0.6, 0.8]),
        ]
        dense = np.stack([r.densify() for r in rows])
        for kind in KINDS:
            assert np.allclose(depth_matrix(rows, kind), depth_matrix(dense, kind), atol=1e-12)


class TestDepthProperties:
    def test_p1_rotation_invariance(self):
        rng = np.random.default_rng(9)
        X = np.array([normalize(v) for v in rng.standard_normal((30, 4))])
        x = normalize(rng.standard_normal(4))
        for seed in range(10):
            R = random_rotation(4, seed)
            XR = X @ R.T
            for kind in KINDS:
                assert sample_depth(R @ x, XR, kind).value == pytest.approx(
                    sample_depth(x, X, kind).value, abs=1e-9
                )

    def test_p2_maximality_at_center_statistical(self):
        mu = E3
        X = sample(VmfParams(mu, 20.0), 2000, 33)
        for kind in KINDS:
            deepest = X[deepest_point_index(X, kind)]
            assert geodesic_distance(deepest, mu) < 0.1

    def test_p3_monotone_along_geodesic_from_point_mass(self):
        x0 = E1
        u = E2  # orthogonal direction
        ts = np.linspace(0.0, math.pi, 50)
        path = np.outer(np.cos(ts), x0) + np.outer(np.sin(ts), u)
        for kind in KINDS:
            vals = [sample_depth(p, [x0], kind).value for p in path]
            assert np.all(np.diff(vals) < 0.0)

    def test_p4_minimum_attained_at_antipode(self):
        rng = np.random.default_rng(10)
        x0 = normalize(rng.standard_normal(3))
        probes = [normalize(rng.standard_normal(3)) for _ in range(100)]
        for kind in KINDS:
            at_antipode = sample_depth(-x0, [x0], kind).value
            assert at_antipode <= min(sample_depth(p, [x0], kind).value for p in probes)
            assert at_antipode < 1e-7


class TestAsSample:
    def test_rejects_1d(self):
        with pytest.raises(ValueError):
            as_sample(E1)

    def test_renormalizes_rows(self):
        X = as_sample([[1.0 + 1e-8, 0.0], [0.0, 1.0]])
        assert np.allclose(np.linalg.norm(X, axis=1), 1.0, atol=1e-12)

    def test_rejects_bad_rows(self):
        with pytest.raises(ValueError, match="unit"):
            as_sample([[2.0, 0.0], [0.0, 1.0]])
