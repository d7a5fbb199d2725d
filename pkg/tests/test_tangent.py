"""Tangent-space polling sets: intrinsic and projected constructions."""

import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rdsearch.geometry import EmbeddedSphere, Subspace, UnitSphere
from rdsearch.pss import EuclideanPSS, build_pss, cosine_measure_exact
from rdsearch.tangent import (EmptyProjectionError, PollingStrategy,
                              intrinsic_pss, manifold_complexity_measure,
                              projected_pss, strategy_from_json,
                              tangent_cosine_measure)
from tests.conftest import MANIFOLD_KINDS, draw_manifold

CM_TOL = 1e-9


def test_intrinsic_preserves_measure_and_cardinality(rng):
    # The basis map is an isometry, so cm and cardinality carry over.
    for kind in MANIFOLD_KINDS:
        mf = draw_manifold(kind, rng)
        x = mf.random_point(rng)
        basis = mf.tangent_basis(x)
        for generator in ("plus_minus", "minimal_sum", "uniform_angles"):
            pss = build_pss(generator, mf.dim)
            pset = intrinsic_pss(x, basis, pss)
            assert len(pset) == pss.directions.shape[0]
            ambient = cosine_measure_exact(pss).cosine_measure
            lifted = tangent_cosine_measure(pset, basis).cosine_measure
            assert lifted == pytest.approx(ambient, abs=CM_TOL)


def test_intrinsic_directions_are_tangent(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    basis = mf.tangent_basis(x)
    pset = intrinsic_pss(x, basis, build_pss("minimal_sum", 4))
    for t in pset.tangent_vectors():
        assert abs(float(x.x @ t.v)) < 1e-10
        assert t.norm == pytest.approx(1.0, abs=1e-12)


def test_intrinsic_dimension_mismatch(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    basis = mf.tangent_basis(x)
    with pytest.raises(ValueError):
        intrinsic_pss(x, basis, build_pss("plus_minus", 3))


def test_intrinsic_accepts_tangent_list(rng):
    mf = UnitSphere(4)
    x = mf.random_point(rng)
    mat = mf.tangent_basis(x)
    as_tangents = [mf.project(x, row) for row in mat]
    a = intrinsic_pss(x, mat, build_pss("plus_minus", 3))
    b = intrinsic_pss(x, as_tangents, build_pss("plus_minus", 3))
    assert_allclose(a.directions, b.directions, atol=1e-15)


def test_projected_drops_normal_directions():
    # At the north pole, +/- e_n project to zero and are dropped; the other
    # 2(n-1) ambient directions survive unchanged.
    n = 5
    mf = UnitSphere(n)
    x = mf.point([0.0] * (n - 1) + [1.0])
    pset = projected_pss(x, build_pss("plus_minus", n))
    assert len(pset) == 2 * (n - 1)
    assert pset.dropped_count == 2
    for t in pset.tangent_vectors():
        assert t.norm == pytest.approx(1.0, abs=1e-12)


def test_projected_normalizes_surviving_rows(rng):
    mf = UnitSphere(4)
    x = mf.random_point(rng)
    pset = projected_pss(x, build_pss("minimal_sum", 4))
    norms = np.linalg.norm(pset.directions, axis=1)
    assert_allclose(norms, 1.0, atol=1e-12)


def test_projected_requires_ambient_dimension(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    with pytest.raises(ValueError):
        projected_pss(x, build_pss("plus_minus", 4))


def test_projected_all_dropped_raises():
    # A subspace orthogonal to every polling direction kills the whole set.
    z = np.eye(4)[:, :1]
    mf = Subspace(z)
    x = mf.point([1.0, 0.0, 0.0, 0.0])
    doomed = EuclideanPSS(np.array([[0.0, 1.0, 0.0, 0.0],
                                    [0.0, -1.0, 0.0, 0.0],
                                    [0.0, 0.0, 1.0, 0.0]]))
    with pytest.raises(EmptyProjectionError):
        projected_pss(x, doomed)


def test_projection_never_hurts_measure(rng):
    # Projected polling sets are at least as well spread as the ambient set.
    for kind in MANIFOLD_KINDS:
        for _ in range(5):
            mf = draw_manifold(kind, rng)
            x = mf.random_point(rng)
            basis = mf.tangent_basis(x)
            for generator in ("plus_minus", "minimal_sum"):
                pss = build_pss(generator, mf.ambient_dim)
                ambient = cosine_measure_exact(pss).cosine_measure
                pset = projected_pss(x, pss)
                lifted = tangent_cosine_measure(pset, basis).cosine_measure
                assert lifted >= ambient - 1e-9


def test_tangent_measure_is_basis_independent(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    pset = projected_pss(x, build_pss("plus_minus", 5))
    b1 = mf.tangent_basis(x)
    b2 = mf.tangent_basis(x, seed=3)
    r1 = tangent_cosine_measure(pset, b1)
    r2 = tangent_cosine_measure(pset, b2)
    assert r1.cosine_measure == pytest.approx(r2.cosine_measure, abs=1e-10)


def test_sphere_projected_plusminus_known_value():
    # At the first standard basis vector the projected signed basis keeps
    # 2(n-1) tangent directions of a (n-1)-dimensional sphere, with
    # cm = 1/sqrt(n-1).
    n = 6
    mf = UnitSphere(n)
    x = mf.point([1.0] + [0.0] * (n - 1))
    pset = projected_pss(x, build_pss("plus_minus", n))
    report = tangent_cosine_measure(pset, mf.tangent_basis(x))
    assert report.cosine_measure == pytest.approx(1.0 / math.sqrt(n - 1), abs=CM_TOL)


def test_polling_strategy_validation():
    with pytest.raises(ValueError):
        PollingStrategy("diagonal", "plus_minus")
    with pytest.raises(ValueError):
        PollingStrategy("intrinsic", "dense")


@pytest.mark.parametrize("style", ["intrinsic", "projected"])
@pytest.mark.parametrize("rotate", [False, True])
def test_strategy_build_deterministic(style, rotate, rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    strat = PollingStrategy(style, "plus_minus", rotate=rotate, seed=4)
    a = strat.build(x)
    b = strat.build(x)
    assert_allclose(a.directions, b.directions, atol=0)
    if rotate:
        c = strat.build(x, rng=np.random.default_rng(11))
        assert not np.allclose(a.directions, c.directions)


def test_strategy_rotation_preserves_intrinsic_measure(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    basis = mf.tangent_basis(x)
    plain = PollingStrategy("intrinsic", "minimal_sum").build(x)
    spun = PollingStrategy("intrinsic", "minimal_sum", rotate=True, seed=2).build(x)
    r_plain = tangent_cosine_measure(plain, basis).cosine_measure
    r_spun = tangent_cosine_measure(spun, basis).cosine_measure
    assert r_spun == pytest.approx(r_plain, abs=CM_TOL)


def test_strategy_cardinalities(rng):
    mf = EmbeddedSphere(3, 7)
    x = mf.random_point(rng)
    assert len(PollingStrategy("intrinsic", "plus_minus").build(x)) == 6
    assert len(PollingStrategy("intrinsic", "minimal_sum").build(x)) == 4
    proj = PollingStrategy("projected", "plus_minus").build(x)
    assert len(proj) + proj.dropped_count == 14


def test_strategy_json_roundtrip():
    strat = PollingStrategy("projected", "uniform_angles", rotate=True, seed=9)
    clone = strategy_from_json(json.loads(json.dumps(strat.to_json())))
    assert clone == strat


def test_manifold_complexity_measure_sphere(rng):
    # chi over random sphere points for the projected signed basis sits in
    # the theoretical range [2n(n-2+max x^2), 2n(n-1)].
    n = 5
    mf = UnitSphere(n)

    def build_set(x, rng_local=None):
        return projected_pss(x, build_pss("plus_minus", n))

    fam = manifold_complexity_measure(build_set, manifold=mf, sample_count=40,
                                      seed=3)
    assert fam.sup_cardinality == 2 * n
    assert fam.sample_size == 40
    assert 2 * n * (n - 2) <= fam.chi <= 2 * n * (n - 1) + 1e-6
    assert fam.inf_cosine > 0.0


def test_manifold_complexity_measure_intrinsic(rng):
    mf = UnitSphere(4)

    def build_set(x, rng_local=None):
        return intrinsic_pss(x, mf.tangent_basis(x), build_pss("plus_minus", 3))

    fam = manifold_complexity_measure(build_set, manifold=mf, sample_count=10,
                                      seed=0)
    assert fam.chi == pytest.approx(2 * 3 * 3, abs=1e-6)
