"""Manifold primitives: validation, projections, retractions, bases."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from rdsearch.geometry import (BasisError, EmbeddedSphere, GeometryError,
                               Point, Subspace, Tangent, UnitSphere,
                               manifold_from_json)
from tests.conftest import MANIFOLD_KINDS, draw_manifold

FD_STEP = 1e-6
FD_TOL = 1e-4


def unit(v):
    return np.asarray(v, dtype=float) / np.linalg.norm(v)


def test_point_validation_sphere():
    s = UnitSphere(3)
    p = s.point([1.0, 0.0, 0.0])
    assert p.x.flags.writeable is False
    with pytest.raises(GeometryError):
        s.point([1.0, 1.0, 0.0])
    with pytest.raises(GeometryError):
        s.point([1.0, 0.0])
    with pytest.raises(GeometryError):
        s.point([np.nan, 0.0, 0.0])


def test_point_coords_are_copied():
    s = UnitSphere(3)
    coords = np.array([0.0, 1.0, 0.0])
    p = s.point(coords)
    coords[0] = 5.0
    assert p.x[0] == 0.0


def test_tangent_validation_sphere():
    s = UnitSphere(3)
    p = s.point([0.0, 0.0, 1.0])
    t = Tangent(p, [1.0, 2.0, 0.0])
    assert t.norm == pytest.approx(np.sqrt(5.0))
    with pytest.raises(GeometryError):
        Tangent(p, [0.0, 0.0, 1e-3])


def test_embedded_sphere_traits():
    m = EmbeddedSphere(2, 6)
    assert m.ambient_dim == 6 and m.dim == 2 and m.head == 3
    p = m.point([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    assert np.all(p.x[3:] == 0.0)
    with pytest.raises(GeometryError):
        m.point([1.0, 0.0, 0.0, 1e-13, 0.0, 0.0])  # trailing block must be exact zeros
    with pytest.raises(GeometryError):
        EmbeddedSphere(3, 3)


def test_subspace_validation():
    with pytest.raises(GeometryError):
        Subspace(np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]]))
    z = np.eye(4)[:, :2]
    m = Subspace(z)
    assert m.ambient_dim == 4 and m.dim == 2
    m.point([1.5, -2.0, 0.0, 0.0])
    with pytest.raises(GeometryError):
        m.point([1.5, -2.0, 0.1, 0.0])


@pytest.mark.parametrize("kind", MANIFOLD_KINDS)
def test_projection_properties(kind, rng):
    # Orthogonal projection: idempotent, tangent by construction, and the
    # residual v - Pv is orthogonal to every tangent direction.
    for _ in range(10):
        mf = draw_manifold(kind, rng)
        x = mf.random_point(rng)
        v = rng.standard_normal(mf.ambient_dim)
        t = mf.project(x, v)
        t2 = mf.project(x, t)
        assert_allclose(t2.v, t.v, atol=1e-12)
        basis = mf.tangent_basis(x)
        assert_allclose(basis @ (v - t.v), 0.0, atol=1e-9)


@pytest.mark.parametrize("kind", MANIFOLD_KINDS)
def test_project_many_matches_project(kind, rng):
    mf = draw_manifold(kind, rng)
    x = mf.random_point(rng)
    rows = rng.standard_normal((7, mf.ambient_dim))
    batch = mf.project_many(x, rows)
    single = np.array([mf.project(x, r).v for r in rows])
    assert_allclose(batch, single, atol=1e-14)


def test_gradient_is_projected_euclidean_gradient(rng):
    mf = UnitSphere(4)
    x = mf.random_point(rng)
    g = rng.standard_normal(4)
    grad = mf.gradient(x, g)
    assert_allclose(grad.v, g - x.x * float(x.x @ g), atol=1e-14)


def test_gradient_matches_finite_differences(rng):
    # Directional derivative of f(x) = b.x along retracted curves equals
    # the inner product with the projected gradient.
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    b = rng.standard_normal(5)
    grad = mf.gradient(x, b)
    basis = mf.tangent_basis(x)
    for d in basis:
        y0 = mf.retract(x, FD_STEP * d, "exponential")
        y1 = mf.retract(x, -FD_STEP * d, "exponential")
        fd = (float(b @ y0.x) - float(b @ y1.x)) / (2 * FD_STEP)
        assert fd == pytest.approx(float(grad.v @ d), abs=FD_TOL)


@pytest.mark.parametrize("scheme", ["metric", "exponential"])
@pytest.mark.parametrize("kind", MANIFOLD_KINDS)
def test_retract_stays_on_manifold(kind, scheme, rng):
    for _ in range(10):
        mf = draw_manifold(kind, rng)
        x = mf.random_point(rng)
        v = mf.project(x, rng.standard_normal(mf.ambient_dim)).v
        y = mf.retract(x, 1.7 * v, scheme)
        mf._check_point(y.x)  # raises if off the manifold


@pytest.mark.parametrize("scheme", ["metric", "exponential"])
def test_retract_first_order(scheme, rng):
    # R_x(tv) = x + tv + O(t^2)
    mf = UnitSphere(4)
    x = mf.random_point(rng)
    v = mf.project(x, rng.standard_normal(4)).v
    for t in (1e-3, 1e-4):
        y = mf.retract(x, t * v, scheme)
        assert np.linalg.norm(y.x - (x.x + t * v)) < 5 * t**2 * (1 + v @ v)


def test_exponential_retraction_great_circle():
    mf = UnitSphere(3)
    x = mf.point([1.0, 0.0, 0.0])
    v = np.array([0.0, np.pi / 2, 0.0])
    y = mf.retract(x, v, "exponential")
    assert_allclose(y.x, [0.0, 1.0, 0.0], atol=1e-15)
    y = mf.retract(x, 2 * v, "exponential")
    assert_allclose(y.x, [-1.0, 0.0, 0.0], atol=1e-15)


def test_metric_retraction_normalizes():
    mf = UnitSphere(3)
    x = mf.point([1.0, 0.0, 0.0])
    v = np.array([0.0, 1.0, 0.0])
    y = mf.retract(x, v, "metric")
    assert_allclose(y.x, unit([1.0, 1.0, 0.0]), atol=1e-15)


def test_zero_step_is_identity(rng):
    for kind in MANIFOLD_KINDS:
        mf = draw_manifold(kind, rng)
        x = mf.random_point(rng)
        for scheme in ("metric", "exponential"):
            y = mf.retract(x, np.zeros(mf.ambient_dim), scheme)
            assert_allclose(y.x, x.x, atol=0)


def test_unknown_retraction_scheme(rng):
    mf = UnitSphere(3)
    x = mf.random_point(rng)
    with pytest.raises(GeometryError):
        mf.retract(x, np.zeros(3), "cayley")


@pytest.mark.parametrize("kind", MANIFOLD_KINDS)
def test_tangent_basis_orthonormal_and_tangent(kind, rng):
    for _ in range(10):
        mf = draw_manifold(kind, rng)
        x = mf.random_point(rng)
        basis = mf.tangent_basis(x)
        assert basis.shape == (mf.dim, mf.ambient_dim)
        assert_allclose(basis @ basis.T, np.eye(mf.dim), atol=1e-12)
        for row in basis:
            mf._check_tangent(x.x, row)


def test_tangent_basis_default_is_deterministic(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    assert_allclose(mf.tangent_basis(x), mf.tangent_basis(x), atol=0)


def test_tangent_basis_seeded_and_rotated(rng):
    mf = UnitSphere(5)
    x = mf.random_point(rng)
    b1 = mf.tangent_basis(x, seed=1)
    b2 = mf.tangent_basis(x, seed=2)
    assert_allclose(b1, mf.tangent_basis(x, seed=1), atol=0)
    assert not np.allclose(b1, b2)
    b3 = mf.tangent_basis(x, rng=np.random.default_rng(9))
    assert_allclose(b3 @ b3.T, np.eye(4), atol=1e-12)


def test_random_point_on_manifold(rng):
    for kind in MANIFOLD_KINDS:
        mf = draw_manifold(kind, rng)
        for _ in range(20):
            mf._check_point(mf.random_point(rng).x)


def test_json_roundtrip(rng):
    for kind in MANIFOLD_KINDS:
        mf = draw_manifold(kind, rng)
        clone = manifold_from_json(json.loads(json.dumps(mf.to_json())))
        assert clone.kind == mf.kind
        assert clone.ambient_dim == mf.ambient_dim and clone.dim == mf.dim
        if kind == "subspace":
            assert_allclose(clone.basis, mf.basis, atol=0)


def test_basis_error_message():
    with pytest.raises(BasisError):
        raise BasisError("probe")


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 8), st.integers(0, 2**32 - 1))
def test_projection_idempotent_property(n, seed):
    gen = np.random.default_rng(seed)
    mf = UnitSphere(n)
    x = mf.random_point(gen)
    v = gen.standard_normal(n)
    t = mf.project(x, v)
    assert abs(float(x.x @ t.v)) < 1e-10
    assert np.allclose(mf.project(x, t).v, t.v, atol=1e-12)
