"""Shared helpers: seeded random manifolds and points."""

import numpy as np
import pytest

from rdsearch.geometry import EmbeddedSphere, Subspace, UnitSphere

MANIFOLD_KINDS = ("unit_sphere", "embedded_sphere", "subspace")


def draw_manifold(kind: str, rng: np.random.Generator, n_max: int = 8):
    """Random manifold of the given kind with ambient dimension <= n_max."""
    if kind == "unit_sphere":
        n = int(rng.integers(3, n_max + 1))
        return UnitSphere(n)
    if kind == "embedded_sphere":
        n = int(rng.integers(4, n_max + 1))
        m = int(rng.integers(2, n))
        return EmbeddedSphere(m, n)
    if kind == "subspace":
        n = int(rng.integers(3, n_max + 1))
        m = int(rng.integers(1, n))
        q, r = np.linalg.qr(rng.standard_normal((n, m)))
        return Subspace(q * np.sign(np.diagonal(r)))
    raise ValueError(kind)


def draw_point(manifold, rng: np.random.Generator):
    return manifold.random_point(rng)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
