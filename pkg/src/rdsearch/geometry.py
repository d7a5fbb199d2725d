"""Embedded manifolds used by the direct-search toolkit.

Three families, all Riemannian submanifolds of R^n with the ambient inner
product: the unit sphere of R^n, a unit sphere of dimension m whose ambient
copy lives in the first m+1 coordinates of R^n (the remaining coordinates
are pinned to zero), and the linear subspace spanned by an orthonormal
basis.  Tangent projection is orthogonal projection onto the tangent space,
so the Riemannian gradient is the projected Euclidean gradient.

Two retraction schemes are provided.  On spheres, "metric" maps v to
(x + v) / ||x + v|| and "exponential" to cos(||v||) x + sin(||v||) v/||v||;
on a subspace both reduce to x + v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import stable_seed

POINT_TOL = 1e-12
TANGENT_TOL = 1e-10
BASIS_TOL = 1e-10

_QR_DIAG_TOL = 1e-10
_BASIS_ATTEMPTS = 8
_CANONICAL_TAG = 0x67656F


class GeometryError(ValueError):
    """Invalid point, tangent vector, or manifold description."""


class BasisError(GeometryError):
    """Tangent-basis construction failed (degenerate QR after retries)."""


def _as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if arr.ndim != 1:
        raise GeometryError(f"{name} must be one-dimensional")
    if n is not None and arr.size != n:
        raise GeometryError(f"{name} has dimension {arr.size}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise GeometryError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    """A validated manifold point with its ambient coordinates."""

    manifold: "Manifold"
    x: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.x, self.manifold.ambient_dim, "point")
        self.manifold._check_point(arr)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "x", arr)


@dataclass(frozen=True, eq=False)
class Tangent:
    """A tangent vector attached to its base point."""

    point: Point
    v: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.v, self.point.manifold.ambient_dim, "tangent vector")
        self.point.manifold._check_tangent(self.point.x, arr)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "v", arr)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.v))


def _coerce_tangent(x: Point, v) -> np.ndarray:
    if isinstance(v, Tangent):
        if v.point is not x and not np.array_equal(v.point.x, x.x):
            raise GeometryError("tangent vector is based at a different point")
        return np.asarray(v.v, dtype=float)
    return _as_vector(v, x.manifold.ambient_dim, "tangent vector")


def _sphere_head_basis(head: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis of the tangent space of the unit sphere at ``head``.

    QR of a random square matrix whose first column is replaced by the
    point; the remaining columns of Q are the basis.  Degenerate draws are
    retried on the next substream.
    """
    h = head.size
    for _ in range(_BASIS_ATTEMPTS):
        mat = rng.standard_normal((h, h))
        mat[:, 0] = head
        q, r = np.linalg.qr(mat)
        diag = np.diagonal(r)
        if np.min(np.abs(diag)) <= _QR_DIAG_TOL:
            continue
        q = q * np.sign(diag)
        return q[:, 1:].T
    raise BasisError(f"no nondegenerate tangent basis after {_BASIS_ATTEMPTS} draws")


def _basis_rng(x_coords: np.ndarray, seed, rng) -> np.random.Generator:
    if rng is not None:
        return rng
    if seed is not None:
        return np.random.default_rng([_CANONICAL_TAG, int(seed) & (2**64 - 1)])
    # canonical mode: a deterministic per-point stream
    return np.random.default_rng([_CANONICAL_TAG, stable_seed(x_coords.tobytes())])


class Manifold:
    """Base class; concrete manifolds define projection, retraction, bases."""

    kind: str = ""
    ambient_dim: int
    dim: int

    def point(self, coords) -> Point:
        return Point(self, coords)

    def project(self, x: Point, v) -> Tangent:
        if isinstance(v, Tangent):
            arr = _coerce_tangent(x, v)
        else:
            arr = _as_vector(v, self.ambient_dim, "ambient vector")
        return Tangent(x, self._project_raw(x.x, arr))

    def project_many(self, x: Point, rows: np.ndarray) -> np.ndarray:
        """Tangent projections of the rows of a matrix (no wrapping)."""
        rows = np.asarray(rows, dtype=float)
        return self._project_rows(x.x, rows)

    def gradient(self, x: Point, euclid_grad) -> Tangent:
        """Riemannian gradient: tangent projection of the Euclidean one."""
        return self.project(x, euclid_grad)

    def retract(self, x: Point, v, scheme: str = "exponential") -> Point:
        vec = _coerce_tangent(x, v)
        self._check_tangent(x.x, vec)
        scheme = scheme.lower()
        if scheme not in ("metric", "exponential"):
            raise GeometryError(f"unknown retraction scheme {scheme!r}")
        return Point(self, self._retract_raw(x.x, vec, scheme))

    def tangent_basis(self, x: Point, *, seed=None, rng=None) -> np.ndarray:
        """Orthonormal tangent basis at x, one vector per row.

        With neither ``seed`` nor ``rng`` the basis is canonical: fixed for a
        subspace, and a per-point deterministic draw on spheres.  ``seed``
        gives a reproducible randomized basis; ``rng`` draws from a live
        generator.
        """
        raise NotImplementedError

    def random_point(self, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    # internal checks, raising GeometryError
    def _check_point(self, x: np.ndarray) -> None:
        raise NotImplementedError

    def _check_tangent(self, x: np.ndarray, v: np.ndarray) -> None:
        raise NotImplementedError

    def _project_raw(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _project_rows(self, x: np.ndarray, rows: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _retract_raw(self, x: np.ndarray, v: np.ndarray, scheme: str) -> np.ndarray:
        raise NotImplementedError


def _sphere_retract(x: np.ndarray, v: np.ndarray, scheme: str) -> np.ndarray:
    nv = np.linalg.norm(v)
    if nv == 0.0:
        return x.copy()
    if scheme == "metric":
        y = x + v
    else:
        y = np.cos(nv) * x + (np.sin(nv) / nv) * v
    return y / np.linalg.norm(y)


@dataclass(frozen=True, eq=False)
class UnitSphere(Manifold):
    """Unit sphere of R^n (dimension n - 1)."""

    n: int
    kind = "unit_sphere"

    def __post_init__(self):
        if self.n < 2:
            raise GeometryError("unit sphere needs ambient dimension >= 2")

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def dim(self) -> int:
        return self.n - 1

    def _check_point(self, x):
        if abs(np.linalg.norm(x) - 1.0) > POINT_TOL:
            raise GeometryError("point is not on the unit sphere (norm deviates)")

    def _check_tangent(self, x, v):
        if abs(float(x @ v)) > TANGENT_TOL:
            raise GeometryError("vector is not tangent to the sphere (not orthogonal to x)")

    def _project_raw(self, x, v):
        return v - x * float(x @ v)

    def _project_rows(self, x, rows):
        return rows - np.outer(rows @ x, x)

    def _retract_raw(self, x, v, scheme):
        return _sphere_retract(x, v, scheme)

    def tangent_basis(self, x: Point, *, seed=None, rng=None) -> np.ndarray:
        return _sphere_head_basis(x.x, _basis_rng(x.x, seed, rng))

    def random_point(self, rng):
        g = rng.standard_normal(self.n)
        return Point(self, g / np.linalg.norm(g))

    def to_json(self):
        return {"kind": "unit_sphere", "n": self.n}


@dataclass(frozen=True, eq=False)
class EmbeddedSphere(Manifold):
    """Unit sphere of dimension m carried in the first m+1 coordinates of R^n.

    The trailing n - m - 1 coordinates of every point are stored as exact
    zeros, so the manifold sits in a higher-codimension ambient space while
    staying isometric to the plain sphere.
    """

    m: int
    n: int
    kind = "embedded_sphere"

    def __post_init__(self):
        if self.m < 1:
            raise GeometryError("embedded sphere needs dimension >= 1")
        if self.n < self.m + 1:
            raise GeometryError("ambient dimension must be at least m + 1")

    @property
    def ambient_dim(self) -> int:
        return self.n

    @property
    def dim(self) -> int:
        return self.m

    @property
    def head(self) -> int:
        return self.m + 1

    def _check_point(self, x):
        if abs(np.linalg.norm(x[: self.head]) - 1.0) > POINT_TOL:
            raise GeometryError("leading block is not on the unit sphere")
        if np.any(x[self.head:] != 0.0):
            raise GeometryError("trailing coordinates must be exactly zero")

    def _check_tangent(self, x, v):
        h = self.head
        resid = abs(float(x[:h] @ v[:h]))
        tail = float(np.linalg.norm(v[h:]))
        if resid + tail > TANGENT_TOL:
            raise GeometryError("vector is not tangent to the embedded sphere")

    def _project_raw(self, x, v):
        h = self.head
        out = np.zeros_like(v)
        out[:h] = v[:h] - x[:h] * float(x[:h] @ v[:h])
        return out

    def _project_rows(self, x, rows):
        h = self.head
        out = np.zeros_like(rows)
        out[:, :h] = rows[:, :h] - np.outer(rows[:, :h] @ x[:h], x[:h])
        return out

    def _retract_raw(self, x, v, scheme):
        h = self.head
        out = np.zeros_like(x)
        out[:h] = _sphere_retract(x[:h], v[:h], scheme)
        return out

    def tangent_basis(self, x: Point, *, seed=None, rng=None) -> np.ndarray:
        head_basis = _sphere_head_basis(x.x[: self.head],
                                        _basis_rng(x.x, seed, rng))
        out = np.zeros((self.m, self.n))
        out[:, : self.head] = head_basis
        return out

    def random_point(self, rng):
        g = rng.standard_normal(self.head)
        out = np.zeros(self.n)
        out[: self.head] = g / np.linalg.norm(g)
        return Point(self, out)

    def to_json(self):
        return {"kind": "embedded_sphere", "m": self.m, "n": self.n}


@dataclass(frozen=True, eq=False)
class Subspace(Manifold):
    """Linear subspace of R^n spanned by the orthonormal columns of Z."""

    basis: np.ndarray = field(repr=False)
    kind = "subspace"

    def __post_init__(self):
        z = np.asarray(self.basis, dtype=float)
        if z.ndim != 2 or z.shape[1] < 1 or z.shape[0] < z.shape[1]:
            raise GeometryError("subspace basis must be an n x m matrix with n >= m >= 1")
        if not np.all(np.isfinite(z)):
            raise GeometryError("subspace basis has non-finite entries")
        if np.max(np.abs(z.T @ z - np.eye(z.shape[1]))) > POINT_TOL:
            raise GeometryError("subspace basis columns are not orthonormal")
        z = z.copy()
        z.setflags(write=False)
        object.__setattr__(self, "basis", z)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def _check_point(self, x):
        z = self.basis
        if np.linalg.norm(x - z @ (z.T @ x)) > TANGENT_TOL:
            raise GeometryError("point is not in the subspace")

    def _check_tangent(self, x, v):
        z = self.basis
        if np.linalg.norm(v - z @ (z.T @ v)) > TANGENT_TOL:
            raise GeometryError("vector is not in the subspace")

    def _project_raw(self, x, v):
        z = self.basis
        return z @ (z.T @ v)

    def _project_rows(self, x, rows):
        z = self.basis
        return (rows @ z) @ z.T

    def _retract_raw(self, x, v, scheme):
        return x + v

    def tangent_basis(self, x: Point, *, seed=None, rng=None) -> np.ndarray:
        if seed is None and rng is None:
            return self.basis.T.copy()
        gen = _basis_rng(x.x, seed, rng)
        for _ in range(_BASIS_ATTEMPTS):
            mat = gen.standard_normal((self.dim, self.dim))
            q, r = np.linalg.qr(mat)
            diag = np.diagonal(r)
            if np.min(np.abs(diag)) <= _QR_DIAG_TOL:
                continue
            q = q * np.sign(diag)
            return (self.basis @ q).T
        raise BasisError(f"no nondegenerate tangent basis after {_BASIS_ATTEMPTS} draws")

    def random_point(self, rng):
        g = rng.standard_normal(self.ambient_dim)
        z = self.basis
        return Point(self, z @ (z.T @ g))

    def to_json(self):
        return {"kind": "subspace", "Z": [list(map(float, row)) for row in self.basis]}


def manifold_from_json(obj: dict) -> Manifold:
    """Rebuild a manifold from its JSON descriptor."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise GeometryError("manifold descriptor must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "unit_sphere":
        return UnitSphere(int(obj["n"]))
    if kind == "embedded_sphere":
        return EmbeddedSphere(int(obj["m"]), int(obj["n"]))
    if kind == "subspace":
        return Subspace(np.asarray(obj["Z"], dtype=float))
    raise GeometryError(f"unknown manifold kind {kind!r}")
