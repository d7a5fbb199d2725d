"""Polling sets in tangent spaces: intrinsic and projected constructions.

An intrinsic set maps a PSS of R^m through an orthonormal tangent basis,
which preserves cardinality and all pairwise inner products, hence the
cosine measure.  A projected set pushes an ambient PSS of R^n through the
tangent projector and renormalizes, dropping directions whose projection is
numerically zero; its cosine measure in the tangent space is never below
the ambient one, but its cardinality can be up to twice the coordinate
count.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .geometry import BASIS_TOL, TANGENT_TOL, GeometryError, Manifold, Point, Tangent
from .pss import EuclideanPSS, MeasureReport, build_pss, cosine_measure_exact, random_rotation

DROP_TOL = 1e-12
_STRATEGY_TAG = 0x706F6C
_STYLES = ("intrinsic", "projected")
_GENERATORS = ("plus_minus", "minimal_sum", "uniform_angles")


class EmptyProjectionError(ValueError):
    """Every direction of the ambient set projected to numerical zero."""


@dataclass(frozen=True, eq=False)
class TangentPollingSet:
    """Ordered unit tangent directions at a base point, one per row."""

    base: Point
    directions: np.ndarray
    construction: str
    generator: str = "custom"
    rotation_seed: int | None = None
    dropped_count: int = 0

    def __post_init__(self):
        arr = np.ascontiguousarray(self.directions, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("polling set must contain at least one direction")
        if arr.shape[1] != self.base.manifold.ambient_dim:
            raise ValueError("direction dimension does not match the ambient space")
        if not np.all(np.isfinite(arr)):
            raise ValueError("polling directions contain non-finite entries")
        norms = np.linalg.norm(arr, axis=1)
        if np.max(np.abs(norms - 1.0)) > TANGENT_TOL:
            raise ValueError("polling directions must be unit vectors")
        mf, x = self.base.manifold, self.base.x
        for row in arr:
            mf._check_tangent(x, row)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "directions", arr)

    def __len__(self) -> int:
        return self.directions.shape[0]

    def tangent_vectors(self) -> list[Tangent]:
        return [Tangent(self.base, row) for row in self.directions]


def _basis_matrix(x: Point, basis) -> np.ndarray:
    """Validate an orthonormal tangent basis given as rows or Tangent list."""
    if isinstance(basis, np.ndarray):
        mat = np.asarray(basis, dtype=float)
    else:
        rows = []
        for item in basis:
            rows.append(item.v if isinstance(item, Tangent) else np.asarray(item, float))
        mat = np.asarray(rows, dtype=float)
    mf = x.manifold
    if mat.ndim != 2 or mat.shape != (mf.dim, mf.ambient_dim):
        raise GeometryError(
            f"tangent basis must be {mf.dim} x {mf.ambient_dim}, got {mat.shape}")
    if np.max(np.abs(mat @ mat.T - np.eye(mf.dim))) > BASIS_TOL:
        raise GeometryError("tangent basis is not orthonormal")
    for row in mat:
        mf._check_tangent(x.x, row)
    return mat


def intrinsic_pss(x: Point, basis, pss: EuclideanPSS) -> TangentPollingSet:
    """Map a PSS of R^m through an orthonormal tangent basis at x."""
    mat = _basis_matrix(x, basis)
    if pss.dim != x.manifold.dim:
        raise ValueError(
            f"PSS dimension {pss.dim} does not match manifold dimension {x.manifold.dim}")
    return TangentPollingSet(base=x, directions=pss.directions @ mat,
                             construction="intrinsic", generator=pss.generator,
                             rotation_seed=pss.rotation_seed)


def projected_pss(x: Point, pss: EuclideanPSS, drop_tol: float = DROP_TOL) -> TangentPollingSet:
    """Project an ambient PSS onto the tangent space at x and renormalize.

    Directions with projection norm at most ``drop_tol`` times their input
    norm are dropped (counted in ``dropped_count``); nearly coincident
    survivors are kept as they are.
    """
    mf = x.manifold
    if pss.dim != mf.ambient_dim:
        raise ValueError(
            f"PSS dimension {pss.dim} does not match ambient dimension {mf.ambient_dim}")
    proj = mf.project_many(x, pss.directions)
    norms = np.linalg.norm(proj, axis=1)
    keep = norms > drop_tol * np.linalg.norm(pss.directions, axis=1)
    dropped = int((~keep).sum())
    if not keep.any():
        raise EmptyProjectionError("all directions projected to numerical zero")
    kept = proj[keep] / norms[keep][:, None]
    return TangentPollingSet(base=x, directions=kept, construction="projected",
                             generator=pss.generator, rotation_seed=pss.rotation_seed,
                             dropped_count=dropped)


def tangent_cosine_measure(pset: TangentPollingSet, basis) -> MeasureReport:
    """Cosine measure of a tangent polling set, via coordinates in a basis.

    The value is basis independent (the coordinate map is an isometry
    between the tangent space and R^m).
    """
    mat = _basis_matrix(pset.base, basis)
    coords = pset.directions @ mat.T
    return cosine_measure_exact(coords)


@dataclass(frozen=True)
class FamilyComplexity:
    """sup of cardinalities and inf of cosine measures over sampled points."""

    sup_cardinality: int
    inf_cosine: float
    chi: float
    sample_size: int


def manifold_complexity_measure(build_set, points=None, *, manifold: Manifold | None = None,
                                sample_count: int | None = None, seed=0) -> FamilyComplexity:
    """Complexity measure of a polling family over a point sample.

    ``build_set`` maps a Point to a TangentPollingSet.  Pass explicit
    ``points`` or a (manifold, sample_count, seed) sampling plan.
    """
    if points is None:
        if manifold is None or sample_count is None or sample_count < 1:
            raise ValueError("need explicit points or a manifold with a positive sample_count")
        rng = np.random.default_rng([_STRATEGY_TAG, int(seed) & (2**64 - 1)])
        points = [manifold.random_point(rng) for _ in range(sample_count)]
    points = list(points)
    if not points:
        raise ValueError("empty point sample")
    sup_card = 0
    inf_cm = np.inf
    for x in points:
        pset = build_set(x)
        report = tangent_cosine_measure(pset, x.manifold.tangent_basis(x))
        sup_card = max(sup_card, len(pset))
        inf_cm = min(inf_cm, report.cosine_measure)
    if inf_cm <= 0.0:
        raise ValueError("family is not positively spanning at some sampled point")
    return FamilyComplexity(sup_cardinality=sup_card, inf_cosine=float(inf_cm),
                            chi=float(sup_card * inf_cm ** -2), sample_size=len(points))


@dataclass(frozen=True)
class PollingStrategy:
    """How to build the polling set at an iterate.

    ``intrinsic`` maps the generator's PSS of R^m through a tangent basis:
    the canonical one, or a fresh randomized one per call when ``rotate``.
    ``projected`` projects the generator's PSS of R^n, applied to a fresh
    Haar rotation per call when ``rotate``.
    """

    style: str
    generator: str
    rotate: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.style not in _STYLES:
            raise ValueError(f"unknown polling style {self.style!r}")
        if self.generator not in _GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")

    def build(self, x: Point, rng: np.random.Generator | None = None) -> TangentPollingSet:
        if rng is None:
            rng = np.random.default_rng([_STRATEGY_TAG, int(self.seed) & (2**64 - 1)])
        mf = x.manifold
        if self.style == "intrinsic":
            pss = build_pss(self.generator, mf.dim)
            basis = mf.tangent_basis(x, rng=rng) if self.rotate else mf.tangent_basis(x)
            out = intrinsic_pss(x, basis, pss)
        else:
            rot = random_rotation(mf.ambient_dim, rng=rng) if self.rotate else np.eye(mf.ambient_dim)
            pss = _named_pss(self.generator, rot)
            out = projected_pss(x, pss)
        if self.rotate:
            out = dataclasses.replace(out, rotation_seed=int(self.seed))
        return out

    def to_json(self) -> dict:
        return {"style": self.style, "generator": self.generator,
                "rotate": self.rotate, "seed": self.seed}


def _named_pss(generator: str, rotation: np.ndarray) -> EuclideanPSS:
    from . import pss as _pssmod
    return _pssmod._BUILDERS[generator](rotation)


def strategy_from_json(obj: dict) -> PollingStrategy:
    if not isinstance(obj, dict):
        raise ValueError("polling strategy must be a JSON object")
    try:
        return PollingStrategy(style=obj["style"], generator=obj["generator"],
                               rotate=bool(obj.get("rotate", False)),
                               seed=int(obj.get("seed", 0)))
    except KeyError as exc:
        raise ValueError(f"polling strategy is missing field {exc.args[0]!r}") from None
