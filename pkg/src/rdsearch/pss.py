"""Positive spanning sets of R^m and their cosine / complexity measures.

Three classical generators built from an orthogonal matrix B with columns
b_1..b_m:

* ``pss_plus_minus``:  {b_1, ..., b_m, -b_1, ..., -b_m}
* ``pss_minimal_sum``: {b_1, ..., b_m, -(1/sqrt(m)) sum b_i}
* ``pss_uniform_angles``: m+1 unit vectors with pairwise inner products
  -1/m, realized through the Cholesky factor of the Gram matrix with unit
  diagonal and -1/m off the diagonal, mapped through B.

The cosine measure cm(D) = min over unit v of max over d of cos(d, v) is
computed exactly by enumerating direction subsets: each subset S with a
nonsingular Gram block yields the unique vector u_S making a constant angle
with all of S, and the minimum over admissible +-u_S candidates (those whose
constant value really is the set-wide maximum) is the measure.  Subsets of
size below the dimension cover minimizers whose active set is rank
deficient, and a linear program over the polar cone catches the degenerate
value-zero case that no subset candidate can represent.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import _backend

UNIT_TOL = 1e-12
ADMIT_TOL = 1e-9
COND_MAX = 1e12
MAX_DIM = 12
MAX_SUBSETS = 20_000_000

_GENERATOR_NAMES = ("plus_minus", "minimal_sum", "uniform_angles")


class EnumerationBudgetError(RuntimeError):
    """The direction set is too large for exact enumeration."""


class NotPositiveSpanningError(ValueError):
    """Raised when a complexity measure is requested for a non-PSS."""


def _check_rotation(b: np.ndarray, m: int | None = None) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("rotation must be a square matrix")
    if m is not None and b.shape[0] != m:
        raise ValueError(f"rotation has dimension {b.shape[0]}, expected {m}")
    if np.max(np.abs(b.T @ b - np.eye(b.shape[0]))) > UNIT_TOL:
        raise ValueError("rotation matrix is not orthogonal within 1e-12")
    return b


@dataclass(frozen=True, eq=False)
class EuclideanPSS:
    """An ordered set of nonzero directions of R^m, one per row."""

    directions: np.ndarray
    generator: str = "custom"
    rotation: np.ndarray | None = None
    rotation_seed: int | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.directions, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("directions must form a nonempty 2-d array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("directions contain non-finite entries")
        norms = np.linalg.norm(arr, axis=1)
        if np.any(norms == 0.0):
            raise ValueError("zero direction in the set")
        if self.generator in _GENERATOR_NAMES and np.max(np.abs(norms - 1.0)) > UNIT_TOL:
            raise ValueError("generated directions must be unit vectors")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "directions", arr)

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return self.directions.shape[0]

    def to_json(self) -> dict:
        if self.generator in _GENERATOR_NAMES:
            out = {"generator": self.generator, "m": self.dim}
            if self.rotation_seed is not None:
                out["rotation_seed"] = self.rotation_seed
            return out
        return {"generator": "custom",
                "directions": [list(map(float, row)) for row in self.directions]}


def pss_plus_minus(b: np.ndarray) -> EuclideanPSS:
    """The 2m coordinate-type directions {b_i} and {-b_i}."""
    b = _check_rotation(b)
    return EuclideanPSS(np.vstack([b.T, -b.T]), generator="plus_minus", rotation=b)


def pss_minimal_sum(b: np.ndarray) -> EuclideanPSS:
    """{b_1, ..., b_m, -(1/sqrt(m)) sum b_i}: a minimal PSS of m+1 vectors."""
    b = _check_rotation(b)
    m = b.shape[0]
    last = -b.sum(axis=1) / math.sqrt(m)
    return EuclideanPSS(np.vstack([b.T, last]), generator="minimal_sum", rotation=b)


def pss_uniform_angles(b: np.ndarray) -> EuclideanPSS:
    """m+1 unit directions with every pairwise inner product equal to -1/m.

    The first m are B L^T columns where L L^T is the Gram matrix with unit
    diagonal and -1/m elsewhere; the last is minus their sum.
    """
    b = _check_rotation(b)
    m = b.shape[0]
    gram = np.full((m, m), -1.0 / m) + np.diag(np.full(m, 1.0 + 1.0 / m))
    chol = np.linalg.cholesky(gram)
    first = chol @ b.T  # row i is B v_i
    last = -first.sum(axis=0)
    return EuclideanPSS(np.vstack([first, last]), generator="uniform_angles", rotation=b)


_BUILDERS = {
    "plus_minus": pss_plus_minus,
    "minimal_sum": pss_minimal_sum,
    "uniform_angles": pss_uniform_angles,
}

GENERATORS = tuple(_BUILDERS)


def build_pss(generator: str, m: int, rotation_seed: int | None = None) -> EuclideanPSS:
    """Named generator over R^m, optionally applied to a seeded Haar rotation."""
    if generator not in _BUILDERS:
        raise ValueError(f"unknown generator {generator!r}")
    if m < 1:
        raise ValueError("dimension must be positive")
    rot = random_rotation(m, rotation_seed) if rotation_seed is not None else np.eye(m)
    pss = _BUILDERS[generator](rot)
    if rotation_seed is None:
        return pss
    return dataclasses.replace(pss, rotation_seed=int(rotation_seed))


def pss_from_json(obj: dict) -> EuclideanPSS:
    if not isinstance(obj, dict) or "generator" not in obj:
        raise ValueError("PSS descriptor must be an object with a 'generator'")
    gen = obj["generator"]
    if gen == "custom":
        return EuclideanPSS(np.asarray(obj["directions"], dtype=float))
    return build_pss(gen, int(obj["m"]), obj.get("rotation_seed"))


def random_rotation(m: int, seed=None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Haar-distributed orthogonal matrix from QR with sign-fixed diagonal."""
    if m < 1:
        raise ValueError("dimension must be positive")
    gen = rng if rng is not None else np.random.default_rng(seed)
    while True:
        mat = gen.standard_normal((m, m))
        q, r = np.linalg.qr(mat)
        diag = np.diagonal(r)
        if np.min(np.abs(diag)) <= 1e-12:
            continue
        return q * np.sign(diag)


@dataclass(frozen=True, eq=False)
class MeasureReport:
    """Exact cosine measure with a minimizing witness.

    ``active_set`` lists the directions whose cosine with the witness
    attains the measure (within the admissibility tolerance), and
    ``complexity_measure`` is cardinality times cm^-2 when cm > 0.
    """

    cosine_measure: float
    complexity_measure: float | None
    witness: np.ndarray
    active_set: tuple[int, ...]
    cardinality: int


def _as_directions(d) -> np.ndarray:
    if isinstance(d, EuclideanPSS):
        arr = np.array(d.directions, dtype=float)
    else:
        arr = np.asarray(d, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise ValueError("expected a nonempty 2-d array of directions")
        if not np.all(np.isfinite(arr)):
            raise ValueError("directions contain non-finite entries")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero direction in the set")
    return np.ascontiguousarray(arr / norms[:, None])


def _subset_count(nd: int, m: int) -> int:
    return sum(math.comb(nd, r) for r in range(1, m + 1))


def _check_budget(nd: int, m: int) -> None:
    if m <= MAX_DIM and (nd <= 2 * m + 8 or _subset_count(nd, m) <= MAX_SUBSETS):
        return
    raise EnumerationBudgetError(
        f"{nd} directions in dimension {m} exceed the exact enumeration "
        "budget; use cosine_measure_sampled instead")


def _polar_cone_vector(unit: np.ndarray) -> np.ndarray | None:
    """A unit vector v with <d, v> <= 0 for all directions, or None.

    For a full-rank set the polar cone is nontrivial iff the LP
    min sum_d <d, v> subject to <d, v> <= 0 and a unit box has a negative
    optimum.  The returned vector is only a candidate; callers re-evaluate
    the min-max objective at it, so LP tolerances cannot corrupt the result.
    """
    from scipy.optimize import linprog

    nd, m = unit.shape
    res = linprog(unit.sum(axis=0), A_ub=unit, b_ub=np.zeros(nd),
                  bounds=[(-1.0, 1.0)] * m, method="highs")
    if not res.success:
        return None
    v = np.asarray(res.x, dtype=float)
    nv = np.linalg.norm(v)
    if nv <= 1e-9:
        return None
    return v / nv


def _candidate_from_vector(unit: np.ndarray, v: np.ndarray, tol: float):
    dots = unit @ v
    value = float(dots.max())
    active = tuple(np.flatnonzero(dots >= value - tol).tolist())
    return (value, active, ("vector", v))


def _better(a, b) -> bool:
    if b is None:
        return True
    return a[:2] < b[:2]


def _cm_search(unit: np.ndarray, tol: float, cond_max: float):
    """(value, witness, active) with witness a unit vector of R^m."""
    nd, m = unit.shape

    svals = np.linalg.svd(unit, compute_uv=False)
    rank_tol = svals[0] * max(nd, m) * np.finfo(float).eps
    rank = int(np.count_nonzero(svals > rank_tol))
    if rank < m:
        # work inside the span; any orthogonal complement direction gives
        # a max cosine of zero, which caps the measure from above
        _, _, vt = np.linalg.svd(unit, full_matrices=True)
        span = vt[:rank].T
        val, wit, active = _cm_search(np.ascontiguousarray(unit @ span), tol, cond_max)
        if val <= 0.0:
            return val, span @ wit, active
        wit = vt[rank].copy()
        lead = np.flatnonzero(np.abs(wit) > 1e-12)
        if lead.size and wit[lead[0]] < 0:
            wit = -wit
        dots = unit @ wit
        active = tuple(np.flatnonzero(dots >= dots.max() - tol).tolist())
        return 0.0, wit, active

    gram = unit @ unit.T
    gram = (gram + gram.T) / 2.0

    best = None
    raw = _backend.best_subset_candidate(gram, m, cond_max, tol)
    if raw is not None:
        value, sign, subset, active = raw
        best = (value, tuple(active), ("subset", sign, tuple(subset)))

    extend = best is None or best[0] <= 0.0
    if best is not None and best[0] > 0.0:
        v = _polar_cone_vector(unit)
        if v is not None:
            cand = _candidate_from_vector(unit, v, tol)
            if _better(cand, best):
                best = cand
                extend = True
    if extend:
        for r in range(m - 1, 0, -1):
            raw = _backend.best_subset_candidate(gram, r, cond_max, tol)
            if raw is None:
                continue
            value, sign, subset, active = raw
            cand = (value, tuple(active), ("subset", sign, tuple(subset)))
            if _better(cand, best):
                best = cand
    if best is None:
        raise RuntimeError("internal error: no admissible cosine-measure candidate")

    value, active, payload = best
    if payload[0] == "vector":
        witness = payload[1]
    else:
        _, sign, subset = payload
        sub = unit[list(subset)]
        coeff = np.linalg.solve(sub @ sub.T, np.ones(len(subset)))
        w = sub.T @ coeff
        witness = sign * w / np.linalg.norm(w)
    return float(value), witness, active


def cosine_measure_exact(d, *, tol: float = ADMIT_TOL,
                         cond_max: float = COND_MAX) -> MeasureReport:
    """Exact cosine measure of a direction set, with witness and active set.

    Raises EnumerationBudgetError beyond the enumeration budget.  Ties
    between minimizing candidates are broken by the lexicographically
    smallest active set, so the report does not depend on enumeration
    order.
    """
    unit = _as_directions(d)
    nd, m = unit.shape
    _check_budget(nd, m)
    value, witness, active = _cm_search(unit, tol, cond_max)
    chi = nd * value ** -2 if value > 0 else None
    return MeasureReport(cosine_measure=float(value), complexity_measure=chi,
                         witness=witness, active_set=tuple(active),
                         cardinality=nd)


_SAMPLE_CHUNK = 1 << 16


def cosine_measure_sampled(d, samples: int, seed=0) -> float:
    """Monte Carlo upper bound: min over sampled unit vectors of the max
    cosine.  Deterministic for a fixed seed; always >= the exact measure."""
    if samples < 1:
        raise ValueError("need at least one sample")
    unit = _as_directions(d)
    m = unit.shape[1]
    rng = np.random.default_rng(seed)
    best = np.inf
    remaining = int(samples)
    while remaining > 0:
        b = min(_SAMPLE_CHUNK, remaining)
        v = rng.standard_normal((b, m))
        v /= np.linalg.norm(v, axis=1)[:, None]
        best = min(best, float((v @ unit.T).max(axis=1).min()))
        remaining -= b
    return best


def complexity_measure(d) -> float:
    """Cardinality times cm^-2; rejects sets that do not span positively."""
    report = cosine_measure_exact(d)
    if report.cosine_measure <= 0.0:
        raise NotPositiveSpanningError(
            f"cosine measure {report.cosine_measure:.6g} is not positive")
    return report.cardinality * report.cosine_measure ** -2
