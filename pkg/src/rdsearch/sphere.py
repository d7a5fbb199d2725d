"""Cosine measure of the projected coordinate PSS on the unit sphere.

At a point x of the sphere in R^n (n >= 3), project {+-e_1, ..., +-e_n}
onto the tangent space.  The resulting set's cosine measure is 1/tau(x)
where tau(x)^2 maximizes ||v||^2 over a polytope whose extreme points have
one free coordinate; with k the number of nonzero coordinates of x this
reduces to

    tau(x)^2 = n - 2 + max_i ( x_i^2 + nu_i^2 ),

the inner maximum running over sign patterns of the other nonzero
coordinates with nu feasible.  The value always lies between 1/sqrt(n-1)
and 1/sqrt(n - 2 + max_i x_i^2), and at points whose k nonzero coordinates
all equal 1/sqrt(k) it is 1/sqrt(n - 2 + 1/k) for odd k and 1/sqrt(n - 1)
for even k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .geometry import UnitSphere
from .pss import EnumerationBudgetError, pss_plus_minus
from .tangent import projected_pss, tangent_cosine_measure

SUPPORT_TOL = 1e-12
_FEAS_TOL = 1e-12
_BOUND_TOL = 1e-9
MAX_SUPPORT = 22
_SCAN_TAG = 0x736366


@dataclass(frozen=True, eq=False)
class SphereCmResult:
    """Exact measure at one point, with closed-form two-sided bounds."""

    x: np.ndarray
    support: int
    tau: float
    cm: float
    lower: float
    upper: float

    def __post_init__(self):
        if not (self.lower <= self.cm + _BOUND_TOL
                and self.cm <= self.upper + _BOUND_TOL):
            raise RuntimeError(
                "internal error: computed measure escapes its two-sided bounds")


def _canonical_support(x: np.ndarray) -> np.ndarray:
    """Nonzero coordinates of |x|, sorted nonincreasing.

    The measure is invariant under coordinate permutations and sign flips,
    so only this profile matters.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    ax = ax[ax > SUPPORT_TOL]
    return np.sort(ax)[::-1].copy()


def cm_projected_plusminus_exact(x) -> SphereCmResult:
    """Exact cosine measure of the projected +-basis PSS at a sphere point."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 3:
        raise ValueError("the analysis needs ambient dimension n >= 3")
    if not np.all(np.isfinite(x)) or abs(np.linalg.norm(x) - 1.0) > 1e-12:
        raise ValueError("x must be a unit vector (within 1e-12)")
    sup = _canonical_support(x)
    k = sup.size
    if k > MAX_SUPPORT:
        raise EnumerationBudgetError(
            f"support {k} exceeds the sign-pattern budget ({MAX_SUPPORT}); "
            "use the generic tangent path")
    lower = 1.0 / math.sqrt(n - 1)
    upper = 1.0 / math.sqrt(n - 2 + float(np.max(np.abs(x))) ** 2)
    if k == 1:
        tau_sq = float(n - 1)
    else:
        term, feasible = _backend.sphere_tau_term(sup, _FEAS_TOL)
        if feasible == 0:
            raise RuntimeError("internal error: no feasible extreme point")
        tau_sq = n - 2.0 + term
    tau = math.sqrt(tau_sq)
    return SphereCmResult(x=x, support=k, tau=tau, cm=1.0 / tau,
                          lower=lower, upper=upper)


def special_point(n: int, k: int) -> np.ndarray:
    """The point with k coordinates equal to 1/sqrt(k) and the rest zero."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    x = np.zeros(n)
    x[:k] = 1.0 / math.sqrt(k)
    return x


def special_point_cm(n: int, k: int) -> float:
    """Closed form at ``special_point``: parity of k decides the value."""
    if k % 2 == 1:
        return 1.0 / math.sqrt(n - 2 + 1.0 / k)
    return 1.0 / math.sqrt(n - 1)


def cross_check_generic(x) -> dict:
    """Compare the closed-form path with the generic tangent-space one.

    The generic path builds the actual projected polling set and runs the
    exact subset enumeration in tangent coordinates, so the two values are
    computed through entirely different code.  Kept to small n where the
    enumeration is comfortable.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if n > 8:
        raise ValueError("the generic cross-check is limited to n <= 8")
    exact = cm_projected_plusminus_exact(x).cm
    sphere = UnitSphere(n)
    point = sphere.point(x)
    pset = projected_pss(point, pss_plus_minus(np.eye(n)))
    generic = tangent_cosine_measure(pset, sphere.tangent_basis(point)).cosine_measure
    return {"exact": exact, "generic": generic, "gap": abs(exact - generic)}


def sphere_heatmap(resolution: int) -> list[dict]:
    """Measure over an equiangular (theta, phi) grid on the sphere in R^3.

    theta runs over [0, pi] inclusive, phi over [0, 2 pi) exclusive, with
    ``resolution`` samples each; x = (sin t cos p, sin t sin p, cos t).
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    thetas = np.linspace(0.0, math.pi, resolution)
    phis = np.linspace(0.0, 2.0 * math.pi, resolution, endpoint=False)
    rows = []
    for theta in thetas:
        st, ct = math.sin(theta), math.cos(theta)
        for phi in phis:
            x = np.array([st * math.cos(phi), st * math.sin(phi), ct])
            x /= np.linalg.norm(x)
            cm = cm_projected_plusminus_exact(x).cm
            rows.append({"theta": float(theta), "phi": float(phi),
                         "x1": float(x[0]), "x2": float(x[1]),
                         "x3": float(x[2]), "cm": float(cm)})
    return rows


def cm_range_scan(n_list, samples_per_n: int = 100, seed=0) -> list[dict]:
    """Bounds and landmark values per dimension, plus a random-point mean."""
    rows = []
    for n in n_list:
        n = int(n)
        if n < 3:
            raise ValueError("scan dimensions must be at least 3")
        rng = np.random.default_rng([_SCAN_TAG, int(seed) & (2**64 - 1), n])
        values = []
        for _ in range(samples_per_n):
            g = rng.standard_normal(n)
            values.append(cm_projected_plusminus_exact(g / np.linalg.norm(g)).cm)
        rows.append({
            "n": n,
            "lower": 1.0 / math.sqrt(n - 1),
            "upper": math.sqrt(n) / (n - 1),
            "value_k1": cm_projected_plusminus_exact(special_point(n, 1)).cm,
            "value_k_nminus1": cm_projected_plusminus_exact(special_point(n, n - 1)).cm,
            "value_k_n": cm_projected_plusminus_exact(special_point(n, n)).cm,
            "mean_random": float(np.mean(values)),
        })
    return rows


def corollary_53_table(n_list) -> list[dict]:
    """Family complexity of projected vs intrinsic +-basis polling.

    chi_projected = 2n(n-1) and chi_intrinsic = 2(n-1)^2.  For n >= 3 the
    entries are verified against the witness point with all coordinates
    equal: its projected set keeps all 2n directions, and for even n its
    measure attains the 1/sqrt(n-1) floor.
    """
    rows = []
    for n in n_list:
        n = int(n)
        if n < 2:
            raise ValueError("table dimensions must be at least 2")
        if n >= 3:
            witness = special_point(n, n)
            sphere = UnitSphere(n)
            pset = projected_pss(sphere.point(witness), pss_plus_minus(np.eye(n)))
            if len(pset) != 2 * n:
                raise RuntimeError("internal error: witness dropped projected directions")
            if n % 2 == 0:
                cm = cm_projected_plusminus_exact(witness).cm
                if abs(cm - 1.0 / math.sqrt(n - 1)) > 1e-10:
                    raise RuntimeError("internal error: witness measure is off the floor")
        rows.append({"n": n, "chi_projected": float(2 * n * (n - 1)),
                     "chi_intrinsic": float(2 * (n - 1) ** 2)})
    return rows
