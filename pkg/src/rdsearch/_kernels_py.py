"""Pure NumPy implementations of the enumeration kernels.

These mirror the compiled routines in ``rdsearch._native`` and are selected
by ``rdsearch._backend`` when the extension is unavailable or disabled.
Subsets and sign patterns are processed in lexicographic order in fixed-size
chunks; results do not depend on the chunking.
"""

from __future__ import annotations

import itertools

import numpy as np

_SUBSET_CHUNK = 8192
_SIGN_CHUNK = 1 << 17


def _combination_chunks(n: int, r: int, chunk: int):
    it = itertools.combinations(range(n), r)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.asarray(block, dtype=np.intp)


def _active_plus(dots: np.ndarray, tol: float) -> tuple[int, ...]:
    return tuple(np.flatnonzero(dots >= dots.max() - tol).tolist())


def _active_minus(dots: np.ndarray, tol: float) -> tuple[int, ...]:
    return tuple(np.flatnonzero(dots <= dots.min() + tol).tolist())


def best_subset_candidate(gram, size, cond_max, tol):
    """Best admissible uniform-value candidate over all ``size``-subsets.

    ``gram`` is the Gram matrix of the unit direction set.  For every subset
    S with a nonsingular, well-conditioned Gram block, solve G_S c = 1 and
    form the uniform value gamma_S = 1 / sqrt(1' G_S^{-1} 1); the combination
    u_S = sum(c_i d_i) / ||.|| attains inner product gamma_S with every
    member of S.  Both u_S and -u_S are kept only if the maximum inner
    product over the whole set matches the uniform value within ``tol``
    (otherwise the candidate does not witness the min-max value).

    Candidates are ranked by value, ties by the lexicographically smallest
    active set, so the result is independent of enumeration scheduling.
    Returns ``(value, sign, subset, active)`` or ``None``.
    """
    gram = np.asarray(gram, dtype=float)
    nd = gram.shape[0]
    if size < 1 or size > nd:
        return None
    best = None  # (value, active, sign, subset)
    for idx in _combination_chunks(nd, size, _SUBSET_CHUNK):
        sub = gram[idx[:, :, None], idx[:, None, :]]
        lam, vec = np.linalg.eigh(sub)
        keep = lam[:, 0] > lam[:, -1] / cond_max
        if not keep.any():
            continue
        idx, lam, vec = idx[keep], lam[keep], vec[keep]
        coeff = np.einsum("bij,bj->bi", vec, vec.sum(axis=1) / lam)
        sumc = coeff.sum(axis=1)
        pos = sumc > 0.0
        if not pos.all():
            idx, lam, vec, coeff, sumc = (a[pos] for a in (idx, lam, vec, coeff, sumc))
            if idx.size == 0:
                continue
        gamma = 1.0 / np.sqrt(sumc)
        dots = np.einsum("bi,bik->bk", coeff, gram[idx]) * gamma[:, None]
        mx = dots.max(axis=1)
        mn = dots.min(axis=1)
        plus_ok = np.abs(mx - gamma) <= tol
        minus_ok = np.abs(gamma - mn) <= tol
        if not (plus_ok.any() or minus_ok.any()):
            continue
        vmin = np.inf
        if minus_ok.any():
            vmin = (-gamma[minus_ok]).min()
        elif plus_ok.any():
            vmin = gamma[plus_ok].min()
        if best is not None and vmin > best[0]:
            continue
        if vmin < 0.0:
            rows = np.flatnonzero(minus_ok & (-gamma == vmin))
            for b in rows:
                cand = (vmin, _active_minus(dots[b], tol), -1, tuple(idx[b].tolist()))
                if best is None or cand[:2] < best[:2]:
                    best = cand
        else:
            rows = np.flatnonzero(plus_ok & (gamma == vmin))
            for b in rows:
                cand = (vmin, _active_plus(dots[b], tol), 1, tuple(idx[b].tolist()))
                if best is None or cand[:2] < best[:2]:
                    best = cand
    if best is None:
        return None
    value, active, sign, subset = best
    return float(value), int(sign), list(subset), list(active)


def sphere_tau_term(x_pos, feas_tol):
    """Largest x_i^2 + nu^2 over feasible extreme-point sign patterns.

    ``x_pos`` holds the nonzero coordinates of a unit vector, positive and
    nonincreasing, with k = len(x_pos) >= 2.  For each pivot i and each sign
    pattern over the other coordinates, nu = -(1/x_i) sum_j eps_j x_j
    sqrt(1 - x_j^2) is feasible when |nu| <= sqrt(1 - x_i^2) + feas_tol.
    Returns ``(best, feasible_count)`` with best = -1.0 if nothing was
    feasible.
    """
    x = np.asarray(x_pos, dtype=float)
    k = x.size
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    t = x * s
    best = -1.0
    count = 0
    total = 1 << (k - 1)
    shifts = np.arange(k - 1, dtype=np.uint64)
    for i in range(k):
        tt = np.delete(t, i)
        limit = s[i] + feas_tol
        for lo in range(0, total, _SIGN_CHUNK):
            hi = min(lo + _SIGN_CHUNK, total)
            codes = np.arange(lo, hi, dtype=np.uint64)
            signs = (((codes[:, None] >> shifts) & 1) * 2.0 - 1.0)
            nu = -(signs @ tt) / x[i]
            feas = np.abs(nu) <= limit
            nfeas = int(feas.sum())
            count += nfeas
            if nfeas:
                cand = x[i] * x[i] + float((nu[feas] ** 2).max())
                if cand > best:
                    best = cand
    return float(best), count
