# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled enumeration kernels.

Same contracts as ``rdsearch._kernels_py``: subset candidates for the exact
cosine measure, and the extreme-point sign scan used by the sphere analysis.
Selected at import time by ``rdsearch._backend``.
"""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_lapack cimport dsyevd

cnp.import_array()


cdef inline bint _lex_less(Py_ssize_t* a, Py_ssize_t na,
                           Py_ssize_t* b, Py_ssize_t nb) noexcept nogil:
    cdef Py_ssize_t i, n = na if na < nb else nb
    for i in range(n):
        if a[i] != b[i]:
            return a[i] < b[i]
    return na < nb


def best_subset_candidate(object gram_obj, int size, double cond_max, double tol):
    """See ``rdsearch._kernels_py.best_subset_candidate``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] gram_arr = \
        np.ascontiguousarray(gram_obj, dtype=np.float64)
    cdef double[:, ::1] gram = gram_arr
    cdef Py_ssize_t nd = gram.shape[0]
    cdef int r = size
    if r < 1 or r > nd:
        return None

    # LAPACK workspace query for dsyevd on an r x r matrix
    cdef int info = 0, lwork = -1, liwork = -1, n_r = r
    cdef double wk_query = 0.0
    cdef int iwk_query = 0
    dsyevd("V", "L", &n_r, NULL, &n_r, NULL, &wk_query, &lwork, &iwk_query,
           &liwork, &info)
    lwork = <int> wk_query
    liwork = iwk_query
    if lwork < 1 + 6 * r + 2 * r * r:
        lwork = 1 + 6 * r + 2 * r * r
    if liwork < 3 + 5 * r:
        liwork = 3 + 5 * r

    cdef cnp.ndarray[cnp.float64_t, ndim=1] a_arr = np.empty(r * r)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w_arr = np.empty(r)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] work_arr = np.empty(lwork)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] iwork_arr = np.empty(liwork, dtype=np.int32)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] c_arr = np.empty(r)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dots_arr = np.empty(nd)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] comb_arr = np.arange(r, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] bc_arr = np.empty(r, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] ba_arr = np.empty(nd, dtype=np.intp)
    cdef cnp.ndarray[cnp.intp_t, ndim=1] ca_arr = np.empty(nd, dtype=np.intp)

    cdef double* a = <double*> a_arr.data
    cdef double* w = <double*> w_arr.data
    cdef double* work = <double*> work_arr.data
    cdef int* iwork = <int*> iwork_arr.data
    cdef double* csol = <double*> c_arr.data
    cdef double* dots = <double*> dots_arr.data
    cdef Py_ssize_t* comb = <Py_ssize_t*> comb_arr.data
    cdef Py_ssize_t* best_comb = <Py_ssize_t*> bc_arr.data
    cdef Py_ssize_t* best_active = <Py_ssize_t*> ba_arr.data
    cdef Py_ssize_t* cand_active = <Py_ssize_t*> ca_arr.data

    cdef bint found = False
    cdef double best_val = 0.0
    cdef int best_sign = 0
    cdef Py_ssize_t best_alen = 0

    cdef Py_ssize_t i, j, kk
    cdef double lam_min, lam_max, ssum, scale, sumc, gamma, acc, maxd, mind
    cdef double value
    cdef int sign_case
    cdef Py_ssize_t alen
    cdef bint take

    with nogil:
        while True:
            # Gram block of the current subset (symmetric, layout-agnostic)
            for i in range(r):
                for j in range(r):
                    a[i * r + j] = gram[comb[i], comb[j]]
            info = 0
            dsyevd("V", "L", &n_r, a, &n_r, w, work, &lwork, iwork, &liwork,
                   &info)
            if info == 0:
                lam_min = w[0]
                lam_max = w[r - 1]
                if lam_min > lam_max / cond_max:
                    # c = V diag(1/lambda) V^T 1  solves  G c = 1
                    for i in range(r):
                        csol[i] = 0.0
                    for kk in range(r):
                        ssum = 0.0
                        for i in range(r):
                            ssum += a[kk * r + i]
                        scale = ssum / w[kk]
                        for i in range(r):
                            csol[i] += a[kk * r + i] * scale
                    sumc = 0.0
                    for i in range(r):
                        sumc += csol[i]
                    if sumc > 0.0:
                        gamma = 1.0 / sqrt(sumc)
                        maxd = -1e300
                        mind = 1e300
                        for j in range(nd):
                            acc = 0.0
                            for i in range(r):
                                acc += csol[i] * gram[comb[i], j]
                            acc *= gamma
                            dots[j] = acc
                            if acc > maxd:
                                maxd = acc
                            if acc < mind:
                                mind = acc
                        for sign_case in range(2):
                            if sign_case == 0:
                                if fabs(maxd - gamma) > tol:
                                    continue
                                value = gamma
                            else:
                                if fabs(gamma - mind) > tol:
                                    continue
                                value = -gamma
                            if found and value > best_val:
                                continue
                            alen = 0
                            if sign_case == 0:
                                for j in range(nd):
                                    if dots[j] >= maxd - tol:
                                        cand_active[alen] = j
                                        alen += 1
                            else:
                                for j in range(nd):
                                    if dots[j] <= mind + tol:
                                        cand_active[alen] = j
                                        alen += 1
                            take = False
                            if not found or value < best_val:
                                take = True
                            elif _lex_less(cand_active, alen, best_active,
                                           best_alen):
                                take = True
                            if take:
                                found = True
                                best_val = value
                                best_sign = 1 if sign_case == 0 else -1
                                best_alen = alen
                                for j in range(alen):
                                    best_active[j] = cand_active[j]
                                for i in range(r):
                                    best_comb[i] = comb[i]
            # advance to the next combination in lexicographic order
            i = r - 1
            while i >= 0 and comb[i] == nd - r + i:
                i -= 1
            if i < 0:
                break
            comb[i] += 1
            for j in range(i + 1, r):
                comb[j] = comb[j - 1] + 1

    if not found:
        return None
    return (float(best_val), int(best_sign),
            [int(best_comb[i]) for i in range(r)],
            [int(best_active[j]) for j in range(best_alen)])


def sphere_tau_term(object x_obj, double feas_tol):
    """See ``rdsearch._kernels_py.sphere_tau_term``."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] x_arr = \
        np.ascontiguousarray(x_obj, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef Py_ssize_t k = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s_arr = np.empty(k)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] t_arr = np.empty(k)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] tt_arr = np.empty(k - 1)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] eps_arr = np.empty(k - 1)
    cdef double* s = <double*> s_arr.data
    cdef double* t = <double*> t_arr.data
    cdef double* tt = <double*> tt_arr.data
    cdef double* eps = <double*> eps_arr.data

    cdef double best = -1.0
    cdef long long count = 0
    cdef unsigned long long total = 1ULL << (k - 1)
    cdef unsigned long long step, v
    cdef Py_ssize_t i, j, b
    cdef double xi, limit, sigma, nu, val, one_m

    with nogil:
        for i in range(k):
            one_m = 1.0 - x[i] * x[i]
            if one_m < 0.0:
                one_m = 0.0
            s[i] = sqrt(one_m)
            t[i] = x[i] * s[i]
        for i in range(k):
            xi = x[i]
            limit = s[i] + feas_tol
            sigma = 0.0
            j = 0
            while j < k:
                if j != i:
                    if j < i:
                        tt[j] = t[j]
                    else:
                        tt[j - 1] = t[j]
                j += 1
            for j in range(k - 1):
                eps[j] = 1.0
                sigma += tt[j]
            step = 0
            while True:
                nu = -sigma / xi
                if fabs(nu) <= limit:
                    count += 1
                    val = xi * xi + nu * nu
                    if val > best:
                        best = val
                step += 1
                if step == total:
                    break
                # binary-reflected Gray code: flip the ctz(step) bit
                v = step
                b = 0
                while (v & 1) == 0:
                    v >>= 1
                    b += 1
                eps[b] = -eps[b]
                sigma += 2.0 * eps[b] * tt[b]
    return float(best), int(count)
