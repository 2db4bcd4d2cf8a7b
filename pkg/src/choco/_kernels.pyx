# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Newton kernels for coefficient systems.

Same algorithm and return conventions as ``_kernels_py``: damped Newton with
Armijo backtracking on ||F||^2, stopping on the scaled residual
max_e |F_e| / (1 + sum_t |term_t|).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isfinite
from libc.stdlib cimport malloc, free

cnp.import_array()

DEF MAXV = 32

cdef int CONVERGED = 0
cdef int MAX_ITER = 1
cdef int SINGULAR = 2
cdef int STALLED = 3
cdef int DIVERGED = 4

cdef double ARMIJO_C = 1e-4
cdef double MIN_STEP = 1.0 / 1048576.0
cdef double BLOWUP = 1e8
cdef double PIVOT_RATIO = 1e-14
cdef int POLISH_STEPS = 2


cdef struct Sys:
    int V
    int E
    int T
    int TJ
    int maxe
    const int* term_eq
    const double* term_coef
    const int* term_exp
    const int* jac_idx
    const double* jac_coef
    const int* jac_exp


cdef inline void _powers(const Sys* s, const double* x, double* pw) noexcept nogil:
    cdef int v, e, stride = s.maxe + 1
    for v in range(s.V):
        pw[v * stride] = 1.0
        for e in range(1, stride):
            pw[v * stride + e] = pw[v * stride + e - 1] * x[v]


cdef void _residual(const Sys* s, const double* x, double* pw, double* F, double* mag) noexcept nogil:
    cdef int t, v, stride = s.maxe + 1
    cdef double m
    _powers(s, x, pw)
    for t in range(s.E):
        F[t] = 0.0
        mag[t] = 0.0
    for t in range(s.T):
        m = s.term_coef[t]
        for v in range(s.V):
            m *= pw[v * stride + s.term_exp[t * s.V + v]]
        F[s.term_eq[t]] += m
        mag[s.term_eq[t]] += fabs(m)


cdef void _jacobian(const Sys* s, const double* x, double* pw, double* J) noexcept nogil:
    cdef int t, v, stride = s.maxe + 1
    cdef double m
    _powers(s, x, pw)
    for t in range(s.E * s.V):
        J[t] = 0.0
    for t in range(s.TJ):
        m = s.jac_coef[t]
        for v in range(s.V):
            m *= pw[v * stride + s.jac_exp[t * s.V + v]]
        J[s.jac_idx[t]] += m


cdef double _scaled(const Sys* s, const double* F, const double* mag) noexcept nogil:
    cdef int e
    cdef double r = 0.0, q
    for e in range(s.E):
        q = fabs(F[e]) / (1.0 + mag[e])
        if not (q <= r):
            r = q
    return r


cdef double _phi(const Sys* s, const double* F) noexcept nogil:
    cdef int e
    cdef double acc = 0.0
    for e in range(s.E):
        acc += F[e] * F[e]
    return acc


cdef int _solve(int n, double* A, double* b) noexcept nogil:
    """Solve A d = b in place (d returned in b); 0 on success."""
    cdef int i, j, k, piv
    cdef double best, tmp, f, pmax = 0.0, pmin = 1e308
    for k in range(n):
        piv = k
        best = fabs(A[k * n + k])
        for i in range(k + 1, n):
            if fabs(A[i * n + k]) > best:
                best = fabs(A[i * n + k])
                piv = i
        if not isfinite(best) or best == 0.0:
            return 1
        if best > pmax:
            pmax = best
        if best < pmin:
            pmin = best
        if piv != k:
            for j in range(n):
                tmp = A[k * n + j]
                A[k * n + j] = A[piv * n + j]
                A[piv * n + j] = tmp
            tmp = b[k]
            b[k] = b[piv]
            b[piv] = tmp
        for i in range(k + 1, n):
            f = A[i * n + k] / A[k * n + k]
            if f != 0.0:
                for j in range(k + 1, n):
                    A[i * n + j] -= f * A[k * n + j]
                b[i] -= f * b[k]
    if pmin < PIVOT_RATIO * pmax:
        return 1
    for i in range(n - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, n):
            tmp -= A[i * n + j] * b[j]
        b[i] = tmp / A[i * n + i]
        if not isfinite(b[i]):
            return 1
    return 0


cdef int _newton_one(const Sys* s, double* x, int max_iter, double tol,
                     double* work, double* out_res, int* out_iter) noexcept nogil:
    cdef int V = s.V, E = s.E, it, v, status = MAX_ITER, accepted, polish
    cdef double* pw = work
    cdef double* F = pw + V * (s.maxe + 1)
    cdef double* mag = F + E
    cdef double* J = mag + E
    cdef double* d = J + E * V
    cdef double* xt = d + V
    cdef double* Ft = xt + V
    cdef double* magt = Ft + E
    cdef double res, phi, phit, lam, rest
    _residual(s, x, pw, F, mag)
    res = _scaled(s, F, mag)
    phi = _phi(s, F)
    out_iter[0] = 0
    for it in range(max_iter + 1):
        if res <= tol:
            status = CONVERGED
            break
        if it == max_iter:
            status = MAX_ITER
            break
        _jacobian(s, x, pw, J)
        for v in range(E):
            d[v] = -F[v]
        if _solve(V, J, d) != 0:
            status = SINGULAR
            break
        out_iter[0] += 1
        lam = 1.0
        accepted = 0
        while lam >= MIN_STEP:
            for v in range(V):
                xt[v] = x[v] + lam * d[v]
            _residual(s, xt, pw, Ft, magt)
            phit = _phi(s, Ft)
            if isfinite(phit) and phit <= (1.0 - 2.0 * ARMIJO_C * lam) * phi:
                accepted = 1
                break
            lam *= 0.5
        if not accepted:
            status = STALLED
            break
        for v in range(V):
            x[v] = xt[v]
        for v in range(E):
            F[v] = Ft[v]
            mag[v] = magt[v]
        phi = phit
        res = _scaled(s, F, mag)
        for v in range(V):
            if not isfinite(x[v]) or fabs(x[v]) > BLOWUP:
                status = DIVERGED
                break
        if status == DIVERGED:
            break
    if status == CONVERGED:
        for polish in range(POLISH_STEPS):
            _residual(s, x, pw, F, mag)
            _jacobian(s, x, pw, J)
            for v in range(E):
                d[v] = -F[v]
            if _solve(V, J, d) != 0:
                break
            for v in range(V):
                xt[v] = x[v] + d[v]
            _residual(s, xt, pw, Ft, magt)
            rest = _scaled(s, Ft, magt)
            if rest <= res:
                for v in range(V):
                    x[v] = xt[v]
                res = rest
    out_res[0] = res
    return status


cdef Sys _make_sys(cs,
                   const int[::1] term_eq, const double[::1] term_coef, const int[:, ::1] term_exp,
                   const int[::1] jac_idx, const double[::1] jac_coef, const int[:, ::1] jac_exp):
    cdef Sys s
    s.V = cs.n_vars
    s.E = cs.n_eq
    s.T = term_eq.shape[0]
    s.TJ = jac_idx.shape[0]
    s.maxe = max(cs.max_exp, 1)
    s.term_eq = &term_eq[0] if s.T else NULL
    s.term_coef = &term_coef[0] if s.T else NULL
    s.term_exp = &term_exp[0, 0] if s.T else NULL
    s.jac_idx = &jac_idx[0] if s.TJ else NULL
    s.jac_coef = &jac_coef[0] if s.TJ else NULL
    s.jac_exp = &jac_exp[0, 0] if s.TJ else NULL
    return s


def newton_batch(cs, X0, int max_iter=100, double tol=1e-10):
    """Damped Newton from every row of ``X0``.

    Returns ``(X, scaled_residual, iterations, status)``.
    """
    cdef const int[::1] term_eq = np.ascontiguousarray(cs.term_eq, dtype=np.int32)
    cdef const double[::1] term_coef = np.ascontiguousarray(cs.term_coef, dtype=np.float64)
    cdef const int[:, ::1] term_exp = np.ascontiguousarray(cs.term_exp, dtype=np.int32)
    cdef const int[::1] jac_idx = np.ascontiguousarray(cs.jac_idx, dtype=np.int32)
    cdef const double[::1] jac_coef = np.ascontiguousarray(cs.jac_coef, dtype=np.float64)
    cdef const int[:, ::1] jac_exp = np.ascontiguousarray(cs.jac_exp, dtype=np.int32)
    cdef Sys s = _make_sys(cs, term_eq, term_coef, term_exp, jac_idx, jac_coef, jac_exp)
    if s.V > MAXV or s.V != s.E:
        raise ValueError("newton_batch needs a square system with at most 32 unknowns")
    X = np.array(X0, dtype=np.float64, order="C", ndmin=2, copy=True)
    cdef double[:, ::1] Xv = X
    cdef Py_ssize_t B = X.shape[0], b
    res = np.empty(B, dtype=np.float64)
    iters = np.zeros(B, dtype=np.int32)
    status = np.empty(B, dtype=np.int32)
    cdef double[::1] resv = res
    cdef int[::1] itv = iters
    cdef int[::1] stv = status
    cdef Py_ssize_t wsize = s.V * (s.maxe + 1) + 4 * s.E + s.E * s.V + 2 * s.V + 8
    cdef double* work = <double*> malloc(wsize * sizeof(double))
    if work == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(B):
                stv[b] = _newton_one(&s, &Xv[b, 0], max_iter, tol, work, &resv[b], &itv[b])
    finally:
        free(work)
    return X, res, iters, status


def evaluate(cs, X):
    """Residuals, per-equation term magnitudes and Jacobians for a batch."""
    cdef const int[::1] term_eq = np.ascontiguousarray(cs.term_eq, dtype=np.int32)
    cdef const double[::1] term_coef = np.ascontiguousarray(cs.term_coef, dtype=np.float64)
    cdef const int[:, ::1] term_exp = np.ascontiguousarray(cs.term_exp, dtype=np.int32)
    cdef const int[::1] jac_idx = np.ascontiguousarray(cs.jac_idx, dtype=np.int32)
    cdef const double[::1] jac_coef = np.ascontiguousarray(cs.jac_coef, dtype=np.float64)
    cdef const int[:, ::1] jac_exp = np.ascontiguousarray(cs.jac_exp, dtype=np.int32)
    cdef Sys s = _make_sys(cs, term_eq, term_coef, term_exp, jac_idx, jac_coef, jac_exp)
    Xa = np.array(X, dtype=np.float64, order="C", ndmin=2)
    cdef double[:, ::1] Xv = Xa
    cdef Py_ssize_t B = Xa.shape[0], b
    F = np.empty((B, s.E))
    mag = np.empty((B, s.E))
    J = np.empty((B, s.E, s.V))
    cdef double[:, ::1] Fv = F
    cdef double[:, ::1] magv = mag
    cdef double[:, :, ::1] Jv = J
    cdef double* pw = <double*> malloc(s.V * (s.maxe + 1) * sizeof(double))
    if pw == NULL:
        raise MemoryError()
    try:
        for b in range(B):
            _residual(&s, &Xv[b, 0], pw, &Fv[b, 0], &magv[b, 0])
            _jacobian(&s, &Xv[b, 0], pw, &Jv[b, 0, 0])
    finally:
        free(pw)
    return F, mag, J
