"""Pure numpy implementation of the Newton kernels.

Mirrors ``_kernels.pyx`` function for function; the starts of a batch are
processed together with boolean masks instead of one at a time.
"""
from __future__ import annotations

import numpy as np

CONVERGED, MAX_ITER, SINGULAR, STALLED, DIVERGED = 0, 1, 2, 3, 4

ARMIJO_C = 1e-4
MIN_STEP = 2.0 ** -20
BLOWUP = 1e8
MAX_COND = 1e14
POLISH_STEPS = 2
CHUNK = 512


def _powers(X: np.ndarray, max_exp: int) -> np.ndarray:
    B, V = X.shape
    pw = np.empty((B, V, max_exp + 1))
    pw[:, :, 0] = 1.0
    for e in range(1, max_exp + 1):
        pw[:, :, e] = pw[:, :, e - 1] * X
    return pw


def _monomials(pw: np.ndarray, exps: np.ndarray) -> np.ndarray:
    V = exps.shape[1]
    out = np.ones((pw.shape[0], exps.shape[0]))
    for v in range(V):
        out *= pw[:, v, exps[:, v]]
    return out


def evaluate(cs, X: np.ndarray):
    """Residuals ``F``, per-equation term magnitudes and Jacobians for a batch."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    F, mag = _residual(cs, X)
    return F, mag, _jacobian(cs, X)


def _residual(cs, X):
    pw = _powers(X, max(cs.max_exp, 1))
    mono = _monomials(pw, cs.term_exp) * cs.term_coef
    return mono @ cs.term_onehot, np.abs(mono) @ cs.term_onehot


def _jacobian(cs, X):
    pw = _powers(X, max(cs.max_exp, 1))
    jm = _monomials(pw, cs.jac_exp) * cs.jac_coef
    return (jm @ cs.jac_onehot).reshape(X.shape[0], cs.n_eq, cs.n_vars)


def _scaled(F, mag):
    return np.max(np.abs(F) / (1.0 + mag), axis=1)


def _solve(J, F):
    """Newton directions ``-J^{-1} F``; ill-conditioned rows are flagged."""
    B, n, _ = J.shape
    out = np.full((B, n), np.nan)
    if B == 0:
        return out, np.zeros(0, dtype=bool)
    finite = np.all(np.isfinite(J), axis=(1, 2)) & np.all(np.isfinite(F), axis=1)
    ok = finite.copy()
    if finite.any():
        with np.errstate(all="ignore"):
            cond = np.linalg.cond(J[finite])
        ok[finite] = np.isfinite(cond) & (cond < MAX_COND)
    if ok.any():
        try:
            out[ok] = np.linalg.solve(J[ok], -F[ok][..., None])[..., 0]
        except np.linalg.LinAlgError:
            for b in np.flatnonzero(ok):
                try:
                    out[b] = np.linalg.solve(J[b], -F[b])
                except np.linalg.LinAlgError:
                    ok[b] = False
        ok &= np.all(np.isfinite(out), axis=1)
    return out, ok


def newton_batch(cs, X0: np.ndarray, max_iter: int = 100, tol: float = 1e-10):
    """Damped Newton from every row of ``X0``.

    Returns ``(X, scaled_residual, iterations, status)``.
    """
    X0 = np.atleast_2d(np.asarray(X0, dtype=np.float64))
    outs = [_newton_chunk(cs, X0[i:i + CHUNK], max_iter, tol) for i in range(0, X0.shape[0], CHUNK)]
    if not outs:
        n = cs.n_vars
        return np.empty((0, n)), np.empty(0), np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int32)
    return tuple(np.concatenate([o[k] for o in outs]) for k in range(4))


def _newton_chunk(cs, X0, max_iter, tol):
    X = X0.copy()
    B = X.shape[0]
    status = np.full(B, MAX_ITER, dtype=np.int32)
    iters = np.zeros(B, dtype=np.int32)
    F, mag = _residual(cs, X)
    res = _scaled(F, mag)
    phi = np.sum(F * F, axis=1)
    active = np.ones(B, dtype=bool)
    for it in range(max_iter + 1):
        done = active & (res <= tol)
        status[done] = CONVERGED
        active &= ~done
        if it == max_iter or not active.any():
            break
        idx = np.flatnonzero(active)
        J = _jacobian(cs, X[idx])
        D, ok = _solve(J, F[idx])
        status[idx[~ok]] = SINGULAR
        active[idx[~ok]] = False
        idx, D = idx[ok], D[ok]
        iters[idx] += 1
        lam = np.ones(idx.size)
        pending = np.ones(idx.size, dtype=bool)
        newX = X[idx].copy()
        newF = F[idx].copy()
        newmag = mag[idx].copy()
        newphi = phi[idx].copy()
        while pending.any():
            p = np.flatnonzero(pending)
            trial = X[idx[p]] + lam[p, None] * D[p]
            tF, tmag = _residual(cs, trial)
            tphi = np.sum(tF * tF, axis=1)
            good = np.isfinite(tphi) & (tphi <= (1.0 - 2.0 * ARMIJO_C * lam[p]) * phi[idx[p]])
            g = p[good]
            newX[g], newF[g], newmag[g], newphi[g] = trial[good], tF[good], tmag[good], tphi[good]
            pending[g] = False
            lam[p[~good]] *= 0.5
            stuck = p[~good][lam[p[~good]] < MIN_STEP]
            pending[stuck] = False
            status[idx[stuck]] = STALLED
            active[idx[stuck]] = False
        moved = active[idx]
        m = idx[moved]
        X[m], F[m], mag[m], phi[m] = newX[moved], newF[moved], newmag[moved], newphi[moved]
        res[m] = _scaled(F[m], mag[m])
        blown = m[~np.all(np.isfinite(X[m]) & (np.abs(X[m]) <= BLOWUP), axis=1)]
        status[blown] = DIVERGED
        active[blown] = False
    conv = np.flatnonzero(status == CONVERGED)
    if conv.size:
        X[conv], res[conv] = _polish(cs, X[conv], res[conv])
    return X, res, iters, status


def _polish(cs, X, res):
    for _ in range(POLISH_STEPS):
        F, _ = _residual(cs, X)
        J = _jacobian(cs, X)
        D, ok = _solve(J, F)
        trial = X.copy()
        trial[ok] = X[ok] + D[ok]
        tF, tmag = _residual(cs, trial)
        tres = _scaled(tF, tmag)
        better = ok & (tres <= res)
        X[better], res[better] = trial[better], tres[better]
    return X, res
