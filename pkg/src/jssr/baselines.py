"""Classical detectors for row-sparse activity recovery.

Four families, all emitting one score per device:

  cov_lasso    nonnegative l1 fit of device powers to the vectorized
               sample covariance (projected ISTA)
  group_lasso  row-sparse least squares on X itself (block ISTA with
               row-wise shrinkage)
  mmv_amp      approximate message passing with a Bernoulli
               complex-Gaussian row prior; scores are posterior
               activity probabilities
  cov_ml       maximum likelihood over device powers gamma with
               Sigma = A diag(gamma) A^H + sigma2 I, by cyclic 1-D
               coordinate minimization with rank-1 Sherman-Morrison
               updates of Sigma^{-1}

The covariance-domain solvers consume the L x L sample covariance;
group_lasso and mmv_amp consume the raw measurements.  Every solver
accepts a single sample or a stacked batch (leading axis) and
vectorizes across the batch; per-sample results are identical either
way.  The "naive" comparison scheme is not here — it is the
autoencoder with ``features="raw"``.
"""

from __future__ import annotations

import numpy as np

from jssr.autoencoder import khatri_rao_self, sample_covariance, _vec_batch
from jssr.complexmat import ComplexMatrix, crandn, spectral_norm


def gaussian_pilots(N: int, L: int, rng: np.random.Generator) -> ComplexMatrix:
    """i.i.d. CN(0,1) pilot matrix, L x N.  Deliberately *not* column
    normalized: the classical schemes run on raw Gaussian pilots, and
    E||a_n||^2 = L holds only in expectation."""
    return crandn(rng, L, N)


def _as_batch(Y: ComplexMatrix) -> tuple[ComplexMatrix, bool]:
    if Y.re.ndim == 2:
        return ComplexMatrix(Y.re[None], Y.im[None]), True
    return Y, False


def _squeeze(x, single: bool):
    return x[0] if single else x


# -- nonnegative covariance lasso -----------------------------------------

def lasso_dictionary(A: ComplexMatrix) -> dict:
    """Precomputed pieces of the covariance regression for a fixed A:
    the real-stacked self Khatri-Rao dictionary [Re; Im] (2 L^2 x N),
    its Gram matrix, and the ISTA step 1 / ||B||_2^2."""
    K = khatri_rao_self(A)
    B = np.concatenate([K.re, K.im], axis=0)
    return {"B": B, "gram": B.T @ B, "step": 1.0 / np.linalg.norm(B, 2) ** 2}


def _cov_targets(C: ComplexMatrix) -> np.ndarray:
    """(batch, 2 L^2) real stack [vec Re C; vec Im C] of covariances."""
    return np.concatenate([_vec_batch(C.re), _vec_batch(C.im)], axis=1)


def lasso_lambda_max(C: ComplexMatrix, A: ComplexMatrix,
                     precomp: dict | None = None) -> float:
    """Smallest penalty for which the all-zero power vector is optimal."""
    Cb, _ = _as_batch(C)
    pre = precomp or lasso_dictionary(A)
    return float(max((_cov_targets(Cb) @ pre["B"]).max(), 0.0))


def cov_lasso(C: ComplexMatrix, A: ComplexMatrix, lam: float,
              max_iter: int = 5000, tol: float = 1e-10,
              precomp: dict | None = None, track_objective: bool = False,
              r0: np.ndarray | None = None):
    """min_{r >= 0} 0.5 ||f - B r||^2 + lam * sum(r)  per sample.

    f is the real-stacked vectorization of the sample covariance C and
    B the dictionary of `lasso_dictionary`.  Projected ISTA with the
    fixed step t = 1 / ||B||_2^2:

        r <- max(0, r - t B^T (B r - f) - t lam)

    `r0` warm-starts the iteration (handy along a penalty path).
    Returns (r_hat (..., N), info) with info carrying the iteration
    count, a `converged` flag, and (with track_objective) the objective
    value per sample after every iteration.
    """
    Cb, single = _as_batch(C)
    pre = precomp or lasso_dictionary(A)
    B, gram, t = pre["B"], pre["gram"], pre["step"]
    f = _cov_targets(Cb)
    proj = f @ B
    f_sq = 0.5 * np.sum(f * f, axis=1)

    def obj(R):
        return (f_sq + 0.5 * np.einsum("bn,nm,bm->b", R, gram, R)
                - np.sum(R * proj, axis=1) + lam * R.sum(axis=1))

    R = np.zeros_like(proj) if r0 is None \
        else np.broadcast_to(r0, proj.shape).astype(np.float64).copy()
    objective = [obj(R)] if track_objective else None
    it, delta = 0, np.inf
    for it in range(1, max_iter + 1):
        R_new = np.maximum(0.0, R - t * (R @ gram - proj) - t * lam)
        delta = np.max(np.abs(R_new - R))
        R = R_new
        if track_objective:
            objective.append(obj(R))
        if delta < tol:
            break
    info = {"iters": it, "converged": bool(delta < tol)}
    if track_objective:
        info["objective"] = _squeeze(np.stack(objective, axis=-1), single)
    return _squeeze(R, single), info


# -- row-sparse group lasso -----------------------------------------------

def group_lambda_max(Y: ComplexMatrix, A: ComplexMatrix) -> float:
    """Smallest penalty for which the all-zero signal estimate is optimal."""
    Yb, _ = _as_batch(Y)
    C = A.H @ Yb
    return float(np.sqrt(np.sum(C.abs2(), axis=-1)).max())


def group_lasso(Y: ComplexMatrix, A: ComplexMatrix, lam: float,
                max_iter: int = 2000, tol: float = 1e-9,
                step: float | None = None, track_objective: bool = False,
                W0: ComplexMatrix | None = None):
    """min_W 0.5 ||Y - A W||_F^2 + lam * sum_n ||W_{n,:}||  per sample.

    Block ISTA: a gradient step with t = 1 / ||A||_2^2 followed by the
    row-wise shrinkage  w <- w * max(0, 1 - t lam / ||w||).

    `W0` warm-starts the iteration.  Returns (row norms of the solution
    (..., N), info with the full estimate under "W", a `converged`
    flag, and optionally the per-iteration objective).
    """
    Yb, single = _as_batch(Y)
    Bn, _, M = Yb.shape
    N = A.shape[1]
    t = step if step is not None else 1.0 / spectral_norm(A) ** 2
    if W0 is None:
        W = ComplexMatrix(np.zeros((Bn, N, M)), np.zeros((Bn, N, M)))
    else:
        W = ComplexMatrix(np.broadcast_to(W0.re, (Bn, N, M)).copy(),
                          np.broadcast_to(W0.im, (Bn, N, M)).copy())

    def obj(W):
        resid = A @ W - Yb
        fit = 0.5 * np.sum(resid.abs2(), axis=(1, 2))
        return fit + lam * np.sum(np.sqrt(np.sum(W.abs2(), axis=-1)), axis=-1)

    objective = [obj(W)] if track_objective else None
    it, delta = 0, np.inf
    for it in range(1, max_iter + 1):
        G = A.H @ (A @ W - Yb)
        Vr, Vi = W.re - t * G.re, W.im - t * G.im
        norms = np.sqrt(np.sum(Vr**2 + Vi**2, axis=-1))
        with np.errstate(divide="ignore", invalid="ignore"):
            scale = np.maximum(0.0, 1.0 - t * lam / norms)
        scale[norms == 0.0] = 0.0
        Wr_new = Vr * scale[..., None]
        Wi_new = Vi * scale[..., None]
        delta = max(np.max(np.abs(Wr_new - W.re)),
                    np.max(np.abs(Wi_new - W.im)))
        W = ComplexMatrix(Wr_new, Wi_new)
        if track_objective:
            objective.append(obj(W))
        if delta < tol:
            break
    info = {"iters": it, "converged": bool(delta < tol),
            "W": ComplexMatrix(_squeeze(W.re, single),
                               _squeeze(W.im, single))}
    if track_objective:
        info["objective"] = _squeeze(np.stack(objective, axis=-1), single)
    return _squeeze(np.sqrt(np.sum(W.abs2(), axis=-1)), single), info


# -- approximate message passing ------------------------------------------

def mmv_amp(Y: ComplexMatrix, A: ComplexMatrix, p: float, sigma2: float,
            iters: int = 50, channel_var: float = 1.0,
            damping: float | None = None):
    """AMP for the row-sparse MMV model; scores are posterior activity
    probabilities.

    The pilot matrix is rescaled internally to unit-variance-entry
    columns (A~ = A / sqrt(L)), which lifts the active-entry variance
    to g = L * channel_var.  Per iteration, with effective noise level
    tau^2 = ||V||_F^2 / (L M) and R = X^ + A~^H V:

        pi_n  = sigmoid( logit(p) + M log(tau^2 / (g + tau^2))
                          + ||R_n||^2 g / (tau^2 (g + tau^2)) )
        X^'   = pi * g/(g+tau^2) * R                       (row MMSE)
        b_m   = (1/L) sum_n [ s pi_n + s c pi_n (1-pi_n) |R_nm|^2 ]
        V'    = Y - A~ X^' + b * V                         (Onsager)

    with s = g/(g+tau^2), c = g/(tau^2 (g+tau^2)).  If any sample's
    residual norm grows 10x within 5 iterations the whole batch is
    rerun once with damping 0.3; samples still diverging are flagged.

    Returns (pi (..., N), info with 'diverged' flags and 'damping').
    """
    if not 0.0 < p < 1.0:
        raise ValueError("need 0 < p < 1")
    Yb, single = _as_batch(Y)
    if damping is None:
        pi, flags = _amp_run(A, Yb, p, sigma2, iters, channel_var, 0.0)
        used = 0.0
        if np.any(flags):
            pi, flags = _amp_run(A, Yb, p, sigma2, iters, channel_var, 0.3)
            used = 0.3
    else:
        pi, flags = _amp_run(A, Yb, p, sigma2, iters, channel_var, damping)
        used = damping
    return _squeeze(pi, single), {
        "diverged": _squeeze(flags, single), "damping": used}


def _amp_run(A: ComplexMatrix, Y: ComplexMatrix, p: float, sigma2: float,
             iters: int, channel_var: float, damping: float):
    B, L, M = Y.shape
    N = A.shape[1]
    At = A * (1.0 / np.sqrt(L))
    g = L * channel_var
    logit_p = np.log(p / (1.0 - p))

    X = ComplexMatrix(np.zeros((B, N, M)), np.zeros((B, N, M)))
    V = Y.copy()
    pi = np.full((B, N), p)
    res_hist = [np.sqrt(np.sum(V.abs2(), axis=(1, 2)))]
    diverged = np.zeros(B, dtype=bool)

    for _ in range(iters):
        tau2 = np.sum(V.abs2(), axis=(1, 2)) / (L * M)   # (B,)
        tau2 = np.maximum(tau2, 1e-300)
        R = X + At.H @ V
        rn2 = np.sum(R.abs2(), axis=-1)                  # (B, N)
        s = (g / (g + tau2))[:, None]
        c = (g / (tau2 * (g + tau2)))[:, None]
        llr = logit_p + M * np.log(tau2 / (g + tau2))[:, None] + rn2 * c
        pi = 1.0 / (1.0 + np.exp(-np.clip(llr, -500, 500)))

        shrink = (pi * s)[..., None]
        X_new = ComplexMatrix(shrink * R.re, shrink * R.im)
        deriv = (pi * s)[..., None] + (s * c * pi * (1 - pi))[..., None] \
            * R.abs2()
        b = np.sum(deriv, axis=1) / L                    # (B, M)
        AX = At @ X_new
        V_new = ComplexMatrix(Y.re - AX.re + b[:, None, :] * V.re,
                              Y.im - AX.im + b[:, None, :] * V.im)
        if damping > 0.0:
            X_new = X_new * (1 - damping) + X * damping
            V_new = V_new * (1 - damping) + V * damping
        X, V = X_new, V_new

        res_hist.append(np.sqrt(np.sum(V.abs2(), axis=(1, 2))))
        if len(res_hist) > 5:
            diverged |= res_hist[-1] > 10.0 * res_hist[-6]
    return pi, diverged


# -- covariance maximum likelihood ----------------------------------------

def cov_ml(C: ComplexMatrix, A: ComplexMatrix, sigma2: float,
           sweeps: int = 15, tol: float = 1e-6):
    """Minimize  log det Sigma + tr(Sigma^{-1} C)  over gamma >= 0,
    Sigma = A diag(gamma) A^H + sigma2 I, one coordinate at a time.

    For coordinate n with u = Sigma^{-1} a_n, q = a_n^H u (real),
    s = u^H C u (real), the unconstrained 1-D minimizer is
    d* = s / q^2 - 1 / q, clipped to d = max(d*, -gamma_n); the update
    gamma_n += d keeps Sigma positive definite (1 + d q > 0), and
    Sigma^{-1} follows by a rank-1 Sherman-Morrison correction.

    A sample is frozen once its negative log likelihood moves by a
    relative factor below `tol` in a full sweep; the solver stops after
    `sweeps` passes or when all samples are frozen.

    Returns (gamma (..., N), info with the per-sweep NLL trace).
    """
    Cb, single = _as_batch(C)
    B, L, _ = Cb.shape
    N = A.shape[1]

    gamma = np.zeros((B, N))
    inv_r = np.tile(np.eye(L) / sigma2, (B, 1, 1))
    inv_i = np.zeros((B, L, L))
    trace_C = np.einsum("bii->b", Cb.re)
    nll = L * np.log(sigma2) + trace_C / sigma2
    nll_trace = [nll.copy()]

    active = np.ones(B, dtype=bool)   # samples still being refined
    sweeps_run = 0
    for _ in range(sweeps):
        sweeps_run += 1
        for n in range(N):
            ar, ai = A.re[:, n], A.im[:, n]
            # u = Sigma^{-1} a_n
            ur = inv_r @ ar - inv_i @ ai
            ui = inv_i @ ar + inv_r @ ai
            q = ur @ ar + ui @ ai                        # Re(a^H u), (B,)
            # w = C u, s = Re(u^H w)
            wr = np.einsum("bij,bj->bi", Cb.re, ur) \
                - np.einsum("bij,bj->bi", Cb.im, ui)
            wi = np.einsum("bij,bj->bi", Cb.im, ur) \
                + np.einsum("bij,bj->bi", Cb.re, ui)
            s = np.sum(ur * wr + ui * wi, axis=1)
            d = np.maximum(s / q**2 - 1.0 / q, -gamma[:, n])
            d = np.where(active, d, 0.0)   # converged samples stay frozen
            gamma[:, n] += d
            denom = 1.0 + d * q                          # > 0 by construction
            coef = d / denom
            inv_r -= coef[:, None, None] * (
                np.einsum("bi,bj->bij", ur, ur)
                + np.einsum("bi,bj->bij", ui, ui))
            inv_i -= coef[:, None, None] * (
                np.einsum("bi,bj->bij", ui, ur)
                - np.einsum("bi,bj->bij", ur, ui))
            nll += np.log(denom) - coef * s
        nll_trace.append(nll.copy())
        rel = np.abs(nll_trace[-1] - nll_trace[-2]) \
            / np.maximum(np.abs(nll_trace[-2]), 1e-12)
        active &= rel >= tol
        if not active.any():
            break
    info = {"sweeps": sweeps_run,
            "nll": _squeeze(np.stack(nll_trace, axis=-1), single)}
    return _squeeze(gamma, single), info
