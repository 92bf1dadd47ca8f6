"""Pilot matrix + covariance-feature decoder, trained as one network.

The encoder is the complex pilot matrix A (L x N, every column held at
norm sqrt(L)); a transmission maps row-sparse X to Y = A X + Z.  The
decoder compresses Y into the sample covariance Y Y^H / M, flattens its
real and imaginary parts into a 2 L^2 feature vector, and pushes that
through a small ReLU MLP with N sigmoid outputs, one activity score per
device.  A "raw" feature mode that flattens Y itself (2 L M features)
is kept as an ablation of the covariance front end.

All gradients are hand-derived; there is no autodiff anywhere.  The
covariance layer's backward pass is the only nontrivial piece: with
G = dL/dRe(C), H = dL/dIm(C) and C = Y Y^H / M,

    dL/dYr = ((G + G^T) Yr + (H^T - H) Yi) / M
    dL/dYi = ((G + G^T) Yi + (H - H^T) Yr) / M

and through Y = A X + Z the pilot gradient is

    dL/dAr =  dYr X_r^T + dYi X_i^T
    dL/dAi = -dYr X_i^T + dYi X_r^T
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from jssr.complexmat import ComplexMatrix, crandn

CLAMP_LO = 1e-7
CLAMP_HI = 1.0 - 1e-7
DEAD_COLUMN_TOL = 1e-12


def encoder_forward(X: ComplexMatrix, A: ComplexMatrix,
                    Z: ComplexMatrix) -> ComplexMatrix:
    """Y = A X + Z through the four real products; the deterministic
    core of the measurement channel, shared with training."""
    return A @ X + Z


def extract_sensing_matrix(net: "ActivityNet",
                           tol: float = 1e-6) -> ComplexMatrix:
    """The trained pilot matrix, validated against its norm constraint."""
    A = net.A
    target = np.sqrt(A.shape[0])
    if np.max(np.abs(A.column_norms() - target)) > tol * target:
        raise ValueError("pilot columns drifted off the sqrt(L) sphere; "
                         "project before extracting")
    return A.copy()


# -- covariance front end --------------------------------------------------

def sample_covariance(Y: ComplexMatrix) -> ComplexMatrix:
    """Y Y^H / M for Y of shape (L, M) or a stack (B, L, M)."""
    M = Y.shape[-1]
    Yr, Yi = Y.re, Y.im
    Yrt = np.swapaxes(Yr, -1, -2)
    Yit = np.swapaxes(Yi, -1, -2)
    Cr = (Yr @ Yrt + Yi @ Yit) / M
    Ci = (Yi @ Yrt - Yr @ Yit) / M
    return ComplexMatrix(Cr, Ci)


def _vec_batch(a: np.ndarray) -> np.ndarray:
    """Column-major flatten of the trailing two axes of a (B, m, n) stack."""
    return np.swapaxes(a, -1, -2).reshape(a.shape[0], -1)


def covariance_features(Y: ComplexMatrix) -> np.ndarray:
    """(B, 2 L^2) features: [vec Re(C); vec Im(C)], column-major."""
    C = sample_covariance(Y)
    return np.concatenate([_vec_batch(C.re), _vec_batch(C.im)], axis=1)


def raw_features(Y: ComplexMatrix) -> np.ndarray:
    """(B, 2 L M) features that skip the covariance step (ablation)."""
    return np.concatenate([_vec_batch(Y.re), _vec_batch(Y.im)], axis=1)


def covariance_backward(Y: ComplexMatrix, df: np.ndarray) -> ComplexMatrix:
    """Gradient of a scalar loss w.r.t. Y given its gradient df w.r.t.
    the covariance features of `covariance_features`."""
    B, L, M = Y.shape
    dCr = np.swapaxes(df[:, :L * L].reshape(B, L, L), -1, -2)
    dCi = np.swapaxes(df[:, L * L:].reshape(B, L, L), -1, -2)
    Gs = dCr + np.swapaxes(dCr, -1, -2)
    Ha = dCi - np.swapaxes(dCi, -1, -2)          # H - H^T
    dYr = (Gs @ Y.re - Ha @ Y.im) / M
    dYi = (Gs @ Y.im + Ha @ Y.re) / M
    return ComplexMatrix(dYr, dYi)


def raw_backward(Y: ComplexMatrix, df: np.ndarray) -> ComplexMatrix:
    B, L, M = Y.shape
    dYr = np.swapaxes(df[:, :L * M].reshape(B, M, L), -1, -2)
    dYi = np.swapaxes(df[:, L * M:].reshape(B, M, L), -1, -2)
    return ComplexMatrix(dYr.copy(), dYi.copy())


# -- covariance structure helpers -----------------------------------------

def khatri_rao_self(A: ComplexMatrix) -> ComplexMatrix:
    """Columnwise conj(a_n) (x) a_n, an (L^2, N) matrix.

    Satisfies vec(A diag(r) A^H) = (A* (.) A) r for real r, with
    column-major vec.
    """
    Ar, Ai = A.re, A.im
    L, N = A.shape
    re = np.einsum("in,jn->jin", Ar, Ar) + np.einsum("in,jn->jin", Ai, Ai)
    im = np.einsum("in,jn->jin", Ai, Ar) - np.einsum("in,jn->jin", Ar, Ai)
    # [j, i, n] ordering realizes the column-major vec of a_n a_n^H
    return ComplexMatrix(re.reshape(L * L, N), im.reshape(L * L, N))


def expected_covariance(A: ComplexMatrix, gamma: np.ndarray,
                        sigma2: float) -> ComplexMatrix:
    """A diag(gamma) A^H + sigma2 I for real nonnegative gamma."""
    L = A.shape[0]
    Ag_r, Ag_i = A.re * gamma, A.im * gamma
    Cr = Ag_r @ A.re.T + Ag_i @ A.im.T + sigma2 * np.eye(L)
    Ci = Ag_i @ A.re.T - Ag_r @ A.im.T
    return ComplexMatrix(Cr, Ci)


def decompose_sample_covariance(A: ComplexMatrix, X: ComplexMatrix,
                                Z: ComplexMatrix) -> dict:
    """Split vec(Y Y^H / M), Y = A X + Z, into three exact terms.

    signal: (A* (.) A) r with r_n = ||X_{n,:}||^2 / M, the part a
        covariance-domain detector estimates;
    cross:  A (X X^H - diag(X X^H)) A^H / M, leakage between devices;
    noise:  (A X Z^H + Z X^H A^H + Z Z^H) / M.

    Returns vectors of length L^2 under keys total/signal/cross/noise,
    with total = signal + cross + noise identically.
    """
    M = X.shape[-1]
    Y = A @ X + Z
    total = sample_covariance(Y).vec()

    r = np.sum(X.abs2(), axis=1) / M
    signal = khatri_rao_self(A) @ ComplexMatrix(r, np.zeros_like(r))

    XXh = X @ X.H
    off = ComplexMatrix(XXh.re - np.diag(np.diag(XXh.re)),
                        XXh.im - np.diag(np.diag(XXh.im)))
    cross = ((A @ off @ A.H) * (1.0 / M)).vec()

    W = A @ X
    noise = ((W @ Z.H + Z @ W.H + Z @ Z.H) * (1.0 / M)).vec()
    return {"total": total, "signal": signal, "cross": cross, "noise": noise}


# -- decoder MLP -----------------------------------------------------------

class Decoder:
    """Fully connected ReLU stack with sigmoid outputs.

    dims = [input, hidden..., N]; weights[k] is (dims[k+1], dims[k]).
    """

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        self.weights = weights
        self.biases = biases

    @classmethod
    def init(cls, dims: list[int], rng: np.random.Generator) -> "Decoder":
        weights, biases = [], []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            bound = np.sqrt(6.0 / (d_in + d_out))
            weights.append(rng.uniform(-bound, bound, size=(d_out, d_in)))
            biases.append(np.zeros(d_out))
        return cls(weights, biases)

    @property
    def dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def forward(self, f: np.ndarray):
        """f: (B, input).  Returns (scores (B, N), cache for backward)."""
        h = f
        inputs, preacts = [], []
        for W, b in zip(self.weights[:-1], self.biases[:-1]):
            inputs.append(h)
            z = h @ W.T + b
            preacts.append(z)
            h = np.maximum(z, 0.0)
        inputs.append(h)
        z_out = h @ self.weights[-1].T + self.biases[-1]
        s = 1.0 / (1.0 + np.exp(-z_out))
        scores = np.clip(s, CLAMP_LO, CLAMP_HI)
        cache = (inputs, preacts, s)
        return scores, cache

    def backward(self, cache, dz_out: np.ndarray):
        """Backprop from the output pre-activation gradient dz_out.

        Returns (df, dweights, dbiases) with df the gradient w.r.t. the
        feature input.
        """
        inputs, preacts, _ = cache
        dW = [None] * len(self.weights)
        db = [None] * len(self.biases)
        dz = dz_out
        for k in range(len(self.weights) - 1, -1, -1):
            dW[k] = dz.T @ inputs[k]
            db[k] = dz.sum(axis=0)
            dh = dz @ self.weights[k]
            if k > 0:
                dz = dh * (preacts[k - 1] > 0.0)
        return dh, dW, db


def bce_loss(scores: np.ndarray, alpha: np.ndarray) -> float:
    """Mean binary cross entropy over all devices and samples."""
    if not (np.all(scores > 0.0) and np.all(scores < 1.0)):
        raise ValueError("scores must lie strictly inside (0, 1); "
                         "clamping upstream failed")
    return float(-np.mean(alpha * np.log(scores)
                          + (1.0 - alpha) * np.log(1.0 - scores)))


def bce_output_grad(cache, alpha: np.ndarray) -> np.ndarray:
    """d(bce)/d(z_out) with the sigmoid folded in; zero where the score
    clamp is active (the clamped output is locally constant)."""
    s = cache[2]
    dz = (s - alpha) / alpha.size
    dz[(s < CLAMP_LO) | (s > CLAMP_HI)] = 0.0
    return dz


# -- assembled network -----------------------------------------------------

@dataclass
class NetConfig:
    N: int
    L: int
    M: int
    sigma2: float
    V: int = 1                 # hidden layer count
    Q: int | None = None       # hidden width, defaults to 2N
    features: str = "covariance"   # or "raw"

    def __post_init__(self):
        if self.features not in ("covariance", "raw"):
            raise ValueError(f"unknown feature mode {self.features!r}")

    @property
    def hidden_width(self) -> int:
        return 2 * self.N if self.Q is None else self.Q

    @property
    def input_dim(self) -> int:
        if self.features == "covariance":
            return 2 * self.L * self.L
        return 2 * self.L * self.M

    @property
    def layer_dims(self) -> list[int]:
        return [self.input_dim] + [self.hidden_width] * self.V + [self.N]


@dataclass
class ActivityNet:
    """Trainable pilot matrix + decoder pair."""

    cfg: NetConfig
    A: ComplexMatrix
    dec: Decoder

    @classmethod
    def init(cls, cfg: NetConfig, rng: np.random.Generator) -> "ActivityNet":
        A = crandn(rng, cfg.L, cfg.N)
        net = cls(cfg, A, Decoder.init(cfg.layer_dims, rng))
        net.project_pilot_columns(rng)
        return net

    # parameter list shared with the optimizer; order is load-bearing
    def params(self) -> list[np.ndarray]:
        out = [self.A.re, self.A.im]
        for W, b in zip(self.dec.weights, self.dec.biases):
            out.extend([W, b])
        return out

    def features(self, Y: ComplexMatrix) -> np.ndarray:
        if self.cfg.features == "covariance":
            return covariance_features(Y)
        return raw_features(Y)

    def scores(self, Y: ComplexMatrix) -> np.ndarray:
        """Per-device activity scores in (0, 1) from measurements Y
        of shape (B, L, M)."""
        s, _ = self.dec.forward(self.features(Y))
        return s

    def loss_and_grads(self, X: ComplexMatrix, alpha: np.ndarray,
                       Z: ComplexMatrix):
        """Full forward/backward for a batch with explicit noise Z.

        Returns (loss, grads) with grads aligned with params().
        """
        Y = self.A @ X + Z
        f = self.features(Y)
        scores, cache = self.dec.forward(f)
        loss = bce_loss(scores, alpha)

        dz = bce_output_grad(cache, alpha)
        df, dW, db = self.dec.backward(cache, dz)
        if self.cfg.features == "covariance":
            dY = covariance_backward(Y, df)
        else:
            dY = raw_backward(Y, df)
        dAr = (np.einsum("blm,bnm->ln", dY.re, X.re)
               + np.einsum("blm,bnm->ln", dY.im, X.im))
        dAi = (np.einsum("blm,bnm->ln", dY.im, X.re)
               - np.einsum("blm,bnm->ln", dY.re, X.im))
        grads = [dAr, dAi]
        for gW, gb in zip(dW, db):
            grads.extend([gW, gb])
        return loss, grads

    def project_pilot_columns(self, rng: np.random.Generator) -> None:
        """Rescale every pilot column to norm sqrt(L), in place.

        Columns that collapsed to (numerically) zero are redrawn from
        the standard complex Gaussian before rescaling.
        """
        L = self.cfg.L
        target = np.sqrt(L)
        norms = self.A.column_norms()
        dead = norms < DEAD_COLUMN_TOL
        if np.any(dead):
            fresh = crandn(rng, L, int(dead.sum()))
            self.A.re[:, dead] = fresh.re
            self.A.im[:, dead] = fresh.im
            norms = self.A.column_norms()
        scale = target / norms
        self.A.re *= scale
        self.A.im *= scale
