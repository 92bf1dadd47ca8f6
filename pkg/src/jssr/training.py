"""Minibatch training of the pilot/decoder network, plus checkpoints.

Measurement noise is *redrawn at every forward pass* during training,
so the network never sees the same Y twice for a given X; the
validation set keeps one fixed noise draw for the whole run so the
early-stopping trace is comparable across epochs.  After every Adam
step the pilot columns are projected back to norm sqrt(L).

Checkpoint files mirror the dataset format: one JSON header line, then
raw little-endian float64 arrays in the order listed in the header.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from jssr.autoencoder import ActivityNet, Decoder, NetConfig, bce_loss
from jssr.complexmat import ComplexMatrix, crandn
from jssr.signal_model import measure

CHECKPOINT_VERSION = 1


class Adam:
    """Adam with bias correction, updating parameters in place."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1**self.t
        c2 = 1.0 - b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


@dataclass
class TrainConfig:
    batch_size: int = 128
    max_epochs: int = 200
    patience: int = 20
    lr: float = 1e-3
    val_chunk: int = 4096   # evaluation batch size, memory bound only


@dataclass
class TrainResult:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    epoch_seconds: list[float] = field(default_factory=list)  # cumulative
    best_epoch: int = 0          # 1-based epoch whose weights were kept
    wall_seconds: float = 0.0

    @property
    def epochs_run(self) -> int:
        return len(self.val_loss)

    def log_rows(self) -> list[tuple]:
        """(epoch, train_loss, val_loss, wall_seconds) rows for the
        training-log CSV."""
        return [(e + 1, self.train_loss[e], self.val_loss[e],
                 self.epoch_seconds[e]) for e in range(self.epochs_run)]


def _val_loss(net: ActivityNet, X: ComplexMatrix, alpha: np.ndarray,
              Z: ComplexMatrix, chunk: int) -> float:
    total, count = 0.0, 0
    for lo in range(0, alpha.shape[0], chunk):
        hi = min(lo + chunk, alpha.shape[0])
        Xc = ComplexMatrix(X.re[lo:hi], X.im[lo:hi])
        Y = net.A @ Xc + ComplexMatrix(Z.re[lo:hi], Z.im[lo:hi])
        total += bce_loss(net.scores(Y), alpha[lo:hi]) * (hi - lo)
        count += hi - lo
    return total / count


def train(net: ActivityNet, X_train: ComplexMatrix, alpha_train: np.ndarray,
          X_val: ComplexMatrix, alpha_val: np.ndarray,
          rng: np.random.Generator, tcfg: TrainConfig = TrainConfig(),
          verbose: bool = False) -> TrainResult:
    """Train in place; the net ends up holding the best-validation weights."""
    t0 = time.perf_counter()
    sigma2 = net.cfg.sigma2
    n_train = alpha_train.shape[0]
    params = net.params()
    opt = Adam(params, lr=tcfg.lr)
    res = TrainResult()

    Z_val = crandn(rng, *X_val.shape[:1], net.cfg.L, net.cfg.M) \
        * np.sqrt(sigma2)
    best_val = np.inf
    best_params = [p.copy() for p in params]

    for epoch in range(1, tcfg.max_epochs + 1):
        order = rng.permutation(n_train)
        running, seen = 0.0, 0
        for lo in range(0, n_train, tcfg.batch_size):
            idx = order[lo:lo + tcfg.batch_size]
            Xb = ComplexMatrix(X_train.re[idx], X_train.im[idx])
            Zb = crandn(rng, len(idx), net.cfg.L, net.cfg.M) * np.sqrt(sigma2)
            try:
                loss, grads = net.loss_and_grads(Xb, alpha_train[idx], Zb)
            except ValueError as exc:   # non-finite scores trip the BCE guard
                raise RuntimeError(
                    f"training diverged at epoch {epoch}, batch starting at "
                    f"sample {lo} (lr={tcfg.lr}): {exc}") from exc
            if not np.isfinite(loss):
                raise RuntimeError(
                    f"training diverged: loss={loss!r} at epoch {epoch}, "
                    f"batch starting at sample {lo} (lr={tcfg.lr})")
            opt.step(params, grads)
            net.project_pilot_columns(rng)
            running += loss * len(idx)
            seen += len(idx)
        res.train_loss.append(running / seen)
        vl = _val_loss(net, X_val, alpha_val, Z_val, tcfg.val_chunk)
        res.val_loss.append(vl)
        res.epoch_seconds.append(time.perf_counter() - t0)

        if vl < best_val:
            best_val = vl
            res.best_epoch = epoch
            for keep, p in zip(best_params, params):
                keep[...] = p
        if verbose:
            print(f"epoch {epoch:3d}  train {res.train_loss[-1]:.5f}"
                  f"  val {vl:.5f}  best {best_val:.5f}@{res.best_epoch}")
        if epoch - res.best_epoch >= tcfg.patience:
            break

    for p, keep in zip(params, best_params):
        p[...] = keep
    res.wall_seconds = time.perf_counter() - t0
    return res


# -- checkpoint files ------------------------------------------------------

def save_checkpoint(path: str, net: ActivityNet, seed: int,
                    threshold: float | None = None) -> None:
    arrays = [("A_re", net.A.re), ("A_im", net.A.im)]
    for k, (W, b) in enumerate(zip(net.dec.weights, net.dec.biases), 1):
        arrays.append((f"W{k}", W))
        arrays.append((f"b{k}", b))
    header = {
        "version": CHECKPOINT_VERSION,
        "N": net.cfg.N, "L": net.cfg.L, "M": net.cfg.M,
        "V": net.cfg.V, "Q": net.cfg.hidden_width,
        "sigma2": net.cfg.sigma2, "features": net.cfg.features,
        "seed": seed, "threshold": threshold,
        "arrays": [{"name": n, "shape": list(a.shape)} for n, a in arrays],
    }
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode() + b"\n")
        for _, a in arrays:
            f.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_checkpoint(path: str) -> tuple[ActivityNet, dict]:
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode())
        if header.get("version") != CHECKPOINT_VERSION:
            raise ValueError(
                f"unsupported checkpoint version {header.get('version')!r}")
        raw = np.frombuffer(f.read(), dtype="<f8")
    sizes = [int(np.prod(s["shape"])) if s["shape"] else 1
             for s in header["arrays"]]
    if raw.size != sum(sizes):
        raise ValueError(
            f"payload has {raw.size} values, expected {sum(sizes)}")
    arrays = {}
    pos = 0
    for spec, size in zip(header["arrays"], sizes):
        arrays[spec["name"]] = raw[pos:pos + size].reshape(
            spec["shape"]).copy()
        pos += size

    cfg = NetConfig(N=header["N"], L=header["L"], M=header["M"],
                    sigma2=header["sigma2"], V=header["V"], Q=header["Q"],
                    features=header["features"])
    n_layers = header["V"] + 1
    weights = [arrays[f"W{k}"] for k in range(1, n_layers + 1)]
    biases = [arrays[f"b{k}"] for k in range(1, n_layers + 1)]
    net = ActivityNet(cfg, ComplexMatrix(arrays["A_re"], arrays["A_im"]),
                      Decoder(weights, biases))
    return net, header
