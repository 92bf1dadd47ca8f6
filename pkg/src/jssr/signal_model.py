"""Group-structured activity model and the MMV measurement channel.

N devices are split into G contiguous equal-size groups.  One
Bernoulli coin is tossed per group — probability p1 for odd groups,
p2 for even groups, counting groups from 1 — and every device in the
group inherits that state.  Each active device transmits over M
antennas through an i.i.d. standard complex Gaussian channel, so the
transmitted block X is row-sparse with jointly active rows.  The
receiver sees

    Y = A X + Z,     Z i.i.d. CN(0, sigma2).

Datasets of (X, alpha) pairs are materialized to disk as a one-line
JSON header followed by raw little-endian float64 payload; noise is
never stored, it is redrawn at measurement time.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, asdict

import numpy as np

from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed

DATASET_VERSION = 1


@dataclass(frozen=True)
class GroupActivityModel:
    """Static parameters of the activity / channel model."""

    N: int = 100
    M: int = 4
    G: int = 10
    p1: float = 0.15
    p2: float = 0.05
    sigma2: float = 0.1

    def __post_init__(self):
        if self.N <= 0 or self.G <= 0 or self.N % self.G != 0:
            raise ValueError(f"N={self.N} must be a positive multiple "
                             f"of G={self.G}")
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")

    @property
    def group_size(self) -> int:
        return self.N // self.G

    def group_probs(self) -> np.ndarray:
        """Per-group activation probability, length G (1-based odd
        groups use p1, even groups p2)."""
        probs = np.empty(self.G)
        probs[0::2] = self.p1
        probs[1::2] = self.p2
        return probs

    def device_probs(self) -> np.ndarray:
        """Marginal per-device activity probability, length N."""
        return np.repeat(self.group_probs(), self.group_size)

    @property
    def p(self) -> float:
        """Average activity probability across devices."""
        n_odd = (self.G + 1) // 2
        n_even = self.G // 2
        return (n_odd * self.p1 + n_even * self.p2) / self.G


def sample_activity(model: GroupActivityModel,
                    rng: np.random.Generator) -> np.ndarray:
    """One activity draw: a single coin per group, shared by all its
    devices.  Returns alpha in {0,1}^N as float64."""
    coins = (rng.random(model.G) < model.group_probs()).astype(np.float64)
    return np.repeat(coins, model.group_size)


def sample_batch(model: GroupActivityModel, rng: np.random.Generator,
                 count: int) -> tuple[ComplexMatrix, np.ndarray]:
    """Draw `count` (X, alpha) pairs.

    Returns X stacked as a (count, N, M) ComplexMatrix and alpha as a
    (count, N) float64 array.  Each sample is drawn from its own child
    stream of `rng`, so the result depends only on the stream, not on
    how generation is chunked.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    N, M = model.N, model.M
    Xr = np.empty((count, N, M))
    Xi = np.empty((count, N, M))
    alpha = np.empty((count, N))
    s = np.sqrt(0.5)
    for i, child in enumerate(rng.spawn(count)):
        a = sample_activity(model, child)
        Xr[i] = a[:, None] * (s * child.standard_normal((N, M)))
        Xi[i] = a[:, None] * (s * child.standard_normal((N, M)))
        alpha[i] = a
    return ComplexMatrix(Xr, Xi), alpha


def measure(A: ComplexMatrix, X: ComplexMatrix, sigma2: float,
            rng: np.random.Generator) -> ComplexMatrix:
    """Y = A X + Z with Z ~ CN(0, sigma2), broadcasting over a batch.

    A is (L, N); X is (N, M) or stacked (B, N, M).
    """
    if sigma2 < 0:
        raise ValueError("sigma2 must be nonnegative")
    L, N = A.shape
    if X.shape[-2] != N:
        raise ValueError(f"A is {A.shape} but X rows are {X.shape[-2]}")
    if L >= N:
        warnings.warn(f"L={L} >= N={N}: measurement is not compressive",
                      stacklevel=2)
    Y = A @ X
    Z = crandn(rng, *Y.shape) * np.sqrt(sigma2)
    return Y + Z


# -- dataset files ---------------------------------------------------------
#
# layout:  one JSON line (utf-8, '\n' terminated) then for each sample,
# in order: X.re (N*M float64), X.im (N*M float64), alpha (N float64),
# all little-endian, C order.

def save_dataset(path: str, X: ComplexMatrix, alpha: np.ndarray,
                 model: GroupActivityModel, seed: int) -> None:
    count = alpha.shape[0]
    header = {"version": DATASET_VERSION, "count": count, "seed": seed,
              **asdict(model)}
    payload = np.concatenate(
        [X.re.reshape(count, -1), X.im.reshape(count, -1), alpha], axis=1
    ).astype("<f8")
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode() + b"\n")
        f.write(payload.tobytes())


def write_dataset_file(path: str, model: GroupActivityModel, count: int,
                       seed: int, chunk: int = 1024) -> None:
    """Generate and stream a dataset to disk without materializing more
    than `chunk` samples at a time.  Identical bytes for any chunk size."""
    if count < 1:
        raise ValueError("count must be >= 1")
    header = {"version": DATASET_VERSION, "count": count, "seed": seed,
              **asdict(model)}
    rng = rng_from_seed(seed)
    with open(path, "wb") as f:
        f.write(json.dumps(header).encode() + b"\n")
        done = 0
        while done < count:
            take = min(chunk, count - done)
            X, alpha = sample_batch(model, rng, take)
            payload = np.concatenate(
                [X.re.reshape(take, -1), X.im.reshape(take, -1), alpha],
                axis=1).astype("<f8")
            f.write(payload.tobytes())
            done += take


def load_dataset(path: str, mmap: bool = False
                 ) -> tuple[ComplexMatrix, np.ndarray, dict]:
    """Read a dataset file; with mmap=True the payload stays on disk and
    slices are materialized lazily (bounded memory for large sets)."""
    with open(path, "rb") as f:
        header = json.loads(f.readline().decode())
        if header.get("version") != DATASET_VERSION:
            raise ValueError(
                f"unsupported dataset version {header.get('version')!r}")
        offset = f.tell()
    N, M, count = header["N"], header["M"], header["count"]
    per = 2 * N * M + N
    if mmap:
        rows = np.memmap(path, dtype="<f8", mode="r", offset=offset)
    else:
        with open(path, "rb") as f:
            f.seek(offset)
            rows = np.frombuffer(f.read(), dtype="<f8")
    if rows.size != count * per:
        raise ValueError(
            f"payload has {rows.size} values, expected {count * per}")
    rows = rows.reshape(count, per)
    X = ComplexMatrix(rows[:, :N * M].reshape(count, N, M),
                      rows[:, N * M:2 * N * M].reshape(count, N, M))
    alpha = rows[:, 2 * N * M:]
    if not mmap:
        X = X.copy()
        alpha = alpha.copy()
    return X, alpha, header


def generate_dataset(model: GroupActivityModel, count: int,
                     seed: int) -> tuple[ComplexMatrix, np.ndarray]:
    """Deterministic in-memory dataset draw keyed by an integer seed."""
    return sample_batch(model, rng_from_seed(seed), count)
