"""Complex arrays carried as (real, imag) pairs of float64 ndarrays.

Every complex quantity in this package (pilot matrices, channels,
measurements, covariances) is represented this way; products, Gram
matrices and inverses are computed through the four real matrix
products, never through a complex dtype.  ``to_complex`` exists only
as a boundary converter for interop and test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ComplexMatrix:
    """A complex array as two equal-shape float64 arrays."""

    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        self.re = np.asarray(self.re, dtype=np.float64)
        self.im = np.asarray(self.im, dtype=np.float64)
        if self.re.shape != self.im.shape:
            raise ValueError(
                f"re/im shape mismatch: {self.re.shape} vs {self.im.shape}"
            )

    @property
    def shape(self):
        return self.re.shape

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        return ComplexMatrix(self.re - other.re, self.im - other.im)

    def __mul__(self, scalar: float) -> "ComplexMatrix":
        return ComplexMatrix(self.re * scalar, self.im * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        # (R1 + i I1)(R2 + i I2) = (R1 R2 - I1 I2) + i (I1 R2 + R1 I2)
        return ComplexMatrix(
            self.re @ other.re - self.im @ other.im,
            self.im @ other.re + self.re @ other.im,
        )

    def conj(self) -> "ComplexMatrix":
        return ComplexMatrix(self.re, -self.im)

    @property
    def T(self) -> "ComplexMatrix":
        return ComplexMatrix(self.re.T, self.im.T)

    @property
    def H(self) -> "ComplexMatrix":
        """Conjugate transpose."""
        return ComplexMatrix(self.re.T, -self.im.T)

    # -- reductions --------------------------------------------------------

    def abs2(self) -> np.ndarray:
        """Elementwise squared modulus (a real array)."""
        return self.re**2 + self.im**2

    def fro_norm(self) -> float:
        return float(np.sqrt(np.sum(self.abs2())))

    def column_norms(self) -> np.ndarray:
        return np.sqrt(np.sum(self.abs2(), axis=0))

    def copy(self) -> "ComplexMatrix":
        return ComplexMatrix(self.re.copy(), self.im.copy())

    def vec(self) -> "ComplexMatrix":
        """Column-major vectorization."""
        return ComplexMatrix(
            self.re.reshape(-1, order="F"), self.im.reshape(-1, order="F")
        )

    # -- boundary converters (interop / oracles only) ----------------------

    def to_complex(self) -> np.ndarray:
        return self.re + 1j * self.im

    @staticmethod
    def from_complex(z) -> "ComplexMatrix":
        z = np.asarray(z)
        return ComplexMatrix(np.real(z).astype(np.float64),
                             np.imag(z).astype(np.float64))


def czeros(*shape) -> ComplexMatrix:
    return ComplexMatrix(np.zeros(shape), np.zeros(shape))


def ceye(n: int) -> ComplexMatrix:
    return ComplexMatrix(np.eye(n), np.zeros((n, n)))


def crandn(rng: np.random.Generator, *shape) -> ComplexMatrix:
    """Standard complex Gaussian entries: re, im ~ N(0, 1/2) independently,
    so each entry has unit total variance."""
    s = np.sqrt(0.5)
    return ComplexMatrix(s * rng.standard_normal(shape),
                         s * rng.standard_normal(shape))


def real_embedding(a: ComplexMatrix) -> np.ndarray:
    """The 2m x 2n real block matrix [[Re, -Im], [Im, Re]].

    Matrix inversion and singular values of the complex matrix can be read
    off this embedding using real linear algebra only.
    """
    return np.block([[a.re, -a.im], [a.im, a.re]])


def cinv(a: ComplexMatrix) -> ComplexMatrix:
    """Inverse of a square complex matrix via its real embedding."""
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"square matrix required, got {a.shape}")
    e = np.linalg.inv(real_embedding(a))
    return ComplexMatrix(e[:n, :n], e[n:, :n])


def spectral_norm(a: ComplexMatrix) -> float:
    """Largest singular value (each complex singular value appears twice in
    the real embedding, so the embedding's 2-norm equals it)."""
    return float(np.linalg.norm(real_embedding(a), 2))


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by a 64-bit seed.

    Philox streams can be split with ``Generator.spawn`` so parallel chunks
    draw from provably disjoint streams; all sampling in this package goes
    through generators created here.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
