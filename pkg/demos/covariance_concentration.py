# How fast does the sample covariance settle onto A diag(r) A^H + s2 I?
# The cross and noise perturbation terms should shrink like 1/sqrt(M).
import numpy as np

from jssr.autoencoder import expected_covariance, sample_covariance
from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed
from jssr.signal_model import GroupActivityModel, sample_batch

rng = rng_from_seed(3)
A = crandn(rng, 10, 50)
sigma2 = 0.1

print(" M      relative residual")
prev = None
for M in (10, 100, 1000, 10000):
    model = GroupActivityModel(N=50, M=M, G=10, p1=0.15, p2=0.05,
                               sigma2=sigma2)
    vals = []
    for _ in range(10):
        X, _ = sample_batch(model, rng, 1)
        X = ComplexMatrix(X.re[0], X.im[0])
        Y = A @ X + crandn(rng, 10, M) * np.sqrt(sigma2)
        r_bar = np.mean(X.re**2 + X.im**2, axis=1)
        num = (sample_covariance(Y) - expected_covariance(A, r_bar, sigma2))
        vals.append(num.fro_norm() / expected_covariance(A, r_bar,
                                                         sigma2).fro_norm())
    res = np.mean(vals)
    note = "" if prev is None else f"   ({prev / res:.1f}x down, ~sqrt(10)=3.2)"
    print(f"{M:>6} {res:>12.4f}{note}")
    prev = res
