"""Joint sparse support recovery: learned pilots + covariance-feature
decoding for multi-antenna activity detection, with classical baselines."""

from jssr.complexmat import ComplexMatrix, crandn, rng_from_seed

__all__ = ["ComplexMatrix", "crandn", "rng_from_seed"]
__version__ = "0.1.0"
