"""Seeded noise streams.

Every draw starts from a 64-bit word of a Philox counter-based generator keyed
by the seed; the top 53 bits give a uniform strictly inside (0, 1), which is
mapped to Gaussian or Laplace noise through the inverse CDF. The same seed
therefore gives the same noise on every platform.
"""

import hashlib
import logging
import math
from typing import Optional, Union

import numpy as np

from core.errors import ConfigurationError
from distributions.gaussian import gaussian_inverse_cdf

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64
_SCALE_53 = 2.0 ** -53


def derive_seed(seed: int, mechanism: str) -> int:
    """Per-mechanism stream key: the first 8 bytes of SHA-256(seed, mechanism name)."""
    check_seed(seed)
    digest = hashlib.sha256(f"{seed}:{mechanism}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= int(seed) < SEED_LIMIT:
        raise ConfigurationError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    return int(seed)


class NoiseStream:
    """An explicit random stream; never shared between mechanisms."""

    def __init__(self, seed: int):
        self.seed = check_seed(seed)
        self._bitgen = np.random.Philox(key=self.seed)

    def uniforms(self, size: Optional[int] = None) -> Union[float, np.ndarray]:
        raw = np.asarray(self._bitgen.random_raw(size), dtype=np.uint64)
        u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _SCALE_53
        return float(u) if size is None else u

    def gaussian(self, sigma2: float, size: Optional[int] = None) -> Union[float, np.ndarray]:
        """N(0, sigma2) draws."""
        if sigma2 < 0:
            raise ConfigurationError(f"Gaussian noise variance must be nonnegative, got {sigma2}")
        return math.sqrt(sigma2) * gaussian_inverse_cdf(self.uniforms(size))

    def laplace(self, scale: float, size: Optional[int] = None) -> Union[float, np.ndarray]:
        """Lap(scale) draws, density exp(-|x| / scale) / (2 scale)."""
        if scale < 0:
            raise ConfigurationError(f"Laplace scale must be nonnegative, got {scale}")
        v = np.asarray(self.uniforms(size)) - 0.5
        draws = -scale * np.sign(v) * np.log1p(-2.0 * np.abs(v))
        return float(draws) if size is None else draws
