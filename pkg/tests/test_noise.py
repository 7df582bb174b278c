import math

import numpy as np
import pytest

from core.errors import ConfigurationError
from mechanisms.gaussian import release_gaussian
from mechanisms.markov_quilt import release_laplace
from mechanisms.noise import SEED_LIMIT, NoiseStream, check_seed, derive_seed

DRAWS = 10 ** 6


class TestMoments:
    def test_uniforms_stay_inside_the_unit_interval(self):
        u = NoiseStream(1).uniforms(DRAWS)
        assert u.min() > 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 5 * math.sqrt(1 / 12 / DRAWS)

    def test_gaussian(self):
        x = NoiseStream(2).gaussian(4.0, size=DRAWS)
        assert abs(x.mean()) < 5 * 2.0 / math.sqrt(DRAWS)
        assert abs(x.var() - 4.0) < 5 * 4.0 * math.sqrt(2 / DRAWS)

    def test_laplace(self):
        b = 2.0
        x = NoiseStream(3).laplace(b, size=DRAWS)
        variance = 2 * b * b
        assert abs(x.mean()) < 5 * math.sqrt(variance / DRAWS)
        assert abs(x.var() - variance) < 5 * variance * math.sqrt(5 / DRAWS)
        assert abs(np.abs(x).mean() - b) < 5 * b / math.sqrt(DRAWS)


class TestStreams:
    def test_same_seed_same_draws(self):
        np.testing.assert_array_equal(NoiseStream(7).gaussian(1.0, size=16), NoiseStream(7).gaussian(1.0, size=16))

    def test_different_seeds_differ(self):
        assert NoiseStream(7).laplace(1.0) != NoiseStream(8).laplace(1.0)

    def test_scalar_draws_are_floats(self):
        assert isinstance(NoiseStream(9).gaussian(1.0), float)
        assert isinstance(NoiseStream(9).laplace(1.0), float)

    def test_negative_scales(self):
        with pytest.raises(ConfigurationError):
            NoiseStream(1).gaussian(-1.0)
        with pytest.raises(ConfigurationError):
            NoiseStream(1).laplace(-1.0)


class TestSeeds:
    def test_derived_seed_is_stable(self):
        assert derive_seed(42, "apgm") == derive_seed(42, "apgm")

    def test_mechanisms_get_separate_streams(self):
        seeds = {derive_seed(42, m) for m in ("apgm", "apgmng", "apmqm", "mqm-baseline", "wasserstein")}
        assert len(seeds) == 5
        assert all(0 <= s < SEED_LIMIT for s in seeds)

    @pytest.mark.parametrize("seed", [-1, SEED_LIMIT, True, 1.5, "3"])
    def test_seed_range(self, seed):
        with pytest.raises(ConfigurationError):
            check_seed(seed)

    def test_largest_seed(self):
        assert NoiseStream(SEED_LIMIT - 1).seed == SEED_LIMIT - 1


class TestExactRelease:
    def test_gaussian_without_noise(self):
        assert release_gaussian(3.25, 0.0, seed=1) == (3.25, 0.0)

    def test_laplace_without_noise(self):
        assert release_laplace(3.25, 0.0, seed=1) == (3.25, 0.0)

    def test_noise_is_added(self):
        output, noise = release_laplace(3.25, 1.0, seed=1)
        assert output == 3.25 + noise
        assert noise == NoiseStream(1).laplace(1.0)
