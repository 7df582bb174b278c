"""Attribute-private Gaussian mechanism for Gaussian Θ with linear column statistics."""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional

from core.dataset import Dataset
from core.errors import ConfigurationError, UnsupportedMechanismError
from core.framework import DATASET, GAUSSIAN, PrivacyParams, PufferfishFramework
from core.query import COLUMN_MEAN, QuerySpec, evaluate_query
from distributions.gaussian import conditional_of_linear, gaussian_inverse_cdf
from mechanisms.noise import NoiseStream

logger = logging.getLogger(__name__)


@dataclass
class AttributeCalibration:
    """Per sensitive attribute: Δ_iF, min_θ Var(F | g_i) and the noise they demand."""

    attribute: str
    sensitivity: float
    sensitivity_theta: str
    min_variance: float
    min_variance_theta: str
    # (c Δ_iF / ε)^2 - min variance, before clamping at 0
    required_variance: float


@dataclass
class GaussianMechanismReport:
    mechanism: str
    framework_id: str
    query: str
    epsilon: float
    delta: float
    c: float
    calibrations: List[AttributeCalibration]
    sigma2: float
    output: float
    seed: int
    noise: float = 0.0
    effective: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    @property
    def sensitivities(self) -> dict:
        return {cal.attribute: cal.sensitivity for cal in self.calibrations}

    @property
    def exact(self) -> bool:
        return self.sigma2 == 0

    def to_document(self, reveal_noise: bool = False) -> dict:
        doc = {
            "mechanism": self.mechanism,
            "framework_id": self.framework_id,
            "query": self.query,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "c": self.c,
            "sensitivities": self.sensitivities,
            "calibrations": [asdict(cal) for cal in self.calibrations],
            "sigma2": self.sigma2,
            "exact": self.exact,
            "output": self.output,
            "seed": self.seed,
        }
        if self.effective is not None:
            doc["effective_privacy"] = self.effective
        doc.update(self.extras)
        if reveal_noise:
            doc["noise"] = self.noise
        return doc


def _scale(kind: str, n: Optional[int]) -> float:
    if kind == COLUMN_MEAN:
        return 1.0
    if n is None:
        raise ConfigurationError("a column-sum statistic needs the record count n")
    return float(n)


def _check_linear(framework: PufferfishFramework, F: QuerySpec, mechanism: str):
    framework.require_variant(GAUSSIAN, mechanism=mechanism)
    if framework.notion not in (None, DATASET):
        raise UnsupportedMechanismError(f"{mechanism} protects dataset-level secrets, framework is {framework.notion}")
    if not F.is_linear:
        raise UnsupportedMechanismError(f"{mechanism} needs a column mean or sum query, got {F.kind}")


def sensitivity_gaussian(framework: PufferfishFramework, F: QuerySpec, i: int, n: Optional[int] = None) -> float:
    """Δ_iF = max_θ (s_F / s_g) (|V_ij| / V_ii) d(U); s is 1 for a mean and n for a sum."""
    return _attribute_sensitivity(framework, F, i, n)[0]


def _attribute_sensitivity(framework, F, i, n):
    _check_linear(framework, F, "apgm")
    spec = framework.secret_for(i)
    j = F.attribute
    ratio = _scale(F.kind, n) / _scale(spec.function, n) if F.kind != spec.function else 1.0
    d = spec.diameter()
    best, best_theta = -math.inf, ""
    for theta in framework.theta:
        v_ii = theta.cov[i, i]
        value = ratio * abs(theta.cov[i, j]) / v_ii * d
        if value > best:
            best, best_theta = value, theta.id
    return best, best_theta


def calibrate(framework: PufferfishFramework, F: QuerySpec, params: PrivacyParams, n: int,
              mechanism: str = "apgm") -> List[AttributeCalibration]:
    """Δ_iF and the minimal conditional variance for every sensitive attribute."""
    _check_linear(framework, F, mechanism)
    c = params.c
    j = F.attribute
    calibrations = []
    for i in sorted(framework.sensitive):
        spec = framework.secret_for(i)
        sensitivity, sens_theta = _attribute_sensitivity(framework, F, i, n)
        min_var, var_theta = math.inf, ""
        for theta in framework.theta:
            cond = conditional_of_linear(theta, n, j, i, a=theta.mu[i] * _scale(spec.function, n),
                                         query_scale=_scale(F.kind, n), secret_scale=_scale(spec.function, n))
            if cond.variance < min_var:
                min_var, var_theta = cond.variance, theta.id
        required = (c * sensitivity / params.epsilon) ** 2 - min_var
        calibrations.append(AttributeCalibration(framework.names[i], sensitivity, sens_theta,
                                                 min_var, var_theta, required))
        logger.debug("%s: Δ=%.6g (θ %s), min Var=%.6g (θ %s), required σ²=%.6g", framework.names[i],
                     sensitivity, sens_theta, min_var, var_theta, required)
    return calibrations


def noise_variance(calibrations: List[AttributeCalibration]) -> float:
    """σ² = max(0, max_i required variance)."""
    return max(0.0, max((cal.required_variance for cal in calibrations), default=0.0))


def release_gaussian(value: float, sigma2: float, seed: int):
    """(output, noise); an exact release draws nothing."""
    if sigma2 <= 0:
        return value, 0.0
    noise = NoiseStream(seed).gaussian(sigma2)
    return value + noise, noise


def apgm(X: Dataset, F: QuerySpec, framework: PufferfishFramework, params: PrivacyParams,
         rng_seed: int) -> GaussianMechanismReport:
    """Release F(X) + N(0, σ²) with σ² calibrated to the worst sensitive attribute."""
    if framework.theta.variant != GAUSSIAN:
        raise UnsupportedMechanismError(
            f"apgm needs a Gaussian Θ, got {framework.theta.variant}; "
            "use apgmng with Gaussian approximations of the conditional output laws"
        )
    framework.check_dataset(X)
    c = params.c
    calibrations = calibrate(framework, F, params, X.n)
    sigma2 = noise_variance(calibrations)
    value = evaluate_query(F, X)
    output, noise = release_gaussian(value, sigma2, rng_seed)
    logger.info("apgm: σ²=%.6g over %d sensitive attribute(s)%s", sigma2, len(calibrations),
                " (exact release)" if sigma2 == 0 else "")
    return GaussianMechanismReport("apgm", framework.framework_id, F.describe(framework.names),
                                   params.epsilon, params.delta, c, calibrations, sigma2, output,
                                   rng_seed, noise)


def accuracy_from_variance(sigma2: float, beta: float) -> float:
    if not 0 < beta < 1:
        raise ConfigurationError(f"beta must lie in (0, 1), got {beta}")
    if sigma2 <= 0:
        return 0.0
    return math.sqrt(sigma2) * gaussian_inverse_cdf(1.0 - beta / 2.0)


def accuracy_bound(framework: PufferfishFramework, F: QuerySpec, params: PrivacyParams, beta: float,
                   n: int) -> float:
    """α with P(|output - F(X)| > α) <= β for apgm on n records."""
    if not 0 < beta < 1:
        raise ConfigurationError(f"beta must lie in (0, 1), got {beta}")
    return accuracy_from_variance(noise_variance(calibrate(framework, F, params, n)), beta)
