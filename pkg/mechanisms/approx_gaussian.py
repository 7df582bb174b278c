"""Attribute-private Gaussian mechanism driven by Gaussian approximations of the
conditional output laws, and the effective privacy such approximations buy."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from core.dataset import Dataset
from core.errors import ConfigurationError, DistributionError, UnsupportedMechanismError
from core.framework import DISTRIBUTIONAL, PrivacyParams, PufferfishFramework
from core.loader import read_document
from core.query import QuerySpec, evaluate_query
from distributions.divergence import DivergenceBudget, GaussianApprox
from mechanisms.gaussian import AttributeCalibration, GaussianMechanismReport, noise_variance, release_gaussian

logger = logging.getLogger(__name__)

# keyed by (secret event id, θ id)
Approximations = Dict[Tuple[str, str], GaussianApprox]

VARIANCE_RTOL = 1e-9


@dataclass(frozen=True)
class EffectivePrivacy:
    epsilon: float
    delta: float
    # delta reached 1 and was clamped: the guarantee says nothing
    vacuous: bool = False

    def to_document(self) -> dict:
        return {"epsilon": self.epsilon, "delta": self.delta, "vacuous": self.vacuous}


def effective_privacy(params: PrivacyParams, budget: DivergenceBudget) -> EffectivePrivacy:
    """(ε + 2λ_η, e^λ_η δ + η), with δ clamped at 1."""
    epsilon = params.epsilon + 2.0 * budget.lambda_eta
    if params.delta == 0:
        inflated = 0.0
    else:
        try:
            inflated = math.exp(budget.lambda_eta) * params.delta
        except OverflowError:
            inflated = math.inf
    delta = inflated + budget.eta
    if delta >= 1.0:
        logger.warning("effective δ = %.4g >= 1: the guarantee is vacuous", delta)
        return EffectivePrivacy(epsilon, 1.0, vacuous=True)
    return EffectivePrivacy(epsilon, delta)


def parse_approximations(doc: Mapping) -> Approximations:
    """{secret_id: {theta_id: {mean, variance}}} -> {(secret_id, theta_id): GaussianApprox}."""
    approximations = {}
    for secret_id, per_theta in doc.items():
        if not isinstance(per_theta, Mapping):
            raise ConfigurationError(f"approximations for '{secret_id}' must map θ ids to {{mean, variance}}")
        for theta_id, fields in per_theta.items():
            try:
                mean, variance = float(fields["mean"]), float(fields["variance"])
            except (KeyError, TypeError, ValueError):
                raise ConfigurationError(f"approximation ({secret_id}, {theta_id}) needs numeric mean and variance")
            approximations[(str(secret_id), str(theta_id))] = GaussianApprox(mean, variance, str(secret_id),
                                                                            str(theta_id))
    return approximations


def load_approximations(path) -> Approximations:
    return parse_approximations(read_document(path))


def calibrate_approx(framework: PufferfishFramework, approximations: Approximations,
                     params: PrivacyParams):
    """Per sensitive attribute, Δ_iF from approximation means and min_θ of the shared variance."""
    if framework.notion == DISTRIBUTIONAL:
        raise UnsupportedMechanismError("apgmng protects dataset-level secrets")
    c = params.c
    ids = [e.id for spec in framework.secrets for e in spec.events]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"secret event ids must be unique across attributes to key approximations: {ids}")

    calibrations = []
    for i in sorted(framework.sensitive):
        spec = framework.secret_for(i)
        best, best_theta = -math.inf, ""
        min_var, var_theta = math.inf, ""
        for theta_id in framework.theta.member_ids:
            missing = [e.id for e in spec.events if (e.id, theta_id) not in approximations]
            if missing:
                raise ConfigurationError(f"no approximation for secret(s) {missing} under θ '{theta_id}'")
            approx = [approximations[(e.id, theta_id)] for e in spec.events]
            variance = approx[0].variance
            if any(not math.isclose(a.variance, variance, rel_tol=VARIANCE_RTOL) for a in approx):
                raise DistributionError(
                    f"approximations of attribute '{framework.names[i]}' under θ '{theta_id}' "
                    "must share one variance"
                )
            means = [a.mean for a in approx]
            gap = max(means) - min(means)
            if gap > best:
                best, best_theta = gap, theta_id
            if variance < min_var:
                min_var, var_theta = variance, theta_id
        required = (c * best / params.epsilon) ** 2 - min_var
        calibrations.append(AttributeCalibration(framework.names[i], best, best_theta, min_var, var_theta, required))
    return calibrations


def apgmng(X: Dataset, F: QuerySpec, approximations: Approximations, framework: PufferfishFramework,
           params: PrivacyParams, rng_seed: int, budget: Optional[DivergenceBudget] = None) -> GaussianMechanismReport:
    """Gaussian mechanism calibrated on approximations f̃ of F(X) | secret, θ."""
    framework.check_dataset(X)
    F = framework.require_query(F)
    c = params.c
    calibrations = calibrate_approx(framework, approximations, params)
    sigma2 = noise_variance(calibrations)
    value = evaluate_query(F, X)
    output, noise = release_gaussian(value, sigma2, rng_seed)
    effective = effective_privacy(params, budget).to_document() if budget is not None else None
    logger.info("apgmng: σ²=%.6g from %d approximation(s)", sigma2, len(approximations))
    return GaussianMechanismReport("apgmng", framework.framework_id, F.describe(framework.names),
                                   params.epsilon, params.delta, c, calibrations, sigma2, output,
                                   rng_seed, noise, effective=effective)
