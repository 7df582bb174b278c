"""Calibration analysis without a release: everything a mechanism would compute
before drawing noise."""

import logging
import math
from dataclasses import asdict
from typing import Optional

from core.dataset import Dataset
from core.framework import PrivacyParams, PufferfishFramework
from core.query import QuerySpec, column_sensitivity
from distributions.divergence import DivergenceBudget
from mechanisms.approx_gaussian import Approximations, calibrate_approx, effective_privacy
from mechanisms.gaussian import accuracy_from_variance, calibrate, noise_variance
from mechanisms.markov_quilt import entry_choices, quilt_choices
from mechanisms.wasserstein import pair_distances, secret_laws

logger = logging.getLogger(__name__)


def _base(mechanism: str, framework: PufferfishFramework, F: QuerySpec, epsilon: float) -> dict:
    return {
        "mechanism": mechanism,
        "framework_id": framework.framework_id,
        "query": F.describe(framework.names),
        "epsilon": epsilon,
    }


def _gaussian_document(mechanism, framework, F, params, calibrations, beta) -> dict:
    sigma2 = noise_variance(calibrations)
    doc = _base(mechanism, framework, F, params.epsilon)
    doc.update({
        "delta": params.delta,
        "c": params.c,
        "sensitivities": {cal.attribute: cal.sensitivity for cal in calibrations},
        "calibrations": [asdict(cal) for cal in calibrations],
        "sigma2": sigma2,
        "exact": sigma2 == 0,
        "accuracy": {"beta": beta, "alpha": accuracy_from_variance(sigma2, beta)},
    })
    return doc


def inspect_apgm(X: Dataset, F: QuerySpec, framework: PufferfishFramework, params: PrivacyParams,
                 beta: float) -> dict:
    framework.check_dataset(X)
    F = framework.require_query(F)
    return _gaussian_document("apgm", framework, F, params, calibrate(framework, F, params, X.n), beta)


def inspect_apgmng(X: Dataset, F: QuerySpec, approximations: Approximations, framework: PufferfishFramework,
                   params: PrivacyParams, beta: float, budget: Optional[DivergenceBudget] = None) -> dict:
    framework.check_dataset(X)
    F = framework.require_query(F)
    doc = _gaussian_document("apgmng", framework, F, params, calibrate_approx(framework, approximations, params), beta)
    if budget is not None:
        doc["effective_privacy"] = effective_privacy(params, budget).to_document()
    return doc


def inspect_apmqm(X: Dataset, F: QuerySpec, framework: PufferfishFramework, epsilon: float,
                  max_quilt_size: int) -> dict:
    framework.check_dataset(X)
    F = framework.require_query(F)
    choices = quilt_choices(X, F, framework, epsilon, max_quilt_size)
    doc = _base("apmqm", framework, F, epsilon)
    doc.update({
        "sensitivity": column_sensitivity(F, F.attributes, X.shape),
        "quilts": [c.to_document() for c in choices],
        "scale": max(c.scale for c in choices),
        "max_quilt_size": max_quilt_size,
    })
    return doc


def inspect_baseline(Y: Dataset, F: QuerySpec, L: float, framework: PufferfishFramework, epsilon: float,
                     max_quilt_size: int) -> dict:
    framework.check_dataset(Y)
    F = framework.require_query(F)
    choices = entry_choices(Y, framework, epsilon, max_quilt_size)
    b_max = max(c.scale for c in choices)
    doc = _base("mqm-baseline", framework, F, epsilon)
    doc.update({
        "lipschitz": L,
        "quilts": [c.to_document() for c in choices],
        "b_max": b_max,
        "scale": 0.0 if L == 0 else L * b_max,
        "max_quilt_size": max_quilt_size,
    })
    return doc


def inspect_wasserstein(X: Dataset, F: QuerySpec, framework: PufferfishFramework, epsilon: float) -> dict:
    """Per-secret conditional output laws, the per-pair W∞ table, W and the scale W / ε."""
    framework.check_dataset(X)
    F = framework.require_query(F)
    laws = secret_laws(framework, F, X.n)
    distances, skipped = pair_distances(framework, F, X.n, laws)
    W = max(d.distance for d in distances)
    doc = _base("wasserstein", framework, F, epsilon)
    doc.update({
        "conditional_laws": [
            {"attribute": attribute, "secret": event, "theta": theta,
             "law": law.to_document() if law is not None else None}
            for (attribute, event, theta), law in laws.items()
        ],
        "per_pair_distances": [asdict(d) for d in distances],
        "W": W,
        "scale": W / epsilon if math.isfinite(W) else math.inf,
        "grid_step": framework.theta.grid_step,
        "skipped_pairs": skipped,
    })
    return doc
