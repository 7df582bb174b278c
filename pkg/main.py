"""Command-line front end for attribute-private query release."""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd
import yaml

from config.framework_registry import list_frameworks, resolve_framework
from config.settings import (
    DEFAULT_BETA,
    DEFAULT_BINS,
    DEFAULT_MAX_QUILT_SIZE,
    LOG_LEVEL,
    PROJECT_ROOT,
)
from core.dataset import load_dataset
from core.errors import AttributePrivacyError, ConfigurationError, UnsupportedMechanismError
from core.framework import PrivacyParams
from core.loader import parse_framework, read_document
from distributions.discrete import DiscreteDistribution
from distributions.divergence import DivergenceBudget, GaussianApprox, certify_approximation
from mechanisms.approx_gaussian import apgmng, effective_privacy, load_approximations
from mechanisms.gaussian import apgm
from mechanisms.inspection import (
    inspect_apgm,
    inspect_apgmng,
    inspect_apmqm,
    inspect_baseline,
    inspect_wasserstein,
)
from mechanisms.markov_quilt import apmqm, baseline_mqm
from mechanisms.noise import derive_seed
from mechanisms.wasserstein import wasserstein_mechanism
from reports.documents import error_document, render
from reports.summary import summarize
from reproduction.tables import format_reproduction, reproduce

logger = logging.getLogger(__name__)

MECHANISMS = ["apgm", "apgmng", "apmqm", "mqm-baseline", "wasserstein"]
GAUSSIAN_MECHANISMS = ("apgm", "apgmng")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2

IO_ERRORS = (
    OSError,
    json.JSONDecodeError,
    yaml.YAMLError,
    UnicodeDecodeError,
    pd.errors.ParserError,
    pd.errors.EmptyDataError,
)


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else getattr(logging, LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )


def load_inputs(args):
    """Framework from a path or registered id, and the dataset it governs."""
    path = resolve_framework(args.framework)
    doc = read_document(path)
    framework = parse_framework(doc, grid_step=args.grid_step, source=path.stem)

    dataset_ref = args.dataset or doc.get("dataset")
    if not dataset_ref:
        raise ConfigurationError("no --dataset given and the framework names none")
    dataset_path = Path(dataset_ref)
    if not args.dataset and not dataset_path.is_absolute():
        dataset_path = PROJECT_ROOT / dataset_path
    dataset = load_dataset(dataset_path, framework.attributes)
    return framework, dataset


def privacy_params(args) -> PrivacyParams:
    if args.epsilon is None:
        raise ConfigurationError("--epsilon is required")
    if args.mechanism in GAUSSIAN_MECHANISMS:
        return PrivacyParams(args.epsilon, args.delta if args.delta is not None else 0.0)
    if args.delta is not None:
        raise UnsupportedMechanismError(f"{args.mechanism} gives pure ε privacy and takes no --delta")
    return PrivacyParams(args.epsilon)


def divergence_budget(args) -> Optional[DivergenceBudget]:
    if args.eta is None or args.lambda_eta is None:
        return None
    return DivergenceBudget(args.eta, args.lambda_eta)


def _approximations(args):
    if not args.approximations:
        raise ConfigurationError("apgmng needs --approximations")
    return load_approximations(args.approximations)


def run_release(args) -> dict:
    framework, X = load_inputs(args)
    params = privacy_params(args)
    seed = derive_seed(args.seed, args.mechanism)
    logger.info("release: %s on %s, n=%d, ε=%g", args.mechanism, framework.framework_id, X.n, params.epsilon)

    F = framework.require_query()
    if args.mechanism == "apgm":
        report = apgm(X, F, framework, params, seed)
    elif args.mechanism == "apgmng":
        report = apgmng(X, F, _approximations(args), framework, params, seed, budget=divergence_budget(args))
    elif args.mechanism == "apmqm":
        report = apmqm(X, F, framework, params.epsilon, args.max_quilt_size, seed)
    elif args.mechanism == "mqm-baseline":
        report = baseline_mqm(X, F, args.lipschitz, framework, params.epsilon, seed, args.max_quilt_size)
    else:
        report = wasserstein_mechanism(X, F, framework, params.epsilon, seed)

    doc = report.to_document(reveal_noise=args.reveal_noise)
    doc["seed"] = args.seed
    doc["noise_stream"] = seed
    doc["n"] = X.n
    return doc


def run_inspect(args) -> dict:
    framework, X = load_inputs(args)
    params = privacy_params(args)
    F = framework.require_query()
    if args.mechanism == "apgm":
        doc = inspect_apgm(X, F, framework, params, args.beta)
    elif args.mechanism == "apgmng":
        doc = inspect_apgmng(X, F, _approximations(args), framework, params, args.beta,
                             budget=divergence_budget(args))
    elif args.mechanism == "apmqm":
        doc = inspect_apmqm(X, F, framework, params.epsilon, args.max_quilt_size)
    elif args.mechanism == "mqm-baseline":
        doc = inspect_baseline(X, F, args.lipschitz, framework, params.epsilon, args.max_quilt_size)
    else:
        doc = inspect_wasserstein(X, F, framework, params.epsilon)
    doc["n"] = X.n
    return doc


def run_certify(args) -> dict:
    if args.epsilon is None:
        raise ConfigurationError("--epsilon is required")
    if args.eta is None:
        raise ConfigurationError("certify needs --eta")
    params = PrivacyParams(args.epsilon, args.delta if args.delta is not None else 0.0)
    f = DiscreteDistribution.from_document(read_document(args.distribution))
    approx_doc = read_document(args.approximation)
    try:
        f_tilde = GaussianApprox(float(approx_doc["mean"]), float(approx_doc["variance"]))
    except (KeyError, TypeError, ValueError):
        raise ConfigurationError("approximation document needs numeric 'mean' and 'variance'")

    estimated = args.lambda_eta is None
    lambda_eta = certify_approximation(f, f_tilde, args.eta, args.bins) if estimated else args.lambda_eta
    budget = DivergenceBudget(args.eta, lambda_eta)
    effective = effective_privacy(params, budget)
    return {
        "command": "certify",
        "eta": args.eta,
        "bins": args.bins if estimated else None,
        "lambda_eta": lambda_eta,
        "estimated": estimated,
        "epsilon": params.epsilon,
        "delta": params.delta,
        "effective_privacy": effective.to_document(),
    }


def run_reproduce(args) -> dict:
    return reproduce(grid_step=args.grid_step)


def run_frameworks(args) -> dict:
    return {"frameworks": list_frameworks()}


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--verbose", action="store_true", help="Log at DEBUG level")
    parser.add_argument("--quiet", action="store_true", help="Log warnings and errors only")
    parser.add_argument("--format", choices=["json", "text"], default="json",
                        help="Output format on stdout. Default: json")


def _add_mechanism_args(parser: argparse.ArgumentParser):
    parser.add_argument("--framework", required=True,
                        help="Framework document path, or the id of a bundled framework")
    parser.add_argument("--dataset", default=None,
                        help="CSV dataset. Default: the dataset the framework names")
    parser.add_argument("--mechanism", choices=MECHANISMS, required=True)
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--delta", type=float, default=None,
                        help="Required (> 0) by apgm and apgmng; rejected by the Laplace mechanisms")
    parser.add_argument("--beta", type=float, default=DEFAULT_BETA,
                        help=f"Failure probability of the accuracy bound. Default: {DEFAULT_BETA}")
    parser.add_argument("--max-quilt-size", type=int, default=DEFAULT_MAX_QUILT_SIZE,
                        help=f"Largest quilt separator |Q|. Default: {DEFAULT_MAX_QUILT_SIZE}")
    parser.add_argument("--grid-step", type=float, default=None,
                        help="Step for Θ ranges; overrides the framework's own")
    parser.add_argument("--approximations", default=None,
                        help="Gaussian approximation set for apgmng")
    parser.add_argument("--eta", type=float, default=None)
    parser.add_argument("--lambda-eta", type=float, default=None,
                        help="Divergence bound of the approximations, for the effective privacy")
    parser.add_argument("--lipschitz", type=float, default=1.0,
                        help="Lipschitz constant of the query for mqm-baseline. Default: 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Attribute-private query release")
    commands = parser.add_subparsers(dest="command", required=True)

    release = commands.add_parser("release", help="Run a mechanism and release the noisy answer")
    _add_mechanism_args(release)
    release.add_argument("--seed", type=int, default=0, help="64-bit seed. Default: 0")
    release.add_argument("--reveal-noise", action="store_true",
                         help="Include the drawn noise in the report (voids the guarantee)")
    _add_common(release)

    inspect = commands.add_parser("inspect", help="Show the calibration without releasing anything")
    _add_mechanism_args(inspect)
    _add_common(inspect)

    certify = commands.add_parser("certify", help="Estimate λ_η for a Gaussian approximation")
    certify.add_argument("--distribution", required=True, help="Discrete distribution {support, probs}")
    certify.add_argument("--approximation", required=True, help="Gaussian approximation {mean, variance}")
    certify.add_argument("--eta", type=float, default=None)
    certify.add_argument("--bins", type=int, default=DEFAULT_BINS,
                         help=f"Cells of the common grid. Default: {DEFAULT_BINS}")
    certify.add_argument("--lambda-eta", type=float, default=None,
                         help="Use this λ_η instead of estimating it")
    certify.add_argument("--epsilon", type=float, default=None)
    certify.add_argument("--delta", type=float, default=None)
    _add_common(certify)

    repro = commands.add_parser("reproduce", help="Print the bundled count tables and worst-case distances")
    repro.add_argument("--grid-step", type=float, default=None)
    _add_common(repro)

    frameworks = commands.add_parser("frameworks", help="List the bundled frameworks")
    _add_common(frameworks)
    return parser


COMMANDS = {
    "release": run_release,
    "inspect": run_inspect,
    "certify": run_certify,
    "reproduce": run_reproduce,
    "frameworks": run_frameworks,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        doc = COMMANDS[args.command](args)
        code = EXIT_OK
    except AttributePrivacyError as e:
        logger.error("%s: %s", e.code, e)
        doc, code = error_document(e), EXIT_CONFIG
    except IO_ERRORS as e:
        logger.error("I/O error: %s", e)
        doc, code = error_document(e), EXIT_IO

    if args.format == "text":
        text = format_reproduction(doc) if args.command == "reproduce" and code == EXIT_OK else summarize(doc)
        print(text)
    else:
        print(render(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
