"""Plain-text summaries of release and inspect documents."""

import logging
from typing import Any, Dict, List

logger = logging.getLogger(__name__)

WIDTH = 60


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _header(title: str) -> List[str]:
    return ["=" * WIDTH, f"  {title}", "=" * WIDTH, ""]


def _gaussian_lines(doc: Dict) -> List[str]:
    lines = [f"  c = {_fmt(doc['c'])}   σ² = {_fmt(doc['sigma2'])}", ""]
    lines.append(f"  {'Attribute':<16} {'Δ_iF':>12} {'min Var':>12} {'required σ²':>14}")
    lines.append(f"  {'-' * 16} {'-' * 12} {'-' * 12} {'-' * 14}")
    for cal in doc["calibrations"]:
        lines.append(f"  {cal['attribute']:<16} {_fmt(cal['sensitivity']):>12} "
                     f"{_fmt(cal['min_variance']):>12} {_fmt(cal['required_variance']):>14}")
    effective = doc.get("effective_privacy")
    if effective:
        flag = "  (vacuous)" if effective["vacuous"] else ""
        lines.append("")
        lines.append(f"  Effective privacy: ε = {_fmt(effective['epsilon'])}, "
                     f"δ = {_fmt(effective['delta'])}{flag}")
    return lines


def _quilt_lines(doc: Dict) -> List[str]:
    lines = []
    for choice in doc["quilts"]:
        lines.append(f"  {choice['attribute']} (node {choice['node']}): b = {_fmt(choice['scale'])}, "
                     f"fallback {_fmt(choice['fallback'])}")
        for cand in choice["candidates"]:
            mark = "*" if choice["quilt"] and cand["Q"] == choice["quilt"]["Q"] else " "
            lines.append(f"   {mark} Q={cand['Q']} N={cand['N']} R={cand['R']}  "
                         f"e={_fmt(cand['influence'])}  scale={_fmt(cand['scale'])}")
    lines.append("")
    lines.append(f"  Laplace scale: {_fmt(doc['scale'])}")
    return lines


def _wasserstein_lines(doc: Dict) -> List[str]:
    lines = [f"  {'Pair':<24} {'θ':<20} {'W∞':>8}", f"  {'-' * 24} {'-' * 20} {'-' * 8}"]
    for d in doc["per_pair_distances"]:
        pair = f"{d['secret_a']} vs {d['secret_b']}"
        lines.append(f"  {pair:<24} {d['theta']:<20} {_fmt(d['distance']):>8}")
    lines.append("")
    lines.append(f"  W = {_fmt(doc['W'])}   Laplace scale = {_fmt(doc['scale'])}")
    if doc.get("skipped_pairs"):
        lines.append(f"  Skipped (zero-probability) combinations: {doc['skipped_pairs']}")
    return lines


_SECTIONS = {
    "apgm": _gaussian_lines,
    "apgmng": _gaussian_lines,
    "apmqm": _quilt_lines,
    "mqm-baseline": _quilt_lines,
    "wasserstein": _wasserstein_lines,
}


def summarize(doc: Dict) -> str:
    """Text rendering of a release or inspect document."""
    if "error" in doc:
        return f"error [{doc['error']['code']}]: {doc['error']['message']}"
    if "frameworks" in doc:
        lines = _header("BUNDLED FRAMEWORKS")
        for fw in doc["frameworks"]:
            lines.append(f"  {fw['framework_id']:<24} {fw['variant']:<18} {fw['description'][:60]}")
        lines.append("=" * WIDTH)
        return "\n".join(lines)
    if doc.get("command") == "certify":
        effective = doc["effective_privacy"]
        source = "estimated" if doc["estimated"] else "supplied"
        lines = _header("APPROXIMATION CERTIFICATE")
        lines.append(f"  λ_η = {_fmt(doc['lambda_eta'])} ({source}), η = {_fmt(doc['eta'])}")
        lines.append(f"  Effective privacy: ε = {_fmt(effective['epsilon'])}, δ = {_fmt(effective['delta'])}"
                     f"{'  (vacuous)' if effective['vacuous'] else ''}")
        lines.append("=" * WIDTH)
        return "\n".join(lines)
    mechanism = doc.get("mechanism", "")
    lines = _header(f"{mechanism.upper()} on {doc.get('framework_id') or '<inline>'}")
    lines.append(f"  Query: {doc.get('query', '')}   ε = {_fmt(doc.get('epsilon'))}")
    lines.append("")
    section = _SECTIONS.get(mechanism)
    if section is not None:
        lines.extend(section(doc))
    if "accuracy" in doc:
        acc = doc["accuracy"]
        lines.append(f"  Accuracy: P(|error| > {_fmt(acc['alpha'])}) <= {_fmt(acc['beta'])}")
    if "output" in doc:
        lines.append("")
        exact = "  (exact)" if doc.get("exact") else ""
        lines.append(f"  Output: {_fmt(doc['output'])}{exact}")
    lines.append("=" * WIDTH)
    return "\n".join(lines)
