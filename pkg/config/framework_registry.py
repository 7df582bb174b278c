"""Framework registry - loads the bundled framework documents."""

import logging
from pathlib import Path
from typing import Dict, List

from config.settings import FRAMEWORKS_DIR
from core.errors import ConfigurationError
from core.loader import read_document

logger = logging.getLogger(__name__)

_cache: Dict[str, dict] = {}
_paths: Dict[str, Path] = {}

REQUIRED_FIELDS = ["framework_id", "attributes", "sensitive", "theta"]

PATTERNS = ("*.json", "*.yaml", "*.yml")


def _load_all() -> Dict[str, dict]:
    """Load every framework document under config/frameworks/."""
    if _cache:
        return _cache
    if not FRAMEWORKS_DIR.exists():
        logger.warning("Frameworks directory not found: %s", FRAMEWORKS_DIR)
        return _cache
    paths = sorted(p for pattern in PATTERNS for p in FRAMEWORKS_DIR.glob(pattern))
    for path in paths:
        try:
            doc = read_document(path)
        except Exception as e:
            logger.error("Failed to load framework document %s: %s", path, e)
            continue
        missing = [f for f in REQUIRED_FIELDS if f not in doc]
        if missing:
            logger.warning("Skipping framework document %s, missing fields: %s", path.name, missing)
            continue
        _cache[doc["framework_id"]] = doc
        _paths[doc["framework_id"]] = path
        logger.debug("Loaded framework document: %s (%s)", doc["framework_id"], path.name)
    return _cache


def get_framework_document(framework_id: str) -> dict:
    """Get the raw document of a bundled framework."""
    docs = _load_all()
    if framework_id not in docs:
        raise ConfigurationError(f"Unknown framework: {framework_id}. Available: {list(docs.keys())}")
    return docs[framework_id]


def get_framework_path(framework_id: str) -> Path:
    get_framework_document(framework_id)
    return _paths[framework_id]


def list_frameworks() -> List[dict]:
    """List all bundled frameworks with summary metadata."""
    return [
        {
            "framework_id": doc["framework_id"],
            "description": doc.get("description", ""),
            "variant": doc["theta"].get("variant", ""),
            "dataset": doc.get("dataset", ""),
        }
        for doc in _load_all().values()
    ]


def get_framework_ids() -> List[str]:
    """Get list of all bundled framework IDs."""
    return list(_load_all().keys())


def resolve_framework(ref: str) -> Path:
    """A path to an existing document, or the path of a registered framework id."""
    path = Path(ref)
    if path.exists():
        return path
    if path.suffix in (".json", ".yaml", ".yml") or len(path.parts) > 1:
        raise FileNotFoundError(f"framework document not found: {ref}")
    return get_framework_path(ref)


def reload():
    """Clear cache and reload all documents."""
    _cache.clear()
    _paths.clear()
    _load_all()
