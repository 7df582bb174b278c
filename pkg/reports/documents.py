"""JSON rendering of report, analysis and error documents."""

import json
import logging
import math
from typing import Any

import numpy as np

from core.errors import IO_ERROR_CODE, AttributePrivacyError

logger = logging.getLogger(__name__)


def jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def render(document: dict) -> str:
    """Deterministic text: sorted keys, fixed indentation, full float precision."""
    return json.dumps(jsonable(document), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False)


def error_document(error: Exception) -> dict:
    if isinstance(error, AttributePrivacyError):
        return {"error": error.to_dict()}
    return {"error": {"code": IO_ERROR_CODE, "message": str(error)}}
