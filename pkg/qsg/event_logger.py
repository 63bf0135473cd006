# event_logger.py

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

from qsg.config import get_settings

logger = logging.getLogger(__name__)

EVENT_KINDS = {"theorem_interest", "resample"}


def log_event(kind: str, payload: Dict[str, Any], path: Optional[Path] = None) -> Dict[str, Any]:
    """Append a timestamped event to the JSON history and the module logger."""
    if kind not in EVENT_KINDS:
        raise ValueError(f"unknown event kind: {kind}")
    entry = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "kind": kind,
        "payload": payload,
    }
    logger.warning("%s event: %s", kind, json.dumps(payload, sort_keys=True, default=str))

    target = path or get_settings().event_log
    if target is None:
        return entry
    target = Path(target)
    history = load_events(target)
    history.append(entry)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w") as f:
        json.dump(history, f, indent=2, default=str)
    return entry


def load_events(path: Path) -> List[Dict[str, Any]]:
    path = Path(path)
    if not path.exists():
        return []
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            logger.error("event log %s is not valid JSON: %s", path, e)
            return []
    return data if isinstance(data, list) else []


def validate_event_log(log_data: List[Dict[str, Any]]) -> bool:
    required_fields = {"timestamp", "kind", "payload"}
    for entry in log_data:
        if not isinstance(entry, dict) or not required_fields.issubset(entry.keys()):
            logger.warning("event missing fields: %s", entry)
            return False
        if not isinstance(entry["timestamp"], str):
            logger.warning("invalid timestamp type: %s", entry)
            return False
        if entry["kind"] not in EVENT_KINDS:
            logger.warning("invalid event kind: %s", entry)
            return False
        if not isinstance(entry["payload"], dict):
            logger.warning("invalid payload type: %s", entry)
            return False
    return True


def summarize_events(log_data: List[Dict[str, Any]]) -> Dict[str, int]:
    counts = {kind: 0 for kind in sorted(EVENT_KINDS)}
    for entry in log_data:
        counts[entry["kind"]] = counts.get(entry["kind"], 0) + 1
    return counts
