"""Audit logging for expensive or verdict-bearing computations (what ran, on what, with which result)."""

import logging
from datetime import datetime, timezone

_AUDIT_LOGGER_NAME = "oc_witness.audit"


def get_audit_logger() -> logging.Logger:
    """Return the dedicated audit logger. Callers should use this for enumeration, LP and verdict events."""
    return logging.getLogger(_AUDIT_LOGGER_NAME)


def log_run_event(action: str, detail: str = "") -> None:
    """Log one audit event as a single pipe-separated line."""
    logger = get_audit_logger()
    msg = f"RUN | {datetime.now(timezone.utc).isoformat()} | {action}"
    if detail:
        msg += f" | {detail}"
    logger.info(msg)
