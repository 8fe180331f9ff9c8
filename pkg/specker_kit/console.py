import json
import logging
import pprint
import sys
from typing import Any, Optional

_LEVELS = {
    "quiet": logging.ERROR,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

_HANDLER_NAME = "specker_kit-stderr"


def configure_logging(level_name: str) -> None:
    """
    Route the package loggers to standard error; standard output is reserved for reports.
    """
    root = logging.getLogger("specker_kit")
    root.setLevel(_LEVELS.get(level_name, logging.INFO))
    # the previous stream may already be closed, so it is dropped without a flush
    for stale in [h for h in root.handlers if h.get_name() == _HANDLER_NAME]:
        root.removeHandler(stale)
    handler = logging.StreamHandler(sys.stderr)
    handler.set_name(_HANDLER_NAME)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.propagate = False


def log_json(logger: logging.Logger, data: Any, title: Optional[str] = None) -> None:
    """
    Dump formatted JSON data at debug level with a title if provided
    """
    if not logger.isEnabledFor(logging.DEBUG):
        return
    if title:
        logger.debug(f"\n[{title}]")

    if isinstance(data, (dict, list)):
        logger.debug(json.dumps(data, indent=2, sort_keys=False, default=str))
    else:
        # Use pprint for non-JSON objects
        logger.debug(pprint.pformat(data, indent=2, width=100))
