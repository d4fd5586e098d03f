"""Kernel backend selection.

The compiled ``_core`` extension is preferred. Set ``QFI_LAB_BACKEND=python``
to force the interpreter fallback (useful for benchmarking and for checking
that both paths agree).
"""

import importlib
import logging
import os

logger = logging.getLogger(__name__)

_CHOICES = ("auto", "compiled", "python")


def load(name=None):
    """Return ``(module, label)`` for the requested backend."""
    name = (name or os.environ.get("QFI_LAB_BACKEND", "auto")).lower()
    if name not in _CHOICES:
        raise ValueError(f"QFI_LAB_BACKEND must be one of {_CHOICES}, got {name!r}")
    if name in ("auto", "compiled"):
        try:
            return importlib.import_module("qfi_lab._core"), "compiled"
        except ImportError:
            if name == "compiled":
                raise
            logger.debug("compiled kernels unavailable, using python fallback")
    return importlib.import_module("qfi_lab._pycore"), "python"


def available():
    """Labels of the backends importable in this environment."""
    out = ["python"]
    try:
        importlib.import_module("qfi_lab._core")
    except ImportError:
        return out
    return ["compiled"] + out


kernels, BACKEND = load()
