"""Stepper backend selection: compiled extension with pure-python fallback.

Set ``ELLFLOW_PURE_PYTHON=1`` to force the fallback even when the extension
built; benchmarks request both explicitly via :func:`get_backend`.
"""

from __future__ import annotations

import os

from . import _stepper_py


def _load_compiled():
    try:
        from . import _stepper_cy
    except ImportError:
        return None
    return _stepper_cy


if os.environ.get("ELLFLOW_PURE_PYTHON"):
    _active = _stepper_py
else:
    _active = _load_compiled() or _stepper_py

BACKEND_NAME = _active.NAME
HAVE_COMPILED = _load_compiled() is not None


def get_backend(name: str | None = None):
    """Return a stepper module: 'cython', 'python' or the active default."""
    if name is None:
        return _active
    if name == "python":
        return _stepper_py
    if name == "cython":
        compiled = _load_compiled()
        if compiled is None:
            raise ImportError("compiled stepper extension is not available")
        return compiled
    raise ValueError(f"unknown backend {name!r}")
