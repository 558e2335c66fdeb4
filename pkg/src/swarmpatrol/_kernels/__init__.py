"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback is
functionally and numerically identical. Set SWARMPATROL_KERNEL=python (or
=native) to force a backend, e.g. for the comparison benchmark.
"""

from __future__ import annotations

import os

from swarmpatrol._kernels import _purepy

_forced = os.environ.get("SWARMPATROL_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _purepy
elif _forced == "native":
    from swarmpatrol._kernels import _native as _impl  # hard failure if forced but absent
else:
    try:
        from swarmpatrol._kernels import _native as _impl
    except ImportError:
        _impl = _purepy

BACKEND: str = _impl.BACKEND
step_field = _impl.step_field
gradient_step = _impl.gradient_step
reachable_mask = _impl.reachable_mask


def get_backend(name: str):
    """Return a specific backend module ("python" or "native") for benchmarks."""
    if name == "python":
        return _purepy
    if name == "native":
        from swarmpatrol._kernels import _native

        return _native
    raise ValueError(f"unknown kernel backend: {name!r}")
