"""Kernel backend selection.

The compiled extension is preferred when it imports cleanly; otherwise the
pure NumPy/Python fallback is used.  Both expose the same functions with
bit-identical results, so the choice only affects speed.  Set
``POWERGAME_KERNELS=pure`` or ``POWERGAME_KERNELS=fast`` to force a backend
(forcing ``fast`` without the extension built is an import error).
"""

from __future__ import annotations

import os

from . import _pure

_requested = os.environ.get("POWERGAME_KERNELS", "").strip().lower()

if _requested == "pure":
    _impl = _pure
elif _requested == "fast":
    from . import _fast as _impl
elif _requested == "":
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = _pure
else:
    raise ImportError(
        f"POWERGAME_KERNELS={_requested!r} is not a backend (use 'pure' or 'fast')"
    )

BACKEND = _impl.BACKEND_NAME
GOLDEN = _pure.GOLDEN
MASK64 = _pure.MASK64

mix64 = _impl.mix64
splitmix64_sequence = _impl.splitmix64_sequence
u01_sequence = _impl.u01_sequence
csr_matvec = _impl.csr_matvec
picard_solve = _impl.picard_solve
simulate_batch = _impl.simulate_batch


def available_backends() -> list[str]:
    backends = ["pure"]
    try:
        from . import _fast  # noqa: F401
        backends.append("fast")
    except ImportError:
        pass
    return backends


def get_backend(name: str):
    """Fetch a specific backend module (for parity tests and benchmarks)."""
    if name == "pure":
        return _pure
    if name == "fast":
        from . import _fast
        return _fast
    raise ValueError(f"unknown backend {name!r}")
