"""Select the compiled kernels when available, else the numpy fallback.

Set ``VLASOV_MEMORY_PURE=1`` to force the fallback (used by the benchmark and
the backend-equivalence tests).
"""

import os

if os.environ.get("VLASOV_MEMORY_PURE"):
    from . import _fallback as kernels

    BACKEND = "python"
else:
    try:
        from . import _core as kernels

        BACKEND = "compiled"
    except ImportError:
        from . import _fallback as kernels

        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
