"""Numerical kernel with backend selection.

Tries the compiled extension first and falls back to the numpy
implementation.  Both expose the same routines with the same
algorithms; ``BACKEND`` names the one in use.
"""

try:
    from . import _core as _active
except ImportError:
    from . import _pure as _active

BACKEND = _active.BACKEND_NAME

erf = _active.erf
erfc = _active.erfc
norm_cdf = _active.norm_cdf
norm_quantile = _active.norm_quantile
gammainc_p = _active.gammainc_p
gammainc_q = _active.gammainc_q
betainc = _active.betainc


def available_backends():
    """Importable backend modules keyed by name, compiled first if built."""
    found = {}
    try:
        from . import _core
        found[_core.BACKEND_NAME] = _core
    except ImportError:
        pass
    from . import _pure
    found[_pure.BACKEND_NAME] = _pure
    return found
