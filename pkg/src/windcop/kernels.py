"""Hot-loop kernels with a compiled backend and a pure-Python fallback.

The compiled extension ``windcop._ckernels`` is preferred when importable;
otherwise the numpy implementations in ``windcop._pykernels`` are used. Both
expose the same functions with identical semantics:

``count_inversions(a)``
    strict inversion count, the core of the O(n log n) Kendall tau.
``lasso_cd(X, y, lam, tol, max_iter, beta)``
    cyclic coordinate descent for the lasso.

:func:`use_backend` switches explicitly (tests and the benchmark compare
both).
"""

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

_active = _BACKENDS.get("cython", _pykernels)


def available_backends():
    return sorted(_BACKENDS)


def backend():
    """Name of the backend currently in use."""
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} unavailable; have {available_backends()}")
    previous = backend()
    _active = _BACKENDS[name]
    return previous


def count_inversions(a):
    return _active.count_inversions(a)


def lasso_cd(X, y, lam, tol, max_iter, beta):
    return _active.lasso_cd(X, y, lam, tol, max_iter, beta)
