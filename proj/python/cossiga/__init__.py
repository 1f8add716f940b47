"""Compressive isogeometric Poisson solver."""

try:
    from ._cossiga import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:  # pragma: no cover - development layout with the module on PYTHONPATH
    from _cossiga import *  # noqa: F401,F403

__version__ = "0.1.0"
