"""mwkit: RF/microwave circuit and antenna analysis workbench."""

__version__ = "0.1.0"

from .numerics import C0, EPS0, ETA0, KB, MU0  # noqa: F401
