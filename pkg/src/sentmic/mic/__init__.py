"""Maximal information coefficient."""

from ._backend import available_backends, use_backend
from .core import (
    CharacteristicMatrix,
    GridHistogram,
    MicConfig,
    MicResult,
    PointSet,
    characteristic_matrix,
    equipartition_axis,
    grid_limit,
    mic,
    mutual_information,
    optimize_columns,
)
from .oracle import mic_exhaustive_oracle


def active_backend():
    from . import _backend

    return _backend.BACKEND


__all__ = [
    "CharacteristicMatrix",
    "GridHistogram",
    "MicConfig",
    "MicResult",
    "PointSet",
    "active_backend",
    "available_backends",
    "characteristic_matrix",
    "equipartition_axis",
    "grid_limit",
    "mic",
    "mic_exhaustive_oracle",
    "mutual_information",
    "optimize_columns",
    "use_backend",
]
