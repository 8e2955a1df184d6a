"""Constructive procedures with measured norm bounds."""
from __future__ import annotations

from .cuntzify import (
    StrengthenResult,
    align_support,
    cuntz_unitary_for_state,
    pure_to_cuntz_unitary,
    strengthen_report,
    strengthen_unitary,
)
from .kishimoto import KishimotoResult, kishimoto_projection
from .rordam import RordamData, rordam_v, sample_compatible_unitary
from .transport import BlockMatch, intertwiner_pipeline, smooth_swap

__all__ = [
    "BlockMatch",
    "KishimotoResult",
    "RordamData",
    "StrengthenResult",
    "align_support",
    "cuntz_unitary_for_state",
    "intertwiner_pipeline",
    "kishimoto_projection",
    "pure_to_cuntz_unitary",
    "rordam_v",
    "sample_compatible_unitary",
    "smooth_swap",
    "strengthen_report",
    "strengthen_unitary",
]
