"""
BC Module Models
"""

from enum import Enum


class BcKind(str, Enum):
    EST = "EST"
    AUX = "AUX"
    DEC = "DEC"

    def __str__(self):
        return self.value


# DEC announcements are not tied to a round
DEC_ROUND = 0

__all__ = ["BcKind", "DEC_ROUND"]
