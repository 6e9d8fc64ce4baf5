"""
Common coins for binary consensus rounds.

The shared coin is an idealised function of (seed, epoch, round), identical at
every node. Tests plug in fixed coins to force outcomes.
"""

import hashlib
from abc import ABC, abstractmethod


class BaseCoin(ABC):
    @abstractmethod
    def flip(self, seed: int, epoch: int, round_no: int) -> bool:
        raise NotImplementedError


class CommonCoin(BaseCoin):
    """Lowest bit of SHA-256("seed:epoch:round")"""

    def flip(self, seed: int, epoch: int, round_no: int) -> bool:
        digest = hashlib.sha256(f"{seed}:{epoch}:{round_no}".encode()).digest()
        return bool(digest[-1] & 1)


class ConstantCoin(BaseCoin):
    """Always lands on the same side"""

    def __init__(self, value: bool):
        self.value = value

    def flip(self, seed: int, epoch: int, round_no: int) -> bool:
        return self.value


__all__ = ["BaseCoin", "CommonCoin", "ConstantCoin"]
