"""
Faults Module

Byzantine node wrappers and InjectionPlan application.
"""

from app.modules.faults.module import FaultsModule
from app.modules.faults.strategies import (
    ByzantineStrategy,
    CollusionValueStrategy,
    EquivocateStrategy,
    FakeValidFalseStrategy,
    FakeValidTrueStrategy,
    RandomNoiseStrategy,
    SilentStrategy,
)
from app.modules.faults.byzantine import ByzantineNode, byzantine_react
from app.modules.faults.injection import (
    ChannelMutation,
    FieldMutation,
    InjectionPlan,
    RandomizeMutation,
    apply_injection,
    randomize_node,
)

# Auto-register module when this package is imported
from app.modules import register_module
register_module(FaultsModule)

__all__ = [
    "FaultsModule",
    "ByzantineStrategy",
    "CollusionValueStrategy",
    "EquivocateStrategy",
    "FakeValidFalseStrategy",
    "FakeValidTrueStrategy",
    "RandomNoiseStrategy",
    "SilentStrategy",
    "ByzantineNode",
    "byzantine_react",
    "ChannelMutation",
    "FieldMutation",
    "InjectionPlan",
    "RandomizeMutation",
    "apply_injection",
    "randomize_node",
]
