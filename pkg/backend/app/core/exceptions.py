"""
Error hierarchy shared by every layer.

Protocol queries never raise; these exceptions cover API misuse, malformed
inputs and harness-level failures.
"""


class SsbftError(Exception):
    """Base class for all harness errors"""


class ParameterError(SsbftError, ValueError):
    """Illegal system parameters (n < 3t + 1, negative t, ...)"""


class ProtocolError(SsbftError):
    """Misuse of a protocol operation at its API boundary"""


class MalformedFrameError(SsbftError, ValueError):
    """A wire frame that the layer codec cannot decode"""


class ScenarioError(SsbftError, ValueError):
    """Malformed or unsupported scenario"""


class InjectionError(SsbftError, ValueError):
    """Injection path or value that does not fit the state container"""


class RecycleError(SsbftError):
    """Recycling requested before every correct node completed"""


__all__ = [
    "SsbftError",
    "ParameterError",
    "ProtocolError",
    "MalformedFrameError",
    "ScenarioError",
    "InjectionError",
    "RecycleError",
]
