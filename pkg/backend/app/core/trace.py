"""
Simulator trace.

One record per atomic step plus drop / inject / recycle records, emitted as
line-delimited JSON. Records are kept in memory only when the world was asked
to record them; the trace logger receives them at DEBUG level either way.
"""

from enum import Enum
from typing import Iterator, List, Optional
import logging

from pydantic import BaseModel

from app.core.logging_config import TRACE_LOGGER_NAME

trace_logger = logging.getLogger(TRACE_LOGGER_NAME)


class TraceKind(str, Enum):
    DELIVER = "deliver"
    LOOP = "loop"
    DROP = "drop"
    INJECT = "inject"
    RECYCLE = "recycle"
    QUIESCENT = "quiescent"

    def __str__(self):
        return self.value


class TraceRecord(BaseModel):
    step: int
    kind: TraceKind
    src: Optional[int] = None
    dst: Optional[int] = None
    protocol: Optional[str] = None
    summary: str = ""


class TraceLog:
    """Append-only step log"""

    def __init__(self, enabled: bool = False):
        self.enabled = enabled
        self._records: List[tuple] = []

    def append(
        self,
        step: int,
        kind: TraceKind,
        src: Optional[int] = None,
        dst: Optional[int] = None,
        protocol: Optional[str] = None,
        summary: str = "",
    ) -> None:
        if self.enabled:
            self._records.append((step, kind, src, dst, protocol, summary))
        if trace_logger.isEnabledFor(logging.DEBUG):
            trace_logger.debug(f"{step} {kind} {src}->{dst} {protocol or '-'} {summary}")

    def __len__(self) -> int:
        return len(self._records)

    def records(self) -> Iterator[TraceRecord]:
        for step, kind, src, dst, protocol, summary in self._records:
            yield TraceRecord(step=step, kind=kind, src=src, dst=dst, protocol=protocol, summary=summary)

    def to_lines(self) -> Iterator[str]:
        for record in self.records():
            yield record.model_dump_json() + "\n"
