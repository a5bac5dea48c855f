"""
Abstract interfaces for sweep task sources and result sinks

License: MIT
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Tuple
import logging

logger = logging.getLogger(__name__)

Row = Dict[str, Any]


@dataclass(frozen=True)
class SweepTask:
    """One independent solve of a sweep"""
    command: str
    method: str
    h: float = 0.0
    phi: float = 0.0
    index: int = 0

    @property
    def sort_key(self) -> Tuple[str, str, float, float, int]:
        return (self.command, self.method, self.h, self.phi, self.index)


class SweepSource(ABC):
    """Abstract base class for task sources"""

    @abstractmethod
    def fetch_tasks(self) -> Iterator[SweepTask]:
        """
        Yield the tasks of a sweep.

        Yields:
            SweepTask
        """
        pass  # pragma: no cover

    @abstractmethod
    def close(self):
        """Clean up any resources"""
        pass  # pragma: no cover


class ResultSink(ABC):
    """Abstract base class for result sinks"""

    @abstractmethod
    def write_rows(self, task: SweepTask, rows: List[Row]) -> bool:
        """
        Store the rows produced by one task.

        Args:
            task: The task that produced the rows
            rows: Result rows, column name to value

        Returns:
            bool: True if stored, False if skipped (duplicate task)
        """
        pass  # pragma: no cover

    @abstractmethod
    def commit(self):
        """Flush pending rows"""
        pass  # pragma: no cover

    @abstractmethod
    def close(self):
        """Clean up any resources"""
        pass  # pragma: no cover

    @abstractmethod
    def get_stats(self) -> Dict[str, int]:
        """
        Get statistics about the operations.

        Returns:
            Dict with keys 'tasks', 'rows', 'skipped'
        """
        pass  # pragma: no cover
