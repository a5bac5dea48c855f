"""
Task sources and result sinks for sweeps: in-memory collection, CSV files
and gnuplot scripts that plot them

License: MIT
"""
import csv
import logging
import math
import os
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

import numpy as np

from sweep_interfaces import ResultSink, Row, SweepSource, SweepTask

logger = logging.getLogger(__name__)


class TaskListSource(SweepSource):
    """Source that yields a fixed list of tasks"""

    def __init__(self, tasks: Iterable[SweepTask]):
        self.tasks = list(tasks)
        self.total_read = 0

    def fetch_tasks(self) -> Iterator[SweepTask]:
        for task in self.tasks:
            self.total_read += 1
            yield task
        logger.debug(f"Task source exhausted after {self.total_read} tasks")

    def close(self):
        logger.debug(f"TaskListSource closed. Total tasks read: {self.total_read}")


def grid_tasks(command: str, methods: Sequence[str], h_list: Sequence[float],
               phi_list: Sequence[float]) -> TaskListSource:
    """One task per (method, h, phi)"""
    tasks = [
        SweepTask(command=command, method=method, h=h, phi=phi)
        for method in methods for h in h_list for phi in phi_list
    ]
    return TaskListSource(tasks)


class MemoryResultSink(ResultSink):
    """Sink that keeps rows in memory, grouped by task"""

    def __init__(self):
        self.results: Dict[SweepTask, List[Row]] = {}
        self.stats = {"tasks": 0, "rows": 0, "skipped": 0}

    def write_rows(self, task: SweepTask, rows: List[Row]) -> bool:
        if task in self.results:
            self.stats["skipped"] += 1
            logger.debug(f"Skipping duplicate task: {task}")
            return False
        self.results[task] = list(rows)
        self.stats["tasks"] += 1
        self.stats["rows"] += len(rows)
        return True

    def rows(self, table: Optional[str] = None) -> List[Row]:
        """All rows in task order, optionally only those tagged with `table`"""
        ordered = []
        for task in sorted(self.results, key=lambda t: t.sort_key):
            ordered.extend(
                row for row in self.results[task]
                if table is None or row.get("table", "main") == table
            )
        return ordered

    def commit(self):
        pass

    def close(self):
        logger.debug(f"MemoryResultSink closed. Final stats: {self.stats}")

    def get_stats(self) -> Dict[str, int]:
        return self.stats.copy()


def format_value(value) -> str:
    """CSV cell text: empty for missing values, repr for floats"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if math.isnan(value) else repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


class CSVResultSink(ResultSink):
    """Sink that writes rows to a CSV file with a fixed column order"""

    def __init__(self, filepath: str, columns: Sequence[str]):
        """
        Args:
            filepath: Output CSV path
            columns: Column order; the header is written immediately
        """
        self.filepath = filepath
        self.columns = list(columns)
        self.file = open(filepath, "w", newline="", encoding="utf-8")
        self.writer = csv.DictWriter(self.file, fieldnames=self.columns, extrasaction="ignore",
                                     lineterminator="\n")
        self.writer.writeheader()
        self.stats = {"tasks": 0, "rows": 0, "skipped": 0}
        self.seen_tasks = set()
        logger.debug(f"CSVResultSink initialized: {filepath}")

    def write_rows(self, task: Optional[SweepTask], rows: List[Row]) -> bool:
        if task is not None:
            if task in self.seen_tasks:
                self.stats["skipped"] += 1
                return False
            self.seen_tasks.add(task)
        for row in rows:
            self.writer.writerow({name: format_value(row.get(name)) for name in self.columns})
        self.stats["tasks"] += 1
        self.stats["rows"] += len(rows)
        return True

    def commit(self):
        self.file.flush()

    def close(self):
        if not self.file.closed:
            self.commit()
            self.file.close()
            logger.info(f"Wrote {self.stats['rows']} rows to {self.filepath}")

    def get_stats(self) -> Dict[str, int]:
        return self.stats.copy()


def write_csv(filepath: str, columns: Sequence[str], rows: List[Row]) -> str:
    """Write all rows at once; returns the path"""
    sink = CSVResultSink(filepath, columns)
    try:
        sink.write_rows(None, rows)
    finally:
        sink.close()
    return filepath


def write_gnuplot_script(csv_path: str, x_expr: str, y_expr: str,
                         xlabel: str, ylabel: str, title: Optional[str] = None) -> str:
    """
    Write <name>.gp next to a CSV file.

    Expressions use gnuplot syntax with column("name") lookups.

    Returns:
        Path of the script
    """
    base, _ = os.path.splitext(csv_path)
    script_path = base + ".gp"
    csv_name = os.path.basename(csv_path)
    lines = [
        'set datafile separator ","',
        f'set title "{title or csv_name}"',
        f'set xlabel "{xlabel}"',
        f'set ylabel "{ylabel}"',
        f'plot "{csv_name}" using ({x_expr}):({y_expr}) with points pointtype 7 notitle',
    ]
    with open(script_path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")
    logger.info(f"Wrote gnuplot script {script_path}")
    return script_path
