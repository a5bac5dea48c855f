"""
Sweep pipeline with dependency injection and Prometheus metrics

Runs independent solver tasks from a source through a worker pool and hands
their rows to a sink in a deterministic order.

License: MIT
"""
import logging
import threading
import time
from queue import Queue
from typing import Any, Callable, Dict, List, Optional, Tuple

from diagnostics import NoOpDiagnostics, SolverDiagnostics
from sweep_interfaces import ResultSink, Row, SweepSource, SweepTask

logger = logging.getLogger(__name__)

# Optional Prometheus metrics support
try:
    import metrics
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False
    logger.debug("Prometheus metrics not available (prometheus_client not installed)")

Solver = Callable[[SweepTask], List[Row]]


def level_count(rows: List[Row]) -> int:
    """Main-table rows that carry a level energy"""
    return sum(1 for row in rows if row.get("table", "main") == "main" and row.get("E_k") is not None)


class SweepPipeline:
    """
    Orchestrates a sweep from task source to result sink.

    Task failures are logged, counted and diagnosed; the sweep continues.
    Source failures are fatal.
    """

    def __init__(self, source: SweepSource, sink: ResultSink, solver: Solver, jobs: int = 1,
                 diagnostics: Optional[SolverDiagnostics] = None,
                 enable_metrics: bool = True,
                 sweep_id: str = "default"):
        """
        Args:
            source: SweepSource implementation
            sink: ResultSink implementation
            solver: Callable mapping a task to its result rows
            jobs: Number of worker threads (1 runs inline)
            diagnostics: Optional analyzer for failed tasks
            enable_metrics: Enable Prometheus metrics collection
            sweep_id: Identifier of this sweep (metrics label)
        """
        if jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {jobs}")
        self.source = source
        self.sink = sink
        self.solver = solver
        self.jobs = jobs
        self.diagnostics = diagnostics or NoOpDiagnostics()
        self.enable_metrics = enable_metrics and METRICS_AVAILABLE
        self.sweep_id = sweep_id
        self.total_queued = 0
        self.failures: List[Tuple[SweepTask, Exception]] = []
        self._results: Dict[SweepTask, List[Row]] = {}
        self._lock = threading.Lock()

        if self.enable_metrics:
            metrics.sweep_state.labels(sweep_id=self.sweep_id).set(0)

    def progress(self) -> Dict[str, Any]:
        """Snapshot for health endpoints"""
        with self._lock:
            return {
                "sweep_id": self.sweep_id,
                "queued": self.total_queued,
                "completed": len(self._results),
                "failed": len(self.failures),
            }

    def run(self) -> Dict[str, int]:
        """
        Execute the sweep.

        Returns:
            Statistics dictionary with task and row counts
        """
        logger.info(f"Starting sweep '{self.sweep_id}' with {self.jobs} worker(s)")
        start_time = time.time()
        status = "success"
        command = "unknown"

        try:
            if self.enable_metrics:
                metrics.sweep_state.labels(sweep_id=self.sweep_id).set(1)

            if self.jobs == 1:
                self._run_single_threaded()
            else:
                self._run_multi_threaded()

            for task in sorted(self._results, key=lambda t: t.sort_key):
                command = task.command
                self.sink.write_rows(task, self._results[task])
            self.sink.commit()

            stats = self.sink.get_stats()
            stats["failed"] = len(self.failures)
            logger.info(f"Sweep completed. Tasks: {self.total_queued}, failed: {len(self.failures)}")
            return stats

        except Exception as e:
            status = "failure"
            logger.error(f"Sweep failed: {e}")
            raise

        finally:
            duration = time.time() - start_time
            if self.enable_metrics:
                metrics.sweep_run_duration_seconds.labels(command=command, status=status).observe(duration)
                metrics.sweep_runs_total.labels(command=command, status=status).inc()
                state_value = 0 if status == "success" else 2
                metrics.sweep_state.labels(sweep_id=self.sweep_id).set(state_value)

    def _execute(self, task: SweepTask):
        try:
            if self.enable_metrics:
                with metrics.time_operation(metrics.solve_duration_seconds,
                                            command=task.command, method=task.method):
                    rows = self.solver(task)
            else:
                rows = self.solver(task)
        except Exception as e:
            self._handle_error(e, task)
            return

        with self._lock:
            self._results[task] = rows
        if self.enable_metrics:
            metrics.record_task_success(task.command, task.method, level_count(rows))
        logger.debug(f"Task {task} produced {len(rows)} rows")

    def _run_single_threaded(self):
        try:
            for task in self.source.fetch_tasks():
                self.total_queued += 1
                self._execute(task)
        except Exception as e:
            logger.error(f"Task source failed after {self.total_queued} tasks: {e}")
            raise

    def _run_multi_threaded(self):
        queue = Queue()
        threads = []

        if self.enable_metrics:
            metrics.active_workers.labels(sweep_id=self.sweep_id).set(self.jobs)

        for i in range(self.jobs):
            t = threading.Thread(target=self._solve_worker, args=(queue,), name=f"Worker-{i+1}")
            t.start()
            threads.append(t)

        try:
            for task in self.source.fetch_tasks():
                queue.put(task)
                self.total_queued += 1
                if self.enable_metrics:
                    metrics.queue_depth.labels(sweep_id=self.sweep_id).set(queue.qsize())
        finally:
            queue.join()
            for _ in threads:
                queue.put(None)  # Poison pill
            for t in threads:
                t.join()

            if self.enable_metrics:
                metrics.active_workers.labels(sweep_id=self.sweep_id).set(0)
                metrics.queue_depth.labels(sweep_id=self.sweep_id).set(0)

    def _solve_worker(self, queue: Queue):
        solved = 0
        while True:
            task = queue.get()
            if task is None:  # Poison pill
                queue.task_done()
                break
            self._execute(task)
            solved += 1
            queue.task_done()
        logger.debug(f"{threading.current_thread().name} finished after {solved} tasks")

    def cleanup(self):
        """Clean up resources"""
        self.source.close()
        self.sink.close()

    def _handle_error(self, error: Exception, task: SweepTask):
        logger.error(f"Task {task.command}/{task.method} h={task.h} phi={task.phi} failed: {error}")
        with self._lock:
            self.failures.append((task, error))

        if self.enable_metrics:
            metrics.record_task_failure(task.command, task.method, error)

        if self.diagnostics.is_enabled():
            context = {"command": task.command, "method": task.method, "h": task.h, "phi": task.phi}
            try:
                suggestions = self.diagnostics.analyze_error(error, context)
                if self.enable_metrics:
                    metrics.record_diagnostics(type(self.diagnostics).__name__, suggestions is not None)
                if suggestions:
                    logger.info(f"\n{suggestions}\n")
            except Exception as analysis_error:
                logger.debug(f"Diagnosis failed (non-critical): {analysis_error}")
                if self.enable_metrics:
                    metrics.record_diagnostics(type(self.diagnostics).__name__, False)
