"""
Prometheus metrics for spectrum sweeps

Provides observability for:
- Throughput (tasks processed and failed, levels and resonances found)
- Latency (per-solve duration, whole-sweep duration)
- Resource utilization (workers, queue depth, sweep state)

License: MIT
"""
from prometheus_client import Counter, Gauge, Histogram, Summary, Info
import time
from contextlib import contextmanager
from typing import Dict, Any
import logging

logger = logging.getLogger(__name__)


# =============================================================================
# COUNTERS
# =============================================================================

tasks_processed_total = Counter(
    'andreev_tasks_processed_total',
    'Total number of sweep tasks solved',
    ['command', 'method']
)

tasks_failed_total = Counter(
    'andreev_tasks_failed_total',
    'Total number of sweep tasks that raised',
    ['command', 'method', 'error_type']
)

levels_found_total = Counter(
    'andreev_levels_found_total',
    'Total number of levels returned by the solvers',
    ['method']
)

resonances_found_total = Counter(
    'andreev_resonances_found_total',
    'Total number of converged resonances',
    ['method']
)

sweep_runs_total = Counter(
    'andreev_sweep_runs_total',
    'Total number of sweeps',
    ['command', 'status']
)

diagnostics_requests_total = Counter(
    'andreev_diagnostics_requests_total',
    'Total number of failure diagnoses',
    ['analyzer_type', 'status']
)


# =============================================================================
# GAUGES
# =============================================================================

active_workers = Gauge(
    'andreev_active_workers',
    'Number of currently active worker threads',
    ['sweep_id']
)

queue_depth = Gauge(
    'andreev_queue_depth',
    'Current number of tasks waiting for a worker',
    ['sweep_id']
)

# 0=stopped, 1=running, 2=error
sweep_state = Gauge(
    'andreev_sweep_state',
    'Current sweep state (0=stopped, 1=running, 2=error)',
    ['sweep_id']
)


# =============================================================================
# HISTOGRAMS
# =============================================================================

solve_duration_seconds = Histogram(
    'andreev_solve_duration_seconds',
    'Time spent on a single sweep task',
    ['command', 'method'],
    buckets=(0.01, 0.05, 0.1, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0, 60.0, 300.0)
)

levels_per_task = Histogram(
    'andreev_levels_per_task',
    'Number of levels found by one task',
    ['method'],
    buckets=(0, 1, 2, 5, 10, 20, 50, 100, 250, 1000)
)


# =============================================================================
# SUMMARY
# =============================================================================

sweep_run_duration_seconds = Summary(
    'andreev_sweep_run_duration_seconds',
    'Total duration of a sweep',
    ['command', 'status']
)


# =============================================================================
# INFO
# =============================================================================

build_info = Info(
    'andreev_build',
    'Version and configuration information'
)


# =============================================================================
# HELPER FUNCTIONS
# =============================================================================

@contextmanager
def time_operation(metric: Histogram, **labels):
    """
    Context manager to time an operation and record it in a histogram.

    Usage:
        with time_operation(solve_duration_seconds, command="spectrum", method="direct"):
            # ... solve
            pass
    """
    start_time = time.time()
    try:
        yield
    finally:
        duration = time.time() - start_time
        metric.labels(**labels).observe(duration)


def record_task_success(command: str, method: str, levels: int):
    """Record a solved task and the number of levels it found"""
    tasks_processed_total.labels(command=command, method=method).inc()
    levels_found_total.labels(method=method).inc(levels)
    levels_per_task.labels(method=method).observe(levels)


def record_task_failure(command: str, method: str, error: Exception):
    """Record a failed task"""
    error_type = type(error).__name__
    tasks_failed_total.labels(command=command, method=method, error_type=error_type).inc()


def record_resonances(method: str, count: int):
    resonances_found_total.labels(method=method).inc(count)


def record_diagnostics(analyzer_type: str, success: bool):
    """Record a diagnosis request"""
    status = "success" if success else "failure"
    diagnostics_requests_total.labels(analyzer_type=analyzer_type, status=status).inc()


def set_sweep_info(version: str = "1.0.0", **kwargs):
    """Set build metadata"""
    info = {"version": version}
    info.update({key: str(value) for key, value in kwargs.items()})
    build_info.info(info)


def get_metrics_summary() -> Dict[str, Any]:
    """
    Names of the registered metrics, for logging/debugging.

    Returns:
        Dictionary grouping metric names by kind
    """
    return {
        "metrics_registered": True,
        "counters": [
            "tasks_processed_total",
            "tasks_failed_total",
            "levels_found_total",
            "resonances_found_total",
            "sweep_runs_total",
            "diagnostics_requests_total"
        ],
        "gauges": [
            "active_workers",
            "queue_depth",
            "sweep_state"
        ],
        "histograms": [
            "solve_duration_seconds",
            "levels_per_task"
        ]
    }


set_sweep_info(version="1.0.0", project="andreev-spectra")

logger.debug("Prometheus metrics initialized")
