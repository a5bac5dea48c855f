"""
CLI entry point for Andreev spectrum sweeps

Subcommands: spectrum, widths, compare, hardwall, table-D.
Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
3 acceptance violation (compare only).

License: MIT
"""
import argparse
import logging
import os
import sys
from typing import List, Optional

from diagnostics import NoOpDiagnostics, RuleBasedDiagnostics
from harness import (SweepContext, compare_report, run_hardwall, run_spectrum, run_table_d,
                     run_widths)
from run_config import load_config
from solver_errors import ConfigError

logger = logging.getLogger(__name__)

# Optional metrics support
try:
    import metrics
    from metrics_server import MetricsServer
    METRICS_AVAILABLE = True
except ImportError:
    METRICS_AVAILABLE = False

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_ACCEPTANCE = 3

COMMANDS = {
    "spectrum": run_spectrum,
    "widths": run_widths,
    "compare": compare_report,
    "hardwall": run_hardwall,
    "table-D": run_table_d,
}


def configure_logging(out_dir: str, level: str = "INFO"):
    """Log to <out_dir>/andreev.log and stdout"""
    os.makedirs(out_dir, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=[
            logging.FileHandler(os.path.join(out_dir, "andreev.log")),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )


def create_diagnostics(args):
    """Factory for the failure analyzer"""
    if args.diagnose:
        return RuleBasedDiagnostics()
    return NoOpDiagnostics()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Andreev bound states and resonances of gated SNS junctions"
    )
    parser.add_argument("command", choices=list(COMMANDS), help="Sweep to run")
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default="out", help="Output directory (default: out)")
    parser.add_argument("--jobs", type=int, default=1, help="Worker threads (default: 1)")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level (default: INFO)")
    parser.add_argument("--diagnose", action="store_true",
                        help="Print rule-based hints for failed tasks")
    parser.add_argument("--emit-gnuplot", action="store_true",
                        help="Write a gnuplot script next to each CSV")
    parser.add_argument("--metrics-port", type=int,
                        help="Serve Prometheus metrics on this port (0 picks a free port)")
    parser.add_argument("--metrics-host", default="127.0.0.1",
                        help="Host for the metrics server (default: 127.0.0.1)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.out, args.log_level)

    if args.jobs < 1:
        logger.error("--jobs must be at least 1")
        return EXIT_CONFIG
    if args.metrics_port is not None and not METRICS_AVAILABLE:
        logger.error("Metrics requested but prometheus_client not installed!")
        return EXIT_FAILURE

    try:
        config = load_config(args.config)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG

    ctx = SweepContext(
        config=config, out_dir=args.out, jobs=args.jobs,
        diagnostics=create_diagnostics(args),
        enable_metrics=args.metrics_port is not None,
        emit_gnuplot=args.emit_gnuplot,
    )
    metrics_server = None
    try:
        if args.metrics_port is not None:
            metrics_server = MetricsServer(port=args.metrics_port, host=args.metrics_host,
                                           status_provider=ctx.progress)
            metrics_server.start()
            metrics.set_sweep_info(command=args.command, jobs=args.jobs)
            logger.info(f"Metrics available at: {metrics_server.get_url()}/metrics")
            registered = metrics.get_metrics_summary()
            logger.debug("Registered metrics: " + ", ".join(
                registered["counters"] + registered["gauges"] + registered["histograms"]))

        outcome = COMMANDS[args.command](ctx)

        logger.info("=" * 60)
        logger.info(f"{args.command.upper()} SUMMARY")
        logger.info(f"Config: {args.config}")
        logger.info(f"Rows written: {outcome.rows}")
        logger.info(f"Failed tasks: {outcome.failures}")
        for path in outcome.files:
            logger.info(f"Output: {path}")
        logger.info("=" * 60)

        if args.command == "compare":
            logger.info(f"\n{outcome.report}")
            if not outcome.passed:
                return EXIT_ACCEPTANCE
        return EXIT_OK

    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        if ctx.diagnostics.is_enabled():
            logger.info(ctx.diagnostics.analyze_error(e, {"command": args.command}))
        return EXIT_CONFIG

    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_FAILURE

    except Exception as e:
        logger.error(f"{args.command} failed: {e}", exc_info=True)
        return EXIT_FAILURE

    finally:
        if metrics_server:
            metrics_server.stop()


if __name__ == "__main__":
    sys.exit(main())
