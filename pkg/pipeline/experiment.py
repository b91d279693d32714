"""
Experiment runner for the acceptance suites

Usage:
    python pipeline/experiment.py --config experiment.cfg
"""

import argparse
import json
import logging
import sys
import tempfile
from datetime import datetime
from pathlib import Path
from typing import List

import mlflow

sys.path.append(str(Path(__file__).parent.parent))

from linrel.config import LOG_FORMAT, SUITE_NAMES, ExperimentConfig  # noqa: E402
from linrel.models import SuiteResult  # noqa: E402
from linrel.textio import parse_config  # noqa: E402
from pipeline.suites import SUITES  # noqa: E402

logger = logging.getLogger(__name__)

RUN_PARAMS = ("trials", "seed", "max_dim", "form_delta", "relation_delta", "steps", "samples", "tol")


def ordered_suites(config: ExperimentConfig) -> List[str]:
    """Requested suites in canonical order, duplicates dropped"""
    return [name for name in SUITE_NAMES if name in config.suites]


def log_suite(config: ExperimentConfig, result: SuiteResult):
    """One MLflow run per suite"""
    run_name = f"{result.suite}_{datetime.now().strftime('%Y%m%d_%H%M%S')}"
    with mlflow.start_run(run_name=run_name):
        mlflow.log_params({key: getattr(config, key) for key in RUN_PARAMS})
        mlflow.log_param("suite", result.suite)
        for key, value in result.report_items():
            if key != "suite":
                mlflow.log_metric(key, float(value))
        run_id = mlflow.active_run().info.run_id
    logger.info(f"logged suite {result.suite} as run {run_id}")


def log_summary(results: List[SuiteResult]):
    summary = {result.suite: result.model_dump() for result in results}
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "experiment_summary.json"
        path.write_text(json.dumps(summary, indent=2))
        with mlflow.start_run(run_name=f"summary_{datetime.now().strftime('%Y%m%d_%H%M%S')}"):
            mlflow.log_metric("failures", sum(r.failures for r in results))
            mlflow.log_artifact(str(path))


def run_suite(config: ExperimentConfig, name: str) -> SuiteResult:
    result = SUITES[name](config)
    logger.info(f"suite {name}: {result.instances} instances, {result.failures} failures "
                f"in {result.seconds:.1f}s")
    return result


def run_experiment(config: ExperimentConfig) -> List[SuiteResult]:
    """Run the configured suites; results come back in canonical suite order"""
    names = ordered_suites(config)
    if config.track:
        mlflow.set_tracking_uri(config.tracking_uri)
        mlflow.set_experiment(config.experiment_name)
    results = []
    for name in names:
        result = run_suite(config, name)
        if config.track:
            log_suite(config, result)
        results.append(result)
    if config.track:
        log_summary(results)
    return results


def main():
    parser = argparse.ArgumentParser(description="Run the acceptance suites")
    parser.add_argument("--config", help="Experiment config file (key = value lines)")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    args = parser.parse_args()
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)

    print("\n" + "=" * 60)
    print("LINREL ACCEPTANCE SUITES")
    print("=" * 60)

    print("[1/3] Loading configuration...")
    config = parse_config(Path(args.config).read_text()) if args.config else ExperimentConfig()
    names = ordered_suites(config)
    print(f"Suites: {', '.join(names)}")
    print(f"Trials: {config.trials}, seed: {config.seed}, tracking: {config.track}")

    print("\n[2/3] Running suites...")
    results = run_experiment(config)

    print("\n[3/3] Summary")
    print("-" * 60)
    print(f"{'Suite':<14} {'Instances':>10} {'Certified':>10} {'Failures':>9} {'Rejected':>9} {'Seconds':>8}")
    print("-" * 60)
    for r in results:
        print(f"{r.suite:<14} {r.instances:>10} {r.certified:>10} {r.failures:>9} "
              f"{r.precondition_failures:>9} {r.seconds:>8.1f}")
    print("=" * 60)

    failures = sum(r.failures for r in results)
    if failures:
        print(f"{failures} conclusion failures")
        return 3
    print("All suites passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
