"""
Prefect orchestration of the acceptance suites.
Each suite is a task; the flow merges results in suite-name order.
"""

import sys
from pathlib import Path
from typing import List, Optional

from prefect import flow, task
from prefect.task_runners import ConcurrentTaskRunner

sys.path.append(str(Path(__file__).parent.parent))

from linrel.config import ExperimentConfig  # noqa: E402
from linrel.models import SuiteResult  # noqa: E402
from pipeline.experiment import ordered_suites, run_suite  # noqa: E402


@task(name="run-suite", description="Run one acceptance suite", retries=0)
def suite_task(config: ExperimentConfig, name: str) -> SuiteResult:
    print(f"Starting suite {name}...")
    result = run_suite(config, name)
    print(f"Suite {name} complete: {result.instances} instances, {result.failures} failures")
    return result


@flow(
    name="linrel-acceptance",
    description="Acceptance suites for the linear relation certifiers",
    task_runner=ConcurrentTaskRunner(),
    log_prints=True
)
def acceptance_flow(config: Optional[ExperimentConfig] = None) -> List[SuiteResult]:
    """
    Submit every configured suite concurrently and merge the results.

    Trials are seeded by (seed, suite, index), so the merged output does not
    depend on scheduling.
    """
    config = config or ExperimentConfig()
    print("=" * 60)
    print("STARTING LINREL ACCEPTANCE FLOW")
    print("=" * 60)

    names = ordered_suites(config)
    futures = {name: suite_task.submit(config, name) for name in names}
    results = [futures[name].result() for name in names]

    print("\n" + "=" * 60)
    print("FLOW COMPLETED")
    print("=" * 60)
    for r in results:
        print(f"  {r.suite:<12} instances={r.instances} failures={r.failures} "
              f"rejected={r.precondition_failures}")
    return results


if __name__ == "__main__":
    acceptance_flow()
