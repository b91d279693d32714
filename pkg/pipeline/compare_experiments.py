"""
Compare tracked acceptance runs across MLflow

Usage:
    python pipeline/compare_experiments.py
"""

import json
import sys
from pathlib import Path

import mlflow
import pandas as pd

sys.path.append(str(Path(__file__).parent.parent))

from linrel.config import EXPERIMENT_NAME, MLFLOW_TRACKING_URI  # noqa: E402

METRICS = ("instances", "certified", "failures", "precondition_failures", "max_defect", "seconds")


def get_suite_runs(tracking_uri: str = MLFLOW_TRACKING_URI, experiment_name: str = EXPERIMENT_NAME):
    """Runs of the acceptance experiment that carry a suite parameter"""
    mlflow.set_tracking_uri(tracking_uri)
    client = mlflow.tracking.MlflowClient()
    experiment = client.get_experiment_by_name(experiment_name)
    if experiment is None:
        print(f"No experiment named {experiment_name}!")
        return []
    runs = client.search_runs(
        experiment_ids=[experiment.experiment_id],
        order_by=["attributes.start_time DESC"]
    )
    return [run for run in runs if "suite" in run.data.params]


def runs_to_frame(runs) -> pd.DataFrame:
    rows = []
    for run in runs:
        row = {
            'run_id': run.info.run_id[:8],
            'run_name': run.data.tags.get('mlflow.runName', 'N/A'),
            'suite': run.data.params.get('suite'),
            'trials': run.data.params.get('trials', 'N/A'),
            'seed': run.data.params.get('seed', 'N/A'),
        }
        for metric in METRICS:
            row[metric] = run.data.metrics.get(metric, 0.0)
        rows.append(row)
    return pd.DataFrame(rows, columns=['run_id', 'run_name', 'suite', 'trials', 'seed', *METRICS])


def summarize(df: pd.DataFrame) -> dict:
    """Per-suite totals: the latest run and the worst defect seen across runs"""
    summary = {}
    for suite, group in df.groupby('suite', sort=True):
        latest = group.iloc[0]
        summary[suite] = {
            "runs": int(len(group)),
            "latest_run_id": latest['run_id'],
            "latest_failures": int(latest['failures']),
            "total_failures": int(group['failures'].sum()),
            "worst_defect": float(group['max_defect'].max()),
        }
    return summary


def compare_experiments(output_dir: Path = Path(".")):
    print("\n" + "=" * 60)
    print("MLFLOW ACCEPTANCE RUN COMPARISON")
    print("=" * 60)

    runs = get_suite_runs()
    if not runs:
        print("No runs found!")
        return None, None

    df = runs_to_frame(runs)
    print("\nRun Comparison Table:")
    print("-" * 60)
    print(df.to_string(index=False))
    print("-" * 60)

    summary = summarize(df)
    csv_path = output_dir / "experiment_comparison.csv"
    df.to_csv(csv_path, index=False)
    json_path = output_dir / "experiment_summary.json"
    json_path.write_text(json.dumps(summary, indent=2))
    print(f"\nComparison saved to: {csv_path}")
    print(f"Summary saved to: {json_path}")
    return df, summary


if __name__ == "__main__":
    compare_experiments()
