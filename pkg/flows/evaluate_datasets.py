import json
import sys

from prefect import flow

from src.models.config import RunConfig
from tasks.evaluation import evaluate_dataset, load_complete_dataset, write_evaluation


@flow(log_prints=True)
def evaluate_datasets(config: RunConfig):
    datasets = [load_complete_dataset(source) for source in config.datasets]
    print(f"Evaluating {len(datasets)} datasets")
    reports = [evaluate_dataset(dataset, config) for dataset in datasets]
    table = write_evaluation(reports, config)
    return table


if __name__ == "__main__":
    with open(sys.argv[1] if len(sys.argv) > 1 else "config.json") as f:
        evaluate_datasets(RunConfig.model_validate(json.load(f)))
