"""
Single-run and multi-seed drivers shared by the train, ablate and compare commands.
"""

import logging
import math
import os
from dataclasses import asdict, dataclass, replace
from multiprocessing import Pool
from typing import Dict, List, Optional, Sequence, Tuple

from config import SNAPSHOT_NAME, RunConfig, to_flat, write_snapshot
from datagen import export_csv, generate
from errors import NumericalError
from model import save_checkpoint
from trainer import init_state, train
from utils import RunUtils

logger = logging.getLogger("relmatch.experiments")

MANIFEST_NAME = "manifest.json"
METRICS_NAME = "metrics.csv"
SUMMARY_NAME = "summary.json"
DATASET_NAME = "dataset.csv"
CHECKPOINT_NAME = "model.ckpt"
COMPARISON_COLUMNS = ("label", "seed", "status", "final_test_acc", "best_test_acc", "out_dir")


@dataclass(frozen=True)
class RunManifest:
    config_path: Optional[str]
    preset: str
    snapshot: Dict[str, str]
    out_dir: str
    git_describe: str
    started: str
    finished: Optional[str] = None


@dataclass(frozen=True)
class RunResult:
    out_dir: str
    final_test_acc: float
    best_test_acc: float
    steps: int


def run_single(run: RunConfig, out_dir: str, utils: RunUtils, preset: str = "default",
               config_path: Optional[str] = None) -> RunResult:
    """Snapshot, manifest and dataset first, then train, then metrics, summary and checkpoint."""
    os.makedirs(out_dir, exist_ok=True)
    write_snapshot(run, os.path.join(out_dir, SNAPSHOT_NAME), preset)
    manifest = RunManifest(
        config_path=config_path,
        preset=preset,
        snapshot=to_flat(run),
        out_dir=out_dir,
        git_describe=utils.git_describe(),
        started=utils.timestamp(),
    )
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    utils.save_json(manifest_path, asdict(manifest))

    dataset = generate(run.data)
    export_csv(dataset, os.path.join(out_dir, DATASET_NAME))
    state = init_state(run.train, run.data.d, dataset.k, len(dataset.unlabeled))
    log = train(run.train, dataset, state)

    log.write_csv(os.path.join(out_dir, METRICS_NAME))
    log.write_summary(os.path.join(out_dir, SUMMARY_NAME), run.seed, to_flat(run))
    save_checkpoint(os.path.join(out_dir, CHECKPOINT_NAME), state.model, run.seed, state.step)
    utils.save_json(manifest_path, asdict(replace(manifest, finished=utils.timestamp())))

    best = log.best
    return RunResult(out_dir, log.final_test_acc, best.test_acc if best else math.nan, state.step)


@dataclass(frozen=True)
class SweepJob:
    label: str
    run: RunConfig
    out_dir: str
    preset: str = "default"


@dataclass(frozen=True)
class SweepOutcome:
    label: str
    seed: int
    status: str
    final_test_acc: float
    best_test_acc: float
    out_dir: str


def _run_job(job: SweepJob) -> SweepOutcome:
    utils = RunUtils(os.path.dirname(job.out_dir))
    try:
        result = run_single(job.run, job.out_dir, utils, job.preset)
    except NumericalError as e:
        logger.error("%s seed %d: %s", job.label, job.run.seed, e)
        return SweepOutcome(job.label, job.run.seed, "diverged", math.nan, math.nan, job.out_dir)
    return SweepOutcome(job.label, job.run.seed, "ok", result.final_test_acc, result.best_test_acc, job.out_dir)


def seed_jobs(label: str, run: RunConfig, seeds: Sequence[int], root: str, preset: str = "default") -> List[SweepJob]:
    """One job per seed, each writing to root/label/seed-N."""
    return [
        SweepJob(label, run.with_seed(seed), os.path.join(root, label, f"seed-{seed}"), preset)
        for seed in seeds
    ]


def sweep(jobs: Sequence[SweepJob], workers: int = 1) -> List[SweepOutcome]:
    """Run jobs, in worker processes when workers > 1; outcomes keep the job order."""
    outcomes: List[SweepOutcome] = []
    if workers <= 1 or len(jobs) <= 1:
        results = map(_run_job, jobs)
        for outcome in results:
            _log_outcome(outcome, len(outcomes) + 1, len(jobs))
            outcomes.append(outcome)
        return outcomes

    with Pool(processes=min(workers, len(jobs))) as pool:
        for outcome in pool.imap(_run_job, jobs):
            _log_outcome(outcome, len(outcomes) + 1, len(jobs))
            outcomes.append(outcome)
    return outcomes


def _log_outcome(outcome: SweepOutcome, done: int, total: int) -> None:
    logger.info(
        "[SWEEP] %d/%d %s seed=%d status=%s final_test_acc=%.4f",
        done, total, outcome.label, outcome.seed, outcome.status, outcome.final_test_acc,
    )


def mean_accuracy(outcomes: Sequence[SweepOutcome]) -> Dict[str, float]:
    """Mean final test accuracy per label over the runs that finished."""
    grouped: Dict[str, List[float]] = {}
    for outcome in outcomes:
        if outcome.status == "ok":
            grouped.setdefault(outcome.label, []).append(outcome.final_test_acc)
    return {label: sum(values) / len(values) for label, values in grouped.items()}


def write_comparison(path: str, outcomes: Sequence[SweepOutcome], utils: RunUtils) -> None:
    rows = [
        [o.label, o.seed, o.status, repr(o.final_test_acc), repr(o.best_test_acc), o.out_dir]
        for o in outcomes
    ]
    utils.write_rows(path, COMPARISON_COLUMNS, rows)


def variant_sweep(variants: Sequence[Tuple[str, RunConfig, str]], seeds: Sequence[int], root: str,
                  workers: int = 1) -> List[SweepOutcome]:
    """Every (label, run, preset) variant on every seed."""
    jobs = [job for label, run, preset in variants for job in seed_jobs(label, run, seeds, root, preset)]
    return sweep(jobs, workers)
