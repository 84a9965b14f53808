"""
Train command - Run one training job and write its artefacts.
"""

import os

from config import PRESETS, resolve
from experiments import run_single
from utils import Option


def setup(cli, utils):
    """Setup function to register the command with the runner."""

    @cli.command(name="train", description="Train one RelationMatch or supervised run.")
    def train(
        config: str = Option("Flat key=value config file", positional=True),
        preset: str = Option("Preset the config file and flags are laid over", default="default",
                             choices=tuple(PRESETS)),
        seed: int = Option("Seed for the dataset draw and every training stream"),
        out: str = Option("Output directory (default: <out root>/<preset>/seed-<seed>)"),
        steps: int = Option("Total SGD steps"),
        log_backend: str = Option("principal, taylor3, taylorK or elementwise"),
    ):
        run = resolve(preset, config, {"total_steps": steps, "log_backend": log_backend})
        if seed is not None:
            run = run.with_seed(seed)

        out_dir = out or os.path.join(utils.out_dir, preset, f"seed-{run.seed}")
        utils.logger.info("training %s (%s) into %s", preset, run.train.mce.spelling, out_dir)
        result = run_single(run, out_dir, utils, preset, config)
        utils.logger.info(
            "done: %d steps, final test accuracy %.4f, best %.4f",
            result.steps, result.final_test_acc, result.best_test_acc,
        )
