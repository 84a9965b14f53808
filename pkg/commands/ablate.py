"""
Ablate command - Compare the taylor3 and elementwise log backends over several seeds.
"""

import os

from config import PRESETS, resolve
from experiments import mean_accuracy, variant_sweep, write_comparison
from utils import Option

BACKENDS = ("taylor3", "elementwise")


def setup(cli, utils):
    """Setup function to register the command with the runner."""

    @cli.command(name="ablate", description="Log-backend ablation on the default dataset.")
    def ablate(
        config: str = Option("Flat key=value config file", positional=True),
        preset: str = Option("Base preset", default="default", choices=tuple(PRESETS)),
        seeds: int = Option("Number of seeds (0..N-1)", default=5),
        steps: int = Option("Total SGD steps per run"),
        out: str = Option("Output directory (default: <out root>/ablate)"),
    ):
        root = out or os.path.join(utils.out_dir, "ablate")
        variants = [
            (backend, resolve(preset, config, {"log_backend": backend, "total_steps": steps}), preset)
            for backend in BACKENDS
        ]
        outcomes = variant_sweep(variants, range(seeds), root, utils.workers)

        os.makedirs(root, exist_ok=True)
        path = os.path.join(root, "ablation.csv")
        write_comparison(path, outcomes, utils)

        means = mean_accuracy(outcomes)
        for backend in BACKENDS:
            utils.logger.info("[SWEEP] %s mean final test accuracy %.4f", backend, means.get(backend, float("nan")))
        if all(backend in means for backend in BACKENDS):
            utils.logger.info("[SWEEP] taylor3 - elementwise = %+.4f", means["taylor3"] - means["elementwise"])
        utils.logger.info("comparison written to %s", path)
