"""
Compare command - RelationMatch against the pseudo-label and labels-only baselines.
"""

import os

from config import resolve
from experiments import mean_accuracy, variant_sweep, write_comparison
from utils import Option

VARIANTS = (
    ("relationmatch", "default"),
    ("pseudo-label", "pseudo-label"),
    ("supervised", "ce-baseline"),
)


def setup(cli, utils):
    """Setup function to register the command with the runner."""

    @cli.command(name="compare", description="RelationMatch vs pseudo-label vs supervised-only over seeds.")
    def compare(
        config: str = Option("Flat key=value config file laid over every variant", positional=True),
        seeds: int = Option("Number of seeds (0..N-1)", default=5),
        steps: int = Option("Total SGD steps per run"),
        out: str = Option("Output directory (default: <out root>/compare)"),
    ):
        root = out or os.path.join(utils.out_dir, "compare")
        variants = [
            (label, resolve(preset, config, {"total_steps": steps}), preset)
            for label, preset in VARIANTS
        ]
        outcomes = variant_sweep(variants, range(seeds), root, utils.workers)

        os.makedirs(root, exist_ok=True)
        path = os.path.join(root, "comparison.csv")
        write_comparison(path, outcomes, utils)

        means = mean_accuracy(outcomes)
        for label, _ in VARIANTS:
            utils.logger.info("[SWEEP] %s mean final test accuracy %.4f", label, means.get(label, float("nan")))
        if len(means) == len(VARIANTS):
            utils.logger.info(
                "[SWEEP] margins: relationmatch - pseudo-label %+.4f, pseudo-label - supervised %+.4f",
                means["relationmatch"] - means["pseudo-label"],
                means["pseudo-label"] - means["supervised"],
            )
        utils.logger.info("comparison written to %s", path)
