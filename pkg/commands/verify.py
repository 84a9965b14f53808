"""
Verify command - Run the property suite and print a pass/fail table.
"""

from properties import CHECKS, FULL, QUICK, run_suite
from utils import EXIT_PROPERTY, Option


def setup(cli, utils):
    """Setup function to register the command with the runner."""

    @cli.command(name="verify", description="Run every numerical property check.")
    def verify(
        quick: bool = Option("Reduced sample counts"),
        seed: int = Option("Seed for the sampled checks", default=0),
        only: str = Option("Comma-separated check names"),
    ):
        names = [name.strip() for name in only.split(",")] if only else None
        unknown = sorted(set(names or ()) - {name for name, _ in CHECKS})
        if unknown:
            utils.logger.warning("unknown checks ignored: %s", ", ".join(unknown))

        results = run_suite(QUICK if quick else FULL, seed, names)
        width = max((len(r.name) for r in results), default=4)
        print(f"{'check':<{width}}  result  seconds  detail")
        for r in results:
            print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:7.2f}  {r.detail}")

        failed = [r.name for r in results if not r.passed]
        if failed:
            utils.logger.error("%d of %d checks failed: %s", len(failed), len(results), ", ".join(failed))
            return EXIT_PROPERTY
        utils.logger.info("all %d checks passed", len(results))
