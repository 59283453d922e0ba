"""Run both policy scenarios on the focal task and print the comparison.

Scenario 1 sweeps the platform openness gate, scenario 2 sweeps which
experience belts may register. Both reuse the same replication seeds, so
rows within a table are paired and directly comparable.
"""

from __future__ import annotations

import argparse
import dataclasses
import time

from csdsim import RunConfig
from csdsim.scenarios import run_diversity_scenario, run_openness_scenario


def print_table(report) -> None:
    print(f"scenario: {report.name}")
    print(f"{'policy':<16} {'fail':>6} {'rate':>7} {'mean reg':>9} {'mean sub':>9} {'final fpr':>10} {'final fps':>10}")
    for o in report.outcomes:
        print(
            f"{o.label:<16} {o.fail:>3}/{o.replications:<2} {o.failure_rate:>7.1%}"
            f" {o.mean_registrants:>9.2f} {o.mean_submissions:>9.2f}"
            f" {o.mean_final_fpr:>10.4f} {o.mean_final_fps:>10.4f}"
        )
    print()


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=RunConfig().seed)
    parser.add_argument("--replications", type=int, default=RunConfig().replications)
    args = parser.parse_args()

    cfg = dataclasses.replace(RunConfig(), seed=args.seed, replications=args.replications)

    started = time.monotonic()
    openness, _ = run_openness_scenario(cfg)
    diversity, _ = run_diversity_scenario(cfg)
    elapsed = time.monotonic() - started

    print(f"{cfg.replications} paired replications per policy, seed {cfg.seed}\n")
    print_table(openness)
    print_table(diversity)
    print(f"total {elapsed:.1f}s")


if __name__ == "__main__":
    main()
