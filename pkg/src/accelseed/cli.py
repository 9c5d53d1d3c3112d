"""Command-line front end.

Exit codes: 0 ok, 2 input parse error, 3 bad configuration,
4 oracle divergence (or a prune-check violation), 5 too few K-means|| candidates.
Seed indices are 0-based row numbers of the input file.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from accelseed import bench
from accelseed.core import InvalidInputError
from accelseed.io import FORMATS, ParseError, load_dataset
from accelseed.race_queue import EmptyQueueError
from accelseed.scalable import InsufficientCandidatesError

log = logging.getLogger("accelseed")

EXIT_OK, EXIT_PARSE, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_CANDIDATES = 0, 2, 3, 4, 5


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    input: str
    format: str
    algo: str
    k: int | None
    rounds: int
    oversample: float | None
    trials: int
    master_seed: int
    weights_column: str | None
    output: str | None
    summary: str | None
    seeds_output: str | None
    oracle_check: bool
    debug_prune: bool
    sweep: list[int] | None

    def validate(self):
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.algo not in bench.ALGOS:
            raise ConfigError(f"unknown algorithm {self.algo!r}")
        ks = self.sweep if self.sweep else [self.k]
        if any(k is None or k < 1 for k in ks):
            raise ConfigError("K must be given and at least 1")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.rounds < 1:
            raise ConfigError("rounds must be at least 1")
        if self.oversample is not None and not self.oversample >= 1:
            raise ConfigError("oversampling factor must be at least 1")
        if self.debug_prune and self.algo != "kpp-fast":
            raise ConfigError("--debug-prune applies to kpp-fast only")


def _k_list(text):
    try:
        ks = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad K list {text!r}") from None
    if not ks:
        raise argparse.ArgumentTypeError("empty K list")
    return ks


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="accelseed", description="Instrumented K-means++ / K-means|| seeding.")
    p.add_argument("--input", required=True, help="dataset file")
    p.add_argument("--format", default="csv", help="csv or svmlight")
    p.add_argument("--algo", default="kpp-fast", help="kpp, kpp-fast, kbb or kbb-fast")
    p.add_argument("--k", type=int, help="number of seeds")
    p.add_argument("--rounds", type=int, default=5, help="K-means|| rounds R")
    p.add_argument("--oversample", type=float, help="K-means|| factor ell (default 2K)")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--weights-column", help="CSV weight column (name or 0-based position)")
    p.add_argument("--output", help="per-run CSV report")
    p.add_argument("--summary", help="per-K aggregate CSV (k,dist_avg,time_avg,...)")
    p.add_argument("--seeds-output", help="JSON lines with 0-based seed indices per run")
    p.add_argument("--oracle-check", action="store_true",
                   help="also run the paired variant and require identical seeds")
    p.add_argument("--debug-prune", action="store_true",
                   help="evaluate every pruned pair and fail on a bound violation")
    p.add_argument("--sweep", type=_k_list, help="comma-separated K values")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def parse_config(argv=None) -> tuple[CliConfig, bool]:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(ns.input, ns.format, ns.algo, ns.k, ns.rounds, ns.oversample,
                    ns.trials, ns.master_seed, ns.weights_column, ns.output,
                    ns.summary, ns.seeds_output, ns.oracle_check, ns.debug_prune,
                    ns.sweep)
    return cfg, ns.verbose


def _partner(algo):
    for fast, base in bench.PAIRS.items():
        if algo == fast:
            return base
        if algo == base:
            return fast


def run(cfg: CliConfig, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        dataset = load_dataset(cfg.input, cfg.format, cfg.weights_column)
    except (ParseError, InvalidInputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    algos = [cfg.algo]
    partner = _partner(cfg.algo)
    if cfg.oracle_check:
        algos.append(partner)
    ks = cfg.sweep or [cfg.k]
    tag = cfg.input.rsplit("/", 1)[-1]
    reports = []
    status = EXIT_OK
    try:
        for k in ks:
            for t in range(cfg.trials):
                seed = cfg.master_seed + t
                runs = {}
                for algo in algos:
                    rep, res = bench.run_seeding(
                        dataset, algo, k, seed, rounds=cfg.rounds, ell=cfg.oversample,
                        dataset_tag=tag, trial=t,
                        debug_prune=cfg.debug_prune and algo == "kpp-fast")
                    reports.append(rep)
                    runs[algo] = rep
                    log.info("%s k=%d trial=%d distances=%d %.1fms", algo, k, t,
                             rep.distance_count, rep.wall_time_ms)
                    if cfg.debug_prune and algo == "kpp-fast":
                        print(f"prune check k={k} trial={t}: {res.pruned} pruned pairs, "
                              f"{res.prune_violations} violations", file=out)
                        if res.prune_violations:
                            status = EXIT_DIVERGENCE
                if cfg.oracle_check and runs[algos[0]].seed_indices != runs[partner].seed_indices:
                    print(f"oracle divergence: k={k} master_seed={seed}", file=out)
                    status = EXIT_DIVERGENCE
    except (InvalidInputError, EmptyQueueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientCandidatesError as exc:
        print(f"insufficient candidates: {exc}", file=sys.stderr)
        return EXIT_CANDIDATES

    if cfg.output:
        bench.write_csv(reports, cfg.output)
    if cfg.seeds_output:
        with open(cfg.seeds_output, "w") as fh:
            for r in reports:
                fh.write(json.dumps({"algo": r.algo, "k": r.k, "trial": r.trial,
                                     "master_seed": r.master_seed,
                                     "seed_indices": r.seed_indices}) + "\n")
    _print_summary(reports, out)
    if cfg.summary:
        rows = [row for fam in bench.summarize(reports).values() for row in fam]
        bench.write_summary(rows, cfg.summary)
    if cfg.oracle_check and status == EXIT_OK:
        print("oracle check: all seed sequences identical", file=out)
    return status


def _print_summary(reports, out):
    by = {}
    for r in reports:
        by.setdefault((r.k, r.algo), []).append(r)
    print(f"{'k':>6} {'algo':>9} {'distances':>14} {'time_ms':>10} {'potential':>12}", file=out)
    for (k, algo), rs in sorted(by.items()):
        print(f"{k:>6} {algo:>9} {np.mean([r.distance_count for r in rs]):>14.1f} "
              f"{np.mean([r.wall_time_ms for r in rs]):>10.2f} "
              f"{np.mean([r.potential for r in rs]):>12.5g}", file=out)
    for (k, algo), rs in sorted(by.items()):
        base = bench.PAIRS.get(algo)
        if base and (k, base) in by:
            d_ratio = (np.mean([r.distance_count for r in by[(k, base)]])
                       / np.mean([r.distance_count for r in rs]))
            t_ratio = (np.mean([r.wall_time_ms for r in by[(k, base)]])
                       / np.mean([r.wall_time_ms for r in rs]))
            print(f"k={k} {base}/{algo}: distance reduction {d_ratio:.2f}x, "
                  f"time ratio {t_ratio:.2f}x", file=out)


def main(argv=None) -> int:
    cfg, verbose = parse_config(argv)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(message)s")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
