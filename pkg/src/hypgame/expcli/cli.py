"""Command-line entry point: ``hypgame <subcommand> [--config PATH] [--key value ...]``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..asymptotics import (
    balance_point,
    chernoff_exponent,
    check_assumptions,
    stein_exponent,
)
from ..equilibria import SolverError
from ..games import GameSpecError
from ..prob_core import Distribution, DistributionError
from .config import PARSERS, ConfigError, RunConfig, load_config, parse_value
from .output import OutputError, emit_outputs
from .runner import (
    BR_COLUMNS,
    NP_EXTRA_COLUMNS,
    SWEEP_COLUMNS,
    run_best_response_scan,
    run_exponent_sweep,
    run_np_experiment,
)

log = logging.getLogger("hypgame")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

SUBCOMMANDS = {
    "sweep-bayes": "exponent_sweep_bayes",
    "sweep-np": "exponent_sweep_np",
    "best-response": "best_response_scan",
    "np-eq": "np_equilibrium",
    "check": "check",
    "chernoff": "chernoff",
    "stein": "stein",
}
KV_COLUMNS = ("quantity", "value")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value configuration file")
    common.add_argument("-v", "--verbose", action="store_true")
    for key in PARSERS:
        if key == "kind":
            continue
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        common.add_argument(*flags, dest=key, metavar="VALUE", default=None)

    parser = argparse.ArgumentParser(
        prog="hypgame",
        description="Equilibria and error exponents of adversarial hypothesis testing games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep-bayes": "equilibrium error exponent of the Bayesian game over a range of n",
        "sweep-np": "pure equilibrium of the Neyman-Pearson game over a range of n",
        "best-response": "best-response curves of both players at fixed n",
        "np-eq": "pure equilibrium of the Neyman-Pearson game at one n",
        "check": "check the modelling assumptions for a game configuration",
        "chernoff": "Chernoff information and balance point of (p, q1)",
        "stein": "Stein exponent D(p || q1)",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {"kind": SUBCOMMANDS[args.command]}
    for key in PARSERS:
        raw = getattr(args, key, None)
        if key != "kind" and raw is not None:
            overrides[key] = parse_value(key, raw)
    config = load_config(args.config, overrides)
    return config.resolve()


def _write(text: str, config: RunConfig) -> None:
    if config.out_csv is None:
        sys.stdout.write(text)


def _run_sweep_bayes(config: RunConfig) -> int:
    rows = run_exponent_sweep(config)
    failed = [r.n for r in rows if not r.ok]
    summary = {"failed_n": failed, "final_exponent": rows[-1].exponent if rows else None}
    text = emit_outputs(rows, config, SWEEP_COLUMNS, config.out_csv, config.out_json, summary)
    _write(text, config)
    if failed:
        log.error("solver failed for n in %s", failed)
        return EXIT_SOLVER
    return EXIT_OK


def _run_np(config: RunConfig) -> int:
    rows = run_np_experiment(config)
    columns = SWEEP_COLUMNS + NP_EXTRA_COLUMNS
    text = emit_outputs(rows, config, columns, config.out_csv, config.out_json)
    _write(text, config)
    return EXIT_OK


def _run_best_response(config: RunConfig) -> int:
    tables = run_best_response_scan(config)
    rows = [row for table in tables for row in table.rows()]
    summary = {
        str(t.n): {
            "qstar": t.qstar,
            "k_star": t.k_star,
            "attacker_br_of_k_star": t.attacker_br_q(t.k_star),
            "intersects": t.intersects,
            "intersections": t.intersections,
        }
        for t in tables
    }
    text = emit_outputs(rows, config, BR_COLUMNS, config.out_csv, config.out_json, summary)
    _write(text, config)
    return EXIT_OK


def _run_check(config: RunConfig) -> int:
    report = check_assumptions(config.bayes_spec(config.n or 1))
    rows = [
        {"quantity": "a1_holds", "value": report.a1_holds},
        {"quantity": "a2_holds", "value": report.a2_holds},
        {"quantity": "a3_holds", "value": report.a3_holds},
        {"quantity": "a4_holds", "value": report.a4_holds},
        {"quantity": "qstar", "value": report.qstar},
        {"quantity": "a4_balance_point", "value": report.a4_balance_point},
    ]
    rows += [{"quantity": "note", "value": note} for note in report.notes]
    text = emit_outputs(rows, config, KV_COLUMNS, config.out_csv, config.out_json)
    _write(text, config)
    return EXIT_OK


def _run_exponent(config: RunConfig) -> int:
    try:
        p = Distribution.binary(config.p1)
        q = Distribution.binary(config.q1)
        if config.kind == "chernoff":
            rows = [
                {"quantity": "chernoff_exponent", "value": chernoff_exponent(p, q)},
                {"quantity": "balance_point", "value": balance_point(p, q)[1]},
            ]
        else:
            rows = [{"quantity": "stein_exponent", "value": stein_exponent(p, q)}]
    except (DistributionError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    text = emit_outputs(rows, config, KV_COLUMNS, config.out_csv, config.out_json)
    _write(text, config)
    return EXIT_OK


HANDLERS = {
    "exponent_sweep_bayes": _run_sweep_bayes,
    "exponent_sweep_np": _run_np,
    "np_equilibrium": _run_np,
    "best_response_scan": _run_best_response,
    "check": _run_check,
    "chernoff": _run_exponent,
    "stein": _run_exponent,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = config_from_args(args)
        return HANDLERS[config.kind](config)
    except (ConfigError, GameSpecError, DistributionError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except SolverError as exc:
        log.error("solver failure: %s", exc)
        return EXIT_SOLVER
    except OutputError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
