"""Command line front end: run sweeps to CSV and print matrix diagnostics."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import analysis
from .csmux import gen_phi, phi_to_text
from .detection import SOLVERS, sensing_matrix
from .dictionary import build_dictionary
from .harness import load_spec, parse_snr_grid, run_sweep
from .modem import get_constellation


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="csmimo",
        description="Link-level simulator for compressive-sensing MIMO multiplexing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run an SNR sweep and write a CSV")
    sim.add_argument("--config", required=True, help="JSON experiment config")
    sim.add_argument("--snr", help="override grid: start:step:stop or comma list (dB)")
    sim.add_argument("--trials", type=int, help="override trial cap per SNR point")
    sim.add_argument("--seed", type=int, help="override master seed")
    sim.add_argument("--solver", choices=SOLVERS, help="override recovery solver")
    sim.add_argument(
        "--baseline", choices=["zf", "overload"], help="run a baseline instead"
    )
    sim.add_argument("--out", required=True, help="output CSV path")

    an = sub.add_parser("analyze", help="print measurement-matrix diagnostics")
    an.add_argument("--config", required=True, help="JSON experiment config")
    an.add_argument("--phi-seed", type=int, help="override the matrix seed")
    an.add_argument("--dump-phi", metavar="PATH", help="write the matrix as text rows")
    return parser


def _cmd_simulate(args) -> int:
    spec = load_spec(args.config)
    if args.snr is not None:
        spec = replace(spec, snr_db=parse_snr_grid(args.snr))
    if args.trials is not None:
        spec = replace(spec, trials=args.trials)
    if args.seed is not None:
        spec = replace(spec, master_seed=args.seed)
    if args.solver is not None:
        spec = replace(spec, solver=args.solver)
    if args.baseline is not None:
        spec = replace(spec, baseline=args.baseline)
    result = run_sweep(spec)
    result.write_csv(args.out)
    mode = spec.baseline or f"cs/{spec.solver}"
    print(f"{spec.notation} [{mode}] -> {args.out}")
    for row in result.rows:
        print(
            f"  snr {row.snr_db:6.1f} dB  trials {row.trials:6d}"
            f"  ber {row.ber:.3e}  ser {row.ser:.3e}  throughput {row.throughput:.2f}"
        )
    return 0


def _cmd_analyze(args) -> int:
    spec = load_spec(args.config)
    cfg = spec.config
    if args.phi_seed is not None:
        cfg = replace(cfg, phi_seed=args.phi_seed)
    c = get_constellation(cfg.constellation)
    phi = gen_phi(cfg)
    dictionary = build_dictionary(c, cfg.subblock_cols, cap=cfg.dictionary_cap)

    print(f"setup: ({cfg.nt},{cfg.nr})-{cfg.l}  [{cfg.constellation}, J={cfg.j}, rho={cfg.rho:g}]")
    print(
        f"phi: {phi.phi.shape[0]}x{phi.phi.shape[1]} gaussian, seed {cfg.phi_seed},"
        f" entry std {phi.scale:.6g}"
    )
    if phi.phi.shape[1] <= 20:
        print(f"spark(phi): {analysis.spark(phi.phi)} (rows + 1 = {phi.phi.shape[0] + 1})")
    for k in (1, 2):
        if k <= phi.phi.shape[1]:
            est = analysis.rip_constant(phi.phi, k)
            tag = "exhaustive" if est.exhaustive else f"sampled {est.n_supports}"
            print(f"delta_{k}(phi): {est.delta:.6g} ({tag})")
    print(f"dictionary: n={dictionary.n}, d={dictionary.d} columns")
    report = analysis.verify_uniqueness(phi, dictionary)
    print(
        f"uniqueness(phi*psi): unique={report.unique},"
        f" min pairwise distance {report.min_distance:.6g}"
        f" (threshold {report.threshold:.3g})"
    )
    composed = sensing_matrix(phi, dictionary)
    est = analysis.rip_constant(composed, 2)
    tag = "exhaustive" if est.exhaustive else f"sampled {est.n_supports}"
    print(f"delta_2(phi*psi): {est.delta:.6g} ({tag})")
    if args.dump_phi:
        with open(args.dump_phi, "w", encoding="ascii") as fh:
            fh.write(phi_to_text(phi))
        print(f"phi written to {args.dump_phi}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "simulate":
        return _cmd_simulate(args)
    return _cmd_analyze(args)


if __name__ == "__main__":
    sys.exit(main())
