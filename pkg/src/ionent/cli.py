"""Command-line entry point.

Subcommands map one-to-one onto the experiment drivers:

    populations   channel populations over the pulse and the decay
    transfer      entanglement trace (duration scan + decay scan)
    sweep         peak mode entanglement vs pulse duration and shape
    two-pulse     single vs phase-locked pulse-pair spectra and overlaps
    oracle-check  analytic amplitudes vs direct numerical propagation
    all           everything above into one directory

Every run writes CSV data files plus manifest.json into --out.  CSV is the
canonical format; --format json adds a .json mirror per table.  Exit codes:
0 success, 2 config error, 3 failed validation gate, 64 usage error.

The oracle check runs on a reduced energy grid (the comparison is pointwise,
so any grid subset exercises the same integrals) to keep it interactive.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, amplitudes, experiments, io, propagator, units
from .config import RunConfig, load_config, with_grids
from .errors import ConfigError, IonentError, ValidationGateError
from .units import EnergyGrid

_ORACLE_N_EPS = 33
_ORACLE_N_EPSL = 17

SUBCOMMANDS = ("populations", "transfer", "sweep", "two-pulse", "oracle-check", "all")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the file contract reserves that
    for config errors, so remap to 64."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(64)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ionent", description=__doc__.split("\n", 1)[0])
    parser.add_argument("--version", action="version", version=f"ionent {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default="default",
                       help="config file path or the literal 'default'")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="'json' adds a JSON mirror next to each CSV")
    return parser


class _Emitter:
    """Collects table writes so the manifest can list every file."""

    def __init__(self, out_dir: str, config_hash: str, fmt: str):
        self.out_dir = out_dir
        self.config_hash = config_hash
        self.mirror = fmt == "json"
        self.outputs: list[str] = []

    def table(self, stem: str, header, rows) -> None:
        path = os.path.join(self.out_dir, stem + ".csv")
        io.write_csv(path, header, rows, self.config_hash)
        self.outputs.append(path)
        if self.mirror:
            jpath = os.path.join(self.out_dir, stem + ".json")
            io.write_json(jpath, {"columns": list(header), "rows": [list(r) for r in rows]},
                          self.config_hash)
            self.outputs.append(jpath)


def _cmd_populations(config: RunConfig, emit: _Emitter, workers: int) -> dict:
    points = experiments.run_population_trace(config, workers=workers)
    emit.table("populations", *io.populations_table(points))
    worst = max(abs(p.norm_sum - 1.0) for p in points)
    return {"norm_conservation": {"passed": worst < 5e-3, "max_abs_deviation": worst}}


def _cmd_transfer(config: RunConfig, emit: _Emitter, workers: int) -> dict:
    trace = experiments.run_transfer_trace(config, workers=workers)
    emit.table("transfer_trace", *io.trace_table(trace))
    if not any(p.endswith("populations.csv") for p in emit.outputs):
        points = experiments.run_population_trace(config, workers=workers)
        emit.table("populations", *io.populations_table(points))

    checks: dict = {}
    t, s_ab = trace.series("decay", "entropies", "AB")
    _, s_ac = trace.series("decay", "entropies", "AC")
    crossing = experiments.series_crossing(t, s_ab, s_ac)
    if crossing is not None:
        tc, vc = crossing
        checks["handover_crossing"] = {
            "passed": abs(vc - 0.90) <= 0.05,
            "t_fs": units.au_to_fs(tc),
            "entropy_bits": vc,
        }
    worst = max(abs(p.norm_sum - 1.0) for p in trace.points)
    checks["norm_conservation"] = {"passed": worst < 5e-3, "max_abs_deviation": worst}
    return checks


def _cmd_sweep(config: RunConfig, emit: _Emitter, workers: int) -> dict:
    rows = experiments.run_duration_sweep(config, workers=workers)
    emit.table("sweep", *io.sweep_table(rows))
    flattop = [r.entropy_max for r in rows if r.shape == "flattop"]
    best = max(flattop) if flattop else 0.0
    return {"flattop_peak_entropy": {"passed": best > np.log2(5.0), "bits": best}}


def _cmd_two_pulse(config: RunConfig, emit: _Emitter, workers: int) -> dict:
    result = experiments.run_two_pulse_suite(config, workers=workers)
    emit.table("two_pulse_spectra", *io.two_pulse_spectra_table(result))
    emit.table("two_pulse_overlaps", *io.two_pulse_overlaps_table(result))
    even = result.cases["even"].overlap_alpha_gamma_bar
    odd = result.cases["odd"].overlap_alpha_gamma_bar
    return {
        "parity_overlap_gap": {
            "passed": result.overlap_gap >= 0.3,
            "even": even,
            "odd": odd,
            "gap": result.overlap_gap,
        }
    }


def _cmd_oracle_check(config: RunConfig, emit: _Emitter, workers: int) -> dict:
    small = with_grids(
        config,
        eps_grid=EnergyGrid(config.eps_grid.e_min, config.eps_grid.e_max, _ORACLE_N_EPS),
        epsl_grid=EnergyGrid(config.epsl_grid.e_min, config.epsl_grid.e_max, _ORACLE_N_EPSL),
    )
    shape = small.pulse()
    amps = amplitudes.evaluate(shape, small, shape.t1)
    report = propagator.oracle_compare(amps, small, shape)
    for line in report.summary_lines():
        print(f"oracle-check: {line}")
    payload = {
        "eval_time_fs": units.au_to_fs(report.eval_time),
        "n_eps": report.n_eps,
        "n_epsl": report.n_epsl,
        "refine": report.refine,
        "gate_rel_l2": propagator.ORACLE_GATE_REL_L2,
        "passed": report.passed,
        "amplitudes": [
            {"name": d.name, "rel_l2": d.l2_rel, "max_rel": d.max_rel}
            for d in report.deviations
        ],
    }
    path = os.path.join(emit.out_dir, "oracle_report.json")
    io.write_json(path, payload, emit.config_hash)
    emit.outputs.append(path)
    if not report.passed:
        raise ValidationGateError(
            "oracle deviation above gate: "
            + "; ".join(report.summary_lines())
        )
    worst = max(d.l2_rel for d in report.deviations)
    return {"oracle_gate": {"passed": True, "max_rel_l2": worst}}


_HANDLERS = {
    "populations": _cmd_populations,
    "transfer": _cmd_transfer,
    "sweep": _cmd_sweep,
    "two-pulse": _cmd_two_pulse,
    "oracle-check": _cmd_oracle_check,
}


def _run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    os.makedirs(args.out, exist_ok=True)
    emit = _Emitter(args.out, config.config_hash(), args.format)

    start = time.perf_counter()
    checks: dict = {}
    names = list(_HANDLERS) if args.subcommand == "all" else [args.subcommand]
    for name in names:
        checks.update(_HANDLERS[name](config, emit, args.workers))
    wall = time.perf_counter() - start

    manifest_path = os.path.join(args.out, "manifest.json")
    io.write_manifest(
        manifest_path,
        config,
        subcommand=args.subcommand,
        outputs=emit.outputs,
        checks=checks,
        wall_time_s=wall,
        version=__version__,
    )
    for name, result in checks.items():
        status = "pass" if result.get("passed") else "FAIL"
        print(f"{args.subcommand}: {name}: {status}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 64
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"ionent: config error: {exc}", file=sys.stderr)
        return 2
    except ValidationGateError as exc:
        print(f"ionent: validation gate failed: {exc}", file=sys.stderr)
        return 3
    except IonentError as exc:
        print(f"ionent: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
