"""File output: CSV tables, JSON mirrors, and the run manifest.

Every file carries the configuration hash (CSV: a leading comment line;
JSON: a top-level key) so downstream consumers can match data to the inputs
that produced it.  Values are written in lab units (fs, eV, bits); floats get
12 significant digits.
"""

from __future__ import annotations

import json
import os
from typing import Iterable, Mapping, Sequence

from . import units
from .amplitudes import Populations
from .experiments import (
    EntanglementTrace,
    PopulationPoint,
    SweepRow,
    TwoPulseResult,
    PARTITIONS,
)

FLOAT_FMT = "%.12g"


def _json_default(obj):
    # numpy scalars (including np.bool_) reach the manifest via check dicts
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return FLOAT_FMT % value
    return str(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence], config_hash: str) -> None:
    lines = [f"# config_hash={config_hash}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path: str, payload: Mapping, config_hash: str) -> None:
    body = {"config_hash": config_hash}
    body.update(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def read_csv(path: str) -> tuple[str, list[str], list[list[str]]]:
    """(config_hash, header, raw string rows) of a file written by write_csv."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    config_hash = ""
    if lines and lines[0].startswith("# config_hash="):
        config_hash = lines[0].split("=", 1)[1]
        lines = lines[1:]
    header = lines[0].split(",") if lines else []
    rows = [ln.split(",") for ln in lines[1:] if ln]
    return config_hash, header, rows


def _population_columns(p: Populations) -> list[float]:
    return [p.p_ground, p.p_alpha, p.p_beta, p.p_gamma, p.p_delta]

_POPULATION_HEADER = ["P_ground", "P_alpha", "P_beta", "P_gamma", "P_delta"]


def trace_table(trace: EntanglementTrace) -> tuple[list[str], list[list]]:
    header = ["segment", "t_fs", "tau_fs"]
    for part in PARTITIONS:
        header += [f"S_vN_{part}_bits", f"C_{part}"]
    header += _POPULATION_HEADER + ["norm_sum"]
    rows = []
    for p in trace.points:
        row: list = [p.segment, units.au_to_fs(p.time), units.au_to_fs(p.tau)]
        for part in PARTITIONS:
            row += [p.entropies[part], p.concurrences[part]]
        row += _population_columns(p.populations) + [p.norm_sum]
        rows.append(row)
    return header, rows


def trace_payload(trace: EntanglementTrace) -> dict:
    header, rows = trace_table(trace)
    return {"columns": header, "rows": rows}


def populations_table(points: Sequence[PopulationPoint]) -> tuple[list[str], list[list]]:
    header = ["segment", "t_fs"] + _POPULATION_HEADER + ["norm_sum"]
    rows = [
        ["%s" % p.segment, units.au_to_fs(p.time)]
        + _population_columns(p.populations)
        + [p.norm_sum]
        for p in points
    ]
    return header, rows


def sweep_table(rows_in: Sequence[SweepRow]) -> tuple[list[str], list[list]]:
    header = ["shape", "tau_fs", "S_vN_modes_max_bits", "C_modes_max", "t_at_max_fs", "n_modes"]
    rows = [
        [
            r.shape,
            units.au_to_fs(r.tau),
            r.entropy_max,
            r.concurrence_max,
            units.au_to_fs(r.time_at_max),
            r.n_modes,
        ]
        for r in rows_in
    ]
    return header, rows


def two_pulse_spectra_table(result: TwoPulseResult) -> tuple[list[str], list[list]]:
    header = ["case", "time_tag", "curve", "energy_ev", "density_per_ev"]
    rows = []
    for case_name in ("single", "even", "odd"):
        case = result.cases[case_name]
        for (time_tag, curve_name), curve in sorted(case.curves.items()):
            axis_ev = curve.axis.values * units.HARTREE_EV
            dens = curve.values / units.HARTREE_EV
            for e, v in zip(axis_ev, dens):
                rows.append([case_name, time_tag, curve_name, float(e), float(v)])
    return header, rows


def two_pulse_overlaps_table(result: TwoPulseResult) -> tuple[list[str], list[list]]:
    header = [
        "case",
        "overlap_alpha_gamma_bar",
        "mean_fringe_spacing_ev",
        "expected_spacing_ev",
    ]
    expected_ev = units.au_to_ev(result.expected_fringe_spacing)
    rows = []
    for case_name in ("single", "even", "odd"):
        case = result.cases[case_name]
        mean_sp = (
            units.au_to_ev(float(case.fringe_spacings.mean()))
            if case.fringe_spacings.size
            else 0.0
        )
        rows.append([case_name, case.overlap_alpha_gamma_bar, mean_sp, expected_ev])
    return header, rows


def two_pulse_payload(result: TwoPulseResult) -> dict:
    sp_header, sp_rows = two_pulse_spectra_table(result)
    ov_header, ov_rows = two_pulse_overlaps_table(result)
    return {
        "t_delta_fs": units.au_to_fs(result.t_delta),
        "expected_fringe_spacing_ev": units.au_to_ev(result.expected_fringe_spacing),
        "parity_delay_shift_as": units.au_to_fs(result.parity_delay_shift) * 1e3,
        "spectra": {"columns": sp_header, "rows": sp_rows},
        "overlaps": {"columns": ov_header, "rows": ov_rows},
    }


def grid_description(config) -> dict:
    return {
        "eps_ev": {
            "min": units.au_to_ev(config.eps_grid.e_min),
            "max": units.au_to_ev(config.eps_grid.e_max),
            "n": config.eps_grid.n,
        },
        "epsl_ev": {
            "min": units.au_to_ev(config.epsl_grid.e_min),
            "max": units.au_to_ev(config.epsl_grid.e_max),
            "n": config.epsl_grid.n,
        },
        "n_time": config.n_time,
        "tf_s": units.au_to_s(config.tf),
    }


def write_manifest(
    path: str,
    config,
    subcommand: str,
    outputs: Sequence[str],
    checks: Mapping[str, Mapping],
    wall_time_s: float,
    version: str,
) -> None:
    payload = {
        "subcommand": subcommand,
        "version": version,
        "config": {k: _fmt(v) for k, v in config.resolved.items()},
        "config_hash": config.config_hash(),
        "grids": grid_description(config),
        "outputs": [os.path.basename(p) for p in outputs],
        "checks": {k: dict(v) for k, v in checks.items()},
        "wall_time_s": wall_time_s,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
