"""Command-line entry point.

    tsr-sim doublet  [--config F] [--out F] [--format csv|json] [--plot]
    tsr-sim design   [--config F] [--fsp HZ] [--l1 M] [--l2 M] [--rho-end X] ...
    tsr-sim nsd      [--config F] [--out F] [--format csv|json] [--plot]
    tsr-sim compare  [--config F] [--out F] [--format csv|json] [--plot]

Data rows go to --out or stdout; the one-line human summary always goes
to stderr so piped output stays machine-readable.  Output is
deterministic for a given config (no timestamps, fixed float format,
sorted JSON keys); the metadata block carries a hash of the canonical
config so runs can be matched to their inputs.  Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, config
from .cavity import (
    coupling_transmission_equal_lengths,
    coupling_transmission_ideal,
    doublet_response,
    find_doublet_peaks,
    solve_coupling_transmission,
)
from .errors import (
    ConfigError,
    DegenerateFrequency,
    NoRootInBracket,
    PeaksNotFound,
    SingularSystem,
    TsrSimError,
)
from .noise import (
    TSR,
    compare_topologies,
    noise_spectral_density,
    topology_chain,
)
from .optics import C, MirrorSpec


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsr-sim",
        description="Resonance doublets, coupling design and quantum noise "
                    "for twin-signal-recycled interferometers.")
    parser.add_argument("--version", action="version",
                        version=f"tsr-sim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="JSON config file (default: shipped GEO600-like set)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="override the config's output format")
        p.add_argument("--plot", action="store_true",
                       help="also render a PNG figure next to the data output")

    common(sub.add_parser("doublet", help="scan the coupled-cavity resonance doublet"))

    design = sub.add_parser("design", help="solve the coupling-mirror transmission "
                                           "for a requested doublet half-splitting")
    common(design)
    design.add_argument("--fsp", type=float, default=None,
                        help="target half-splitting in Hz")
    design.add_argument("--l1", type=float, default=None, help="first cavity length in m")
    design.add_argument("--l2", type=float, default=None, help="second cavity length in m")
    design.add_argument("--rho-end", type=float, default=None,
                        help="amplitude reflectivity of the far recycling mirror")

    common(sub.add_parser("nsd", help="quantum noise spectral density of the "
                                      "configured topology"))
    common(sub.add_parser("compare", help="noise comparison against both detuned "
                                          "single-recycling variants"))
    return parser


def _require_tsr(cfg, command):
    if not isinstance(cfg.topology, TSR):
        raise ConfigError("topology.variant",
                          f"'{command}' needs the twin-recycling variant")
    return cfg.topology


def cmd_doublet(cfg, args):
    topo = _require_tsr(cfg, "doublet")
    chain = topology_chain(topo, cfg.interferometer)
    freqs = cfg.grid.build_symmetric()
    resp = doublet_response(chain, freqs)
    peaks = find_doublet_peaks(freqs, resp)
    summary = {
        "f_minus_hz": peaks.f_minus,
        "f_plus_hz": peaks.f_plus,
        "splitting_hz": peaks.splitting,
        "bandwidth_minus_hz": peaks.bandwidths[0],
        "bandwidth_plus_hz": peaks.bandwidths[1],
    }
    rows = list(zip(freqs.tolist(), resp.tolist()))

    def plot(path):
        from .plotting import plot_doublet
        plot_doublet(freqs, resp, path, peaks_hz=(peaks.f_minus, peaks.f_plus))

    return ("doublet", ["frequency_hz", "buildup"], rows, summary, plot)


def cmd_design(cfg, args):
    topo = _require_tsr(cfg, "design")
    l1 = args.l1 if args.l1 is not None else topo.l1
    l2 = args.l2 if args.l2 is not None else topo.l2
    rho_end = (args.rho_end if args.rho_end is not None
               else cfg.interferometer.michelson_reflectivity.rho)
    f_sp = args.fsp if args.fsp is not None else cfg.comparison.resonance_hz
    if f_sp < 0 or not np.isfinite(f_sp):
        raise ConfigError("design.fsp", f"need a finite frequency >= 0, got {f_sp!r}")
    if not 0 < rho_end < 1:
        raise ConfigError("design.rho_end", f"need 0 < rho < 1, got {rho_end!r}")
    end = MirrorSpec.from_reflectivity(rho_end * rho_end)
    omega_sp = 2 * np.pi * f_sp
    if f_sp == 0:
        print("tsr-sim design: zero splitting requested, coupling "
              "transmission degenerates to 0", file=sys.stderr)
        t_exact = 0.0
    else:
        try:
            t_exact = solve_coupling_transmission(omega_sp, l1, l2, end)
        except ValueError as exc:
            raise ConfigError("design.fsp", str(exc)) from exc
    t_closed = coupling_transmission_equal_lengths(omega_sp, l2, end)
    t_ideal = coupling_transmission_ideal(omega_sp, l2)
    summary = {
        "f_sp_hz": f_sp, "l1_m": l1, "l2_m": l2, "rho_end": rho_end,
        "coupling_transmission": t_exact,
        "coupling_transmission_equal_lengths": t_closed,
        "coupling_transmission_ideal_end": t_ideal,
        "free_spectral_range_hz": C / (2 * max(l1, l2)),
    }
    rows = [(f_sp, l1, l2, rho_end, t_exact, t_closed, t_ideal)]
    cols = ["f_sp_hz", "l1_m", "l2_m", "rho_end", "coupling_transmission",
            "coupling_transmission_equal_lengths", "coupling_transmission_ideal_end"]
    return ("design", cols, rows, summary, None)


def cmd_nsd(cfg, args):
    freqs = cfg.grid.build()
    spec = noise_spectral_density(
        cfg.topology, cfg.interferometer, cfg.squeezing, cfg.readout,
        freqs, units=cfg.output.units)
    imin = int(np.argmin(spec.nsd))
    summary = {
        "min_nsd": float(spec.nsd[imin]),
        "min_nsd_frequency_hz": float(freqs[imin]),
        "units": cfg.output.units,
        "squeezing_r": spec.metadata["squeezing_r"],
    }
    rows = list(zip(freqs.tolist(), spec.nsd.tolist()))

    def plot(path):
        from .plotting import plot_spectra
        plot_spectra({spec.metadata["topology"]: (freqs, spec.nsd)}, path,
                     units=cfg.output.units)

    return ("nsd", ["frequency_hz", "nsd"], rows, summary, plot)


def cmd_compare(cfg, args):
    topo = _require_tsr(cfg, "compare")
    freqs = cfg.grid.build()
    comp = compare_topologies(
        cfg.interferometer, cfg.squeezing, freqs, tsr=topo,
        sr_mirror=cfg.comparison.sr_recycling,
        resonance_hz=cfg.comparison.resonance_hz,
        match=cfg.comparison.match, units=cfg.output.units)
    summary = {
        "crossover_hz": comp.crossover_hz,
        "max_improvement": comp.max_improvement,
        "resonance_hz": cfg.comparison.resonance_hz,
        "matched": cfg.comparison.match,
    }
    if cfg.comparison.match:
        summary["matched_tsrm_R"] = comp.metadata["tsrm_R"]
    rows = list(zip(freqs.tolist(), comp.tsr.nsd.tolist(),
                    comp.sr_upper.nsd.tolist(), comp.sr_lower.nsd.tolist()))
    cols = ["frequency_hz", "nsd_tsr", "nsd_sr_upper", "nsd_sr_lower"]

    def plot(path):
        from .plotting import plot_spectra
        from collections import OrderedDict
        plot_spectra(OrderedDict([
            ("twin recycling", (freqs, comp.tsr.nsd)),
            ("detuned upper", (freqs, comp.sr_upper.nsd)),
            ("detuned lower", (freqs, comp.sr_lower.nsd)),
        ]), path, units=cfg.output.units)

    return ("compare", cols, rows, summary, plot)


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, float):
        return f"{x:.16e}"
    return str(x)


def render_csv(command, columns, rows, summary, phash) -> str:
    lines = [f"# tsr-sim {__version__}",
             f"# command = {command}",
             f"# parameter_hash = {phash}"]
    for key in summary:
        lines.append(f"# summary.{key} = {_fmt(summary[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def render_json(command, columns, rows, summary, phash) -> str:
    payload = {
        "tool": f"tsr-sim {__version__}",
        "command": command,
        "parameter_hash": phash,
        "summary": summary,
        "columns": columns,
        "rows": [[v for v in row] for row in rows],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _plot_path(out: str | None, command: str) -> str:
    if out is None:
        return f"tsr-sim-{command}.png"
    base, _ = os.path.splitext(out)
    return base + ".png"


COMMANDS = {"doublet": cmd_doublet, "design": cmd_design,
            "nsd": cmd_nsd, "compare": cmd_compare}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config.load(args.config)
        command, columns, rows, summary, plot = COMMANDS[args.command](cfg, args)
        fmt = args.format or cfg.output.format
        out = args.out or cfg.output.path
        phash = cfg.parameter_hash()
        render = render_csv if fmt == "csv" else render_json
        text = render(command, columns, rows, summary, phash)
        if out is None:
            sys.stdout.write(text)
        else:
            with open(out, "w") as fh:
                fh.write(text)
        if args.plot and plot is not None:
            plot(_plot_path(out, command))
        brief = ", ".join(f"{k}={_fmt(v)}" for k, v in summary.items())
        print(f"tsr-sim {command}: {brief}", file=sys.stderr)
        return 0
    except ConfigError as exc:
        print(f"tsr-sim: configuration error: {exc}", file=sys.stderr)
        return 2
    except (NoRootInBracket, PeaksNotFound, SingularSystem,
            DegenerateFrequency) as exc:
        print(f"tsr-sim: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"tsr-sim: I/O error: {exc}", file=sys.stderr)
        return 4
    except TsrSimError as exc:
        print(f"tsr-sim: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
