"""Command-line front end binding ingestion, fitting, budgeting, cavity
estimation and simulation into reproducible pipelines.

Every run writes a manifest (command, config hash, input hashes, tool
version) next to its report so it can be re-executed identically.
Exit codes: 0 success, 1 usage error, 2 validation error, 3 fit failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .datatypes import wavelength_to_energy
from .decay import fit_decay, fit_thermal
from .errors import (
    AggregationError,
    ConfigurationError,
    DegenerateFitError,
    DomainError,
    EvaluationError,
    InsufficientBaselineError,
    InsufficientDataError,
    LineNotFoundError,
    ModelInconsistencyError,
    NoDataError,
    ParseError,
    SicplError,
    ValidationError,
)
from .io import load_sidecar, load_spectrum, load_trace, save_two_column
from .photophysics import CavityParams, budget, cooperativity, finesse_sweep
from .spectrum import PsbConstraints, find_zpls, fit_psb, partition_dw, psb_eval
from .synth import GeneratorSpec, gen_decay, gen_spectrum, generate

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_FIT = 3

VALIDATION_ERRORS = (
    ValidationError, ParseError, DomainError, ConfigurationError,
    InsufficientBaselineError, FileNotFoundError,
)
FIT_ERRORS = (
    DegenerateFitError, EvaluationError, LineNotFoundError,
    ModelInconsistencyError, InsufficientDataError, NoDataError,
)

COMMANDS = ("fit-decay", "fit-thermal", "fit-psb", "zpl", "budget",
            "cavity", "simulate", "report")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, command, params, input_paths):
    manifest = {
        "command": command,
        "tool_version": __version__,
        "parameters": params,
        "config_hash": hashlib.sha256(
            json.dumps(params, sort_keys=True).encode()
        ).hexdigest(),
        "inputs": {str(p): _sha256(p) for p in input_paths},
    }
    path = os.path.join(out_dir, f"{command}_manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _report_lines(title, rows, notes=()):
    lines = [title, "=" * len(title)]
    width = max((len(r[0]) for r in rows), default=0)
    for name, value, *margin in rows:
        if margin and margin[0] is not None:
            lines.append(f"{name:<{width}}  {value:.6g} +/- {margin[0]:.3g} (3 sigma)")
        elif isinstance(value, float):
            lines.append(f"{name:<{width}}  {value:.6g}")
        else:
            lines.append(f"{name:<{width}}  {value}")
    for note in notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def _emit(out_dir, name, text):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(text)
    print(text, end="")
    return path


def _require_files(*paths):
    for p in paths:
        if p is not None and not os.path.exists(p):
            raise ValidationError(f"input file does not exist: {p}")


def _load_meta(args):
    meta = load_sidecar(args.meta) if getattr(args, "meta", None) else {}
    for key, attr in (("pulse_time_ns", "pulse_ns"), ("temperature_K", "temperature")):
        if getattr(args, attr, None) is not None:
            meta[key] = getattr(args, attr)
    return meta


def _read_zpl_config(path):
    """Lines of `label center_nm window_nm`, '#' comments allowed."""
    _require_files(path)
    expected = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(f"{path}:{lineno}: expected `label center window`")
            try:
                expected.append((parts[0], float(parts[1]), float(parts[2])))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric center/window") from None
    if not expected:
        raise ParseError(f"{path}: no ZPL definitions")
    return expected


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_fit_decay(args):
    _require_files(args.trace, getattr(args, "meta", None))
    meta = _load_meta(args)
    trace = load_trace(args.trace, meta)
    window = None
    if args.window:
        a, b = args.window.split(",")
        window = (float(a), float(b))
    res = fit_decay(trace, kind=args.kind, fit_window=window)
    rows = [("model", res.model_kind),
            ("background [counts/bin]", res.background, 3 * res.background_error)]
    for i, (amp, tau) in enumerate(res.components, start=1):
        rows.append((f"A{i} [counts]", amp, res.sigma3[2 * (i - 1)]))
        rows.append((f"tau{i} [ns]", tau, res.sigma3[2 * (i - 1) + 1]))
    rows.append(("reduced chi2", res.reduced_chi2))
    text = _report_lines("Decay fit", rows, notes=res.warnings)
    _emit(args.out, "fit-decay_report.txt", text)
    if args.plot:
        t = trace.times
        model = np.full(t.shape, res.background)
        after = t >= trace.pulse_time
        for amp, tau in res.components:
            model[after] += amp * np.exp(-(t[after] - trace.pulse_time) / tau)
        save_two_column(os.path.join(args.out, "fit-decay_model.txt"), t, model,
                        header="time_ns model_counts")
    _write_manifest(args.out, "fit-decay",
                    {"kind": args.kind, "window": args.window}, [args.trace])
    return EXIT_OK


def _cmd_fit_thermal(args):
    _require_files(args.points)
    pts = []
    with open(args.points) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 3:
                raise ParseError(f"{args.points}:{lineno}: expected T tau sigma")
            pts.append(tuple(float(v) for v in parts))
    model = fit_thermal(pts)
    text = _report_lines("Thermally activated decay fit", [
        ("tau [ns]", model.tau, model.sigma3[0]),
        ("tau_p [ns]", model.tau_p, model.sigma3[1]),
        ("E_p [meV]", model.e_p, model.sigma3[2]),
        ("reduced chi2", model.reduced_chi2),
    ])
    _emit(args.out, "fit-thermal_report.txt", text)
    _write_manifest(args.out, "fit-thermal", {}, [args.points])
    return EXIT_OK


def _cmd_zpl(args):
    _require_files(args.spectrum, getattr(args, "meta", None))
    spectrum = load_spectrum(args.spectrum, _load_meta(args))
    zpls = find_zpls(spectrum, _read_zpl_config(args.zpl_config))
    rows = []
    for label, line in sorted(zpls.lines.items()):
        bound = "<= " if line.fwhm_is_upper_bound else ""
        rows.append((f"{label} center [nm]", line.center, line.center_sigma3))
        rows.append((f"{label} energy [eV]", wavelength_to_energy(line.center).as_ev()))
        rows.append((f"{label} FWHM [nm]", f"{bound}{line.fwhm:.4g}"))
        rows.append((f"{label} area [counts*nm]", line.area))
    if zpls.doublet_splitting_mev is not None:
        rows.append(("doublet splitting [meV]", zpls.doublet_splitting_mev))
    text = _report_lines("ZPL identification", rows, notes=zpls.warnings)
    _emit(args.out, "zpl_report.txt", text)
    _write_manifest(args.out, "zpl", {}, [args.spectrum, args.zpl_config])
    return EXIT_OK


def _cmd_fit_psb(args):
    _require_files(args.spectrum, getattr(args, "meta", None))
    spectrum = load_spectrum(args.spectrum, _load_meta(args))
    zpls = find_zpls(spectrum, _read_zpl_config(args.zpl_config))
    fit = fit_psb(spectrum, zpls, PsbConstraints())
    part = partition_dw(spectrum, zpls, args.partition_mev, psb_fit=fit,
                        area_correction=args.area_correction)
    rows = [
        ("I0 [counts]", fit.model.i0, fit.sigma3[0]),
        ("sigma [meV]", fit.model.sigma, fit.sigma3[1]),
        ("Delta0 [meV]", fit.model.delta0, fit.sigma3[2]),
        ("DW mean", part.dw_mean),
        ("DW alpha low", part.dw_alpha_bounds[0]),
        ("DW alpha high", part.dw_alpha_bounds[1]),
        ("DW alpha refined", part.dw_alpha_refined),
        ("DW beta low", part.dw_beta_low),
        ("DW beta refined", part.dw_beta_refined),
    ]
    text = _report_lines("Phonon sideband fit and DW partition", rows)
    _emit(args.out, "fit-psb_report.txt", text)
    if args.plot:
        save_two_column(os.path.join(args.out, "fit-psb_model.txt"),
                        fit.delta, fit.alpha_model,
                        header="delta_meV alpha_sideband_counts_per_meV")
        save_two_column(os.path.join(args.out, "fit-psb_beta_residual.txt"),
                        fit.delta, fit.beta_residual,
                        header="delta_meV beta_residual_counts_per_meV")
    _write_manifest(args.out, "fit-psb",
                    {"partition_mev": args.partition_mev,
                     "area_correction": args.area_correction},
                    [args.spectrum, args.zpl_config])
    return EXIT_OK


def _cmd_budget(args):
    b = budget(args.tau_rad, args.tau_tot, args.dw, args.s,
               site_label=args.site, tau_nr_reference=args.tau_nr_ref)
    rows = [
        ("site", b.site_label or "(unspecified)"),
        ("S (th.)", b.s_th),
        ("DW (th.)", b.dw_th),
        ("DW (exp.)", b.dw_exp),
        ("tau_rad [ns]", b.tau_rad),
        ("tau_tot (exp.) [ns]", b.tau_tot_exp),
        ("tau_NR [ns]", "absent (purely radiative)" if b.tau_nr is None else b.tau_nr),
        ("eta_rad", b.eta_rad),
        ("eta_tot", b.eta_tot),
    ]
    text = _report_lines("Radiative-efficiency budget", rows, notes=b.notes)
    _emit(args.out, "budget_report.txt", text)
    payload = {
        "site": b.site_label, "s_th": b.s_th, "dw_th": b.dw_th,
        "dw_exp": b.dw_exp, "tau_rad": b.tau_rad, "tau_tot_exp": b.tau_tot_exp,
        "tau_nr": b.tau_nr, "eta_rad": b.eta_rad, "eta_tot": b.eta_tot,
        "notes": b.notes,
    }
    name = f"budget_{b.site_label}.json" if b.site_label else "budget.json"
    with open(os.path.join(args.out, name), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.out, "budget",
                    {"tau_rad": args.tau_rad, "tau_tot": args.tau_tot,
                     "dw": args.dw, "s": args.s, "site": args.site}, [])
    return EXIT_OK


def _cmd_cavity(args):
    params = CavityParams(
        wavelength_nm=args.lambda_nm, finesse=args.finesse, roc_mm=args.roc_mm,
        l_vac_um=args.lvac_um, l_sic_um=args.lsic_um, eta_tot=args.eta_tot,
        n_sic=args.n_sic, w_c_um=args.wc_um,
    )
    est = cooperativity(params, extraction_fraction=args.extraction)
    rows = [
        ("w_C [um]", est.w_c_um),
        ("sigma_E [m^2]", est.sigma_e),
        ("sigma_C [m^2]", est.sigma_c),
        ("fill factor f_L", est.fill),
        ("cooperativity C", est.cooperativity),
        ("eta_cav", est.eta_cav),
    ]
    if est.eta_out is not None:
        rows.append(("eta_out", est.eta_out))
    text = _report_lines("Cavity-enhancement estimate", rows)
    _emit(args.out, "cavity_report.txt", text)
    if args.sweep:
        spec = args.sweep.split("=", 1)
        if len(spec) != 2 or spec[0] != "finesse":
            raise ValidationError("sweep must look like finesse=start:stop:n")
        a, b, n = spec[1].split(":")
        table = finesse_sweep(params, float(a), float(b), int(n))
        path = os.path.join(args.out, "cavity_sweep.txt")
        with open(path, "w") as fh:
            fh.write("# finesse cooperativity eta_cav\n")
            for f, c, eta in table:
                fh.write(f"{f:.9g} {c:.9g} {eta:.9g}\n")
    _write_manifest(args.out, "cavity",
                    {k: getattr(args, k) for k in
                     ("lambda_nm", "finesse", "roc_mm", "lvac_um", "lsic_um",
                      "eta_tot", "n_sic", "wc_um", "sweep")}, [])
    return EXIT_OK


def _cmd_simulate(args):
    _require_files(args.spec)
    with open(args.spec) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.spec}: invalid JSON ({exc})") from None
    for key in ("seed", "kind", "truth", "sampling"):
        if key not in raw:
            raise ValidationError(f"{args.spec}: missing generator key {key!r}")
    if "truth" in raw and "components" in raw["truth"]:
        raw["truth"]["components"] = [tuple(c) for c in raw["truth"]["components"]]
    if "zpl" in raw.get("truth", {}):
        raw["truth"]["zpl"] = [tuple(z) for z in raw["truth"]["zpl"]]
    for psb in raw.get("truth", {}).get("psb", ()):
        if "doublet" in psb and psb["doublet"] is not None:
            psb["doublet"] = tuple(psb["doublet"])
    spec = GeneratorSpec(seed=raw["seed"], kind=raw["kind"], truth=raw["truth"],
                         sampling=raw["sampling"],
                         noise=raw.get("noise", {"kind": "none"}))
    result = generate(spec)
    out_dir = os.path.dirname(os.path.abspath(args.outfile)) or "."
    os.makedirs(out_dir, exist_ok=True)
    if spec.kind == "decay":
        save_two_column(args.outfile, result.times, result.counts,
                        header=f"time_ns counts (pulse_time_ns={result.pulse_time})")
    elif spec.kind == "spectrum":
        save_two_column(args.outfile, result.wavelengths, result.intensities,
                        header="wavelength_nm counts")
    else:
        with open(args.outfile, "w") as fh:
            for row in result:
                fh.write(" ".join(f"{v:.9g}" for v in row) + "\n")
    _write_manifest(out_dir, "simulate", {"seed": raw["seed"], "kind": raw["kind"]},
                    [args.spec])
    return EXIT_OK


REPORT_COLUMNS = ("s_th", "dw_th", "dw_exp", "tau_rad", "tau_tot_exp",
                  "tau_nr", "eta_rad", "eta_tot")
REPORT_HEADER = ("site", "S(th.)", "DW(th.)", "DW(exp.)", "tau_rad",
                 "tau_tot(exp.)", "tau_NR", "eta_rad", "eta_tot")


def _cmd_report(args):
    if not args.inputs:
        raise ValidationError("report needs at least one budget JSON")
    _require_files(*args.inputs)
    rows = {}
    for path in args.inputs:
        with open(path) as fh:
            data = json.load(fh)
        site = data.get("site", "")
        if site in rows and rows[site] != data:
            raise AggregationError(f"conflicting entries for site {site!r}")
        rows[site] = data
    lines = ["Radiative-properties summary", "=" * 28]
    lines.append("  ".join(f"{h:>13}" for h in REPORT_HEADER))
    for site in sorted(rows):
        data = rows[site]
        cells = [f"{site:>13}"]
        for key in REPORT_COLUMNS:
            v = data.get(key)
            cells.append(f"{'absent':>13}" if v is None else f"{v:>13.4g}")
        lines.append("  ".join(cells))
    text = "\n".join(lines) + "\n"
    _emit(args.out, "summary_report.txt", text)
    _write_manifest(args.out, "report", {"inputs": list(args.inputs)}, args.inputs)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = _Parser(prog="sicpl",
                     description="Color-center photophysics analysis toolkit")
    parser.add_argument("--config", help="JSON run configuration replacing flags")
    sub = parser.add_subparsers(dest="command")

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--out", default=".", help="output directory for reports")
        return p

    p = add("fit-decay", help="fit exponential decay(s) to a trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--kind", choices=["auto", "single", "double"], default="auto")
    p.add_argument("--window", help="t0,t1 in ns")
    p.add_argument("--pulse-ns", type=float, dest="pulse_ns")
    p.add_argument("--meta", help="sidecar key=value metadata file")
    p.add_argument("--plot", action="store_true")

    p = add("fit-thermal", help="fit the thermally activated decay model")
    p.add_argument("--points", required=True, help="3-column file: T_K tau_ns sigma_ns")

    p = add("zpl", help="locate and fit zero-phonon lines")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--zpl-config", required=True, dest="zpl_config")
    p.add_argument("--temperature", type=float)
    p.add_argument("--meta")

    p = add("fit-psb", help="fit the Gaussian sideband series and partition DW")
    p.add_argument("--spectrum", required=True)
    p.add_argument("--zpl-config", required=True, dest="zpl_config")
    p.add_argument("--partition-mev", type=float, required=True, dest="partition_mev")
    p.add_argument("--area-correction", type=float, default=1.0, dest="area_correction")
    p.add_argument("--temperature", type=float)
    p.add_argument("--meta")
    p.add_argument("--plot", action="store_true")

    p = add("budget", help="radiative-efficiency budget")
    p.add_argument("--tau-rad", type=float, required=True, dest="tau_rad")
    p.add_argument("--tau-tot", type=float, required=True, dest="tau_tot")
    p.add_argument("--dw", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--site", default="")
    p.add_argument("--tau-nr-ref", type=float, dest="tau_nr_ref")

    p = add("cavity", help="cooperativity and cavity emission probability")
    p.add_argument("--lambda-nm", type=float, required=True, dest="lambda_nm")
    p.add_argument("--finesse", type=float, required=True)
    p.add_argument("--roc-mm", type=float, required=True, dest="roc_mm")
    p.add_argument("--lvac-um", type=float, required=True, dest="lvac_um")
    p.add_argument("--lsic-um", type=float, required=True, dest="lsic_um")
    p.add_argument("--eta-tot", type=float, required=True, dest="eta_tot")
    p.add_argument("--n-sic", type=float, default=2.56, dest="n_sic")
    p.add_argument("--wc-um", type=float, dest="wc_um")
    p.add_argument("--extraction", type=float)
    p.add_argument("--sweep", help="finesse=start:stop:n")

    p = add("simulate", help="generate synthetic data from a JSON recipe")
    p.add_argument("--spec", required=True)
    p.add_argument("--outfile", required=True)

    p = add("report", help="bundle budget JSONs into one summary table")
    p.add_argument("--inputs", nargs="+", required=True)

    return parser


HANDLERS = {
    "fit-decay": _cmd_fit_decay,
    "fit-thermal": _cmd_fit_thermal,
    "zpl": _cmd_zpl,
    "fit-psb": _cmd_fit_psb,
    "budget": _cmd_budget,
    "cavity": _cmd_cavity,
    "simulate": _cmd_simulate,
    "report": _cmd_report,
}


def _args_from_config(parser, path):
    _require_files(path)
    with open(path) as fh:
        cfg = json.load(fh)
    command = cfg.get("command")
    if command not in COMMANDS:
        raise ValidationError(f"unknown command {command!r} in config")
    argv = [command]
    for key, value in {**cfg.get("inputs", {}), **cfg.get("parameters", {})}.items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            argv.extend([flag] + [str(v) for v in value])
        elif value is not None:
            argv.extend([flag, str(value)])
    if cfg.get("output_dir"):
        argv.extend(["--out", cfg["output_dir"]])
    if cfg.get("emit_plot_data") and command in ("fit-decay", "fit-psb"):
        argv.append("--plot")
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _args_from_config(parser, args.config)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        os.makedirs(args.out, exist_ok=True)
        return HANDLERS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FIT_ERRORS as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except SicplError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
