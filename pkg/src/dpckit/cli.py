"""Command-line entry point: simulate, reconstruct, evaluate, reproduce.

Every subcommand writes a self-describing artifact directory: the requested
arrays as NPY, 16-bit PNG previews with bounds sidecars, and `config.json`
holding the fully resolved configuration (schema version, tool version, and
every flag value actually used). Identical configuration and seeds produce
bit-identical NPY artifacts.

Configuration files (--config) are JSON objects mirroring the subcommand's
flags by destination name, plus a mandatory "schema_version": 1. Unknown keys
are rejected. Explicit command-line flags override config values, which
override built-in defaults.

Exit codes: 0 success; 2 usage or configuration error (bad flag, schema
violation, invalid input value); 3 file I/O failure; 4 solver divergence.
The output directory given by --out is resolved against $DPCKIT_OUTDIR when
set (and the path is relative); otherwise against the working directory.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__
from .core import FrequencyGrid
from .fileio import load_array, preview_png, save_array
from .forward import BackgroundSpec, DpcStack, build_tfs, focal_star, phase_target, simulate_stack
from .metrics import psnr, rpsnr, ssim
from .pupil_learn import LearnConfig, edge_angles_from_image, learn_pupil
from .pupils import objective_pupil
from .scenario import benchmark_methods, benchmark_stack
from .sensor import auto_params, noise_sigma
from .solvers import (
    PdParams,
    SolverDivergenceError,
    solve_iso,
    solve_l2,
    solve_pd,
    solve_retinex_tv,
    solve_tv,
)

__all__ = ["main"]

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DIVERGED = 4

_EPILOG = """\
exit codes:
  0  success
  2  usage error, bad configuration, or invalid input value
  3  file I/O failure
  4  solver divergence

environment:
  DPCKIT_OUTDIR  base directory that relative --out paths resolve against
"""


class UsageError(ValueError):
    """Invalid flag combination, config schema violation, or bad value."""


# ----------------------------------------------------------------- plumbing


def _out_dir(path):
    base = os.environ.get("DPCKIT_OUTDIR", "")
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    os.makedirs(path, exist_ok=True)
    return path


def _load_config(path, allowed, command):
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"config {path}: top level must be a JSON object")
    version = raw.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise UsageError(
            f"config {path}: schema_version must be {SCHEMA_VERSION}, got {version!r}"
        )
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise UsageError(
            f"config {path}: unknown keys for '{command}': {', '.join(unknown)}"
        )
    return raw


def _write_config(outdir, command, values):
    resolved = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
    }
    resolved.update(values)
    with open(os.path.join(outdir, "config.json"), "w") as f:
        json.dump(resolved, f, indent=2, sort_keys=True, default=str)
        f.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows(rows)


def _grid_from(values):
    return FrequencyGrid(
        width=int(values["grid"]),
        height=int(values["grid"]),
        pixel_size_um=values["pixel_size_um"],
        magnification=values["magnification"],
    )


def _parse_angles(text):
    """'0,90' or '0:0.5,90:0.5' (degrees, optional weights) -> radian pairs."""
    pairs = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            deg, _, weight = token.partition(":")
            pairs.append((np.deg2rad(float(deg)), float(weight)))
        else:
            pairs.append((np.deg2rad(float(token)), 1.0))
    if not pairs:
        raise UsageError(f"no angles in {text!r}")
    return pairs


# ----------------------------------------------------------- stack metadata

_META_KEYS = (
    "grid", "pixel_size_um", "magnification", "na", "lambda_um",
    "source", "na_inner_frac", "theta0_rad", "snr_db", "seed",
)


def _write_meta(outdir, values, theta0s):
    """Plain-text acquisition record; see README for the key glossary."""
    lines = {
        "grid": values["grid"],
        "pixel_size_um": values["pixel_size_um"],
        "magnification": values["magnification"],
        "na": values["na"],
        "lambda_um": values["lambda_um"],
        "source": values["source"],
        "na_inner_frac": values["na_inner_frac"],
        "theta0_rad": ",".join(repr(float(t)) for t in theta0s),
        "snr_db": values["snr_db"],
        "seed": values["seed"],
    }
    with open(os.path.join(outdir, "meta.txt"), "w") as f:
        for key, value in lines.items():
            f.write(f"{key} = {value}\n")


def _read_meta(stack_dir):
    path = os.path.join(stack_dir, "meta.txt")
    meta = {}
    with open(path) as f:
        for line in f:
            key, sep, value = line.partition("=")
            if sep:
                meta[key.strip()] = value.strip()
    missing = [k for k in _META_KEYS if k not in meta]
    if missing:
        raise UsageError(f"{path}: missing keys {', '.join(missing)}")
    return meta


def _load_stack(stack_dir):
    """Rebuild a DpcStack from a simulate artifact directory."""
    meta = _read_meta(stack_dir)
    grid = FrequencyGrid(
        width=int(meta["grid"]),
        height=int(meta["grid"]),
        pixel_size_um=float(meta["pixel_size_um"]),
        magnification=float(meta["magnification"]),
    )
    na = float(meta["na"])
    lambda_um = float(meta["lambda_um"])
    theta0s = tuple(float(t) for t in meta["theta0_rad"].split(","))
    na_inner = float(meta["na_inner_frac"]) * na
    tfs = build_tfs(grid, na, lambda_um, theta0s=theta0s,
                    source=meta["source"], na_inner=na_inner)
    images = load_array(os.path.join(stack_dir, "stack.npy"), "stack.npy")
    if images.ndim != 3 or images.shape[0] != len(tfs):
        raise UsageError(
            f"stack.npy shape {images.shape} does not match {len(tfs)} axes"
        )
    snr_db = None if meta["snr_db"] == "None" else float(meta["snr_db"])
    return DpcStack(grid=grid, images=images, tfs=tuple(tfs), na=na,
                    lambda_um=lambda_um, rng_seed=int(meta["seed"]),
                    snr_db=snr_db)


# -------------------------------------------------------------- subcommands


def _cmd_ptf(values):
    grid = _grid_from(values)
    na_inner = values["na_inner_frac"] * values["na"]
    tfs = build_tfs(grid, values["na"], values["lambda_um"],
                    theta0s=(np.deg2rad(values["theta0_deg"]),),
                    source=values["source"], na_inner=na_inner)
    tf = tfs[0]
    outdir = _out_dir(values["out"])
    save_array(os.path.join(outdir, "ptf.npy"), tf.data)
    preview_png(os.path.join(outdir, "ptf_magnitude.png"), np.abs(tf.data))
    preview_png(os.path.join(outdir, "ptf_real.png"), tf.data.real)
    preview_png(os.path.join(outdir, "ptf_imag.png"), tf.data.imag)
    _write_config(outdir, "ptf", values)
    print(f"ptf: wrote {outdir} (peak |H| = {np.abs(tf.data).max():.4f})")
    return EXIT_OK


def _build_target(values, grid):
    kind = values["target"].replace("-", "_")
    if kind == "custom":
        if not values["custom_target"]:
            raise UsageError("--target custom requires --custom-target PATH")
        return phase_target(grid, "custom", path=values["custom_target"])
    return phase_target(grid, kind)


def _cmd_simulate(values):
    grid = _grid_from(values)
    phase = _build_target(values, grid)
    na_inner = values["na_inner_frac"] * values["na"]
    theta0s = tuple(np.deg2rad(d) for d in values["axes"])
    tfs = build_tfs(grid, values["na"], values["lambda_um"], theta0s=theta0s,
                    source=values["source"], na_inner=na_inner)
    background = None
    if values["background"]:
        layer = focal_star(grid, amplitude=values["bg_amplitude"],
                           edge_sigma_px=values["bg_sigma_px"])
        background = BackgroundSpec(layer_phase=layer, z_um=values["bg_z_um"],
                                    mismatch=values["bg_mismatch"])
    stack = simulate_stack(phase, tfs, background=background,
                           snr_db=values["snr_db"], seed=values["seed"],
                           na=values["na"], lambda_um=values["lambda_um"])
    outdir = _out_dir(values["out"])
    save_array(os.path.join(outdir, "stack.npy"), stack.images)
    save_array(os.path.join(outdir, "gt.npy"), phase)
    preview_png(os.path.join(outdir, "gt.png"), phase)
    for n in range(stack.n_axes):
        preview_png(os.path.join(outdir, f"stack_{n:02d}.png"), stack.images[n])
    _write_meta(outdir, values, theta0s)
    _write_config(outdir, "simulate", values)
    print(f"simulate: wrote {outdir} ({stack.n_axes} axes, "
          f"{grid.height}x{grid.width})")
    return EXIT_OK


def _resolve_strengths(values, stack, needs_beta):
    """alpha/beta for reconstruct: explicit flags win, sensor fills the rest."""
    alpha, beta = values["alpha"], values["beta"]
    if values["auto_params"] and (alpha is None or (needs_beta and beta is None)):
        auto_alpha, auto_beta = auto_params(noise_sigma(stack))
        alpha = auto_alpha if alpha is None else alpha
        beta = auto_beta if beta is None else beta
    if alpha is None:
        raise UsageError("--alpha is required (or pass --auto-params)")
    if needs_beta and beta is None:
        raise UsageError("--beta is required for this method (or --auto-params)")
    return alpha, beta


def _cmd_reconstruct(values):
    stack = _load_stack(values["stack"])
    method = values["method"]
    iters = values["iters"]
    trace = None
    edge_maps = None
    if values["emit_edges"] and method != "pd":
        raise UsageError("--emit-edges requires --method pd")
    if values["trace"] and method in ("l2", "iso"):
        raise UsageError(f"--trace needs an iterative method, not {method}")

    if method == "l2":
        alpha, _ = _resolve_strengths(values, stack, needs_beta=False)
        phase = solve_l2(stack, alpha=alpha)
        used = {"alpha": alpha}
    elif method == "iso":
        alpha, beta = _resolve_strengths(values, stack, needs_beta=True)
        phase = solve_iso(stack, alpha=alpha, beta=beta)
        used = {"alpha": alpha, "beta": beta}
    elif method == "tv":
        alpha, _ = _resolve_strengths(values, stack, needs_beta=False)
        phase, trace = solve_tv(stack, alpha=alpha, iters=iters or 50,
                                return_trace=True)
        used = {"alpha": alpha, "iters": iters or 50}
    elif method == "retinex-tv":
        alpha, _ = _resolve_strengths(values, stack, needs_beta=False)
        phase, trace = solve_retinex_tv(stack, alpha=alpha, iters=iters or 50,
                                        return_trace=True)
        used = {"alpha": alpha, "iters": iters or 50}
    elif method == "pd":
        # None alpha/beta are resolved by the solver's own sensor rule
        params = PdParams(alpha=values["alpha"], beta=values["beta"],
                          omega=values["omega"], max_iters=iters or 50,
                          isotropic=values["isotropic"])
        result = solve_pd(stack, params)
        phase = result.phase
        trace = result.cost_trace
        edge_maps = result.edge_maps
        used = {"alpha": values["alpha"], "beta": values["beta"],
                "omega": values["omega"], "iters": result.iterations_run,
                "isotropic": values["isotropic"], "eta": result.eta}
    else:  # argparse choices make this unreachable
        raise UsageError(f"unknown method {method!r}")

    outdir = _out_dir(values["out"])
    save_array(os.path.join(outdir, "phase.npy"), phase)
    preview_png(os.path.join(outdir, "phase.png"), phase)
    if values["emit_edges"]:
        for n in range(edge_maps.shape[0]):
            save_array(os.path.join(outdir, f"edges_{n:02d}.npy"), edge_maps[n])
            preview_png(os.path.join(outdir, f"edges_{n:02d}.png"),
                        np.abs(edge_maps[n]))
    if values["trace"]:
        _write_csv(values["trace"], ("iteration", "cost"),
                   [(i + 1, c) for i, c in enumerate(trace)])
    _write_config(outdir, "reconstruct", {**values, "used": used})
    print(f"reconstruct[{method}]: wrote {outdir}")
    return EXIT_OK


def _cmd_sensor(values):
    stack = _load_stack(values["stack"])
    estimate = noise_sigma(stack)
    alpha, beta = auto_params(estimate)
    print(f"sigma = {estimate.sigma:.6g}")
    for n, s in enumerate(estimate.per_image_sigmas):
        print(f"sigma[{n}] = {s:.6g}")
    print(f"alpha = {alpha:.6g}")
    print(f"beta = {beta:.6g}")
    if values["csv"]:
        _write_csv(values["csv"], ("sigma", "alpha", "beta"),
                   [(estimate.sigma, alpha, beta)])
    return EXIT_OK


def _cmd_metrics(values):
    rec = load_array(values["rec"], "reconstruction")
    gt = load_array(values["gt"], "ground truth")
    scores = {"rpsnr": rpsnr(rec, gt), "psnr": psnr(rec, gt),
              "ssim": ssim(rec, gt)}
    for key, value in scores.items():
        unit = "" if key == "ssim" else " dB"
        print(f"{key} = {value:.4f}{unit}")
    if values["csv"]:
        header = ("scenario", "method", "snr_db", "rpsnr", "psnr", "ssim")
        row = (values["scenario"], values["method"], values["snr_db"],
               scores["rpsnr"], scores["psnr"], scores["ssim"])
        new = not os.path.exists(values["csv"])
        with open(values["csv"], "a", newline="") as f:
            w = csv.writer(f)
            if new:
                w.writerow(header)
            w.writerow(row)
    return EXIT_OK


def _cmd_learn_pupil(values):
    grid = _grid_from(values)
    pupil = objective_pupil(grid, values["na"], values["lambda_um"])
    if values["edge_image"]:
        angles = edge_angles_from_image(
            load_array(values["edge_image"], "edge image"))
    else:
        angles = _parse_angles(values["angles"])
    cfg = LearnConfig.from_angles(grid, pupil, angles, iters=values["iters"],
                                  step=values["step"], seed=values["seed"])
    pattern, trace = learn_pupil(cfg)
    outdir = _out_dir(values["out"])
    save_array(os.path.join(outdir, "learned_q.npy"), pattern.data)
    preview_png(os.path.join(outdir, "learned_q.png"), pattern.data)
    _write_csv(os.path.join(outdir, "trace.csv"), ("iteration", "cost"),
               [(i + 1, c) for i, c in enumerate(trace.costs)])
    for it, snap in sorted(trace.snapshots.items()):
        save_array(os.path.join(outdir, f"snapshot_{it:03d}.npy"), snap)
    _write_config(outdir, "learn-pupil", values)
    print(f"learn-pupil: wrote {outdir} "
          f"(final cost {trace.costs[-1]:.6g}, {len(trace.costs)} iterations)")
    return EXIT_OK


def _cmd_reproduce(values):
    if values["what"] != "table2":
        raise UsageError(f"unknown reproduce target {values['what']!r}")
    outdir = _out_dir(values["out"])
    seeds = tuple(values["seed"] + i for i in range(values["repeats"]))
    runs = []
    for seed in seeds:
        stack, gt = benchmark_stack(snr_db=values["snr_db"], seed=seed)
        seed_dir = os.path.join(outdir, f"seed_{seed}")
        os.makedirs(seed_dir, exist_ok=True)
        save_array(os.path.join(seed_dir, "stack.npy"), stack.images)
        save_array(os.path.join(seed_dir, "gt.npy"), gt)
        rows = benchmark_methods(stack, gt, seed=seed)
        for row in rows:
            method_dir = os.path.join(
                seed_dir, row.method.replace("[", "_").replace("]", ""))
            os.makedirs(method_dir, exist_ok=True)
            save_array(os.path.join(method_dir, "phase.npy"), row.phase)
            preview_png(os.path.join(method_dir, "phase.png"), row.phase)
        runs.extend(rows)
    _write_csv(os.path.join(outdir, "runs.csv"),
               ("method", "seed", "snr_db", "alpha", "beta", "iters",
                "rpsnr", "psnr", "ssim"),
               [(r.method, r.seed, values["snr_db"], r.alpha,
                 "" if r.beta is None else r.beta,
                 "" if r.iters is None else r.iters,
                 f"{r.rpsnr:.6f}", f"{r.psnr:.6f}", f"{r.ssim:.6f}")
                for r in runs])
    methods = []
    for r in runs:
        if r.method not in methods:
            methods.append(r.method)
    summary_rows = []
    print(f"reproduce table2 (snr {values['snr_db']} dB, seeds {seeds}):")
    for m in methods:
        vals = np.array([r.rpsnr for r in runs if r.method == m])
        summary_rows.append((m, values["snr_db"], len(vals),
                             f"{vals.mean():.6f}", f"{vals.std():.6f}"))
        print(f"  {m:12s} rpsnr = {vals.mean():6.2f} +- {vals.std():.2f} dB")
    _write_csv(os.path.join(outdir, "summary.csv"),
               ("method", "snr_db", "seeds", "rpsnr_mean", "rpsnr_std"),
               summary_rows)
    _write_config(outdir, "reproduce", values)
    print(f"reproduce: wrote {outdir}")
    return EXIT_OK


# -------------------------------------------------------------------- main

_OPTICS = {
    "grid": 256, "pixel_size_um": 4.0, "magnification": 10.0,
    "na": 0.25, "lambda_um": 0.532,
}

_DEFAULTS = {
    "ptf": {**_OPTICS, "out": "dpckit-ptf", "theta0_deg": 0.0,
            "source": "half-circle", "na_inner_frac": 0.0},
    "simulate": {**_OPTICS, "out": "dpckit-simulate", "target": "wedding-cake",
                 "custom_target": None, "axes": (0.0, 90.0), "snr_db": None,
                 "seed": 0, "source": "half-circle", "na_inner_frac": 0.0,
                 "background": False, "bg_amplitude": 2.0, "bg_sigma_px": 24.0,
                 "bg_z_um": -200.0, "bg_mismatch": 0.1},
    "reconstruct": {"out": "dpckit-reconstruct", "stack": None, "method": None,
                    "alpha": None, "beta": None, "omega": 10.0, "iters": None,
                    "isotropic": False, "auto_params": False,
                    "emit_edges": False, "trace": None},
    "sensor": {"stack": None, "csv": None},
    "metrics": {"rec": None, "gt": None, "csv": None, "scenario": "",
                "method": "", "snr_db": ""},
    "learn-pupil": {**_OPTICS, "grid": 64, "out": "dpckit-learn-pupil",
                    "angles": "0,90", "edge_image": None, "iters": 25,
                    "seed": 0, "step": 1.0},
    "reproduce": {"what": "table2", "out": "dpckit-reproduce", "snr_db": 5.0,
                  "seed": 0, "repeats": 3},
}

_REQUIRED = {
    "reconstruct": ("stack", "method"),
    "sensor": ("stack",),
    "metrics": ("rec", "gt"),
}

_HANDLERS = {
    "ptf": _cmd_ptf,
    "simulate": _cmd_simulate,
    "reconstruct": _cmd_reconstruct,
    "sensor": _cmd_sensor,
    "metrics": _cmd_metrics,
    "learn-pupil": _cmd_learn_pupil,
    "reproduce": _cmd_reproduce,
}


def _add_optics(p, grid_default=256):
    p.add_argument("--grid", type=int, help=f"grid size (default {grid_default})")
    p.add_argument("--pixel-size-um", type=float, help="camera pixel pitch")
    p.add_argument("--magnification", type=float, help="optical magnification")
    p.add_argument("--na", type=float, help="objective numerical aperture")
    p.add_argument("--lambda-um", type=float, help="illumination wavelength")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dpckit", epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description=__doc__.partition("\n\n")[0],
        argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, epilog=_EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter,
                           argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON config file (flags override it)")
        p.add_argument("--out", help="artifact directory")
        return p

    p = add("ptf", "build one transfer function and preview it")
    _add_optics(p)
    p.add_argument("--theta0-deg", type=float, help="axis angle in degrees")
    p.add_argument("--source", choices=("half-circle", "annular"))
    p.add_argument("--na-inner-frac", type=float,
                   help="annular inner radius as a fraction of NA")

    p = add("simulate", "simulate a DPC acquisition")
    _add_optics(p)
    p.add_argument("--target", choices=("wedding-cake", "focal-star", "custom"))
    p.add_argument("--custom-target", help="NPY phase map for --target custom")
    p.add_argument("--axes", type=float, nargs="+",
                   help="axis angles in degrees (default 0 90)")
    p.add_argument("--snr-db", type=float, help="per-image SNR (default: none)")
    p.add_argument("--seed", type=int, help="noise seed")
    p.add_argument("--source", choices=("half-circle", "annular"))
    p.add_argument("--na-inner-frac", type=float)
    p.add_argument("--background", action="store_true",
                   help="add the defocus-layer corruption")
    p.add_argument("--bg-amplitude", type=float, help="layer phase amplitude")
    p.add_argument("--bg-sigma-px", type=float, help="layer edge smoothing")
    p.add_argument("--bg-z-um", type=float, help="layer defocus distance")
    p.add_argument("--bg-mismatch", type=float, help="per-side imbalance")

    p = add("reconstruct", "reconstruct phase from a simulate directory")
    p.add_argument("--stack", help="simulate artifact directory")
    p.add_argument("--method", choices=("l2", "iso", "tv", "retinex-tv", "pd"))
    p.add_argument("--alpha", type=float, help="penalty strength")
    p.add_argument("--beta", type=float, help="second penalty strength")
    p.add_argument("--omega", type=float, help="shrink sharpness (pd)")
    p.add_argument("--iters", type=int, help="iteration budget")
    p.add_argument("--isotropic", action="store_true",
                   help="couple the gradient shrink across axes (pd)")
    p.add_argument("--auto-params", action="store_true",
                   help="fill missing alpha/beta from the noise sensor")
    p.add_argument("--emit-edges", action="store_true",
                   help="also write the per-axis edge maps (pd)")
    p.add_argument("--trace", help="write per-iteration cost CSV here")

    p = add("sensor", "estimate noise and suggested penalty strengths")
    p.add_argument("--stack", help="simulate artifact directory")
    p.add_argument("--csv", help="also write sigma/alpha/beta as CSV")

    p = add("metrics", "score a reconstruction against ground truth")
    p.add_argument("--rec", help="reconstruction NPY")
    p.add_argument("--gt", help="ground-truth NPY")
    p.add_argument("--csv", help="append a CSV row here")
    p.add_argument("--scenario", help="label for the CSV row")
    p.add_argument("--method", help="label for the CSV row")
    p.add_argument("--snr-db", help="label for the CSV row")

    p = add("learn-pupil", "recover an illumination pattern from edge priors")
    _add_optics(p, grid_default=64)
    p.add_argument("--angles", help="'0,90' or '0:0.5,90:0.5' (deg[:weight])")
    p.add_argument("--edge-image", help="NPY guide image for the angle prior")
    p.add_argument("--iters", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--step", type=float, help="initial ascent step")

    p = add("reproduce", "regenerate the benchmark comparison artifacts")
    p.add_argument("what", nargs="?", choices=("table2",),
                   help="which artifact set (default table2)")
    p.add_argument("--snr-db", "--snr", dest="snr_db", type=float)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--repeats", type=int, help="number of seeds (default 3)")
    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage / version
        return exc.code
    explicit = vars(ns)
    command = explicit.pop("command")
    config_path = explicit.pop("config", None)
    values = dict(_DEFAULTS[command])
    try:
        if config_path:
            values.update(_load_config(config_path, values, command))
        values.update(explicit)
        missing = [k for k in _REQUIRED.get(command, ()) if not values[k]]
        if missing:
            raise UsageError(
                f"{command}: missing required {', '.join('--' + m for m in missing)}"
            )
        return _HANDLERS[command](values)
    except UsageError as exc:
        print(f"dpckit {command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"dpckit {command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverDivergenceError as exc:
        print(f"dpckit {command}: solver diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"dpckit {command}: I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
