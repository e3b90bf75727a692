"""Batch command-line front-end.

Every subcommand reads a JSON config, runs one experiment, and emits CSV
and JSON artifacts carrying a metadata header (config hash, seed, package
version).  Outputs are byte-identical for identical (config, seed,
version).  Plots are optional SVGs rendered from the same data.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import warnings
from pathlib import Path

import numpy as np
import jsonschema

from . import __version__
from .calibration import (CalibrationError, CZCalibration, SearchConfig,
                          calibrate_cz, run_chevron)
from .device import (CoupledPair, DeviceError, average_shift, pair_from_dict,
                     q6q7_pair, sweet_spot_amplitude)
from .dynamics import (CZ, DecoherenceRates, DynamicsError, PAULI_LABELS,
                       Superoperator, average_gate_fidelity,
                       gate_superoperator, pauli_transfer_matrix)
from .noise import (NoiseError, NoiseProfile, load_psd,
                    simulate_ramsey_under_modulation,
                    simulate_t1_under_modulation)
from .pulse import FluxPulse, PulseError
from .rb import (RBConfig, RBError, bootstrap_ci, fit_decay, irb_estimate,
                 run_rb, run_repeated_irb)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_GRID = {"type": "object",
         "properties": {"start": {"type": "number"},
                        "stop": {"type": "number"},
                        "points": {"type": "integer", "minimum": 2}},
         "required": ["start", "stop", "points"]}

_CZ_CHANNEL = {"type": "object",
               "properties": {"type": {"enum": ["ideal", "depolarizing",
                                                "calibrated"]},
                              "p": {"type": "number"},
                              "calibration_file": {"type": "string"},
                              "epsilon": {},
                              "with_decoherence": {"type": "boolean"}},
               "required": ["type"]}

_RB_BLOCK = {"type": "object",
             "properties": {"lengths": {"type": "array"},
                            "sequences_per_length": {"type": "integer"},
                            "shots_per_sequence": {"type": "integer"},
                            "assignment_error": {"type": "number"}}}

SCHEMAS = {
    "dum": {"type": "object",
            "properties": {"grid": _GRID},
            "required": ["grid"]},
    "coherence": {"type": "object",
                  "properties": {"epsilons": {"type": "array"},
                                 "omega_p": {"type": "number"},
                                 "max_delay_us": {"type": "number"},
                                 "delay_points": {"type": "integer"},
                                 "shots": {"type": "integer"}},
                  "required": ["epsilons", "omega_p"]},
    "chevron": {"type": "object",
                "properties": {"epsilon": {}, "freqs": _GRID,
                               "durations": _GRID, "edge": {"type": "number"}},
                "required": ["epsilon", "freqs", "durations"]},
    "calibrate": {"type": "object",
                  "properties": {"epsilon": {},
                                 "edge": {"type": "number"}},
                  "required": ["epsilon"]},
    "irb": {"type": "object",
            "properties": {"rb": _RB_BLOCK, "cz_channel": _CZ_CHANNEL,
                           "bootstrap_replicants": {"type": "integer"}},
            "required": ["cz_channel"]},
    "repeat-irb": {"type": "object",
                   "properties": {"rb": _RB_BLOCK, "cz_channel": _CZ_CHANNEL,
                                  "n_experiments": {"type": "integer",
                                                    "minimum": 1}},
                   "required": ["cz_channel", "n_experiments"]},
    "ptm": {"type": "object",
            "properties": {"cz_channel": _CZ_CHANNEL},
            "required": ["cz_channel"]},
}


class ConfigError(ValueError):
    """Bad configuration file."""


def _load_config(path, subcommand):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if subcommand not in cfg:
        raise ConfigError(f"config missing required key: {subcommand!r}")
    try:
        jsonschema.validate(cfg[subcommand], SCHEMAS[subcommand])
    except jsonschema.ValidationError as exc:
        key = "/".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(
            f"config key {subcommand}/{key} invalid: {exc.message}") from exc
    return cfg


def _config_hash(cfg) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _metadata(cfg, seed):
    return {"config_hash": _config_hash(cfg), "seed": seed,
            "version": __version__}


def _header_lines(cfg, seed):
    m = _metadata(cfg, seed)
    return [f"config_hash={m['config_hash']}", f"seed={m['seed']}",
            f"version={m['version']}"]


def _pair_from_config(cfg) -> CoupledPair:
    if "device" in cfg:
        return pair_from_dict(cfg["device"])
    return q6q7_pair()


def _noise_from_config(cfg) -> NoiseProfile:
    block = dict(cfg.get("noise", {}))
    if "spurs" in block:
        block["spurs"] = tuple(tuple(s) for s in block["spurs"])
    if "t1_drift" in block and block["t1_drift"] is not None:
        block["t1_drift"] = tuple(block["t1_drift"])
    return NoiseProfile(**block)


def _grid(spec) -> np.ndarray:
    return np.linspace(spec["start"], spec["stop"], spec["points"])


def _epsilon(value, pair) -> float:
    if value == "sweet_spot":
        return sweet_spot_amplitude(pair.tunable)
    return float(value)


def _cz_channel_builder(block, pair, cfg):
    """Returns (channel_fn(t1_multiplier) -> Superoperator, description)."""
    kind = block["type"]
    if kind == "ideal":
        ch = Superoperator.from_unitary(CZ)
        return (lambda mult: ch), "ideal"
    if kind == "depolarizing":
        if "p" not in block:
            raise ConfigError("config missing required key: cz_channel/p")
        ch = Superoperator.depolarizing(block["p"]).compose(
            Superoperator.from_unitary(CZ))
        return (lambda mult: ch), f"depolarizing(p={block['p']})"
    if "calibration_file" in block:
        calib = CZCalibration.from_json(block["calibration_file"])
    else:
        eps = _epsilon(block.get("epsilon", "sweet_spot"), pair)
        calib = calibrate_cz(pair, eps)
    pulse = calib.pulse()
    if block.get("with_decoherence", True):
        def fn(mult):
            rates = DecoherenceRates.from_pair(pair, t1_scale=mult)
            return gate_superoperator(pair, pulse, rates=rates,
                                      frame_corrections=calib.frame_z)
    else:
        ch = gate_superoperator(pair, pulse, frame_corrections=calib.frame_z)
        fn = lambda mult: ch
    return fn, f"calibrated(omega_p={calib.omega_p:.3f})"


def _write_csv(path, header_lines, columns, rows):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def _write_json(path, doc, cfg, seed):
    doc = dict(doc)
    doc["metadata"] = _metadata(cfg, seed)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Minimal SVG renderer (CSVs are the contract; plots are convenience)

def _svg_line(path, xs, series, title):
    w, h, pad = 640, 420, 50
    xs = np.asarray(xs, dtype=float)
    ally = np.concatenate([np.asarray(y, dtype=float) for y in series])
    x0, x1 = xs.min(), xs.max() or 1.0
    y0, y1 = ally.min(), ally.max()
    if y1 == y0:
        y1 = y0 + 1.0
    if x1 == x0:
        x1 = x0 + 1.0
    sx = lambda x: pad + (x - x0) / (x1 - x0) * (w - 2 * pad)
    sy = lambda y: h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>',
             f'<text x="{w // 2}" y="20" text-anchor="middle">{title}</text>']
    for k, ys in enumerate(series):
        pts = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{colors[k % 4]}" stroke-width="1.5"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


def _svg_heatmap(path, xs, ys, z, title):
    w, h, pad = 640, 420, 50
    nx, ny = len(xs), len(ys)
    cw = (w - 2 * pad) / nx
    ch = (h - 2 * pad) / ny
    zmin, zmax = float(np.min(z)), float(np.max(z))
    span = (zmax - zmin) or 1.0
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>',
             f'<text x="{w // 2}" y="20" text-anchor="middle">{title}</text>']
    for i in range(nx):
        for j in range(ny):
            v = (float(z[i, j]) - zmin) / span
            r, b = int(255 * v), int(255 * (1 - v))
            parts.append(
                f'<rect x="{pad + i * cw:.1f}" y="{h - pad - (j + 1) * ch:.1f}" '
                f'width="{cw + 0.5:.1f}" height="{ch + 0.5:.1f}" '
                f'fill="rgb({r},0,{b})"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts))


# ---------------------------------------------------------------------------
# Subcommands

def _cmd_dum(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    eps = _grid(cfg["dum"]["grid"])
    shifts = average_shift(pair.tunable, eps, dc_bias=pair.dc_bias)
    star = sweet_spot_amplitude(pair.tunable, dc_bias=pair.dc_bias)
    header = _header_lines(cfg, seed) + [f"sweet_spot_epsilon={star!r}"]
    _write_csv(out / "dum.csv", header, ["epsilon_phi0", "delta_omega_mhz"],
               zip(eps, shifts))
    if svg:
        _svg_line(out / "dum.svg", eps, [shifts],
                  "time-averaged frequency shift vs modulation amplitude")


def _cmd_coherence(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    profile = _noise_from_config(cfg)
    block = cfg["coherence"]
    omega_p = block["omega_p"]
    max_delay = block.get("max_delay_us", 3.0 * pair.tunable.t2_star)
    delays = np.linspace(0.05, max_delay, block.get("delay_points", 40)) * 1e3
    shots = block.get("shots", 400)
    rows = []
    for i, raw in enumerate(block["epsilons"]):
        eps = _epsilon(raw, pair)
        t2 = simulate_ramsey_under_modulation(pair, eps, omega_p, profile,
                                              delays, shots, seed=seed + 2 * i)
        t1 = simulate_t1_under_modulation(pair, eps, omega_p, profile,
                                          delays * 2, shots, seed=seed + 2 * i + 1)
        rows.append([eps, t1.value, t1.ci_low, t1.ci_high,
                     t2.value, t2.ci_low, t2.ci_high])
    _write_csv(out / "coherence.csv", _header_lines(cfg, seed),
               ["epsilon_phi0", "t1_us", "t1_ci_low", "t1_ci_high",
                "t2_us", "t2_ci_low", "t2_ci_high"], rows)
    if svg:
        arr = np.array(rows)
        _svg_line(out / "coherence.svg", arr[:, 0], [arr[:, 1], arr[:, 4]],
                  "T1 and T2* vs modulation amplitude")


def _cmd_chevron(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    block = cfg["chevron"]
    eps = _epsilon(block["epsilon"], pair)
    ds = run_chevron(pair, eps, _grid(block["freqs"]),
                     _grid(block["durations"]), edge=block.get("edge", 0.0))
    ds.to_csv(out / "chevron.csv", header_lines=_header_lines(cfg, seed))
    if svg:
        _svg_heatmap(out / "chevron.svg", ds.frequencies, ds.durations,
                     ds.populations.T[::-1].T,
                     "fixed-qubit excited population")


def _cmd_calibrate(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    block = cfg["calibrate"]
    eps = _epsilon(block["epsilon"], pair)
    search = SearchConfig(edge=block.get("edge", 24.0))
    calib = calibrate_cz(pair, eps, search)
    ch = gate_superoperator(pair, calib.pulse(), frame_corrections=calib.frame_z)
    meta = _metadata(cfg, seed)
    meta["avg_fidelity_vs_cz"] = average_gate_fidelity(ch, CZ)
    calib.to_json(out / "calibration.json", metadata=meta)


def _rb_config(cfg, key, interleaved=False):
    block = dict(cfg.get(key, {}).get("rb", {}))
    if "lengths" in block:
        block["lengths"] = tuple(block["lengths"])
    return RBConfig(interleaved=interleaved, **block)


def _cmd_irb(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    block = cfg["irb"]
    fn, desc = _cz_channel_builder(block["cz_channel"], pair, cfg)
    channels = {"cz": fn(1.0)}
    ref_cfg = _rb_config(cfg, "irb", False)
    int_cfg = _rb_config(cfg, "irb", True)
    ref = run_rb(ref_cfg, channels, seed=seed)
    inter = run_rb(int_cfg, channels, seed=seed + 1)
    header = _header_lines(cfg, seed) + [f"cz_channel={desc}"]
    ref.to_csv(out / "rb_reference.csv", header_lines=header)
    inter.to_csv(out / "rb_interleaved.csv", header_lines=header)
    fit_ref, fit_int = fit_decay(ref), fit_decay(inter)
    result = irb_estimate(fit_ref, fit_int)
    reps = block.get("bootstrap_replicants", 2000)
    ci_ref = bootstrap_ci(ref, replicants=reps, seed=seed + 2)
    ci_int = bootstrap_ci(inter, replicants=reps, seed=seed + 3)
    uls_r, props_r = ref.by_length()
    uls_i, props_i = inter.by_length()
    _write_csv(out / "rb_decays.csv", header,
               ["length", "mean_survival_reference", "mean_survival_interleaved"],
               zip(uls_r, props_r.mean(axis=1), props_i.mean(axis=1)))
    _write_json(out / "irb_result.json",
                {"p_ref": result.p_ref, "p_int": result.p_int,
                 "avg_fidelity": result.avg_fidelity,
                 "infidelity": result.infidelity,
                 "fidelity_ci": [result.ci_low, result.ci_high],
                 "p_ref_bootstrap_ci": list(ci_ref),
                 "p_int_bootstrap_ci": list(ci_int),
                 "negative_infidelity": result.negative_infidelity,
                 "cz_channel": desc}, cfg, seed)
    if svg:
        _svg_line(out / "irb_decays.svg", uls_r,
                  [props_r.mean(axis=1), props_i.mean(axis=1)],
                  "RB decays (reference, interleaved)")


def _cmd_repeat_irb(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    profile = _noise_from_config(cfg)
    block = cfg["repeat-irb"]
    fn, desc = _cz_channel_builder(block["cz_channel"], pair, cfg)
    rb_cfg = _rb_config(cfg, "repeat-irb", False)
    outcome = run_repeated_irb(rb_cfg, fn, block["n_experiments"], profile,
                               seed=seed, pair=pair)
    header = _header_lines(cfg, seed) + [f"cz_channel={desc}"]
    if outcome.ecdf is not None:
        outcome.ecdf.to_csv(out / "irb_ecdf.csv", header_lines=header)
    _write_json(out / "repeat_irb.json",
                {"n_experiments": block["n_experiments"],
                 "discarded": outcome.discarded,
                 "infidelities": [float(x) for x in outcome.infidelities],
                 "cz_channel": desc}, cfg, seed)
    if svg and outcome.ecdf is not None:
        e = outcome.ecdf
        _svg_line(out / "irb_ecdf.svg", e.values,
                  [e.cumulative, e.band_low, e.band_high],
                  "ECDF of CZ infidelities (90% band)")


def _cmd_ptm(cfg, seed, out, svg):
    pair = _pair_from_config(cfg)
    fn, desc = _cz_channel_builder(cfg["ptm"]["cz_channel"], pair, cfg)
    r = pauli_transfer_matrix(fn(1.0))
    header = _header_lines(cfg, seed) + [f"cz_channel={desc}"]
    with open(out / "ptm.csv", "w", newline="") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["pauli"] + PAULI_LABELS)
        for i, label in enumerate(PAULI_LABELS):
            w.writerow([label] + [repr(float(x)) for x in r[i]])
    if svg:
        _svg_heatmap(out / "ptm.svg", np.arange(16), np.arange(16), r,
                     "Pauli transfer matrix")


def load_ptm_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#") or row[0] == "pauli":
                continue
            rows.append([float(x) for x in row[1:]])
    return np.array(rows)


def _cmd_psd(input_path, cfg, seed, out):
    psd = load_psd(input_path)
    _write_json(out / "psd_summary.json",
                {"n_points": len(psd.frequencies),
                 "freq_min_mhz": float(psd.frequencies.min()),
                 "freq_max_mhz": float(psd.frequencies.max()),
                 "white_floor_dbm_hz": psd.white_floor(),
                 "peak_dbm_hz": float(psd.powers.max())}, cfg, seed)


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="paramcz",
        description="flux-modulated parametric CZ gate laboratory")
    parser.add_argument("subcommand",
                        choices=["dum", "coherence", "chevron", "calibrate",
                                 "irb", "repeat-irb", "ptm", "psd"])
    parser.add_argument("input", nargs="?", help="input CSV (psd subcommand)")
    parser.add_argument("--config", help="JSON experiment config")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--svg", action="store_true",
                        help="also render SVG plots")
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.subcommand == "psd":
            if not args.input:
                raise ConfigError("psd requires an input CSV path")
            _cmd_psd(args.input, {"input": str(args.input)},
                     args.seed if args.seed is not None else 0, out)
            return EXIT_OK
        if not args.config:
            raise ConfigError("--config is required")
        key = args.subcommand
        cfg = _load_config(args.config, key)
        seed = args.seed if args.seed is not None else cfg.get("seed")
        stochastic = key in ("coherence", "irb", "repeat-irb")
        if seed is None:
            if stochastic:
                raise ConfigError(
                    "config missing required key: seed (stochastic experiment)")
            seed = 0
        handler = {"dum": _cmd_dum, "coherence": _cmd_coherence,
                   "chevron": _cmd_chevron, "calibrate": _cmd_calibrate,
                   "irb": _cmd_irb, "repeat-irb": _cmd_repeat_irb,
                   "ptm": _cmd_ptm}[key]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            handler(cfg, int(seed), out, args.svg)
        return EXIT_OK
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DeviceError, PulseError, DynamicsError, CalibrationError, RBError,
            NoiseError, np.linalg.LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
