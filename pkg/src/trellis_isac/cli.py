"""
Command line entry point.

    trellis-isac shape   --n-subcarriers 32 --out profiles/
    trellis-isac trials  --config run.yaml --trials 10000 --out trials.csv
    trellis-isac trials  --matrix --trials 1000 --out matrix.csv
    trellis-isac cdf     --constellation 256qam --m-s-list 1,2 --out cdf.csv
    trellis-isac sweep   --alpha-grid 0,0.5,1 --out sweep.csv
    trellis-isac ber     --snr-grid 0,4,8,12 --trials 2000 --out ber.csv

Settings come from an optional JSON/YAML config file; flags override it.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__, bench, link
from .errors import TrellisError
from .report import provenance, write_csv
from .shaper import ShapingConfig, random_payload, shape_batch, unshaped_symbols, with_baselines

CONFIG_KEYS = ("n_subcarriers", "constellation", "code", "m_s", "alpha", "n0", "epsilon", "papr_mode",
               "trials", "seed", "snr_grid", "alpha_grid", "m_s_list")
SHAPING_KEYS = ("n_subcarriers", "constellation", "code", "m_s", "alpha", "n0", "epsilon", "papr_mode")
DEFAULTS = {"n_subcarriers": 32, "constellation": "16qam", "code": "5,7", "m_s": 1, "alpha": 1.0,
            "n0": 256, "epsilon": 3.5, "papr_mode": "incremental", "trials": 1000, "seed": 0,
            "snr_grid": [0, 2, 4, 6, 8, 10, 12, 14, 16], "alpha_grid": list(bench.DEFAULT_ALPHA_GRID),
            "m_s_list": [1, 2]}


class CliError(TrellisError):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def load_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text) if path.suffix == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise CliError(f"cannot parse config {path}: {exc}") from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise CliError(f"config {path} must hold a mapping")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise CliError(f"unknown config keys {unknown}; allowed: {list(CONFIG_KEYS)}")
    return data


def resolve_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config:
        settings.update(load_config_file(args.config))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    code = settings["code"]
    if isinstance(code, (list, tuple)):
        settings["code"] = ",".join(str(g) for g in code)
    for key in ("snr_grid", "alpha_grid"):
        if isinstance(settings[key], str):
            settings[key] = _floats(settings[key])
    try:
        settings["trials"] = int(settings["trials"])
        settings["seed"] = int(settings["seed"])
    except (TypeError, ValueError) as exc:
        raise CliError(f"trials and seed must be integers: {exc}") from exc
    if settings["trials"] < 1:
        raise CliError("trials must be at least 1")
    return settings


def shaping_config(settings: dict) -> ShapingConfig:
    kw = {k: settings[k] for k in SHAPING_KEYS}
    try:
        kw["n_subcarriers"], kw["m_s"], kw["n0"] = int(kw["n_subcarriers"]), int(kw["m_s"]), int(kw["n0"])
        kw["alpha"], kw["epsilon"] = float(kw["alpha"]), float(kw["epsilon"])
    except (TypeError, ValueError) as exc:
        raise CliError(f"bad numeric setting: {exc}") from exc
    return ShapingConfig(**kw)


def _emit(args, write) -> None:
    """Write to --out, or to stdout through a temporary file."""
    if args.out:
        path = write(Path(args.out))
        print(f"wrote {path}", file=sys.stderr)
    else:
        import tempfile

        with tempfile.TemporaryDirectory() as tmp:
            sys.stdout.write(Path(write(Path(tmp) / "out.csv")).read_text())


def cmd_shape(args, settings) -> None:
    cfg = shaping_config(settings)
    if any(cfg.needed_baselines()):
        cfg = with_baselines(cfg, seed=settings["seed"])
    payload = random_payload(cfg, np.random.default_rng([settings["seed"], 0]), 1)
    bundle = bench.export_profiles(shape_batch(payload, cfg).X[0], unshaped_symbols(payload, cfg)[0])
    out = Path(args.out or "profiles")
    meta = provenance(cfg.digest(), settings["seed"], config=cfg.to_dict())
    for path in bundle.write(out, meta).values():
        print(f"wrote {path}", file=sys.stderr)


def cmd_trials(args, settings) -> None:
    cfg = shaping_config(settings)
    if args.matrix:
        rows = bench.run_matrix(cfg, n_trials=settings["trials"], seed=settings["seed"])
        cols = list(rows[0])
        meta = provenance(cfg.digest(), settings["seed"], config=cfg.to_dict())
        _emit(args, lambda p: write_csv(p, cols, ([r[c] for c in cols] for r in rows), meta))
        return
    ts = bench.run_trials(cfg, settings["trials"], settings["seed"], keep_symbols=bool(args.symbols))
    if args.symbols:
        np.savez_compressed(args.symbols, shaped=ts.X_shaped, unshaped=ts.X_unshaped, trial=ts.trial)
    _emit(args, ts.to_csv)
    print(json.dumps(ts.summary()), file=sys.stderr)


def cmd_cdf(args, settings) -> None:
    base = shaping_config(settings)
    variants = [base.replace(m_s=int(m), baselines=None) for m in settings["m_s_list"]]
    res = bench.run_cdf(variants, settings["trials"], settings["seed"])
    _emit(args, lambda p: res.to_csv(p, base.digest()))
    print(json.dumps(res.ordering), file=sys.stderr)


def cmd_sweep(args, settings) -> None:
    cfg = shaping_config(settings)
    res = bench.sweep_alpha(cfg, settings["alpha_grid"], settings["trials"], settings["seed"])
    _emit(args, res.to_csv)


def cmd_ber(args, settings) -> None:
    cfg = shaping_config(settings)
    if any(cfg.needed_baselines()):
        cfg = with_baselines(cfg, seed=settings["seed"])
    curve = link.ber_experiment(cfg, settings["snr_grid"], settings["trials"], settings["seed"],
                                shaped=not args.unshaped)
    _emit(args, curve.to_csv)


COMMANDS = {"shape": cmd_shape, "trials": cmd_trials, "cdf": cmd_cdf, "sweep": cmd_sweep, "ber": cmd_ber}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or YAML config file")
    common.add_argument("--out", help="output file (directory for 'shape'); stdout if omitted")
    common.add_argument("--n-subcarriers", dest="n_subcarriers", type=int)
    common.add_argument("--constellation")
    common.add_argument("--code", help="octal generators, e.g. 5,7")
    common.add_argument("--m-s", dest="m_s", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--n0", type=int)
    common.add_argument("--epsilon", type=float)
    common.add_argument("--papr-mode", dest="papr_mode", choices=["incremental", "thresholded", "combined"])
    common.add_argument("--trials", type=int, help="trials (symbols for 'ber')")
    common.add_argument("--seed", type=int)

    p = argparse.ArgumentParser(prog="trellis-isac", description="Trellis shaping benchmarks for OFDM ISAC.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("shape", parents=[common], help="shape one symbol and write profile tables")
    t = sub.add_parser("trials", parents=[common], help="shaped vs unshaped Monte-Carlo trials")
    t.add_argument("--matrix", action="store_true", help="summary over the default N_s x constellation matrix")
    t.add_argument("--symbols", help="also save shaped/unshaped symbols to this .npz file")
    c = sub.add_parser("cdf", parents=[common], help="ISL/PAPR CDFs over group sizes")
    c.add_argument("--m-s-list", dest="m_s_list", type=_ints)
    s = sub.add_parser("sweep", parents=[common], help="improvement ratios over alpha")
    s.add_argument("--alpha-grid", dest="alpha_grid", type=_floats)
    b = sub.add_parser("ber", parents=[common], help="BER over an SNR grid")
    b.add_argument("--snr-grid", dest="snr_grid", type=_floats)
    b.add_argument("--unshaped", action="store_true", help="transmit unshaped symbols")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = resolve_settings(args)
        COMMANDS[args.command](args, settings)
    except (TrellisError, ValueError) as exc:
        print(f"trellis-isac: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
