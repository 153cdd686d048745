"""Command-line front end: ``tables``, ``generate``, ``validate``, ``sigma``.

Configuration precedence is command-line flag > JSON config file >
built-in default.  Every output file is accompanied by (or embeds) the
fully resolved configuration.

Exit codes: 0 success, 1 validation failure, 2 configuration or domain
error, 3 budget error.
"""

from __future__ import annotations

import argparse
import dataclasses
import itertools
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .chaos import export_sigma_csv, sigma_window
from .csvio import write_json
from .errors import BudgetError, DomainError, HermiteWaveletError, ResolutionError
from .field import GaussianField
from .hermite_process import (DEFAULT_BAND, DEFAULT_GAUSS, HurstVector, abel_path, approx_path,
                              fbm_path, fullseries_path)
from .meyer_frac import (DEFAULT_DX, DEFAULT_R, DEFAULT_TAPER_ORDER, build_fractional_primitive,
                         build_fractional_scaling, build_scaling_table, build_wavelet_table,
                         dump_table, dump_table_csv, orthonormality_residuals)
from . import validation as V

log = logging.getLogger("hermite_wavelet")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_H = {1: (0.7,), 2: (0.8, 0.85), 3: (0.9, 0.9, 0.9)}

COMMON = {"config": None, "seed": 0, "threads": 1, "out_dir": ".", "h": None, "d": None,
          "R": DEFAULT_R, "dx": DEFAULT_DX, "taper_order": DEFAULT_TAPER_ORDER, "quiet": False}

DEFAULTS = {
    "tables": dict(COMMON, format="binary"),
    "generate": dict(COMMON, rep="approx", J=5, N=4, T=1.0, grid_n=256, B=DEFAULT_BAND,
                     q_range=None, b=1.0, b_prime=1.0, g=1.0, P=None, z_source="pyramid",
                     quad_nodes=DEFAULT_GAUSS, max_terms=5_000_000, out=None),
    "validate": dict(COMMON, suite="all", quick=False, replicas=None, J_range=None, N_range=None,
                     J=None, N=None, T=None, rep="approx"),
    "sigma": dict(COMMON, J=3, k_range="0,3", route="b", P=256, out=None),
}

# execution and location knobs that do not influence results; kept out of
# written outputs so files are byte-identical across thread counts and paths
_RUNTIME_KEYS = ("threads", "quiet", "out", "out_dir", "config")


def recorded(cfg: dict) -> dict:
    """The part of ``cfg`` embedded in output files."""
    return {k: v for k, v in cfg.items() if k not in _RUNTIME_KEYS}


SUITES = ("meyer", "farima", "combinatorics", "chaos", "moments", "fbm", "rate",
          "fullseries-rate", "selfsim", "all")


class ConfigError(HermiteWaveletError, ValueError):
    """Invalid configuration (unknown key, inconsistent values)."""


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="JSON file with default values for any flag")
    p.add_argument("--seed", type=int, default=S, help="seed of the Gaussian field (default 0)")
    p.add_argument("--threads", type=int, default=S, help="worker threads (output is thread-count independent)")
    p.add_argument("--out-dir", dest="out_dir", default=S, help="directory for outputs (default .)")
    p.add_argument("--h", default=S, help="Hurst vector, comma separated, e.g. 0.8,0.85")
    p.add_argument("--d", type=int, default=S, help="order d (selects a default h when --h is absent)")
    p.add_argument("--R", type=float, default=S, help="table half-width (default 32)")
    p.add_argument("--dx", type=float, default=S, help="table step (default 2^-8)")
    p.add_argument("--taper-order", dest="taper_order", type=int, default=S,
                   help="order of the Meyer taper polynomial (default 7)")
    p.add_argument("--quiet", action="store_true", default=S, help="suppress the configuration log")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="hermite-wavelet", allow_abbrev=False,
                                     description="Wavelet-based simulation of generalized Hermite processes.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tables", allow_abbrev=False, help="build and dump function tables")
    _common(p)
    p.add_argument("--format", choices=("binary", "csv"), default=S)

    p = sub.add_parser("generate", allow_abbrev=False, help="generate one sample path")
    _common(p)
    p.add_argument("--rep", choices=("approx", "abel", "fbm", "fullseries"), default=S)
    p.add_argument("--J", type=int, default=S, help="resolution level (approx/abel/fbm)")
    p.add_argument("--N", type=int, default=S, help="truncation index (fullseries)")
    p.add_argument("--T", type=float, default=S, help="time horizon")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=S, help="number of grid intervals")
    p.add_argument("--B", type=int, default=S, help="relative-offset band")
    p.add_argument("--q-range", dest="q_range", default=S, help="k_1 range 'lo,hi'")
    p.add_argument("--b", type=float, default=S)
    p.add_argument("--b-prime", dest="b_prime", type=float, default=S)
    p.add_argument("--g", type=float, default=S)
    p.add_argument("--P", type=int, default=S, help="FARIMA lookback for --z-source direct")
    p.add_argument("--z-source", dest="z_source", choices=("pyramid", "direct"), default=S)
    p.add_argument("--quad-nodes", dest="quad_nodes", type=int, default=S,
                   help="Gauss nodes per quadrature cell")
    p.add_argument("--max-terms", dest="max_terms", type=int, default=S)
    p.add_argument("--out", default=S, help="CSV path (default <out-dir>/path-<rep>.csv)")

    p = sub.add_parser("validate", allow_abbrev=False, help="run validation suites")
    _common(p)
    p.add_argument("--suite", choices=SUITES, default=S)
    p.add_argument("--quick", action="store_true", default=S, help="reduced-replica smoke run")
    p.add_argument("--replicas", type=int, default=S)
    p.add_argument("--J-range", dest="J_range", default=S, help="inclusive 'lo,hi'")
    p.add_argument("--N-range", dest="N_range", default=S, help="inclusive 'lo,hi'")
    p.add_argument("--J", type=int, default=S, help="level for fbm / selfsim suites")
    p.add_argument("--N", type=int, default=S, help="truncation for selfsim with --rep fullseries")
    p.add_argument("--T", type=float, default=S)
    p.add_argument("--rep", choices=("approx", "fbm", "fullseries"), default=S,
                   help="representation for the selfsim suite")

    p = sub.add_parser("sigma", allow_abbrev=False, help="export a window of sigma_{J,k}")
    _common(p)
    p.add_argument("--J", type=int, default=S)
    p.add_argument("--k-range", dest="k_range", default=S, help="inclusive 'lo,hi' on every axis")
    p.add_argument("--route", choices=("a", "b"), default=S)
    p.add_argument("--P", type=int, default=S)
    p.add_argument("--out", default=S)
    return parser


def resolve_config(command: str, cli: dict) -> tuple:
    """Merge defaults, config file and flags; return ``(config, sources)``."""
    defaults = DEFAULTS[command]
    file_cfg = {}
    path = cli.get("config")
    if path is not None:
        try:
            file_cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
        if file_cfg.pop("command", command) != command:
            raise ConfigError(f"config file is for another command")
        unknown = sorted(set(file_cfg) - set(defaults) - {"config"})
        if unknown:
            raise ConfigError(f"unknown configuration keys for '{command}': {', '.join(unknown)}")
        file_cfg.pop("config", None)
    cfg, src = {}, {}
    for key, val in defaults.items():
        if key in cli:
            cfg[key], src[key] = cli[key], "cli"
        elif key in file_cfg:
            cfg[key], src[key] = file_cfg[key], "file"
        else:
            cfg[key], src[key] = val, "default"
    return _normalize(command, cfg), src


def _pair(value, name):
    if value is None:
        return None
    if isinstance(value, str):
        parts = [p for p in value.replace("..", ",").split(",") if p.strip()]
    else:
        parts = list(value)
    if len(parts) != 2:
        raise ConfigError(f"{name} must be 'lo,hi'")
    lo, hi = int(parts[0]), int(parts[1])
    if hi < lo:
        raise ConfigError(f"{name} must satisfy lo <= hi")
    return [lo, hi]


def _normalize(command: str, cfg: dict) -> dict:
    d = cfg.get("d")
    if cfg.get("h") is not None:
        hv = HurstVector.parse(cfg["h"])
        if d is not None and int(d) != hv.d:
            raise ConfigError(f"--d {d} does not match the {hv.d} entries of --h")
        cfg["h"], cfg["d"] = list(hv.h), hv.d
    elif d is not None:
        d = int(d)
        if d < 1:
            raise ConfigError("d must be at least 1")
        cfg["h"] = list(DEFAULT_H.get(d, tuple([1 - 0.3 / d] * d)))
        cfg["d"] = d
    if cfg.get("threads", 1) < 1:
        raise ConfigError("threads must be at least 1")
    for key in ("q_range", "J_range", "N_range", "k_range"):
        if key in cfg:
            cfg[key] = _pair(cfg[key], key)
    return cfg


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _h_or_default(cfg, d_default=1):
    if cfg["h"] is None:
        cfg["h"], cfg["d"] = list(DEFAULT_H[d_default]), d_default
    return HurstVector.parse(cfg["h"])


def cmd_tables(cfg: dict) -> int:
    hv = _h_or_default(cfg, 2)
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    R, dx, to = float(cfg["R"]), float(cfg["dx"]), int(cfg["taper_order"])
    phi, psi = build_scaling_table(R, dx, to), build_wavelet_table(R, dx, to)
    tables = [("phi", phi), ("psi", psi)]
    for l, h in enumerate(hv.h, start=1):
        tables.append((f"psi_h-{l}", build_fractional_primitive(h, R, dx, to)))
        tables.append((f"Phi_Delta-{l}", build_fractional_scaling(h - 0.5, R, dx, to)))
    files = []
    for stem, tab in tables:
        if cfg["format"] == "binary":
            path = out / f"{stem}.tab"
            dump_table(dataclasses.replace(tab, params=dict(tab.params, run_config=recorded(cfg))), path)
        else:
            path = out / f"{stem}.csv"
            dump_table_csv(tab, path)
        files.append(path.name)
    res = orthonormality_residuals(phi, psi)
    worst = max(res["phi_phi"], res["phi_psi"], res["psi_psi"])
    report = {"config": recorded(cfg), "files": files, "orthonormality": res, "max_residual": worst,
              "passed": worst < 1e-6,
              "tables": {stem: {"name": t.name, "digest": t.digest(), "tail_L": t.tail_L,
                                "tail_c": t.tail_c, "tail_certified": t.tail_certified,
                                "interp_error": t.interp_error} for stem, t in tables}}
    write_json(out / "tables-report.json", report)
    print(f"wrote {len(files)} tables to {out}: {', '.join(files)}")
    print(f"orthonormality residuals: phi-phi {res['phi_phi']:.2e}, phi-psi {res['phi_psi']:.2e}, "
          f"psi-psi {res['psi_psi']:.2e} (max {worst:.2e})")
    return EXIT_OK if worst < 1e-6 else EXIT_FAIL


def cmd_generate(cfg: dict) -> int:
    rep = cfg["rep"]
    hv = _h_or_default(cfg, 1)
    field = GaussianField(int(cfg["seed"]))
    T, grid_n = float(cfg["T"]), int(cfg["grid_n"])
    tab = dict(R=float(cfg["R"]), dx=float(cfg["dx"]), taper_order=int(cfg["taper_order"]))
    q_range = tuple(cfg["q_range"]) if cfg["q_range"] else None
    if rep == "fullseries":
        if not T > 2:
            raise DomainError(f"--rep fullseries requires T > 2 (got T={T:g})")
        path = fullseries_path(hv, int(cfg["N"]), T, grid_n, field, b=float(cfg["b"]),
                               b2=float(cfg["b_prime"]), g=float(cfg["g"]),
                               n_gauss=int(cfg["quad_nodes"]), max_terms=int(cfg["max_terms"]),
                               threads=int(cfg["threads"]), **tab)
    elif rep == "fbm":
        if hv.d != 1:
            raise DomainError("--rep fbm needs a single Hurst parameter")
        path = fbm_path(hv.h[0], int(cfg["J"]), T, grid_n, field, P=cfg["P"], q_range=q_range,
                        z_source=cfg["z_source"], **tab)
    elif rep == "abel":
        path = abel_path(hv, int(cfg["J"]), T, grid_n, field, B=int(cfg["B"]), q_range=q_range,
                         z_source=cfg["z_source"], P=cfg["P"], **tab)
    else:
        path = approx_path(hv, int(cfg["J"]), T, grid_n, field, B=int(cfg["B"]), q_range=q_range,
                           z_source=cfg["z_source"], P=cfg["P"], n_gauss=int(cfg["quad_nodes"]),
                           threads=int(cfg["threads"]), **tab)
    path.meta["config"] = recorded(cfg)
    out = Path(cfg["out"]) if cfg["out"] else Path(cfg["out_dir"]) / f"path-{rep}.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    side = path.to_csv(out)
    print(f"wrote {out} ({grid_n + 1} rows) and {side}; sup-norm {path.sup_norm():.6g}")
    return EXIT_OK


def _suite_plan(cfg: dict) -> list:
    """List of ``(name, callable)`` for the requested suite(s)."""
    quick = bool(cfg["quick"])
    seed, threads = int(cfg["seed"]), int(cfg["threads"])
    reps = cfg["replicas"]
    suite = cfg["suite"]
    h_user = cfg["h"]

    def r(full, small):
        return int(reps) if reps is not None else (small if quick else full)

    def rng(key, full, small):
        v = cfg[key]
        lo, hi = v if v is not None else (small if quick else full)
        return list(range(lo, hi + 1))

    plan = []
    if suite in ("meyer", "all"):
        hs = sorted(set(h_user or [0.7, 0.8, 0.85, 0.9]))
        plan.append(("meyer", lambda: V.meyer_suite(hs)))
    if suite in ("farima", "all"):
        plan.append(("farima", V.farima_suite))
    if suite in ("combinatorics", "all"):
        plan.append(("combinatorics", V.combinatorics_suite))
    if suite in ("chaos", "all"):
        plan.append(("chaos", lambda: V.chaos_route_suite(cases=200 if quick else 1000, seed=seed)))
    if suite in ("moments", "all"):
        plan.append(("moments", lambda: V.chaos_moment_test(
            seed=seed, n_hermite=10**5 if quick else 10**6, eps_replicas=r(10**5, 10**4),
            sigma_replicas=r(20_000, 4000), quick=quick)))
    if suite in ("fbm", "all"):
        h = (h_user or [0.7])[0]
        plan.append(("fbm", lambda: V.fbm_covariance_test(
            h, J=cfg["J"] or 6, T=cfg["T"] or 1.0, replicas=r(10_000, 2000), seed=seed,
            threads=threads, quick=quick)))
    rate_hs = [h_user] if (h_user and suite != "all") else [list(DEFAULT_H[1]), list(DEFAULT_H[2])]
    if suite in ("rate", "all"):
        for h in rate_hs:
            plan.append((f"rate-d{len(h)}", lambda h=h: V.rate_test(
                h, rng("J_range", (2, 7), (2, 5)), replicas=r(64, 32), seed=seed,
                path_params={"T": cfg["T"]} if cfg["T"] else None, threads=threads, quick=quick)))
    if suite in ("fullseries-rate", "all"):
        fhs = [h_user] if (h_user and suite != "all") else [list(DEFAULT_H[2])]
        for h in fhs:
            plan.append((f"fullseries-rate-d{len(h)}", lambda h=h: V.fullseries_rate_test(
                h, rng("N_range", (2, 6), (2, 5)), replicas=r(64, 32), seed=seed,
                T=cfg["T"] or 2.5, threads=threads, quick=quick)))
    if suite in ("selfsim", "all"):
        shs = [h_user] if (h_user and suite != "all") else [list(DEFAULT_H[d]) for d in (1, 2, 3)]
        for h in shs:
            J = cfg["J"] or (6 if len(h) < 3 else 4)
            if quick and cfg["J"] is None:
                J = min(J, 4 if len(h) < 3 else 3)
            plan.append((f"selfsim-d{len(h)}", lambda h=h, J=J: V.selfsimilarity_test(
                h, representation=cfg["rep"], replicas=r(1000, 200), J=J, N=cfg["N"] or 6,
                seed=seed, threads=threads, quick=quick)))
    return plan


def cmd_validate(cfg: dict) -> int:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    failed = []
    summary = []
    for name, fn in _suite_plan(cfg):
        t = time.perf_counter()
        rep = fn()
        text = rep.to_text()
        print(text, flush=True)
        log.info("suite %s finished in %.1f s", name, time.perf_counter() - t)
        data = dict(rep.to_dict(), config_run=recorded(cfg), quick=bool(cfg["quick"]))
        write_json(out / f"report-{name}.json", data)
        (out / f"report-{name}.txt").write_text(text + "\n")
        if rep.passed is False:
            failed.append(name)
        summary.append({"suite": name, "passed": rep.passed})
    write_json(out / "report-summary.json", {"config": recorded(cfg), "suites": summary,
                                             "failed": failed, "quick": bool(cfg["quick"])})
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return EXIT_FAIL
    print("all asserted checks passed")
    return EXIT_OK


def cmd_sigma(cfg: dict) -> int:
    hv = _h_or_default(cfg, 2)
    lo, hi = cfg["k_range"]
    ks = np.array(list(itertools.product(range(lo, hi + 1), repeat=hv.d)), dtype=np.int64)
    coeffs = sigma_window(int(cfg["J"]), ks, hv.h, GaussianField(int(cfg["seed"])),
                          P=int(cfg["P"]), route=cfg["route"])
    out = Path(cfg["out"]) if cfg["out"] else Path(cfg["out_dir"]) / "sigma.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    export_sigma_csv(coeffs, out)
    write_json(out.with_suffix(".meta.json"), dict(coeffs.meta, J=coeffs.J, route=coeffs.route,
                                                   config=recorded(cfg)))
    print(f"wrote {len(ks)} coefficients to {out}")
    return EXIT_OK


COMMANDS = {"tables": cmd_tables, "generate": cmd_generate, "validate": cmd_validate,
            "sigma": cmd_sigma}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:            # argparse: usage errors exit with 2
        return int(exc.code or 0)
    cli = {k: v for k, v in vars(args).items() if k != "command"}
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        cfg, src = resolve_config(args.command, cli)
        if not cfg.get("quiet"):
            for key in sorted(cfg):
                log.info("config %s = %s [%s]", key, cfg[key], src[key])
        return COMMANDS[args.command](cfg)
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, ResolutionError, ConfigError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main_exit() -> None:
    """Console-script entry point."""
    sys.exit(main())
