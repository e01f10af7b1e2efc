"""Command-line runner.

    multicat run CONFIG [--seed N] [--out DIR] [--threads K]
    multicat validate CONFIG

Each run writes ``<name>.csv`` (data) and ``<name>.json`` (resolved config,
version, seed, timestamp). Exit codes: 0 success, 2 invalid config, 3 a size
cap was exceeded, 4 the integrator lost positivity.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, validate_config
from .constants import CAPS, Caps
from .errors import CapExceededError, PositivityError
from .master_eq import lindblad_qfi_curve
from .nv_model import DisorderModel, SpinGeometry, couplings_from_positions, disorder_sample, load_geometry, \
    ring_positions, NM
from .protocol import ProtocolParams, sample_trajectory
from .qfi import (asymptotic_qfi, avg_qfi_brute, avg_qfi_exact, avg_qfi_exact_sym, avg_qfi_mc,
                  disorder_averaged_curve, jz_mean_batch, pure_qfi_jz)

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r!r} does not match columns {self.columns}")


def format_cell(v) -> str:
    """Shortest round-trip text for floats, plain text otherwise."""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_table(table: ResultTable, out_dir: Path, name: str) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out_dir / f"{name}.csv", out_dir / f"{name}.json"
    with csv_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([format_cell(v) for v in row])
    json_path.write_text(json.dumps(table.metadata, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


@contextmanager
def _caps_from(cfg: ExperimentConfig):
    saved = vars(CAPS).copy()
    for name in Caps.__dataclass_fields__:
        setattr(CAPS, name, cfg[f"caps.{name}"])
    try:
        yield
    finally:
        for k, v in saved.items():
            setattr(CAPS, k, v)


def _rep(cfg):
    r = cfg["representation"]
    return None if r == "auto" else r


def protocol_params(cfg: ExperimentConfig) -> ProtocolParams:
    M, phi = cfg["protocol.M"], cfg["protocol.phi"]
    if "protocol.couplings" in cfg.settings:
        return ProtocolParams(tuple(cfg["protocol.couplings"]), phi)
    if "protocol.alpha" in cfg.settings:
        return ProtocolParams.uniform(cfg["protocol.alpha"], phi, M)
    model = DisorderModel(cfg["disorder.mean"], cfg["disorder.sigma"])
    return ProtocolParams(tuple(disorder_sample(model, M, cfg.seed)), phi)


def _pmap(fn, items, threads):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _run_sample(cfg, threads):
    params = protocol_params(cfg)
    n = cfg["protocol.n"]

    def one(i):
        t = sample_trajectory(params, n, cfg.seed, index=i, rep=_rep(cfg))
        rec = "".join("+" if s > 0 else "-" for s in t.record)
        jz = float(jz_mean_batch(t.state.vec[None, :], params.M, t.state.rep)[0])
        return (i, rec, t.log_probability, pure_qfi_jz(t.state), jz)

    return ["trajectory", "record", "log_probability", "qfi", "jz_mean"], \
        _pmap(one, range(cfg["sample.count"]), threads)


def _run_exact(cfg, threads):
    curve = avg_qfi_exact(protocol_params(cfg), cfg["protocol.n"])
    return ["n", "h", "fq_exact"], list(zip(curve.cycles.tolist(), curve.h_values, curve.values))


def _run_mc(cfg, threads):
    params = protocol_params(cfg)
    n = cfg["protocol.n"]
    est, err = avg_qfi_mc(params, n, cfg["mc.samples"], cfg.seed, rep=_rep(cfg))
    exact = avg_qfi_exact(params, n).final
    return ["n", "samples", "fq_mc", "fq_stderr", "fq_exact"], [(n, cfg["mc.samples"], est, err, exact)]


def _run_brute(cfg, threads):
    params = protocol_params(cfg)
    n = cfg["protocol.n"]
    return ["n", "fq_brute", "fq_exact"], \
        [(n, avg_qfi_brute(params, n, rep=_rep(cfg)), avg_qfi_exact(params, n).final)]


def _run_master(cfg, threads):
    mean = cfg.get("protocol.alpha", cfg.get("disorder.mean"))
    steps = None if cfg["master.steps"] == "auto" else cfg["master.steps"]
    t, proxy = lindblad_qfi_curve(mean, cfg["disorder.sigma"], cfg["protocol.M"], cfg["protocol.phi"],
                                  cfg["protocol.n"], cfg["master.dt"], steps, cfg["master.collective"],
                                  cfg["master.record_every"])
    return ["n", "qfi_proxy"], list(zip(t, proxy))


def _run_fig2(cfg, threads):
    n, phi = cfg["protocol.n"], cfg["protocol.phi"]
    points = [(a, M) for a in cfg["sweep.alpha"] for M in cfg["sweep.M"]]

    def one(pt):
        a, M = pt
        return (a, M, n, avg_qfi_exact_sym(a, phi, M, n).final, asymptotic_qfi(M, True))

    return ["alpha", "M", "n", "fq_exact", "fq_asymptote"], _pmap(one, points, threads)


def _run_fig3(cfg, threads):
    M, n, phi = cfg["protocol.M"], cfg["protocol.n"], cfg["protocol.phi"]

    def one(sigma):
        mean, err = disorder_averaged_curve(cfg["disorder.mean"], sigma, M, phi, n,
                                            cfg["disorder.realizations"], cfg.seed)
        return [(sigma, q, mean[q], err[q]) for q in range(n + 1)]

    blocks = _pmap(one, cfg["sweep.sigma"], threads)
    return ["sigma", "n", "fq_mean", "fq_stderr"], [r for b in blocks for r in b]


def _run_couplings(cfg, threads):
    if "geometry.file" in cfg.settings:
        geom = load_geometry(cfg["geometry.file"])
    else:
        pos = ring_positions(cfg["geometry.ring_count"], cfg["geometry.ring_radius_nm"],
                             cfg["geometry.ring_height_nm"]) * NM
        geom = SpinGeometry(pos)
    cs = couplings_from_positions(geom, cfg["geometry.tau_cycle"])
    rows = [(m, *(geom.positions[m] / NM), cs.betas[m], cs.frame_angles[m], cs.alphas[m])
            for m in range(geom.M)]
    return ["index", "x_nm", "y_nm", "z_nm", "beta", "frame_angle", "alpha"], rows


DISPATCH = {
    "sample": _run_sample,
    "avg-qfi-exact": _run_exact,
    "avg-qfi-mc": _run_mc,
    "brute": _run_brute,
    "master-eq": _run_master,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "couplings": _run_couplings,
}


def run(cfg: ExperimentConfig, threads: int = 1) -> ResultTable:
    """Execute a resolved config and return its table (nothing written)."""
    with _caps_from(cfg):
        columns, rows = DISPATCH[cfg.mode](cfg, threads)
    meta = {
        "config": cfg.to_dict(),
        "version": __version__,
        "seed": cfg.seed,
        "columns": columns,
        "rows": len(rows),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return ResultTable(columns, [tuple(r) for r in rows], meta)


def _load(path) -> tuple[ExperimentConfig | None, list[str]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        return None, [f"{path}: {exc.strerror}"]
    cfg, diags = validate_config(text)
    # relative geometry files are found next to the config
    if cfg is not None and "geometry.file" in cfg.settings:
        cfg.settings["geometry.file"] = str(Path(path).parent / cfg["geometry.file"])
    return cfg, diags


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="multicat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int)
    p_run.add_argument("--out", help="output directory (default: $MULTICAT_OUT or ./results)")
    p_run.add_argument("--threads", type=int, default=1)
    p_val = sub.add_parser("validate", help="check a config and print it fully resolved")
    p_val.add_argument("config")
    args = parser.parse_args(argv)

    cfg, diags = _load(args.config)
    if cfg is None:
        for d in diags:
            print(f"{args.config}: {d}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "validate":
        for k, v in cfg.to_dict().items():
            print(f"{k} = {v!r}" if isinstance(v, str) else f"{k} = {v}")
        return EXIT_OK

    if args.seed is not None:
        cfg.settings["seed"] = args.seed
    if args.out is not None:
        cfg.settings["output.dir"] = args.out
    try:
        table = run(cfg, max(1, args.threads))
    except CapExceededError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except PositivityError as exc:
        print(f"integration aborted: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    csv_path, _ = write_table(table, Path(cfg["output.dir"]), cfg["output.name"])
    print(csv_path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
