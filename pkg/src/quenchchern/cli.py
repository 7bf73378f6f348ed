"""Command-line runner: ``quenchchern run|sweep|list-configs|version``."""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .analysis.charges import topological_charges
from .analysis.process import classify_process
from .analysis.rings import WindingError, annotate_windings, find_rings
from .analysis.sweeps import sweep_g, sweep_tso
from .config import ConfigError, ExperimentConfig, SweepSpec, bundled_configs, load_config
from .dynamics import EvolutionError, tasp_grid
from .io import write_json, write_rows_csv, write_tasp_csv, write_tasp_images
from .model import ModelError

EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_COMPUTE = 4


@dataclass
class RunReport:
    config: dict
    version: str = __version__
    rings: list[dict] = field(default_factory=list)
    process: dict | None = None
    charges: dict | None = None
    sweep: list[dict] | None = None
    timing: dict = field(default_factory=dict)
    files: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def _ring_summary(r) -> dict:
    c = r.centroid()
    return {"kind": r.kind, "winding": r.winding, "mean_inplane": r.mean_inplane,
            "closed": r.closed, "ambiguous": r.ambiguous, "centroid": [float(c[0]), float(c[1])],
            "n_points": int(len(r.points)), "notes": list(r.notes)}


def _grid_kw(cfg: ExperimentConfig) -> dict:
    return {"full_integration": cfg.full_integration, "switch_factor": cfg.switch_factor,
            "tol": cfg.tol, "threads": cfg.threads}


def _g_rows(rows) -> list[dict]:
    def join(v):
        return ";".join(f"{x:.9g}" for x in v)

    out = []
    for r in rows:
        sep = r.fsis_isis_separation() if r.error is None else None
        out.append({"g": r.g, "t_int": r.t_int,
                    "bis": join(r.positions("BIS", positive=False)),
                    "fsis": join(r.positions("FSIS", positive=False)),
                    "isis": join(r.positions("ISIS", positive=False)),
                    "fsis_isis_separation": "" if sep is None else f"{sep:.9g}",
                    "grid_kinds": "" if r.grid_kinds is None else ";".join(r.grid_kinds),
                    "error": r.error or ""})
    return out


def _tso_rows(rows) -> list[dict]:
    out = []
    for r in rows:
        out.append({"t_so": r.t_so, "n_rings": "" if r.n_rings is None else r.n_rings,
                    "n_pieces": "" if r.n_pieces is None else r.n_pieces,
                    "kinds": ";".join(r.kinds or []),
                    "windings": ";".join("" if w is None else str(w) for w in (r.windings or [])),
                    "label": r.label or "", "unclassifiable": r.unclassifiable,
                    "error": r.error or ""})
    return out


def run_sweep(cfg: ExperimentConfig, spec: SweepSpec) -> list[dict]:
    kw = _grid_kw(cfg)
    if spec.axis == "g":
        rows = sweep_g(cfg.params, spec.values, m_initial=spec.m_initial, n_line=spec.n_line,
                       coarse_n=spec.coarse_n, **kw)
        return _g_rows(rows)
    rows = sweep_tso(cfg.params, spec.values, grid_n=spec.grid_n or cfg.grid_n, **kw)
    return _tso_rows(rows)


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None) -> RunReport:
    """Run the requested pipeline and write its outputs into ``out_dir``."""
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = RunReport(config=cfg.to_dict())
    t_start = time.perf_counter()
    wanted = set(cfg.outputs)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        grid_outputs = wanted & {"tasp_grid", "rings", "windings", "charges", "process_class"}
        if grid_outputs:
            t0 = time.perf_counter()
            grid = tasp_grid(cfg.params, cfg.grid_n, **_grid_kw(cfg))
            report.timing["tasp_grid"] = time.perf_counter() - t0
            if "tasp_grid" in wanted:
                write_tasp_csv(grid, out / "tasp.csv")
                report.files.append("tasp.csv")
                if cfg.images:
                    report.files += [p.name for p in write_tasp_images(grid, out)]
            if grid_outputs - {"tasp_grid"}:
                t0 = time.perf_counter()
                rings = find_rings(grid)
                if wanted & {"windings", "process_class", "charges"}:
                    annotate_windings(rings, grid)
                report.rings = [_ring_summary(r) for r in rings]
                write_json([r.to_dict() for r in rings], out / "rings.json")
                report.files.append("rings.json")
                if "process_class" in wanted:
                    report.process = classify_process(rings).to_dict()
                if "charges" in wanted:
                    report.charges = topological_charges(cfg.params, rings, grid.spacing).to_dict()
                report.timing["analysis"] = time.perf_counter() - t0
        for kind in ("g_sweep", "tso_sweep"):
            if kind in wanted:
                t0 = time.perf_counter()
                rows = run_sweep(cfg, cfg.sweep)
                write_rows_csv(rows, out / f"{kind}.csv")
                report.files.append(f"{kind}.csv")
                report.sweep = rows
                report.timing[kind] = time.perf_counter() - t0
    report.warnings = sorted({str(w.message) for w in caught if "quenchchern" in w.filename})
    report.timing["total"] = time.perf_counter() - t_start
    report.files.append("report.json")
    (out / "report.json").write_text(report.to_json() + "\n")
    return report


def _parse_values(text: str) -> list[float]:
    vals = [v for v in text.replace(" ", "").split(",") if v]
    if not vals:
        raise ConfigError("empty values list")
    try:
        return [float(v) for v in vals]
    except ValueError as exc:
        raise ConfigError(f"bad sweep value: {exc}") from exc


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    changes = {}
    if args.grid_n is not None:
        changes["grid_n"] = args.grid_n
    if args.threads is not None:
        changes["threads"] = args.threads
    if args.full_integration:
        changes["full_integration"] = True
    return cfg.replace(**changes) if changes else cfg


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quenchchern", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="config file or bundled config name")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--grid-n", type=int, dest="grid_n")
        p.add_argument("--threads", type=int)
        p.add_argument("--full-integration", action="store_true",
                       help="integrate to t_f instead of projecting at t_switch")

    common(sub.add_parser("run", help="run a config"))
    sw = sub.add_parser("sweep", help="sweep g or t_so")
    common(sw)
    sw.add_argument("--axis", choices=["g", "t_so"])
    sw.add_argument("--values", help="comma-separated values")
    sub.add_parser("list-configs", help="list bundled configs")
    sub.add_parser("version", help="print the version")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
            return 0
        if args.command == "list-configs":
            for name in bundled_configs():
                print(name)
            return 0
        cfg = _apply_overrides(load_config(args.config), args)
        out = args.out or cfg.out_dir
        if args.command == "run":
            report = run_experiment(cfg, out)
            for r in report.rings:
                print(f"{r['kind']:5s} winding={r['winding']}")
            if report.process:
                print(f"process: {report.process['label']}")
            print(f"wrote {len(report.files)} files to {out}")
            return 0
        spec = cfg.sweep
        if args.axis or args.values is not None:
            axis = args.axis or (spec.axis if spec else None)
            if axis is None:
                raise ConfigError("--axis is required when the config has no sweep section")
            values = _parse_values(args.values) if args.values is not None else (
                spec.values if spec and spec.axis == axis else [])
            base = asdict(spec) if spec and spec.axis == axis else {}
            base.update(axis=axis, values=values)
            spec = SweepSpec(**base)
        if spec is None:
            raise ConfigError("no sweep section in config and no --axis given")
        outputs = ("g_sweep",) if spec.axis == "g" else ("tso_sweep",)
        cfg = cfg.replace(outputs=list(outputs), sweep=asdict(spec))
        report = run_experiment(cfg, out)
        print(f"{len(report.sweep)} rows written to {Path(out) / (outputs[0] + '.csv')}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (EvolutionError, ModelError, WindingError, ValueError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
