"""Bit-exact output formats and run configuration.

Every number crossing a file boundary uses 17 significant digits, which
round-trips binary64 exactly.  Nothing written here depends on wall
time, hostnames or iteration order, so re-running a config reproduces
every byte; the manifest records sha256 checksums to make that claim
checkable.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .winding import WindingField

ENV_OUTDIR = "WINDLOOP_OUTDIR"

WERNER_HEADER = "N,replicate,stat_offcurve,stat_inclusive"
THEOREM_HEADER = "N,f_name,discrepancy,bound,ratio"
TAIL_HEADER = "N,R,ccdf"
PAIRMOMENT_HEADER = "T,M,estimate,stderr"


class ConfigError(Exception):
    """Bad or inconsistent run configuration (CLI exit code 2)."""


def fmt17(x) -> str:
    """Decimal serialization that round-trips float64 exactly."""
    return format(float(x), ".17g")


def default_outdir() -> Path:
    return Path(os.environ.get(ENV_OUTDIR, "windloop_out"))


def export_field_pgm(fld: WindingField, path, scale: int = 8,
                     on_curve_white: bool = False) -> Path:
    """Plain PGM heatmap: gray = clamp(128 + theta*scale, 0, 255), rows
    written top to bottom in decreasing y.  With on_curve_white the
    near-curve cells are forced to 255."""
    if scale < 1:
        raise ValueError("scale must be >= 1")
    path = Path(path)
    gray = np.clip(128 + fld.theta.astype(np.int64) * scale, 0, 255)
    if on_curve_white:
        gray = np.where(fld.on_curve, 255, gray)
    rows = gray[::-1]
    lines = ["P2", f"{fld.grid.nx} {fld.grid.ny}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_pgm(path) -> np.ndarray:
    """Read back a plain PGM written by export_field_pgm: (ny, nx) gray
    values with row 0 at the top (decreasing y)."""
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    nx, ny, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    vals = np.array(tokens[4:4 + nx * ny], dtype=np.int64)
    if vals.size != nx * ny or maxval != 255:
        raise ValueError("malformed PGM body")
    return vals.reshape(ny, nx)


def _format_rows(rows, formats) -> list[list[str]]:
    return [[fmt(v) for fmt, v in zip(formats, row)] for row in rows]


def _write_csv(path: Path, header: str, formatted: list[list[str]]) -> Path:
    lines = [header] + [",".join(row) for row in formatted]
    path.write_text("\n".join(lines) + "\n")
    return path


def export_tables(out_dir, werner_rows=(), theorem_rows=(), tail_rows=(),
                  pair_rows=(), manifest_config: dict | None = None) -> dict:
    """Write the four CSV tables (header-only when empty) plus a JSON
    summary mirroring them, with the run manifest checksums inside.

    Row shapes: werner (N, replicate, stat_off, stat_inc); theorem
    (N, f_name, discrepancy, bound, ratio); tail (N, R, ccdf);
    pairmoment (T, M, estimate, stderr).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s = str
    formatted = {
        "werner": _format_rows(werner_rows, (s, s, fmt17, fmt17)),
        "theorem": _format_rows(theorem_rows, (s, s, fmt17, fmt17, fmt17)),
        "tail": _format_rows(tail_rows, (s, fmt17, fmt17)),
        "pairmoment": _format_rows(pair_rows, (s, s, fmt17, fmt17)),
    }
    headers = {"werner": WERNER_HEADER, "theorem": THEOREM_HEADER,
               "tail": TAIL_HEADER, "pairmoment": PAIRMOMENT_HEADER}
    paths = {name: _write_csv(out / f"{name}.csv", headers[name], formatted[name])
             for name in ("werner", "theorem", "tail", "pairmoment")}
    summary = {
        "tables": formatted,
        "manifest": build_manifest(manifest_config or {}, paths.values()).as_dict(),
    }
    summary_path = out / "summary.json"
    write_json(summary_path, summary)
    paths["summary"] = summary_path
    return paths


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def sha256_file(path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce and then check a run's outputs."""

    config: dict
    version: str
    master_seed: int | None
    checksums: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"config": self.config, "version": self.version,
                "master_seed": self.master_seed, "checksums": self.checksums}


def build_manifest(config: dict, output_paths) -> RunManifest:
    checks = {Path(p).name: sha256_file(p) for p in sorted(map(str, output_paths))}
    return RunManifest(config=config, version=__version__,
                       master_seed=config.get("master_seed"),
                       checksums=checks)


def load_config(path) -> dict:
    """Read a JSON config document; missing file or bad JSON is a
    configuration error."""
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config document must be a JSON object")
    return cfg


def merged_config(args_dict: dict, defaults: dict) -> dict:
    """defaults <- JSON config file <- explicit CLI flags, later wins."""
    cfg = dict(defaults)
    path = args_dict.get("config")
    if path:
        cfg.update(load_config(path))
    for k, v in args_dict.items():
        if k != "config" and v is not None:
            cfg[k] = v
    return cfg
