"""Command-line surface.

Subcommands: simulate (one path to field images), verify (exactness
checks on one path), mc (replicate studies), schedule (print derived
run sizes), conjecture (two-path joint statistic).  Exit codes: 0 ok,
2 configuration error, 3 verification assertion failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import io
from .io import ConfigError
from .measures import constant_fn, gaussian_bump, occupation_measure
from .montecarlo import (McConfig, pair_moment_table, run_replicates,
                         scaling_check, tail_table)
from .sampling import sample_bm
from .verify import (ParamSet, additivity_report, decomposition_fields,
                     joint_threshold_statistic, make_schedule,
                     occupation_discrepancy, rate_bound, sandwich_report,
                     validate_params)
from .winding import GridSpec, WindingField, arc_cut_indices, close_path, winding_field

# the worked example of a valid parameter set; mc studies that need
# exponents but take none from flags use it
DEFAULT_PARAMS = ParamSet(t=0.2, alpha=0.25, m=0.7, zeta=0.2, s=0.1,
                          delta=0.3, gamma=6.0)


class VerifyFailure(Exception):
    """An exactness assertion failed on valid input (exit code 3)."""


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="windloop",
        description="Winding-number fields of sampled planar loops")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--outdir", help="output directory "
                       f"(default ${io.ENV_OUTDIR} or ./windloop_out)")

    p = sub.add_parser("simulate", help="one path -> field images")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--scale", type=int)
    p.add_argument("--band-eps", type=float, dest="band_eps")

    p = sub.add_parser("verify", help="exactness checks on one path")
    common(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--T", type=int, dest="T")
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--M", type=int, dest="M")
    p.add_argument("--grid", type=int)

    p = sub.add_parser("mc", help="replicate studies")
    common(p)
    p.add_argument("--study", choices=("werner", "tail", "pairmoment", "scaling"))
    p.add_argument("--master-seed", type=int, dest="master_seed")
    p.add_argument("--replicates", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--N", type=int, nargs="+", dest="n_values")
    p.add_argument("--threads", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--R-values", type=float, nargs="+", dest="r_values")
    p.add_argument("--T-values", type=int, nargs="+", dest="t_values")
    p.add_argument("--M-values", type=int, nargs="+", dest="m_values")
    p.add_argument("--T", type=int, dest="T")
    p.add_argument("--eta-variant", choices=("paper", "positive"),
                   dest="eta_variant")

    p = sub.add_parser("schedule", help="print derived run sizes")
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--N", type=int, dest="N")
    p.add_argument("--t", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--zeta", type=float)
    p.add_argument("--s", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--variant", choices=("paper", "positive"))

    p = sub.add_parser("conjecture", help="two-path joint winding study")
    common(p)
    p.add_argument("--seed1", type=int)
    p.add_argument("--seed2", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--N", type=int, nargs="+", dest="n_values")
    return ap


def _merged(args, defaults: dict) -> dict:
    return io.merged_config(vars(args), defaults)


def _need(cfg: dict, key: str):
    if cfg.get(key) is None:
        raise ConfigError(f"missing required setting --{key.replace('_', '-')}")
    return cfg[key]


def _outdir(cfg: dict) -> Path:
    d = cfg.get("outdir")
    out = io.default_outdir() if d is None else Path(d)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_simulate(args) -> int:
    cfg = _merged(args, {"seed": 1, "levels": 12, "grid": 512, "scale": 8})
    path = sample_bm(int(cfg["seed"]), int(cfg["levels"]))
    loop = close_path(path)
    grid = GridSpec.cover(loop.bounding_box(), int(cfg["grid"]))
    fld = winding_field(loop, grid, cfg.get("band_eps"))
    occ = occupation_measure(path, grid)
    out = _outdir(cfg)
    out_paths = []
    out_paths.append(io.export_field_pgm(fld, f"{out}/theta.pgm",
                                         scale=int(cfg["scale"])))
    mask_field = WindingField(grid=grid,
                              theta=fld.on_curve.astype(np.int32) * 127,
                              on_curve=fld.on_curve, band_eps=fld.band_eps)
    out_paths.append(io.export_field_pgm(mask_field, f"{out}/oncurve.pgm",
                                         scale=1))
    occ_gray = occ.mass / occ.mass.max() if occ.mass.max() > 0 else occ.mass
    occ_field = WindingField(grid=grid,
                             theta=np.rint(occ_gray * 127).astype(np.int32),
                             on_curve=np.zeros_like(fld.on_curve),
                             band_eps=0.0)
    out_paths.append(io.export_field_pgm(occ_field, f"{out}/occupation.pgm",
                                         scale=1))
    manifest = io.build_manifest({k: cfg.get(k) for k in
                                  ("seed", "levels", "grid", "scale", "band_eps")},
                                 out_paths)
    io.write_json(f"{out}/manifest.json", manifest.as_dict())
    print(f"wrote {len(out_paths) + 1} files under {out}")
    return 0


def _cmd_verify(args) -> int:
    cfg = _merged(args, {"seed": 1, "levels": 14, "grid": 512})
    T = int(_need(cfg, "T"))
    N = int(_need(cfg, "N"))
    M = int(_need(cfg, "M"))
    levels = int(cfg["levels"])
    n_steps = 1 << levels
    if T < 1 or n_steps % T != 0:
        raise ConfigError(f"T={T} does not divide 2^{levels} steps")
    if T * (M + 1) >= N:
        raise ConfigError(f"need T(M+1) < N, got {T}*({M}+1) >= {N}")
    path = sample_bm(int(cfg["seed"]), levels)
    loop = close_path(path)
    grid = GridSpec.cover(loop.bounding_box(), int(cfg["grid"]))
    df = decomposition_fields(path.points, arc_cut_indices(n_steps, T), grid)

    failures = 0
    add = additivity_report(df)
    print(f"additivity: {'PASS' if add.holds else 'FAIL'} "
          f"({add.violations} violations over {add.n_cells_checked} cells)")
    failures += 0 if add.holds else 1

    sw = sandwich_report(df, N, M, constant_fn(1.0))
    print(f"sandwich N={N} T={T} M={M}: {'PASS' if sw.holds else 'FAIL'} "
          f"(lower={sw.lower:.6g} center={sw.center:.6g} upper={sw.upper:.6g}, "
          f"pointwise {sw.pointwise_lower_violations}/{sw.pointwise_upper_violations})")
    failures += 0 if sw.holds else 1

    f = gaussian_bump()
    disc = occupation_discrepancy(path, df.main, f, N)
    rb = rate_bound(path, f, N, DEFAULT_PARAMS, field=df.main)
    print(f"discrepancy f={f.name} N={N}: {disc.off_curve:.6g} "
          f"(bound {rb.bound:.6g}, ratio {rb.ratio:.6g})")

    out = _outdir(cfg)
    io.write_json(f"{str(out)}/verify.json", {
        "config": {k: cfg.get(k) for k in ("seed", "levels", "T", "N", "M", "grid")},
        "additivity": asdict(add),
        "sandwich": asdict(sw),
        "discrepancy": {"f": f.name, "off_curve": disc.off_curve,
                        "inclusive": disc.inclusive,
                        "bound": rb.bound, "ratio": rb.ratio},
    })
    if failures:
        raise VerifyFailure(f"{failures} verification check(s) failed")
    return 0


def _mc_config(cfg: dict) -> McConfig:
    return McConfig(
        master_seed=int(cfg.get("master_seed", 1)),
        replicates=int(cfg.get("replicates", 8)),
        levels=int(cfg.get("levels", 14)),
        grid_n=int(cfg.get("grid", 512)),
        n_values=tuple(cfg.get("n_values") or (4, 8, 16)),
        params=DEFAULT_PARAMS,
        eta_variant=cfg.get("eta_variant") or "positive",
        threads=int(cfg.get("threads", 1)),
        functions=(constant_fn(1.0), gaussian_bump()),
    )


def _cmd_mc(args) -> int:
    cfg = _merged(args, {})
    study = _need(cfg, "study")
    mc = _mc_config(cfg)
    out = _outdir(cfg)
    echo = {"study": study, "master_seed": mc.master_seed,
            "replicates": mc.replicates, "levels": mc.levels,
            "grid": mc.grid_n, "n_values": list(mc.n_values),
            "threads": mc.threads, "eta_variant": mc.eta_variant}

    if study == "werner":
        summary = run_replicates(mc)
        wrows, trows = [], []
        for r in range(mc.replicates):
            for k, n in enumerate(mc.n_values):
                wrows.append((n, r, summary.stat_off[r, k],
                              summary.stat_inc[r, k]))
        for k, n in enumerate(mc.n_values):
            for q, fname in enumerate(summary.f_names):
                d = float(np.median(summary.discrepancy[:, k, q]))
                b = float(np.median(summary.bound[:, k, q]))
                trows.append((n, fname, d, b, d / b if b > 0 else math.inf))
        paths = io.export_tables(out, werner_rows=wrows, theorem_rows=trows,
                                 manifest_config=echo)
        io.export_field_pgm(summary.first_field, f"{str(out)}/field_r0.pgm")
        for row in summary.per_n("off"):
            print(f"N={row['N']}: mean={row['mean']:.4f} "
                  f"l2_error={row['l2_error']:.4f} "
                  f"ci=+-{row['ci_halfwidth']:.4f}")
        print(f"wrote {len(paths) + 1} files under {out}")
    elif study == "tail":
        delta = float(cfg.get("delta", 0.3))
        r_values = cfg.get("r_values") or [0.0, 0.5, 1.0, 2.0, 4.0]
        rows = []
        for n in mc.n_values:
            for rv, p in tail_table(mc, n, delta, r_values):
                rows.append((n, rv, p))
                print(f"N={n} R={rv:g}: ccdf={p:.4f}")
        io.export_tables(out, tail_rows=rows, manifest_config=echo)
    elif study == "pairmoment":
        t_values = cfg.get("t_values") or [4]
        m_values = cfg.get("m_values") or [1, 2, 4]
        rows = [(row["T"], row["M"], row["estimate"], row["stderr"])
                for row in pair_moment_table(mc, t_values, m_values)]
        for t, m, est, se in rows:
            print(f"T={t} M={m}: estimate={est:.6g} stderr={se:.6g}")
        io.export_tables(out, pair_rows=rows, manifest_config=echo)
    else:   # scaling
        T = int(cfg.get("T", 4))
        reports = {}
        for n in mc.n_values:
            rep = scaling_check(mc, T, n)
            reports[str(n)] = asdict(rep)
            print(f"T={T} N={n}: ks={rep.ks:.4f} "
                  f"critical(1%)={rep.critical_1pct:.4f} "
                  f"{'compatible' if rep.compatible else 'INCOMPATIBLE'}")
        paths = io.export_tables(out, manifest_config=echo)
        io.write_json(f"{str(out)}/scaling.json", {"T": T, "reports": reports})
    return 0


def _cmd_schedule(args) -> int:
    cfg = _merged(args, {"t": 0.2, "alpha": 0.25, "m": 0.7, "zeta": 0.2,
                         "s": 0.1, "delta": 0.3, "gamma": 6.0,
                         "variant": "positive"})
    p = ParamSet(t=float(cfg["t"]), alpha=float(cfg["alpha"]),
                 m=float(cfg["m"]), zeta=float(cfg["zeta"]),
                 s=float(cfg["s"]), delta=float(cfg["delta"]),
                 gamma=float(cfg["gamma"]))
    bad = validate_params(p)
    if bad:
        raise ConfigError("invalid params: " + "; ".join(bad))
    N = int(_need(cfg, "N"))
    sched = make_schedule(N, p, cfg["variant"])
    print(f"N={sched.N} T={sched.T} M={sched.M} "
          f"N'={sched.n_prime} eta={sched.eta:.6g} variant={sched.variant}")
    return 0


def _cmd_conjecture(args) -> int:
    cfg = _merged(args, {"seed1": 1, "seed2": 2, "levels": 14, "grid": 512,
                         "n_values": [2, 4, 8, 16]})
    p1 = sample_bm(int(cfg["seed1"]), int(cfg["levels"]))
    p2 = sample_bm(int(cfg["seed2"]), int(cfg["levels"]))
    both = np.concatenate([p1.points, p2.points])
    bounds = (both[:, 0].min(), both[:, 1].min(),
              both[:, 0].max(), both[:, 1].max())
    grid = GridSpec.cover(bounds, int(cfg["grid"]))
    rows = []
    for n in cfg["n_values"]:
        stat = joint_threshold_statistic(p1, p2, int(n), grid)
        rows.append({"N": int(n), "statistic": stat,
                     "area": stat / float(n) ** 2})
        print(f"N={n}: N^2*area={stat:.6g}")
    areas = [r["area"] for r in rows]
    ns = [r["N"] for r in rows]
    pos = [(math.log(n), math.log(a)) for n, a in zip(ns, areas) if a > 0]
    slope = math.nan
    if len(pos) >= 2:
        lx, ly = zip(*pos)
        slope = float(np.polyfit(lx, ly, 1)[0])
        print(f"log-log slope of area vs N: {slope:.3f}")
    out = _outdir(cfg)
    io.write_json(f"{str(out)}/conjecture.json",
                  {"seeds": [int(cfg["seed1"]), int(cfg["seed2"])],
                   "levels": int(cfg["levels"]), "grid": int(cfg["grid"]),
                   "rows": rows, "slope": slope})
    return 0


_COMMANDS = {"simulate": _cmd_simulate, "verify": _cmd_verify, "mc": _cmd_mc,
             "schedule": _cmd_schedule, "conjecture": _cmd_conjecture}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except VerifyFailure as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
