"""Command-line front-end.

Subcommands:

* ``evolve``   -- single trajectory (deterministic if all heating rates are 0)
* ``ensemble`` -- seeded Monte Carlo trajectory ensemble
* ``scan``     -- gate-time scan over an (Omega, eta11) grid
* ``check``    -- validity diagnostics (Lamb-Dicke and detuning margins)

Curves and tables are written as CSV (12 significant digits, locale
independent); each run also writes a JSON manifest and every CSV references
the manifest hash on its first line.  Exit codes: 0 ok, 1 validation
failure, 2 runtime failure.
"""

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .analysis import gate_time_scan, standard_observables
from .dynamics import mcwf_trajectory, run_ensemble, trajectory_seed
from .effective import ResonanceError, gate_frequency, gate_time
from .hilbert import internal_ket, product_state
from .model import (config_from_dict, config_to_dict, detuning_margin,
                    lamb_dicke_margin, load_config, thermal_sample)

FMT = "%.12g"


class ConfigError(Exception):
    pass


def _apply_overrides(d, overrides):
    """Apply dotted-path overrides like drive.omega=1.5 to a config dict."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key.path=value")
        path, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = d
        keys = path.split(".")
        for k in keys[:-1]:
            node = node[int(k)] if isinstance(node, list) else node.setdefault(k, {})
        last = keys[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    return d


def _load_cfg(args):
    try:
        with open(args.config) as f:
            d = json.load(f)
        d = _apply_overrides(d, getattr(args, "set", []) or [])
        if getattr(args, "force", False):
            d["ld_action"] = "warn"
        return config_from_dict(d)
    except (OSError, KeyError, ValueError, ConfigError) as exc:
        raise ConfigError(f"cannot load config {args.config}: {exc}") from exc


def _manifest(cfg, master_seed, outputs, extra=None):
    snapshot = {
        "config": config_to_dict(cfg) if cfg is not None else None,
        "artifact_version": __version__,
        "master_seed": master_seed,
    }
    if extra:
        snapshot = {**snapshot, "parameters": {k: v for k, v in extra.items()
                                               if isinstance(v, (str, int, float))}}
    payload = json.dumps(snapshot, sort_keys=True).encode()
    h = hashlib.sha256(payload).hexdigest()[:16]
    manifest = dict(snapshot)
    manifest["manifest_hash"] = h
    manifest["created_unix"] = time.time()
    manifest["outputs"] = outputs
    if extra:
        manifest.update(extra)
    return manifest, h


def _write_csv(path, header, rows, manifest_hash):
    with open(path, "w") as f:
        f.write(f"# manifest={manifest_hash}\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(FMT % v if isinstance(v, float) else str(v)
                             for v in row) + "\n")


def _write_manifest(path, manifest):
    with open(path, "w") as f:
        json.dump(manifest, f, indent=2)


def _psi0_internal(spec):
    try:
        return internal_ket(spec)
    except KeyError as exc:
        raise ConfigError(
            f"unknown initial state {spec!r}; use two of g/e/+/- "
            "or one of cat, bell+, bell-") from exc


def cmd_evolve(args):
    cfg = _load_cfg(args)
    layout = cfg.layout()
    internal = _psi0_internal(args.psi0)
    seed = trajectory_seed(args.seed, 0)
    rng = np.random.default_rng(seed)
    if args.fock is not None:
        fock = [int(x) for x in args.fock.split(",")]
    else:
        fock = [thermal_sample(m.nbar, m.n_max, rng) for m in cfg.modes]
    psi0 = product_state(internal, fock, layout)
    obs = standard_observables(cfg, layout, psi0)
    res = mcwf_trajectory(cfg, psi0, (0.0, args.t_max), rng, dt=args.dt,
                          observables=obs)
    manifest, h = _manifest(cfg, args.seed, [args.out], {
        "command": "evolve", "psi0": args.psi0, "fock": fock,
        "jump_count": res.jump_count, "leakage_max": res.leakage,
        "flagged": res.flagged,
    })
    names = ["bell_plus", "bell_minus", "ref_overlap", "pop_pp", "pop_mm"]
    rows = [[t] + [float(res.observables[n][i]) for n in names] + [float(res.leak_curve[i])]
            for i, t in enumerate(res.times)]
    _write_csv(args.out, ["t"] + names + ["leakage"], rows, h)
    _write_manifest(args.out + ".manifest.json", manifest)
    print(f"wrote {args.out} ({len(res.times)} rows, {res.jump_count} jumps)")
    return 0


def cmd_ensemble(args):
    cfg = _load_cfg(args)
    layout = cfg.layout()
    internal = _psi0_internal(args.psi0)
    factory = lambda psi0: standard_observables(cfg, layout, psi0)
    ens = run_ensemble(cfg, internal, args.n_traj, args.seed, args.t_max,
                       dt=args.dt, observable_factory=factory,
                       workers=args.workers)
    manifest, h = _manifest(cfg, args.seed, [args.out], {
        "command": "ensemble", "psi0": args.psi0, "n_traj": args.n_traj,
        "jump_counts": ens.jump_counts.tolist(),
        "mean_jumps": float(ens.jump_counts.mean()),
        "flagged_fraction": ens.flagged_fraction,
    })
    names = list(ens.means)
    header = ["t"] + [f"{n}_mean" for n in names] + [f"{n}_stderr" for n in names]
    rows = [[t] + [float(ens.means[n][i]) for n in names]
            + [float(ens.stderrs[n][i]) for n in names]
            for i, t in enumerate(ens.times)]
    _write_csv(args.out, header, rows, h)
    _write_manifest(args.out + ".manifest.json", manifest)
    print(f"wrote {args.out} ({args.n_traj} trajectories, "
          f"mean jumps {ens.jump_counts.mean():.1f})")
    return 0


def _parse_grid(spec):
    lo, hi, n = spec.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def cmd_scan(args):
    # the scan uses the two-ion defaults; a config is optional and only
    # contributes the validity factor context
    omega_grid = _parse_grid(args.omega_grid)
    eta_grid = _parse_grid(args.eta_grid)
    rows = gate_time_scan(omega_grid, eta_grid, factor=args.factor)
    cfg = _load_cfg(args) if args.config else None
    manifest, h = _manifest(cfg, None, [args.out], {
        "command": "scan",
        "omega_grid": args.omega_grid, "eta_grid": args.eta_grid,
        "factor": args.factor,
    })
    out_rows = [[r.omega, r.eta11, r.tau1, r.margin,
                 str(r.passed).lower(), str(r.valid).lower()] for r in rows]
    _write_csv(args.out, ["omega", "eta", "tau1", "margin", "pass", "valid"],
               out_rows, h)
    _write_manifest(args.out + ".manifest.json", manifest)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def cmd_check(args):
    cfg = _load_cfg(args)
    ld = lamb_dicke_margin(cfg)
    rep = detuning_margin(cfg, factor=args.factor)
    print(f"Lamb-Dicke margins eta*sqrt(nbar+1): "
          + " ".join(FMT % x for x in ld)
          + f"  (threshold {cfg.ld_threshold})")
    print(f"detuning ratios |Omega-nu_p|/(eta Omega): "
          + " ".join(FMT % x for x in rep.ratios)
          + f"  min {FMT % rep.min_ratio} (factor {args.factor})")
    ok = bool(np.all(ld < cfg.ld_threshold))
    if rep.resonant_modes:
        print(f"RESONANCE: drive resonant with modes {rep.resonant_modes}")
        ok = False
    elif not rep.passed:
        print("detuning margin below factor: marginal")
        ok = False
    try:
        w = gate_frequency(cfg)
        if w == 0.0:
            print("gate frequency omega = 0: gate undefined")
            ok = False
        else:
            print(f"predicted omega = {FMT % w}  tau1 = {FMT % gate_time(cfg)}")
    except ResonanceError as exc:
        print(f"gate frequency undefined: {exc}")
        ok = False
    nmaxes = [m.n_max for m in cfg.modes]
    rec = [max(2 * int(math.ceil(m.nbar)) + 6, 4) for m in cfg.modes]
    print(f"configured truncations n_max = {nmaxes}; recommended >= {rec}")
    print("PASS" if ok else "FAIL")
    return 0 if ok else 1


def build_parser():
    p = argparse.ArgumentParser(prog="lightshift",
                                description="light-shift two-qubit gate simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_common(sp, needs_config=True):
        if needs_config:
            sp.add_argument("config", help="JSON chain configuration")
            sp.add_argument("--set", action="append", default=[],
                            metavar="KEY.PATH=VALUE",
                            help="override a config entry (repeatable)")
            sp.add_argument("--force", action="store_true",
                            help="downgrade Lamb-Dicke violations to warnings")

    sp = sub.add_parser("evolve", help="single trajectory curves")
    add_common(sp)
    sp.add_argument("--psi0", default="+-")
    sp.add_argument("--fock", default=None,
                    help="comma-separated initial Fock numbers (default: thermal sample)")
    sp.add_argument("--t-max", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_evolve)

    sp = sub.add_parser("ensemble", help="Monte Carlo trajectory ensemble")
    add_common(sp)
    sp.add_argument("--psi0", default="+-")
    sp.add_argument("--n-traj", type=int, required=True)
    sp.add_argument("--t-max", type=float, required=True)
    sp.add_argument("--dt", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_ensemble)

    sp = sub.add_parser("scan", help="gate-time scan over (Omega, eta11)")
    sp.add_argument("--config", default=None)
    sp.add_argument("--set", action="append", default=[])
    sp.add_argument("--omega-grid", default="1.05:1.70:27",
                    metavar="LO:HI:N")
    sp.add_argument("--eta-grid", default="0.005:0.05:19", metavar="LO:HI:N")
    sp.add_argument("--factor", type=float, default=10.0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("check", help="validity diagnostics")
    add_common(sp)
    sp.add_argument("--factor", type=float, default=10.0)
    sp.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
