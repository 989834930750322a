"""Command line interface: ``fveg run | convergence | verify-entropy | verify-consistency``.

Exit codes: 0 on success, 1 on invalid configuration or input, 2 on a
numerical failure (including a failed verification).
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import consistency, entropy
from .analysis import LadderAborted, l1_error, run_convergence
from .config import RunConfig, load_config
from .errors import CapabilityError, ConfigurationError, FVEGError, InputError, NumericalError, UsageError
from .evo_euler import GasParams
from .flux import FLUX_MODES, integrate
from .io import write_field
from .problems import exact_solution, make_problem, make_system

log = logging.getLogger("fveg")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    over = {"nx": args.nx, "cfl": args.cfl, "t_final": args.tfinal, "flux_mode": args.flux_mode, "out": args.out}
    if getattr(args, "problem", None):
        over["problem"] = args.problem
    return cfg.with_overrides(**over)


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(cfg: RunConfig) -> int:
    spec = cfg.spec
    system = make_system(spec)
    grid = spec.grid(cfg.nx)
    out = _outdir(cfg)
    ext = cfg.output_format

    def snapshot(fld, state):
        if cfg.output_every and state.step_count % cfg.output_every == 0:
            write_field(fld, out / f"{spec.name}_{cfg.nx}_{state.step_count:06d}.{ext}", ext,
                        system.components, f"{cfg.provenance()} t={state.t!r}")

    final, state = integrate(system, spec.initial_field(grid), cfg.effective_t_final, cfg.effective_cfl,
                             mode=cfg.flux_mode, supersonic=cfg.supersonic, callback=snapshot)
    path = write_field(final, out / f"{spec.name}_{cfg.nx}_final.{ext}", ext, system.components,
                       f"{cfg.provenance()} t={state.t!r}")
    print(f"{spec.name}: nx={cfg.nx} t={state.t:.6g} steps={state.step_count} "
          f"fallback_edges={state.fallback_edges} retries={state.retries}")
    if spec.has_exact(state.t):
        err = l1_error(final, exact_solution(spec, grid, state.t))
        print("L1 errors: " + ", ".join(f"{c}={e:.6e}" for c, e in zip(system.components, err)))
    print(f"wrote {path}")
    return 0


def cmd_convergence(cfg: RunConfig) -> int:
    spec = cfg.spec
    label = (lambda nx: nx // 2) if spec.name == "wave-sine" else None
    out = _outdir(cfg)
    csv_path = out / f"{spec.name}_convergence.csv"
    try:
        table = run_convergence(spec, cfg.ladder, cfg.cfl, cfg.t_final, cfg.flux_mode, cfg.supersonic,
                                cfg.ref_nx, csv_path, cfg.provenance(), label)
    except LadderAborted as exc:
        print(exc.partial.to_text())
        raise
    print(table.to_text())
    print(f"wrote {csv_path}")
    return 0


def cmd_verify_entropy(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    # the viscosity bound concerns gas dynamics; wave problems borrow its default gas
    gas_spec = cfg.spec if cfg.spec.system == "euler" else make_problem("riemann-4shock")
    gas_system = make_system(gas_spec)
    rows, ok_campaign = entropy.lemma31_campaign(gas_system, cfg.samples, cfg.seed, out / "lemma31_campaign.csv")
    nfail = sum(1 for r in rows if not r[6])
    print(f"viscosity bound campaign: {len(rows)} checks, {nfail} violations")

    spec = cfg.spec
    system = make_system(spec)
    report = entropy.EntropyReport(system)
    integrate(system, spec.initial_field(spec.grid(cfg.nx)), cfg.effective_t_final, cfg.effective_cfl,
              mode="entropy-stable", callback=report)
    with open(out / f"{spec.name}_{cfg.nx}_entropy.csv", "w", newline="") as fh:
        fh.write(f"# {cfg.provenance()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "total_entropy", "production", "bv"])
        prod = [""] + [repr(p) for p in report.production]
        for t, s, p, b in zip(report.times, report.entropy, prod, report.bv):
            w.writerow([repr(t), repr(s), p, repr(b)])
    ok_run = report.nondecreasing()
    print(f"{spec.name} entropy-stable run: min production {report.min_production():.3e} "
          f"(scale {report.scale:.3e}), nondecreasing={ok_run}, time-integrated BV {report.bv_integral:.6e}")
    return 0 if (ok_campaign and ok_run) else 2


def cmd_verify_consistency(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    n = cfg.samples
    w = consistency.wave_bounds(consistency.random_wave_stencils(rng, n)).violations()
    e = consistency.euler_bounds(consistency.random_gas_stencils(rng, n), GasParams()).violations()
    print(f"wave jump bounds: {n} stencils, {w} violations")
    print(f"gas dynamics jump bounds: {n} stencils, {e} violations")
    return 0 if w == 0 and e == 0 else 2


COMMANDS = {
    "run": cmd_run,
    "convergence": cmd_convergence,
    "verify-entropy": cmd_verify_entropy,
    "verify-consistency": cmd_verify_consistency,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fveg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML file with RunConfig keys")
        s.add_argument("--problem", help="problem name (overrides the config)")
        s.add_argument("--nx", type=int)
        s.add_argument("--cfl", type=float)
        s.add_argument("--tfinal", type=float)
        s.add_argument("--flux-mode", choices=FLUX_MODES)
        s.add_argument("--out")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, InputError, UsageError, CapabilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except LadderAborted as exc:
        print(f"ladder aborted: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.__cause__, NumericalError) else 1
    except FVEGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
