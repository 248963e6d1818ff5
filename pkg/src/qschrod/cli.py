"""Command line driver: ``qschrod spectrum|eigenfunction|gates|validate``.

Exit codes: 0 success, 1 failed check, 2 usage or configuration error.
Output files go to ``$QSCHROD_OUTPUT_DIR`` if set, else ``--output-dir``,
else the current directory.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, list_presets, load_config
from .errors import ConfigError, DomainError
from .evolution import TrotterConfig, kinetic_circuit
from .lowering import lower_circuit
from .phase_estimation import project_eigenfunction
from .reference import analytic_eigenfunction, analytic_levels
from .register import Circuit

OUTPUT_ENV = "QSCHROD_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _output_dir(args) -> Path:
    out = Path(os.environ.get(OUTPUT_ENV) or args.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _describe(cfg: ExperimentConfig) -> str:
    pe = cfg.phase_config()
    src = (
        f"random x{cfg.random_count} seed={cfg.random_seed}" if cfg.is_random else f"initial={cfg.initial}"
    )
    return (
        f"# {cfg.name}: {cfg.potential}({cfg.strength:g}) w={pe.w} s={pe.s} t={pe.t:g} n={pe.n} "
        f"e_ref={pe.e_ref:.6g} mesh={pe.convention.variant} powers={pe.power_mode} {src}"
    )


def cmd_spectrum(args) -> int:
    cfg = load_config(args.config)
    res = cfg.run()
    path = _output_dir(args) / (cfg.output or f"{cfg.name}_spectrum.csv")
    res.to_csv(path)
    m = res.dominant_bin
    print(_describe(cfg))
    print(f"dominant bin m={m} E={res.energies[m]:.2f} p={res.probabilities[m]:.3f}")
    print(f"wrote {path}")
    return 0


def _select_bin(res, selector: str) -> int:
    if selector == "peak":
        return res.dominant_bin
    try:
        m = int(selector)
    except ValueError:
        raise UsageError(f"--bin must be 'peak' or an integer, got {selector!r}") from None
    if not 0 <= m < len(res.probabilities):
        raise UsageError(f"bin {m} out of range 0..{len(res.probabilities) - 1}")
    if m not in res.conditioned:
        raise UsageError(f"bin {m} is empty (p = {res.probabilities[m]:.3g})")
    return m


def _write_xy(path: Path, x, values) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("x,re,im\n")
        for xi, v in zip(x, values):
            fh.write(f"{xi:.17g},{v.real:.17g},{v.imag:.17g}\n")


def cmd_eigenfunction(args) -> int:
    cfg = load_config(args.config)
    if cfg.is_random:
        raise UsageError("eigenfunction needs a config with a single initial state")
    res = cfg.run()
    m = _select_bin(res, args.bin)
    psi = project_eigenfunction(res, m, cfg.anchor())
    out = _output_dir(args)
    path = out / f"{cfg.name}_eigenfunction_bin{m}.csv"
    _write_xy(path, psi.x, psi.values)
    print(_describe(cfg))
    print(f"bin m={m} E={res.energies[m]:.2f} p={res.probabilities[m]:.3f}")
    print(f"wrote {path}")

    pot = cfg.potential_spec()
    levels = analytic_levels(pot, 3)
    level = int(np.argmin([abs(e - res.energies[m]) for e in levels]))
    exact = analytic_eigenfunction(pot, level, psi.x).astype(complex)
    exact /= np.linalg.norm(exact)
    if np.vdot(exact, psi.values).real < 0:
        exact = -exact
    apath = out / f"{cfg.name}_analytic_level{level}.csv"
    _write_xy(apath, psi.x, exact)
    print(f"analytic level {level} (E={levels[level]:.4g}): wrote {apath}")
    return 0


def _report(label: str, circ: Circuit) -> None:
    low = lower_circuit(circ)
    counts = ", ".join(f"{k}/{a}q:{c}" for (k, a), c in circ.gate_counts().items())
    print(f"{label}: {len(circ)} gates ({counts})")
    print(f"  native arity histogram {circ.arity_histogram()} max {circ.max_arity}")
    print(f"  lowered: {len(low)} gates, arity histogram {low.arity_histogram()} max {low.max_arity}")


def cmd_gates(args) -> int:
    cfg = load_config(args.config)
    pot, conv = cfg.potential_spec(), cfg.mesh()
    dt = cfg.t / cfg.n
    step = pot.step_circuit(dt, conv)
    print(_describe(cfg))
    _report("potential half step", pot.half_step_circuit(dt, conv))
    _report("kinetic", kinetic_circuit(TrotterConfig(dt, conv)))
    _report("Trotter step", step)
    if args.dump:
        print((lower_circuit(step) if args.lowered else step).dump(), end="")
    return 0


def cmd_validate(args) -> int:
    from .validate import per_step_table, run_checks

    results = run_checks(args.inject_fault)
    width = max(len(r.name) for r in results)
    for r in results:
        flag = "PASS" if r.passed else "FAIL"
        print(f"{flag}  {r.name:<{width}}  measured {r.measured}  bound {r.bound}  ({r.seconds:.2f}s)")
    print("\nper-step Trotter error, harmonic oscillator (operator norm vs dense propagator)")
    print(f"{'dt':>10} {'error':>12} {'local slope':>12}")
    for dt, err, slope in per_step_table():
        print(f"{dt:10.2e} {err:12.4e} {'' if slope is None else f'{slope:12.3f}'}")
    failed = [r for r in results if not r.passed]
    print(f"\n{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qschrod", description=__doc__.splitlines()[0])
    p.add_argument("--list-presets", action="store_true", help="list shipped presets and exit")
    p.add_argument("--output-dir", help=f"directory for CSV output (overridden by ${OUTPUT_ENV})")
    sub = p.add_subparsers(dest="command")

    s = sub.add_parser("spectrum", help="phase-estimation spectrum to energy,probability CSV")
    s.add_argument("config", help="config file or preset name")
    s.set_defaults(func=cmd_spectrum)

    e = sub.add_parser("eigenfunction", help="projected eigenfunction to x,re,im CSV")
    e.add_argument("config")
    e.add_argument("--bin", default="peak", help="'peak' or a bin index")
    e.set_defaults(func=cmd_eigenfunction)

    g = sub.add_parser("gates", help="gate counts and arity histograms")
    g.add_argument("config")
    g.add_argument("--dump", action="store_true", help="print the Trotter step one gate per line")
    g.add_argument("--lowered", action="store_true", help="dump the lowered circuit instead")
    g.set_defaults(func=cmd_gates)

    v = sub.add_parser("validate", help="run the self-check suite")
    v.add_argument("--inject-fault", choices=["qft"], help="perturb a circuit to confirm the check fails")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_presets:
        for name, desc in list_presets().items():
            print(f"{name:<16} {desc}")
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, DomainError, UsageError) as exc:
        print(f"qschrod {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
