"""Command-line front-end.

Subcommands: decompose, scheme, simulate, synthesize, presets.  All
artifacts are JSON or CSV; exit code 0 means success, 1 a usage or
input error, 2 a numerical-validity error (e.g. non-unitary input).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .decompose import (
    decompose_mod_phase,
    eliminate_phases,
    factorization_from_json,
    factorization_to_json,
    reconstruct,
)
from .dynamics import (
    DEFAULT_SAMPLES_PER_PULSE,
    density_state,
    ground_state,
    propagate_ode,
    propagate_piecewise,
    pure_state,
)
from .linalg import matrix_from_json, unitarity_defect
from .pulses import (
    GWP,
    SWP,
    FixedAmplitude,
    FixedDuration,
    schedule_from_factorization,
    schedule_from_json,
    schedule_to_json,
    validate_schedule,
)
from .schemes import (
    inversion_scheme,
    observable_max_scheme,
    population_transfer_scheme,
    superposition_scheme,
    transition_dipole_observable,
)
from .systems import (
    PRESET_NAMES,
    get_system,
    min_detuning,
    system_from_json,
    validity_budget,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2

_TIME_UNITS = (("ps", 1e-12), ("ns", 1e-9), ("s", 1.0))


def parse_time(text: str) -> float:
    """Duration in seconds from a string with an optional ps/ns/s suffix."""
    text = text.strip()
    for suffix, scale in _TIME_UNITS:
        if text.endswith(suffix):
            return float(text[: -len(suffix)]) * scale
    return float(text)


def _floats(text: str):
    return tuple(float(x) for x in text.split(","))


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _dump_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _default_tol() -> float:
    env = os.environ.get("QLGC_TOL")
    return float(env) if env else 1e-9


class _Parser(argparse.ArgumentParser):
    """argparse uses exit code 2 for usage errors; this CLI reserves 2
    for numerical-validity failures, so remap usage errors to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_shape_policy_args(p):
    p.add_argument("--shape", choices=(SWP, GWP), default=SWP,
                   help="pulse envelope shape (default swp)")
    p.add_argument("--pulse-length", default="200ps",
                   help="fixed per-pulse duration, e.g. 200ps (default)")
    p.add_argument("--tau0", default="20ps",
                   help="swp edge rise/decay time (default 20ps)")
    p.add_argument("--max-field", type=float, default=None,
                   help="peak field in V/m; switches to the fixed-amplitude policy")


def _policy_from_args(args):
    tau0 = parse_time(args.tau0) if args.shape == SWP else 0.0
    if args.max_field is not None:
        return FixedAmplitude(args.shape, float(args.max_field), tau0)
    return FixedDuration(args.shape, parse_time(args.pulse_length), tau0)


def _add_engine_args(p):
    p.add_argument("--engine", choices=("analytic", "ode"), default="analytic",
                   help="propagator (default analytic)")
    p.add_argument("--tol", type=float, default=None,
                   help="ODE relative tolerance (default 1e-9 or $QLGC_TOL)")
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES_PER_PULSE,
                   help="output samples per pulse")


def _propagate(schedule, state0, args, observable=None):
    if args.engine == "ode":
        tol = args.tol if args.tol is not None else _default_tol()
        return propagate_ode(schedule, state0, rel_tol=tol,
                             samples_per_pulse=args.samples, observable=observable)
    return propagate_piecewise(schedule, state0,
                               samples_per_pulse=args.samples, observable=observable)


def _print_validation(report):
    print(f"validation: {'PASS' if report.passed else 'FAIL'}")
    for i, p in enumerate(report.pulses, start=1):
        if not p.rabi_pass:
            print(f"warning: pulse {i} (transition {p.transition}): "
                  f"Rabi/detuning ratio {p.rabi_ratio:.3g} exceeds 0.1",
                  file=sys.stderr)
        if not p.dispersion_pass:
            print(f"warning: pulse {i} (transition {p.transition}): "
                  f"dispersion margin {p.dispersion_margin:.3g} too small",
                  file=sys.stderr)
    if not report.lifetime_pass:
        print(f"warning: total duration {report.total_duration:.3g} s is not "
              f"small against the shortest lifetime {report.min_lifetime:.3g} s",
              file=sys.stderr)


# ---------------------------------------------------------------- decompose

def cmd_decompose(args) -> int:
    try:
        u = matrix_from_json(_load_json(args.matrix))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: cannot read matrix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    defect = unitarity_defect(u)
    if defect > 1e-8:
        print(f"error: input is not unitary (defect {defect:.3e})", file=sys.stderr)
        return EXIT_INVALID
    fact = decompose_mod_phase(u)
    if args.mode == "exact":
        fact = eliminate_phases(fact)
    err = float(np.linalg.norm(reconstruct(fact) - u))
    _dump_json(factorization_to_json(fact), args.out)
    print(f"factors: {len(fact.factors)}")
    print(f"reconstruction error: {err:.3e}")
    print(f"wrote {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------- scheme

def _scheme_request_from_args(args):
    """Merge the request file (if any) with command-line flags."""
    req = {}
    if args.request:
        req = _load_json(args.request)
        if not isinstance(req, dict):
            raise ValueError("scheme request must be a JSON object")
    kind = req.get("scheme", args.kind)
    if kind is None:
        raise ValueError("no scheme given (positional argument or request file)")
    sys_field = req.get("system", args.system)
    system = system_from_json(sys_field) if isinstance(sys_field, dict) else get_system(sys_field)
    weights = req.get("weights")
    if weights is None and args.weights:
        weights = _floats(args.weights)
    r = req.get("r")
    if r is None and args.r:
        r = _floats(args.r)
    theta = req.get("theta")
    if theta is None and args.theta:
        theta = _floats(args.theta)
    observable = None
    if "observable" in req:
        observable = matrix_from_json(req["observable"])
    elif args.observable:
        observable = matrix_from_json(_load_json(args.observable))
    return kind, system, weights, r, theta, observable


def _build_scheme(kind, system, weights, r, theta, observable):
    n = system.level_count
    if kind == "transfer":
        return population_transfer_scheme(n)
    if kind == "invert":
        return inversion_scheme(n, weights)
    if kind == "superpose":
        if r is None or theta is None:
            raise ValueError("superpose needs --r and --theta")
        return superposition_scheme(r, theta)
    if kind == "maximize":
        if weights is None:
            raise ValueError("maximize needs --weights")
        a = observable if observable is not None else transition_dipole_observable(system.dipoles)
        return observable_max_scheme(a, weights)
    raise ValueError(f"unknown scheme {kind!r}")


def cmd_scheme(args) -> int:
    try:
        kind, system, weights, r, theta, observable = _scheme_request_from_args(args)
        scheme = _build_scheme(kind, system, weights, r, theta, observable)
        policy = _policy_from_args(args)
        schedule = schedule_from_factorization(scheme.factorization, system, policy)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    report = validate_schedule(schedule)
    scheme_weights = scheme.notes.get("weights")
    if scheme_weights is None:
        state0 = ground_state(system.level_count)
    else:
        state0 = density_state(np.diag(np.asarray(scheme_weights, dtype=complex)))
    obs_matrix = scheme.notes.get("observable")
    series, u_final = _propagate(schedule, state0, args, observable=obs_matrix)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _dump_json(factorization_to_json(scheme.factorization), out_dir / "factors.json")
    _dump_json(schedule_to_json(schedule), out_dir / "schedule.json")
    _dump_json(report.to_json(), out_dir / "validation.json")
    series.to_csv(out_dir / "timeseries.csv")

    print(f"scheme: {kind}")
    print(f"system: {system.name} ({system.level_count} levels)")
    print(f"pulses: {len(schedule.pulses)}")
    print(f"total duration: {schedule.total_duration!r} s")
    _print_validation(report)

    rho_f = u_final @ state0.density() @ u_final.conj().T
    pops = np.real(np.diag(rho_f))
    print("final populations:", ", ".join(f"{p:.6f}" for p in pops))
    if kind == "transfer":
        achieved = float(pops[-1])
        print(f"predicted objective: {scheme.predicted_objective!r}")
        print(f"achieved objective: {achieved!r}")
        print(f"achieved/predicted ratio = {achieved / scheme.predicted_objective:.9f}")
    elif kind == "maximize":
        achieved = float(np.real(np.trace(obs_matrix @ rho_f)))
        print(f"predicted objective: {scheme.predicted_objective!r}")
        print(f"achieved objective: {achieved!r}")
        print(f"achieved/predicted ratio = {achieved / scheme.predicted_objective:.9f}")
    else:
        dev = float(np.max(np.abs(rho_f - scheme.predicted_state)))
        print(f"max final-state deviation: {dev:.3e}")
        if kind == "superpose":
            phases = ", ".join(f"{p:.6f}" for p in scheme.notes["achieved_phases"])
            print(f"achieved phases (rad): {phases}")
    print(f"wrote {out_dir / 'factors.json'}, {out_dir / 'schedule.json'}, "
          f"{out_dir / 'validation.json'}, {out_dir / 'timeseries.csv'}")
    return EXIT_OK


# ----------------------------------------------------------------- simulate

def _state_from_doc(doc):
    n = int(doc["n"])
    data = np.asarray(doc["re"], dtype=float) + 1j * np.asarray(doc["im"], dtype=float)
    if data.shape == (n,):
        return pure_state(data)
    if data.shape == (n, n):
        return density_state(data)
    raise ValueError(f"state shape {data.shape} matches neither a length-{n} "
                     f"vector nor a {n}x{n} density matrix")


def cmd_simulate(args) -> int:
    try:
        schedule = schedule_from_json(_load_json(args.schedule))
        if args.state == "ground":
            state0 = ground_state(schedule.system.level_count)
        else:
            state0 = _state_from_doc(_load_json(args.state))
        observable = None
        if args.observable:
            observable = matrix_from_json(_load_json(args.observable))
        if state0.dimension != schedule.system.level_count:
            print(f"error: state dimension {state0.dimension} does not match "
                  f"the {schedule.system.level_count}-level system", file=sys.stderr)
            return EXIT_USAGE
        series, _ = _propagate(schedule, state0, args, observable=observable)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    series.to_csv(args.out)
    print(f"samples: {len(series.times)}")
    print("final populations:", ", ".join(repr(float(p)) for p in series.populations[-1]))
    print(f"wrote {args.out}")
    return EXIT_OK


# --------------------------------------------------------------- synthesize

def cmd_synthesize(args) -> int:
    try:
        fact = factorization_from_json(_load_json(args.factorization))
        system = get_system(args.system)
        schedule = schedule_from_factorization(fact, system, _policy_from_args(args))
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _dump_json(schedule_to_json(schedule), args.out)
    _print_validation(validate_schedule(schedule))
    print(f"pulses: {len(schedule.pulses)}")
    print(f"total duration: {schedule.total_duration!r} s")
    print(f"wrote {args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ presets

def _print_preset(system):
    print(f"preset: {system.name}")
    print(f"levels: {system.level_count}")
    if system.name == "hf4":
        # Morse ladder: recover (omega0, B, p0) from the stored spectrum
        w1, w2 = system.frequencies[0], system.frequencies[1]
        omega0 = 2.0 * w1 - w2
        print(f"omega0 = {omega0:.3g} rad/s")
        print(f"B = {(w1 - w2) / omega0:.3g}")
        print(f"p0 = {system.dipoles[0]:.3g} C m")
    print("energies (J):", ", ".join(f"{e:.6g}" for e in system.energies))
    print("dipoles (C m):", ", ".join(f"{d:.6g}" for d in system.dipoles))
    print("transition frequencies (rad/s):",
          ", ".join(f"{w:.6g}" for w in system.frequencies))
    if system.lifetimes is not None:
        print("lifetimes (s):", ", ".join(f"{t:.6g}" for t in system.lifetimes))
    budget = validity_budget(system)
    print(f"min detuning = {min_detuning(system):.6g} rad/s")
    if budget.min_lifetime is not None:
        print(f"min lifetime = {budget.min_lifetime:.6g} s")


def cmd_presets(args) -> int:
    if args.action == "list":
        for name in PRESET_NAMES:
            print(name)
        return EXIT_OK
    if args.name is None:
        print("error: 'show' needs a preset name", file=sys.stderr)
        return EXIT_USAGE
    if args.name not in PRESET_NAMES:
        print(f"error: unknown preset {args.name!r}; available: "
              + ", ".join(PRESET_NAMES), file=sys.stderr)
        return EXIT_USAGE
    _print_preset(get_system(args.name))
    return EXIT_OK


# --------------------------------------------------------------------- main

def _build_parser() -> _Parser:
    parser = _Parser(prog="qlgc",
                     description="Ladder-system unitary compiler and pulse simulator")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("decompose", help="factor a unitary into rotation factors")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--mode", choices=("mod-phase", "exact"), default="mod-phase")
    p.add_argument("--out", default="factors.json")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("scheme", help="run a control scheme end to end")
    p.add_argument("kind", nargs="?",
                   choices=("transfer", "invert", "superpose", "maximize"))
    p.add_argument("--request", help="scheme request JSON file")
    p.add_argument("--system", default="rb4", help="preset name or system JSON path")
    p.add_argument("--weights", help="comma-separated level weights")
    p.add_argument("--r", help="comma-separated superposition amplitudes")
    p.add_argument("--theta", help="comma-separated superposition phases (rad)")
    p.add_argument("--observable", help="matrix JSON file with the target observable")
    _add_shape_policy_args(p)
    _add_engine_args(p)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_scheme)

    p = sub.add_parser("simulate", help="propagate a state under a schedule")
    p.add_argument("schedule", help="schedule JSON file")
    p.add_argument("--state", default="ground",
                   help='"ground" or a state JSON file (vector or density matrix)')
    p.add_argument("--observable", help="matrix JSON file for the obs_avg column")
    _add_engine_args(p)
    p.add_argument("--out", default="timeseries.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("synthesize", help="turn a factorization into a pulse schedule")
    p.add_argument("factorization", help="factorization JSON file")
    p.add_argument("--system", required=True, help="preset name or system JSON path")
    _add_shape_policy_args(p)
    p.add_argument("--out", default="schedule.json")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("presets", help="list or show the built-in systems")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_presets)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else int(exc.code)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError, TypeError,
            ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
