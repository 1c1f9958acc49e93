"""Command-line front end.

Subcommands: tau-g, metastate, reduce, ns-limit, interdiction, phone,
oracle, rerun. Every run writes CSV output plus a JSON manifest binding the
output digests to the fully resolved parameters; re-running the manifest's
recorded argv reproduces the CSV byte for byte. Exit codes: 0 success,
1 validation error (one-line diagnostic), 2 internal error.

Physical flags accept unit suffixes (g, kg, mp; m, cm; g/cm3, kg/m3; s);
bare numbers are SI. NNG_LAB_THREADS caps sweep parallelism; outputs are
independent of it.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .constants import (
    CONSTANTS,
    SPREADING_TIME_S,
    Dim,
    above_threshold,
    localization_width,
    parse_quantity,
    sphere_radius,
    tau_g,
)
from .csvio import write_csv
from .interdiction import default_mass_grid, interdiction_scan
from .kernel import gaussian_cloud, pair_integral, pair_integral_mc, uniform_sphere
from .manifest import RunManifest, thread_cap
from .metastate import BranchWeights, concentration_profile
from .phone import SignalSweep, footnote_pointer_config, signal_sweep
from .reduction import (
    ReductionConfig,
    ReductionTimeError,
    brute_force_reduced_rho,
    default_cluster_config,
    element_matrix,
    estimate_reduction_time,
    ns_limit_deviation,
    reduction_result,
)
from .scenario import FieldSpec, ScenarioError, load_scenario


class CliError(ValueError):
    """Invalid command line or parameters."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise CliError(message)


def _ordered_parallel_map(fn, items):
    """Map preserving order; NNG_LAB_THREADS caps the worker pool."""
    workers = thread_cap()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Parameter resolution: defaults < scenario file < explicit flags
# ---------------------------------------------------------------------------

_SCHEMAS: dict[str, dict[str, FieldSpec]] = {
    "tau-g": {
        "mass": FieldSpec(Dim.MASS, required=True),
        "density": FieldSpec(Dim.DENSITY, default=1000.0),
    },
    "metastate": {
        "p": FieldSpec("float", default=0.5),
        "n": FieldSpec("int", default=10000),
    },
    "reduce": {
        "mass": FieldSpec(Dim.MASS, required=True),
        "density": FieldSpec(Dim.DENSITY, default=1000.0),
        "sites": FieldSpec("int", default=64),
        "replicas": FieldSpec("int", default=2),
        "spacing": FieldSpec(Dim.LENGTH, default=None),
        "geometry": FieldSpec("str", default="grid"),
        "t_max_tau": FieldSpec("float", default=10.0),
        "points": FieldSpec("int", default=101),
    },
    "ns-limit": {
        "mass": FieldSpec(Dim.MASS, required=True),
        "density": FieldSpec(Dim.DENSITY, default=1000.0),
        "sites": FieldSpec("int", default=4),
        "t_tau": FieldSpec("float", default=0.5),
        "h": FieldSpec("int", default=0),
        "k": FieldSpec("int", default=-1),
        "n_list": FieldSpec("str", default="100,1000,10000,100000"),
    },
    "interdiction": {
        "rho": FieldSpec(Dim.DENSITY, default=1000.0),
        "m_rule": FieldSpec("float", default=1.0e-6),
        "margin": FieldSpec("float", default=10.0),
        "lo_protons": FieldSpec("float", default=1.0e11),
        "hi_protons": FieldSpec("float", default=1.0e18),
        "points": FieldSpec("int", default=200),
    },
    "phone": {
        "mass": FieldSpec(Dim.MASS, required=True),
        "cluster_sites": FieldSpec("int", default=32),
        "density": FieldSpec(Dim.DENSITY, default=1000.0),
        "t_max_tau": FieldSpec("float", default=10.0),
        "points": FieldSpec("int", default=50),
        "coupling_scale": FieldSpec("float", default=1.0),
    },
    "oracle": {
        "suite": FieldSpec("str", default="reduction"),
        "nn": FieldSpec("int", default=4),
        "trials": FieldSpec("int", default=25),
        "times": FieldSpec("int", default=10),
        "samples": FieldSpec("int", default=1000000),
        "seed": FieldSpec("int", required=True),
    },
}


def _resolve_params(command: str, args: argparse.Namespace) -> dict:
    schema = _SCHEMAS[command]
    if getattr(args, "scenario", None):
        # flags may satisfy required keys, so relax the scenario pass
        relaxed = {k: FieldSpec(s.kind, s.default, required=False) for k, s in schema.items()}
        params = load_scenario(args.scenario, relaxed)
    else:
        params = {key: spec.default for key, spec in schema.items()}
    for key, spec in schema.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            params[key] = spec.parse(key, flag_value)
    missing = [k for k, spec in schema.items() if spec.required and params.get(k) is None]
    if missing:
        raise CliError(f"missing required parameter(s): {', '.join(missing)}")
    return params


def _finish(command: str, argv: list[str], params: dict, outputs: list[Path],
            manifest_path: Path, seed: int | None = None) -> None:
    manifest = RunManifest(command, argv, params, seed)
    for path in outputs:
        manifest.add_output(path)
    manifest.write(manifest_path)


def _out_paths(args: argparse.Namespace, default_stem: str) -> tuple[Path, Path]:
    out = Path(args.out) if args.out else Path(f"{default_stem}.csv")
    manifest = Path(args.manifest) if args.manifest else out.with_suffix(".manifest.json")
    return out, manifest


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_tau_g(args, argv) -> int:
    params = _resolve_params("tau-g", args)
    mass, rho = params["mass"], params["density"]
    value = float(tau_g(mass, rho))
    width = float(localization_width(mass))
    out, manifest = _out_paths(args, "tau_g")
    write_csv(
        out,
        ["M_kg", "rho_kg_m3", "tau_g_s", "localization_width_m", "above_threshold", "spreading_time_s"],
        [[mass], [rho], [value], [width], [above_threshold(mass)], [SPREADING_TIME_S]],
    )
    _finish("tau-g", argv, params, [out], manifest)
    print(f"tau_g = {value:.3e} s  (localization width {width:.3e} m, "
          f"spreading time {SPREADING_TIME_S:.0e} s)")
    return 0


def _cmd_metastate(args, argv) -> int:
    params = _resolve_params("metastate", args)
    profile = concentration_profile(BranchWeights.from_p(params["p"]), params["n"])
    out, manifest = _out_paths(args, "metastate")
    write_csv(
        out,
        ["alpha", "binomial_weight", "gaussian_weight"],
        [profile.alpha, profile.binomial_weight, profile.gaussian_weight],
    )
    _finish("metastate", argv, params, [out], manifest)
    print(f"sup-norm deviation {profile.sup_deviation:.3e} "
          f"({profile.sup_deviation / profile.peak_weight:.3e} of peak weight)")
    return 0


def _build_reduce_config(params) -> tuple[ReductionConfig, float]:
    tau = float(tau_g(params["mass"], params["density"]))
    t_grid = np.linspace(0.0, params["t_max_tau"] * tau, params["points"])
    cfg = default_cluster_config(
        params["mass"],
        params["density"],
        n_sites=params["sites"],
        n_replicas=params["replicas"],
        spacing=params["spacing"],
        geometry=params["geometry"],
        t_grid=t_grid,
    )
    return cfg, tau


def _cmd_reduce(args, argv) -> int:
    params = _resolve_params("reduce", args)
    cfg, tau = _build_reduce_config(params)
    coherences = _ordered_parallel_map(
        lambda t: reduction_result(cfg, float(t)).offdiag_magnitude, list(cfg.t_grid)
    )
    out, manifest = _out_paths(args, "reduce")
    write_csv(out, ["t_s", "mean_offdiag_coherence"], [cfg.t_grid, np.asarray(coherences)])
    _finish("reduce", argv, params, [out], manifest)
    print(f"tau_g = {tau:.3e} s; spreading time constant {SPREADING_TIME_S:.0e} s")
    try:
        t_red = estimate_reduction_time(cfg)
        print(f"estimated reduction time = {t_red:.3e} s ({t_red / tau:.2f} tau_g)")
    except ReductionTimeError as exc:
        print(f"no reduction time: {exc}")
    return 0


def _cmd_ns_limit(args, argv) -> int:
    params = _resolve_params("ns-limit", args)
    cfg, tau = _build_reduce_config(
        {**params, "spacing": None, "geometry": "grid", "replicas": 2, "t_max_tau": 1.0, "points": 2}
    )
    k = params["k"] if params["k"] >= 0 else cfg.n_sites - 1
    n_list = [int(float(tok)) for tok in str(params["n_list"]).split(",") if tok.strip()]
    rows = ns_limit_deviation(cfg, params["h"], k, params["t_tau"] * tau, n_list)
    out, manifest = _out_paths(args, "ns_limit")
    write_csv(out, ["N", "deviation"], [[n for n, _ in rows], [d for _, d in rows]])
    _finish("ns-limit", argv, params, [out], manifest)
    for n, d in rows:
        print(f"N = {n:>9d}: |NN element - mean-field phasor| = {d:.3e}")
    return 0


def _cmd_interdiction(args, argv) -> int:
    params = _resolve_params("interdiction", args)
    masses = default_mass_grid(params["points"], params["lo_protons"], params["hi_protons"])
    curve = interdiction_scan(masses, params["rho"], params["m_rule"], params["margin"])
    out, manifest = _out_paths(args, "interdiction")
    curve.write_csv(out)
    _finish("interdiction", argv, params, [out], manifest)
    n_feasible = int(np.sum(curve.feasible))
    print(f"feasible points: {n_feasible} / {curve.masses.size}")
    return 0


def _cmd_phone(args, argv) -> int:
    params = _resolve_params("phone", args)
    cfg = footnote_pointer_config(
        params["mass"], params["cluster_sites"], params["density"]
    )
    tau = cfg.tau_g_s()
    t_grid = np.linspace(0.0, params["t_max_tau"] * tau, params["points"])
    rows = _ordered_parallel_map(
        lambda t: signal_sweep(cfg, [float(t)], params["coupling_scale"]), list(t_grid)
    )
    sweep = SignalSweep(
        t_grid,
        t_grid / tau,
        np.array([r.sigma3_a[0] for r in rows]),
        np.array([r.sigma3_b[0] for r in rows]),
        np.array([r.signal[0] for r in rows]),
        np.array([r.coherence_b[0] for r in rows]),
    )
    out, manifest = _out_paths(args, "phone")
    sweep.write_csv(out)
    outputs = [out]
    if args.coherence_out:
        sweep.write_coherence_csv(args.coherence_out)
        outputs.append(Path(args.coherence_out))
    _finish("phone", argv, params, outputs, manifest)
    print(f"tau_g = {tau:.3e} s; signal start {sweep.signal[0]:.6f}, end {sweep.signal[-1]:.6f}")
    print(f"branch coherence: start {sweep.coherence_b[0]:.6f}, end {sweep.coherence_b[-1]:.3e}")
    return 0


def _oracle_reduction(params) -> tuple[list, float]:
    if not 2 <= params["nn"] <= 8:
        raise CliError("oracle --nn must lie in [2, 8]")
    rng = np.random.default_rng(params["seed"])
    rows = []
    worst = 0.0
    for trial in range(params["trials"]):
        nn = params["nn"]
        mass = 10.0 ** rng.uniform(-15.0, -9.0)
        rho = 10.0 ** rng.uniform(2.5, 3.5)
        radius = sphere_radius(mass, rho)
        sites = rng.uniform(-2.5 * radius, 2.5 * radius, size=(nn, 3))
        cfg = ReductionConfig(sites, uniform_sphere(mass, radius), 2)
        tau = float(tau_g(mass, rho))
        dev = 0.0
        for t in rng.uniform(0.0, 5.0 * tau, size=params["times"]):
            dev = max(dev, float(np.max(np.abs(
                brute_force_reduced_rho(cfg, t) - element_matrix(cfg, t)
            ))))
        rows.append((trial, dev))
        worst = max(worst, dev)
    return rows, worst


def _oracle_kernel(params) -> tuple[list, float]:
    rng = np.random.default_rng(params["seed"])
    rows = []
    worst = 0.0
    for trial in range(params["trials"]):
        size = 10.0 ** rng.uniform(-9.0, -3.0)
        if rng.random() < 0.5:
            profile = uniform_sphere(1.0, size)
        else:
            profile = gaussian_cloud(1.0, size)
        d = rng.uniform(0.0, 5.0) * size
        mc = pair_integral_mc(profile, d, params["samples"], int(rng.integers(2**31)))
        pulls = abs(pair_integral(profile, d) - mc.estimate) / mc.stderr
        rows.append((trial, pulls))
        worst = max(worst, pulls)
    return rows, worst


def _cmd_oracle(args, argv) -> int:
    params = _resolve_params("oracle", args)
    if params["suite"] == "reduction":
        rows, worst = _oracle_reduction(params)
        label = "max |closed - brute|"
    elif params["suite"] == "kernel":
        rows, worst = _oracle_kernel(params)
        label = "max |closed - MC| / stderr"
    else:
        raise CliError(f"unknown oracle suite {params['suite']!r}")
    out, manifest = _out_paths(args, f"oracle_{params['suite']}")
    write_csv(out, ["trial", "deviation"], [[t for t, _ in rows], [d for _, d in rows]])
    _finish("oracle", argv, params, [out], manifest, seed=params["seed"])
    print(f"{label} = {worst:.3e} over {params['trials']} trials")
    return 0


def _cmd_rerun(args, argv) -> int:
    recorded = RunManifest.recorded_argv(args.manifest_path)
    if recorded and recorded[0] == "rerun":
        raise CliError("refusing to rerun a rerun manifest")
    return main(recorded)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--scenario", help="scenario file with key = value parameters")
    sub.add_argument("--out", help="CSV output path")
    sub.add_argument("--manifest", help="manifest output path (default <out>.manifest.json)")


def build_parser() -> _Parser:
    parser = _Parser(prog="nng-lab", description=__doc__, add_help=True)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("tau-g", help="reduction time and characteristic scales")
    p.add_argument("--mass"); p.add_argument("--density")
    _add_common(p); p.set_defaults(func=_cmd_tau_g)

    p = subs.add_parser("metastate", help="binomial vs Gaussian concentration profile")
    p.add_argument("--p"); p.add_argument("--n")
    _add_common(p); p.set_defaults(func=_cmd_metastate)

    p = subs.add_parser("reduce", help="coherence decay curve for a site cluster")
    for flag in ("--mass", "--density", "--sites", "--replicas", "--spacing",
                 "--geometry", "--t-max-tau", "--points"):
        p.add_argument(flag)
    _add_common(p); p.set_defaults(func=_cmd_reduce)

    p = subs.add_parser("ns-limit", help="approach to the mean-field limit in N")
    for flag in ("--mass", "--density", "--sites", "--t-tau", "--h", "--k", "--n-list"):
        p.add_argument(flag)
    _add_common(p); p.set_defaults(func=_cmd_ns_limit)

    p = subs.add_parser("interdiction", help="no-signaling feasibility scan over masses")
    for flag in ("--rho", "--m-rule", "--margin", "--lo-protons", "--hi-protons", "--points"):
        p.add_argument(flag)
    _add_common(p); p.set_defaults(func=_cmd_interdiction)

    p = subs.add_parser("phone", help="branch-communication signal and coherence sweep")
    for flag in ("--mass", "--cluster-sites", "--density", "--t-max-tau",
                 "--points", "--coupling-scale"):
        p.add_argument(flag)
    p.add_argument("--coherence-out", help="optional CSV for the branch coherence")
    _add_common(p); p.set_defaults(func=_cmd_phone)

    p = subs.add_parser("oracle", help="independent cross-check suites")
    for flag in ("--suite", "--nn", "--trials", "--times", "--samples", "--seed"):
        p.add_argument(flag)
    _add_common(p); p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser("rerun", help="re-execute the argv recorded in a manifest")
    p.add_argument("manifest_path")
    p.set_defaults(func=_cmd_rerun)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, argv)
    except (CliError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit:
        raise
    except Exception as exc:  # internal fault, distinct exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
