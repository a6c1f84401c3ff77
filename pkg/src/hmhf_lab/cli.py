"""Config-driven experiment runner.

Reads a TOML config with a strict schema, runs one of the named
scenarios (or all of them), writes machine-readable reports plus a
manifest with content hashes, and emits gnuplot data files and SVG
figures on request.  Exit code 0 means every expectation in the
config's [expect] table (or the scenario defaults) was met; 2 means a
verdict expectation failed; 1 means the run itself errored.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import estimates, flows, kato, maps, radial, reduced
from ._io import write_csv, write_json
from .errors import ConfigInvalid, MissingReport

_TYPES = {
    "str": str,
    "int": int,
    "float": (int, float),
    "bool": bool,
    "list": list,
}

#: section -> key -> (type name, default, help text).  Unknown keys are
#: rejected; every default below is printed by --help.
SCHEMA = {
    "flow": {
        "dimension": ("int", 3, "domain dimension m >= 2"),
        "base_curvature": ("int", 0, "space form curvature k0 in {-1, 0, 1}"),
        "tau_max": ("float", 1.0, "backward-time horizon"),
    },
    "flow.scale": {
        "kind": (
            "str",
            "static",
            "scale family: static | affine | shrinking_sphere | sampled",
        ),
        "c0": ("float", 1.0, "scale at tau = 0"),
        "slope": ("float", 0.0, "affine scale slope (kind = affine)"),
        "knots": ("list", [[0.0, 1.0], [1.0, 1.0]], "(tau, c) knots (kind = sampled)"),
    },
    "target": {
        "n": ("int", 3, "target dimension"),
        "kappa": ("float", 0.0, "target curvature"),
    },
    "map": {
        "preset": (
            "str",
            "constant",
            "constant | dilation | su_import | cap_relaxation",
        ),
        "slope": ("float", 0.1, "dilation slope a in rho = a r"),
        "r_max": ("float", 50.0, "radial grid extent"),
        "epsilon": ("float", 1e-6, "su_import launch amplitude"),
        "cap_height": ("float", math.pi / 6.0, "cap_relaxation boundary value"),
        "relax_dt": ("float", 2e-4, "cap_relaxation time step"),
    },
    "numerics": {
        "dr": ("float", 0.05, "radial spacing"),
        "dt": ("float", 1e-4, "time step for evolution scenarios"),
        "t1": ("float", 0.05, "evolution horizon (scenario hmhf)"),
        "seed": ("int", 42, "RNG seed (scenario kato)"),
        "samples": ("int", 100000, "sweep size (scenario kato)"),
        "R_list": ("list", [10.0, 20.0, 40.0], "window radii (estimates)"),
        "K": ("float", 0.0, "curvature bound fed to the hypothesis gate"),
        "tol": ("float", 1e-6, "generic agreement tolerance"),
        "scan_mode": (
            "str",
            "auto",
            "growth scan mode: auto | NPC_growth | Pos_growth | Static_linear",
        ),
    },
    "output": {
        "directory": ("str", "out", "report directory"),
    },
    "expect": {
        "gate_passes": ("bool", None, "assumptions: expected gate outcome"),
        "violations": ("int", None, "kato: expected sweep violation count"),
        "agreement_rel_max": ("float", None, "reduced: max backend disagreement"),
        "energy_monotone": ("bool", None, "hmhf: energy must not increase"),
        "exponent_matches_root": ("bool", None, "radial: fit within 0.05 of N1"),
        "verdicts_all": ("str", None, "estimates: required verdict for every window"),
        "scan_classification": ("str", None, "estimates: required scan outcome"),
    },
}

SCENARIOS = ("reduced", "assumptions", "hmhf", "radial", "kato", "estimates", "full")

DEFAULT_EXPECT = {
    "reduced": {"agreement_rel_max": 1e-6},
    "assumptions": {"gate_passes": True},
    "hmhf": {"energy_monotone": True},
    "radial": {"exponent_matches_root": True},
    "kato": {"violations": 0},
    "estimates": {"verdicts_all": "Holds"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description (one scenario plus sections)."""

    scenario: str
    flow: dict
    target: dict
    map: dict
    numerics: dict
    output: dict
    expect: dict


def _check_type(section, key, value, type_name):
    pytype = _TYPES[type_name]
    if type_name == "float" and isinstance(value, bool):
        pass
    elif isinstance(value, pytype) and not (
        type_name in ("int", "float") and isinstance(value, bool)
    ):
        return float(value) if type_name == "float" else value
    raise ConfigInvalid(
        "%s.%s expects %s, got %r" % (section, key, type_name, value)
    )


def validate_config(data):
    """Strict-schema validation; unknown keys are errors, not defaults."""
    if not isinstance(data, dict):
        raise ConfigInvalid("config root must be a table")
    scenario = data.get("scenario")
    if scenario is None:
        raise ConfigInvalid("scenario expects str, missing top-level key 'scenario'")
    if scenario not in SCENARIOS:
        raise ConfigInvalid(
            "scenario expects one of %s, got %r" % ("/".join(SCENARIOS), scenario)
        )
    sections = {}

    def visit(path, table):
        keys = SCHEMA[path]
        out = sections.setdefault(path, {})
        for key, val in table.items():
            sub = path + "." + key
            if sub in SCHEMA:
                if not isinstance(val, dict):
                    raise ConfigInvalid("[%s] must be a table" % sub)
                visit(sub, val)
                continue
            if key not in keys:
                raise ConfigInvalid(
                    "unknown key %s.%s; expected one of %s"
                    % (path, key, ", ".join(sorted(keys)))
                )
            out[key] = _check_type(path, key, val, keys[key][0])

    for name, value in data.items():
        if name == "scenario":
            continue
        if name not in SCHEMA:
            raise ConfigInvalid(
                "unknown section [%s]; expected one of [%s]"
                % (name, "], [".join(s for s in SCHEMA if "." not in s))
            )
        if not isinstance(value, dict):
            raise ConfigInvalid("[%s] must be a table" % name)
        visit(name, value)
    for name, keys in SCHEMA.items():
        filled = sections.setdefault(name, {})
        for key, (_type, default, _help) in keys.items():
            if key not in filled and default is not None:
                filled[key] = default
    flow = dict(sections["flow"])
    flow["scale"] = sections["flow.scale"]
    return ExperimentConfig(
        scenario=scenario,
        flow=flow,
        target=sections["target"],
        map=sections["map"],
        numerics=sections["numerics"],
        output=sections["output"],
        expect=sections["expect"],
    )


def load_config(path):
    try:
        data = tomllib.loads(Path(path).read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid("config does not parse as TOML: %s" % exc)
    return validate_config(data)


def _flow_from_config(cfg):
    section = cfg.flow
    sc = section["scale"]
    kind = sc["kind"]
    if kind == "static":
        scale = flows.StaticScale(c0=sc["c0"])
    elif kind == "affine":
        scale = flows.AffineScale(c0=sc["c0"], slope=sc["slope"])
    elif kind == "sampled":
        scale = flows.SampledScale(tuple((t, c) for t, c in sc["knots"]))
    elif kind == "shrinking_sphere":
        return flows.shrinking_sphere(
            section["dimension"], c0=sc["c0"], tau_max=section["tau_max"]
        )
    else:
        raise ConfigInvalid(
            "flow.scale.kind expects static | affine | shrinking_sphere | sampled, "
            "got %r" % kind
        )
    return flows.ModelFlow(
        dimension=section["dimension"],
        base_curvature=section["base_curvature"],
        scale=scale,
        tau_max=section["tau_max"],
    )


def _map_from_config(cfg, flow):
    target = maps.TargetSpaceForm(n=cfg.target["n"], kappa=cfg.target["kappa"])
    section = cfg.map
    preset = section["preset"]
    dr = cfg.numerics["dr"]
    if preset == "constant":
        return maps.constant_map(flow, target, r_max=section["r_max"], dr=dr)
    if preset == "dilation":
        return maps.dilation_map(
            flow, target, slope=section["slope"], r_max=section["r_max"], dr=dr
        )
    if preset == "su_import":
        eps = section["epsilon"]
        traj = radial.su_solve(
            flow.dimension, epsilon=eps, t_span=(math.log(eps), 16.0)
        )
        fn = radial.profile_interpolant(traj)
        return maps.profile_map(
            flow, target, fn, r_max=section["r_max"], dr=dr
        )
    if preset == "cap_relaxation":
        height = section["cap_height"]
        r_max = section["r_max"]
        init = maps.profile_map(
            flow, target, lambda r: height * r / r_max, r_max=r_max, dr=dr
        )
        relaxed, _rate = maps.relax_to_harmonic(init, flow, dt=section["relax_dt"])
        return relaxed
    raise ConfigInvalid(
        "map.preset expects constant | dilation | su_import | cap_relaxation, "
        "got %r" % preset
    )


# ---------------------------------------------------------------------------
# scenario runners: each returns (observations dict), writing files in outdir


def _run_reduced(cfg, outdir):
    flow = _flow_from_config(cfg)
    radii = np.arange(1, 51) / 10.0
    taus = np.arange(1, int(10.0 * min(2.0, flow.tau_max)) + 1) / 10.0
    field = reduced.build_reduced_field(flow, radii, taus)
    field.to_csv(outdir / "reduced.csv")
    worst = 0.0
    for r in radii[::10]:
        for tau in taus[::5]:
            var = reduced.reduced_distance(
                flow, float(r), float(tau), backend="variational"
            )
            closed = reduced.reduced_distance(flow, float(r), float(tau))
            worst = max(worst, abs(var.ell - closed.ell) / max(abs(closed.ell), 1e-30))
    report = {
        "backend_pairs_checked": int(radii[::10].size * taus[::5].size),
        "agreement_rel": worst,
    }
    write_json(outdir / "reduced_report.json", report)
    return {"agreement_rel_max": worst}


def _run_assumptions(cfg, outdir):
    flow = _flow_from_config(cfg)
    grid = flows.default_tau_grid(flow)
    gate = flows.assumption_gate(flow, grid, cfg.numerics["K"])
    write_json(outdir / "assumptions.json", gate.to_dict())
    rows = []
    for tau in grid:
        co = flows.flow_coefficients(flow, float(tau))
        rows.append((float(tau), co.H, flows.muller_quantity(flow, float(tau), 1.0)))
    write_csv(outdir / "gate_curves.csv", ["tau", "H", "muller_at_v1"], rows)
    return {"gate_passes": bool(gate.passes)}


def _run_hmhf(cfg, outdir):
    flow = _flow_from_config(cfg)
    target = maps.TargetSpaceForm(n=cfg.target["n"], kappa=cfg.target["kappa"])
    section = cfg.map
    height = section["cap_height"]
    r_max = section["r_max"]
    init = maps.profile_map(
        flow, target, lambda r: height * r / r_max, r_max=r_max, dr=cfg.numerics["dr"]
    )
    traj = maps.hmhf_evolve(
        init, flow, t1=cfg.numerics["t1"], dr=cfg.numerics["dr"], dt=cfg.numerics["dt"]
    )
    maps.to_csv(traj, outdir / "map.csv")
    energies = [maps.map_energy(traj, j) for j in range(traj.nt)]
    write_csv(
        outdir / "energy.csv",
        ["t", "energy"],
        list(zip([float(t) for t in traj.t], energies)),
    )
    drops = np.diff(energies)
    monotone = bool(np.all(drops <= 1e-10 * max(1.0, energies[0])))
    write_json(
        outdir / "hmhf_report.json",
        {
            "frames": traj.nt,
            "energy_initial": energies[0],
            "energy_final": energies[-1],
            "energy_monotone": monotone,
        },
    )
    return {"energy_monotone": monotone}


def _run_radial(cfg, outdir):
    m = cfg.flow["dimension"]
    eps = cfg.map["epsilon"]
    traj = radial.su_solve(m, epsilon=eps, t_span=(math.log(eps), 16.0))
    write_csv(
        outdir / "trajectory.csv",
        ["t", "alpha", "beta"],
        list(zip(traj.t.tolist(), traj.alpha.tolist(), traj.beta.tolist())),
    )
    roots = radial.characteristic_roots(m)
    report = {
        "m": m,
        "classification": traj.classification,
        "N1": roots.N1,
        "N2": roots.N2,
        "discriminant": roots.discriminant,
    }
    if traj.classification == "NodeConvergent":
        fit = radial.asymptotic_exponent(traj)
        report["fitted_exponent"] = fit.growth_order_of_v
        report["fit_window"] = list(fit.window)
        matches = abs(fit.growth_order_of_v - roots.N1) < 0.05
    else:
        report["first_crossing_t"] = traj.crossing_t
        matches = roots.discriminant < 0.0  # crossings belong to the spiral regime
    report["exponent_matches_root"] = bool(matches)
    write_json(outdir / "exponent.json", report)
    return {"exponent_matches_root": bool(matches)}


def _run_kato(cfg, outdir):
    sweep = kato.kato_sweep(
        samples=cfg.numerics["samples"], seed=cfg.numerics["seed"]
    )
    write_json(outdir / "kato.json", sweep.to_dict())
    return {"violations": int(sweep.violations)}


def _run_estimates(cfg, outdir):
    flow = _flow_from_config(cfg)
    map_ = _map_from_config(cfg, flow)
    kappa = map_.target.kappa
    R_list = [float(R) for R in cfg.numerics["R_list"]]
    K = cfg.numerics["K"]
    reports = []
    for R in R_list:
        if kappa > 0.0:
            rep = estimates.gradient_estimate_verify_pos(map_, flow, R, R * R, K)
        else:
            rep = estimates.gradient_estimate_verify_npc(map_, flow, R, R * R, K)
        reports.append(rep)
        rep.to_json(outdir / ("estimate_R%g.json" % R))
    estimates.reports_to_csv(reports, outdir / "estimates.csv")
    mode = cfg.numerics["scan_mode"]
    if mode == "auto":
        mode = "NPC_growth" if kappa <= 0.0 else "Pos_growth"
    scan = estimates.liouville_scan(map_, flow, R_list, mode)
    scan.to_json(outdir / "scan.json")
    return {
        "verdicts": [rep.verdict for rep in reports],
        "verdicts_all": (
            reports[0].verdict
            if all(r.verdict == reports[0].verdict for r in reports)
            else "Mixed"
        ),
        "scan_classification": scan.classification,
    }


_RUNNERS = {
    "reduced": _run_reduced,
    "assumptions": _run_assumptions,
    "hmhf": _run_hmhf,
    "radial": _run_radial,
    "kato": _run_kato,
    "estimates": _run_estimates,
}


def _thread_cap():
    raw = os.environ.get("HMHF_LAB_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 4


def _check_expect(scenario, observed, expect):
    """Compare observations with the expectation table.

    Keys ending in _max are upper bounds; everything else compares
    equal.  Returns a list of failure strings.
    """
    table = dict(DEFAULT_EXPECT.get(scenario, {}))
    table.update({k: v for k, v in expect.items() if v is not None})
    failures = []
    for key, want in table.items():
        if key not in observed:
            continue
        got = observed[key]
        if key.endswith("_max"):
            if not got <= want:
                failures.append("%s: %s = %g exceeds %g" % (scenario, key, got, want))
        elif got != want:
            failures.append("%s: %s = %r, expected %r" % (scenario, key, got, want))
    return failures


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run_experiment(config):
    """Run the configured scenario(s); returns the process exit code."""
    out_root = Path(config.output["directory"])
    scenarios = (
        [s for s in SCENARIOS if s != "full"]
        if config.scenario == "full"
        else [config.scenario]
    )
    results = {}
    if len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=min(_thread_cap(), len(scenarios))) as ex:
            futures = {}
            for name in scenarios:
                subdir = out_root / name
                subdir.mkdir(parents=True, exist_ok=True)
                futures[name] = ex.submit(_RUNNERS[name], config, subdir)
            for name, fut in futures.items():
                results[name] = fut.result()
    else:
        name = scenarios[0]
        subdir = out_root / name
        subdir.mkdir(parents=True, exist_ok=True)
        results[name] = _RUNNERS[name](config, subdir)

    failures = []
    for name, observed in results.items():
        failures.extend(_check_expect(name, observed, config.expect))

    files = []
    for path in sorted(out_root.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            files.append(
                {
                    "path": str(path.relative_to(out_root)),
                    "sha256": _sha256(path),
                    "bytes": path.stat().st_size,
                }
            )
    manifest = {
        "scenario": config.scenario,
        "results": results,
        "expect_failures": failures,
        "files": files,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
    }
    write_json(out_root / "manifest.json", manifest)
    for line in failures:
        print("EXPECT FAIL " + line)
    return 2 if failures else 0


# ---------------------------------------------------------------------------
# plots


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "hmhf-lab"
    return plt


def _write_dat(path, header, columns):
    lines = ["# " + " ".join(header)]
    for row in zip(*columns):
        lines.append(" ".join("%.17g" % float(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})


def _plot_radial(outdir):
    data = json.loads((outdir / "exponent.json").read_text())
    rows = (outdir / "trajectory.csv").read_text().splitlines()[1:]
    t, alpha = [], []
    for row in rows:
        cols = row.split(",")
        gap = math.pi - float(cols[1])
        if 0.0 < gap < 1.0:
            t.append(float(cols[0]))
            alpha.append(gap)
    _write_dat(outdir / "exponent_fit.dat", ["t", "pi_minus_alpha"], [t, alpha])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.semilogy(t, alpha, lw=1.0)
    label = "fitted exponent %.4f" % data.get("fitted_exponent", float("nan"))
    ax.set_xlabel("t = log r")
    ax.set_ylabel("pi - alpha")
    ax.set_title(label)
    _save(fig, outdir / "exponent_fit.svg")
    plt.close(fig)


def _plot_estimates(outdir):
    rows = (outdir / "estimates.csv").read_text().splitlines()[1:]
    R, margin = [], []
    for row in rows:
        cols = row.split(",")
        R.append(float(cols[1]))
        margin.append(float(cols[6]))
    _write_dat(outdir / "margin_vs_R.dat", ["R", "margin"], [R, margin])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.loglog(R, margin, marker="o")
    ax.set_xlabel("window radius R")
    ax.set_ylabel("margin = rhs - lhs_max")
    _save(fig, outdir / "margin_vs_R.svg")
    plt.close(fig)


def _plot_reduced(outdir):
    rows = (outdir / "reduced.csv").read_text().splitlines()[1:]
    d2, lbar = [], []
    for row in rows:
        cols = row.split(",")
        d2.append(float(cols[0]) ** 2)
        lbar.append(float(cols[4]))
    _write_dat(outdir / "lbar_vs_d2.dat", ["d_squared", "Lbar"], [d2, lbar])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.plot(d2, lbar, ".", ms=2)
    ax.set_xlabel("d^2")
    ax.set_ylabel("Lbar = 4 tau ell")
    _save(fig, outdir / "lbar_vs_d2.svg")
    plt.close(fig)


def _plot_assumptions(outdir):
    rows = (outdir / "gate_curves.csv").read_text().splitlines()[1:]
    tau, H, D = [], [], []
    for row in rows:
        cols = row.split(",")
        tau.append(float(cols[0]))
        H.append(float(cols[1]))
        D.append(float(cols[2]))
    _write_dat(outdir / "gate_curves.dat", ["tau", "H", "muller_at_v1"], [tau, H, D])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.plot(tau, H, label="H")
    ax.plot(tau, D, label="muller at |V|=1")
    ax.set_xlabel("tau")
    ax.legend()
    _save(fig, outdir / "gate_curves.svg")
    plt.close(fig)


def _plot_hmhf(outdir):
    rows = (outdir / "energy.csv").read_text().splitlines()[1:]
    t, E = [], []
    for row in rows:
        cols = row.split(",")
        t.append(float(cols[0]))
        E.append(float(cols[1]))
    _write_dat(outdir / "energy.dat", ["t", "energy"], [t, E])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.plot(t, E)
    ax.set_xlabel("t")
    ax.set_ylabel("map energy")
    _save(fig, outdir / "energy.svg")
    plt.close(fig)


def _plot_kato(outdir):
    data = json.loads((outdir / "kato.json").read_text())
    edges = data["slack_histogram_edges"]
    counts = data["slack_histogram_counts"]
    mids = [(a + b) / 2.0 for a, b in zip(edges[:-1], edges[1:])]
    _write_dat(outdir / "slack_hist.dat", ["slack", "count"], [mids, counts])
    plt = _mpl()
    fig, ax = plt.subplots()
    ax.bar(mids, counts, width=(edges[1] - edges[0]) * 0.9)
    ax.set_xlabel("relative slack")
    ax.set_ylabel("count")
    _save(fig, outdir / "slack_hist.svg")
    plt.close(fig)


_PLOTTERS = {
    "radial": ("exponent.json", _plot_radial),
    "estimates": ("estimates.csv", _plot_estimates),
    "reduced": ("reduced.csv", _plot_reduced),
    "assumptions": ("gate_curves.csv", _plot_assumptions),
    "hmhf": ("energy.csv", _plot_hmhf),
    "kato": ("kato.json", _plot_kato),
}


def emit_plots(directory):
    """Write .dat and .svg companions next to each scenario's reports."""
    root = Path(directory)
    made = []
    for name, (marker, plotter) in _PLOTTERS.items():
        for outdir in [root, root / name]:
            if (outdir / marker).is_file():
                plotter(outdir)
                made.append(name)
                break
    if not made:
        raise MissingReport(
            "no scenario reports found under %s; run an experiment first" % root
        )
    return made


# ---------------------------------------------------------------------------
# entry point


def _schema_help():
    lines = ["config schema (TOML; unknown keys are rejected):", ""]
    lines.append("  scenario = one of %s" % ", ".join(SCENARIOS))
    for section, keys in SCHEMA.items():
        lines.append("  [%s]" % section)
        for key, (type_name, default, help_text) in keys.items():
            d = "required per scenario" if default is None else repr(default)
            lines.append("    %s (%s, default %s): %s" % (key, type_name, d, help_text))
    lines.append("")
    lines.append("environment: HMHF_LAB_THREADS caps batch parallelism (default 4)")
    return "\n".join(lines)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="hmhf-lab",
        description="Numerical laboratory for harmonic map heat flow estimates.",
        epilog=_schema_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run a config")
    p_run.add_argument("config", help="TOML experiment config")
    p_plot = sub.add_parser("plot", help="emit plot data for an output directory")
    p_plot.add_argument("directory", help="directory written by `run`")
    p_const = sub.add_parser("constants", help="print the estimate constants")
    p_const.add_argument("--m", type=int, required=True, help="dimension")
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            return run_experiment(load_config(args.config))
        if args.command == "plot":
            emit_plots(args.directory)
            return 0
        if args.command == "constants":
            cutoff = estimates.build_cutoff(1.0, 1.0)
            consts = estimates.theorem_constants(args.m, cutoff)
            out = {
                "m": consts.m,
                "C34": consts.C34,
                "C": consts.C,
                "Cbar_m": consts.Cbar_m,
                "Ctilde1": consts.Ctilde1,
                "Ctilde2": consts.Ctilde2,
                "c_m": consts.c_m,
                "cbar_m": estimates.positive_curvature_constant(args.m, cutoff),
            }
            print(json.dumps(out, indent=2, sort_keys=True))
            return 0
    except ConfigInvalid as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except MissingReport as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:  # execution failure, not a verdict failure
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
