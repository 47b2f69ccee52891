"""Command-line front end: ``coinshift {simulate,optimize,compare,decohere}``."""

import argparse
import configparser
import logging
import math
import os
import sys
from dataclasses import asdict, replace

import numpy as np

from .linalg import LinalgError
from .metrics import DegenerateSeries, build_report, fit_growth, trend
from .optimizer import R_SWEEP, optimize
from .output import DISTRIBUTION_COLUMNS, METRIC_COLUMNS, RunManifest, distribution_rows, metric_rows
from .phase_space import STD_CONVENTION, WalkConfig
from .walk import pi_separation_step, run_trajectory

log = logging.getLogger("coinshift")

EXIT_CONFIG = 2
EXIT_NUMERIC = 3

CONFIG_KEYS = (
    "d", "alpha_re", "alpha_im", "r", "g_tau", "omega_tau", "steps",
    "coin0_re", "coin0_im", "coin1_re", "coin1_im", "dephasing_p",
    "window_start", "window_end", "restarts", "seed",
)  # fmt: skip
INT_KEYS = {"d", "steps", "window_start", "window_end", "restarts", "seed"}


class ConfigError(Exception):
    pass


def read_config(path):
    """Parse a flat ``key = value`` file; an INI section header is optional."""
    if path is None:
        return {}
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if text.lstrip().startswith("["):
            parser.read_string(text)
        else:
            parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    values = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                values[key] = int(raw) if key in INT_KEYS else float(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return values


def resolve(values, args):
    """Merge file values with command-line overrides into run settings."""
    v = dict(values)
    for key in ("seed", "steps", "restarts"):
        if getattr(args, key, None) is not None:
            v[key] = getattr(args, key)
    try:
        cfg = WalkConfig(
            d=v.get("d", 31),
            alpha=complex(v.get("alpha_re", -5.0), v.get("alpha_im", 0.0)),
            r=v.get("r", 1.0),
            g_tau=v.get("g_tau"),
            omega_tau=v.get("omega_tau", math.pi / 2),
            steps=v.get("steps", 0),
            coin_init=(
                complex(v.get("coin0_re", 1.0), v.get("coin0_im", 0.0)),
                complex(v.get("coin1_re", 0.0), v.get("coin1_im", 0.0)),
            ),
            dephasing_p=v.get("dephasing_p", 0.0),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    window = (v.get("window_start", 1), v.get("window_end"))
    if window[1] is not None and not 0 <= window[0] <= window[1]:
        raise ConfigError(f"bad window {window}")
    return cfg, window, v.get("restarts", 100), v.get("seed", 0)


def config_dict(cfg):
    out = asdict(cfg)
    out["alpha"] = [cfg.alpha.real, cfg.alpha.imag]
    out["coin_init"] = [[c.real, c.imag] for c in cfg.coin_init]
    return out


def horizon(cfg, steps=None):
    """Run length: explicit steps, else the target walk's pi-separation step."""
    steps = cfg.steps if steps is None else steps
    return steps if steps > 0 else pi_separation_step(cfg, "standard")


def paired_runs(cfg, steps, keep_states=True):
    """Exact (configured frequencies) and target walk trajectories of equal length."""
    run_cfg = replace(cfg, steps=steps)
    if cfg.dephasing_p > 0:
        kinds = ("decoherent-exact", "decoherent-standard")
    else:
        kinds = ("exact", "standard")
    return tuple(run_trajectory(run_cfg, k, keep_states) for k in kinds)


def fit_summary(fit):
    return None if fit is None else {"coef": fit.coef, "intercept": fit.intercept, "r2": fit.r2}


def report_summary(report):
    out = {
        "steps": report.steps,
        "max_hellinger": float(np.max(report.hellinger_per_step)),
        "mean_hellinger": float(np.mean(report.hellinger_per_step[1:])) if report.steps else 0.0,
        "fit_window": list(report.window),
        "linear_fit": {k: fit_summary(f) for k, f in report.linear_fit.items()},
        "power_fit": {k: fit_summary(f) for k, f in report.power_fit.items()},
        "std_convention": STD_CONVENTION,
    }
    if report.negativity_exact is not None:
        out["mean_abs_negativity_gap"] = float(np.mean(np.abs(report.negativity_exact - report.negativity_approx)))
    return out


def _manifest(command, cfg, window, seed, out):
    os.makedirs(out, exist_ok=True)
    return RunManifest(command, config_dict(cfg), window, seed, out)


# -- commands ---------------------------------------------------------------


def cmd_simulate(cfg, window, restarts, seed, args):
    steps = horizon(cfg)
    exact, approx = paired_runs(cfg, steps)
    report = build_report(exact, approx)
    m = _manifest("simulate", cfg, window, seed, args.out)
    m.write_csv("distributions_exact.csv", DISTRIBUTION_COLUMNS, distribution_rows(exact.probs))
    m.write_csv("distributions_approx.csv", DISTRIBUTION_COLUMNS, distribution_rows(approx.probs))
    m.write_csv("metrics.csv", METRIC_COLUMNS, metric_rows(report))
    final_e, final_a = exact.distributions[-1], approx.distributions[-1]
    summary = report_summary(report)
    summary["final"] = {
        "step": steps,
        "peak_separation_exact": final_e.peak_separation,
        "peak_separation_approx": final_a.peak_separation,
        "circular_mean_exact": final_e.circular_mean,
        "circular_mean_approx": final_a.circular_mean,
    }
    m.write_json("summary.json", summary)
    phases = final_e.phases
    m.write_svg(
        "snapshot.svg",
        {"exact": (phases, final_e.probs), "walk": (phases, final_a.probs)},
        f"phase distribution at step {steps}", "phase (rad)", "probability",
    )
    m.save()
    return 0


def _write_error_trace(m, cfg, tag):
    steps = pi_separation_step(cfg, "standard")
    exact, approx = paired_runs(replace(cfg, dephasing_p=0.0), steps)
    report = build_report(exact, approx)
    m.write_csv(f"errors{tag}.csv", METRIC_COLUMNS, metric_rows(report))
    return report


def cmd_optimize(cfg, window, restarts, seed, args):
    rs = R_SWEEP if args.r_sweep else (cfg.r,)
    # one window for every r so the objectives stay comparable
    if window[1] is None:
        window = (window[0], pi_separation_step(replace(cfg, r=1, g_tau=None)))
    m = _manifest("optimize", cfg, window, seed, args.out)
    results, curves = {}, {}
    for r in rs:
        rcfg = replace(cfg, r=r, g_tau=None)
        res = optimize(rcfg, window, restarts=restarts, seed=seed, jobs=args.jobs)
        tag = f"_r{r:g}" if args.r_sweep else ""
        opt_cfg = res.config(rcfg)
        report = _write_error_trace(m, opt_cfg, tag)
        payload = res.to_dict()
        payload["max_hellinger_until_separation"] = float(np.max(report.hellinger_per_step))
        payload["separation_step"] = report.steps
        m.write_json(f"optimization{tag}.json", payload)
        results[r] = payload
        curves[f"r={r:g}"] = (np.arange(report.steps + 1), report.hellinger_per_step)
        log.info("r=%g objective=%.6g C=%.4g", r, res.objective, res.c_ratio)
    if args.r_sweep:
        objectives = [results[r]["objective"] for r in rs]
        m.write_json(
            "sweep.json",
            {
                "r": list(rs),
                "objective": objectives,
                "max_hellinger": [results[r]["max_hellinger_until_separation"] for r in rs],
                "non_increasing": bool(all(b <= a for a, b in zip(objectives, objectives[1:]))),
            },
        )
    m.write_svg("errors.svg", curves, "Hellinger distance to the target walk", "step", "Hellinger")
    m.save()
    return 0


def cmd_compare(cfg, window, restarts, seed, args):
    steps = cfg.steps if cfg.steps > 0 else 4 * pi_separation_step(cfg, "standard")
    exact, approx = paired_runs(cfg, steps)
    report = build_report(exact, approx)
    m = _manifest("compare", cfg, window, seed, args.out)
    t = np.arange(steps + 1)
    m.write_csv("hellinger.csv", ("step", "hellinger"), zip(t, report.hellinger_per_step))
    m.write_csv("std.csv", ("step", "std_exact", "std_approx"), zip(t, report.std_exact, report.std_approx))
    m.write_csv(
        "negativity.csv", ("step", "neg_exact", "neg_approx"), zip(t, report.negativity_exact, report.negativity_approx)
    )
    m.write_json("summary.json", report_summary(report))
    m.write_svg("hellinger.svg", {"H": (t, report.hellinger_per_step)}, "Hellinger distance", "step", "Hellinger")
    m.write_svg(
        "std.svg", {"exact": (t, report.std_exact), "walk": (t, report.std_approx)},
        "standard deviation", "step", "std (rad)",
    )
    m.write_svg(
        "negativity.svg", {"exact": (t, report.negativity_exact), "walk": (t, report.negativity_approx)},
        "coin-walker negativity", "step", "negativity",
    )
    m.save()
    return 0


def parse_p_list(text):
    try:
        ps = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --p-list {text!r}") from exc
    if not ps or any(not 0 <= p <= 1 for p in ps):
        raise ConfigError(f"--p-list values must lie in [0, 1]: {text!r}")
    return ps


def _power_fit(std, t):
    try:
        return fit_summary(fit_growth(std[1:], "power", steps=t[1:]))
    except DegenerateSeries:
        return None


def cmd_decohere(cfg, window, restarts, seed, args):
    ps = parse_p_list(args.p_list)
    steps = horizon(cfg)
    m = _manifest("decohere", cfg, window, seed, args.out)
    summary, std_curves, h_curves = {}, {}, {}
    t = np.arange(steps + 1)
    for p in ps:
        pcfg = replace(cfg, dephasing_p=p, steps=steps)
        exact = run_trajectory(pcfg, "decoherent-exact")
        approx = run_trajectory(pcfg, "decoherent-standard")
        report = build_report(exact, approx)
        tag = f"p{p:g}"
        m.write_csv(f"std_{tag}.csv", ("step", "std_exact", "std_approx"), zip(t, report.std_exact, report.std_approx))
        m.write_csv(f"hellinger_{tag}.csv", ("step", "hellinger"), zip(t, report.hellinger_per_step))
        entry = report_summary(report)
        entry["power_fit_full_run"] = {
            "exact": _power_fit(report.std_exact, t),
            "approx": _power_fit(report.std_approx, t),
        }
        entry["hellinger_spearman"] = trend(report.hellinger_per_step)
        summary[f"{p:g}"] = entry
        std_curves[f"p={p:g} exact"] = (t, report.std_exact)
        std_curves[f"p={p:g} walk"] = (t, report.std_approx)
        h_curves[f"p={p:g}"] = (t, report.hellinger_per_step)
    m.write_json("decoherence.json", summary)
    m.write_svg("std.svg", std_curves, "standard deviation under coin dephasing", "step", "std (rad)")
    m.write_svg("hellinger.svg", h_curves, "Hellinger distance under coin dephasing", "step", "Hellinger")
    m.save()
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "compare": cmd_compare,
    "decohere": cmd_decohere,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="coinshift", description="Quantum walk with simultaneous coin and shift.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="flat key = value run configuration")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for optimizer restarts")
    parser.add_argument("--steps", type=int, help="number of steps; 0 stops at antipodal peaks")
    parser.add_argument("--r-sweep", action="store_true", help="optimize for r in 1, 2, 4, 8, 10")
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--p-list", default="0,0.1,0.5,1", help="comma-separated dephasing probabilities")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg, window, restarts, seed = resolve(read_config(args.config), args)
        return COMMANDS[args.command](cfg, window, restarts, seed, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LinalgError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
