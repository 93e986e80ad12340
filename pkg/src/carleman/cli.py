"""Command-line front end.

One experiment per invocation, driven by a JSON config file::

    carleman <command> --config exp.json [--out DIR] [--grid n,L,N]
             [--seed INT] [--csv] [--compare GOLDEN.json]

Commands: ``admissible``, ``constants``, ``verify``, ``sweep-tau``,
``sweep-scale``, ``pitt``, ``uc``.  Unknown config keys are errors (no
silent defaults drift).  Every report embeds the fully resolved config and
is byte-reproducible given the same config and seed; ``--compare`` checks
a fresh run against a golden report ignoring only the timestamp field.

Exit codes: 0 success, 1 usage/input error, 2 invalid parameters,
3 negative verdict (so suites can gate on verdicts).

The environment variable ``CARLEMAN_THREADS`` caps internal parallelism
(default 1; parallel runs remain deterministic).

Grid weights and functions referenced by configs use the flat CSV/binary
layouts documented in :mod:`carleman.io` (header with n, L, N, offset,
then indexed value rows or a raw little-endian array).
"""

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _kernels, conditions, harness, io, params as params_mod, weights
from .errors import CarlemanError, ConfigError, ParameterError
from .harness import Direction, GridSpec, PotentialSpec, TestFamily
from .params import PowerExponents
from .weights import PiecewisePowerWeight

NEGATIVE_VERDICTS = {"violated", "no conclusion", "non-uniform",
                     "inconclusive", "not admissible", "mismatch"}

_COMMON_KEYS = {"params", "weights", "grid", "seed", "out"}
_ALLOWED_KEYS = {
    "admissible": _COMMON_KEYS | {"potential", "compact_support"},
    "constants": _COMMON_KEYS | {"pitt", "equivalence"},
    "verify": _COMMON_KEYS | {"family", "member", "member_overrides",
                              "amplitude", "direction"},
    "sweep-tau": _COMMON_KEYS | {"family", "tau_list", "direction"},
    "sweep-scale": _COMMON_KEYS | {"family", "member", "alpha", "beta",
                                   "lambda_list", "direction"},
    "pitt": _COMMON_KEYS | {"family", "pitt"},
    "uc": _COMMON_KEYS | {"potential", "compact_support", "c0", "c1",
                          "support_box", "domain_box"},
}
_SUB_KEYS = {
    "params": {"n", "p", "q", "gamma", "tau", "case"},
    "weights": {"alpha", "beta", "u_file", "v_file"},
    "grid": {"L", "N"},
    "family": {"kind", "count", "seed"},
    "potential": {"s1", "s2", "amplitude"},
    "direction": {"a", "b"},
    "pitt": {"p", "q", "alpha", "beta"},
    "equivalence": {"beta1", "beta2"},
}


def _check_keys(cfg: dict, command: str):
    allowed = _ALLOWED_KEYS[command]
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    for key, sub_allowed in _SUB_KEYS.items():
        if key in cfg and isinstance(cfg[key], dict):
            bad = set(cfg[key]) - sub_allowed
            if bad:
                raise ConfigError(f"unknown keys in {key!r}: {sorted(bad)}")


def _load_config(path: str, command: str, args) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    _check_keys(cfg, command)
    if args.grid:
        try:
            n, L, N = args.grid.split(",")
            cfg.setdefault("params", {})
            cfg["grid"] = {"L": float(L), "N": int(N)}
            cfg["params"]["n"] = int(n)
        except ValueError as exc:
            raise ConfigError("--grid expects n,L,N") from exc
    if args.seed is not None:
        cfg["seed"] = args.seed
    return cfg


def _paramset(cfg: dict):
    pc = cfg.get("params")
    if pc is None:
        raise ConfigError("config is missing the 'params' section")
    missing = {"n", "p", "q", "gamma", "tau", "case"} - set(pc)
    if missing:
        raise ConfigError(f"params section is missing {sorted(missing)}")
    return params_mod.validate_params(pc["n"], pc["p"], pc["q"], pc["gamma"],
                                      pc["tau"], pc["case"])


def _power_exponents(cfg: dict) -> PowerExponents:
    wc = cfg.get("weights", {})
    alpha = wc.get("alpha", [0.0, 0.0])
    beta = wc.get("beta", [0.0, 0.0])
    return PowerExponents(alpha1=float(alpha[0]), alpha2=float(alpha[1]),
                          beta1=float(beta[0]), beta2=float(beta[1]))


def _weight_pair(cfg: dict):
    """Weights from the config: piecewise-power exponents or grid files."""
    wc = cfg.get("weights", {})
    pw = _power_exponents(cfg)
    u = PiecewisePowerWeight(-pw.alpha1, -pw.alpha2)
    v = PiecewisePowerWeight(pw.beta1, pw.beta2)
    if "u_file" in wc:
        if not Path(wc["u_file"]).exists():
            raise ConfigError(f"weight file not found: {wc['u_file']}")
        u = io.load_grid_weight(wc["u_file"])
    if "v_file" in wc:
        if not Path(wc["v_file"]).exists():
            raise ConfigError(f"weight file not found: {wc['v_file']}")
        v = io.load_grid_weight(wc["v_file"])
    return u, v, pw


def _gridspec(cfg: dict, n: int) -> GridSpec:
    gc = cfg.get("grid")
    if gc is None:
        defaults = {1: (12.0, 1024), 2: (8.0, 256), 3: (6.0, 64)}
        L, N = defaults.get(n, (6.0, 64))
        return GridSpec(n=n, L=L, N=N)
    return GridSpec(n=n, L=float(gc["L"]), N=int(gc["N"]))


def _direction(cfg: dict, n: int) -> Direction:
    dc = cfg.get("direction")
    if dc is None:
        return Direction.axis(n, n - 1)
    return Direction(np.asarray(dc["a"], dtype=np.float64), float(dc.get("b", 0.0)))


def _family(cfg: dict, grid: GridSpec) -> TestFamily:
    fc = cfg.get("family")
    if fc is None:
        raise ConfigError("config is missing the 'family' section")
    seed = int(fc.get("seed", cfg.get("seed", 0)))
    return TestFamily.build(fc["kind"], int(fc.get("count", 1)), grid, seed=seed)


def _sanitize(obj):
    """JSON-safe deep copy: numpy scalars to python, inf/nan to strings."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _condition_value_dict(cv: conditions.ConditionValue) -> dict:
    return {"value": cv.value, "argmax_s": cv.argmax_s, "method": cv.method,
            "divergence": cv.divergence, "note": cv.note}


def _write_report(command: str, cfg: dict, results: dict, outdir: Path,
                  csv_rows=None, csv_header=None, want_csv=False) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    report = {
        "command": command,
        "version": __version__,
        "backend": _kernels.BACKEND,
        "config": _sanitize(cfg),
        "results": _sanitize(results),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    path = outdir / f"{command.replace('-', '_')}_report.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if want_csv and csv_rows is not None:
        csv_path = path.with_suffix(".csv")
        lines = [",".join(csv_header)]
        lines += [",".join(repr(x) if isinstance(x, float) else str(x) for x in row)
                  for row in csv_rows]
        csv_path.write_text("\n".join(lines) + "\n")
    return path


def _compare(path: Path, golden: str) -> bool:
    ours = json.loads(path.read_text())
    theirs = json.loads(Path(golden).read_text())
    ours.pop("timestamp", None)
    theirs.pop("timestamp", None)
    return (json.dumps(ours, sort_keys=True).encode()
            == json.dumps(theirs, sort_keys=True).encode())


def _collect_verdicts(results) -> list:
    found = []

    def walk(obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                if k == "verdict" and isinstance(v, str):
                    found.append(v)
                else:
                    walk(v)
        elif isinstance(obj, (list, tuple)):
            for v in obj:
                walk(v)

    walk(results)
    return found


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_admissible(cfg: dict) -> dict:
    ps = _paramset(cfg)
    pw = _power_exponents(cfg)
    region = params_mod.admissible_powers(ps)
    member = region.contains(pw)
    results = {
        "region": {"alpha1_max": region.alpha1_max, "alpha2_min": region.alpha2_min,
                   "beta1_max": region.beta1_max, "beta2_min": region.beta2_min},
        "powers": {"alpha": [pw.alpha1, pw.alpha2], "beta": [pw.beta1, pw.beta2]},
        "admissible": member,
        "verdict": "admissible" if member else "not admissible",
    }
    if pw.alpha1 == pw.alpha2 and pw.beta1 == pw.beta2:
        results["necessity"] = params_mod.necessity_check(pw.alpha1, pw.beta1, ps)
        if results["necessity"] == "violated":
            results["verdict"] = "violated"
    if "potential" in cfg:
        pot = cfg["potential"]
        ok = harness.potential_admissible(float(pot["s1"]), float(pot["s2"]), pw, ps,
                                          bool(cfg.get("compact_support", False)))
        results["potential_admissible"] = ok
        if not ok:
            results["verdict"] = "not admissible"
    print(f"admissible: {results['verdict']}"
          + (f", necessity {results['necessity']}" if "necessity" in results else ""))
    return results


def cmd_constants(cfg: dict) -> dict:
    ps = _paramset(cfg)
    _, _, pw = _weight_pair(cfg)
    u_star = weights.rearranged_power_weight(ps.n, pw.alpha1, pw.alpha2)
    v_recip_star = weights.rearranged_power_weight(ps.n, pw.beta1, pw.beta2)
    results = {
        "u_condition": _condition_value_dict(conditions.u_condition(u_star, ps, ps.tau)),
    }
    if ps.case == "a":
        results["v_condition"] = _condition_value_dict(conditions.v_condition(v_recip_star, ps))
        try:
            results["u_condition_simplified"] = _condition_value_dict(
                conditions.u_condition_simplified(u_star, ps))
        except CarlemanError as exc:
            results["u_condition_simplified"] = {"error": str(exc)}
    else:
        results["v_condition_integral"] = _condition_value_dict(
            conditions.v_condition_integral(v_recip_star, ps))
    if "pitt" in cfg:
        pc = cfg["pitt"]
        pp, qq = float(pc["p"]), float(pc["q"])
        pu = weights.rearranged_power_weight(ps.n, float(pc["alpha"][0]), float(pc["alpha"][1]))
        pwr = weights.rearranged_power_weight(ps.n, float(pc["beta"][0]), float(pc["beta"][1]))
        if pp <= qq:
            results["pitt_sup_condition"] = _condition_value_dict(
                conditions.pitt_sup_condition(pu, pwr, pp, qq))
        else:
            results["pitt_integral_condition"] = _condition_value_dict(
                conditions.pitt_integral_condition(pu, pwr, pp, qq))
    if "equivalence" in cfg:
        ec = cfg["equivalence"]
        rep = conditions.sup_integral_vs_pointwise(u_star, float(ec["beta1"]),
                                                   float(ec["beta2"]))
        results["equivalence"] = {
            "integral_sup": _condition_value_dict(rep.integral_sup),
            "pointwise_sup": _condition_value_dict(rep.pointwise_sup),
            "ratio": rep.ratio, "beta1_ok": rep.beta1_ok, "note": rep.note,
        }
    for name, val in results.items():
        if isinstance(val, dict) and "value" in val:
            print(f"{name}: {val['value']}"
                  + (f" (divergent {val['divergence']})" if val["divergence"] else ""))
    return results


def _sample_configured_member(cfg, family, grid):
    idx = int(cfg.get("member", 0))
    if not 0 <= idx < len(family.members):
        raise ConfigError(f"member index {idx} out of range")
    member = dict(family.members[idx])
    member.update(cfg.get("member_overrides", {}))
    gf = family.sample_member(member, grid)
    amplitude = float(cfg.get("amplitude", 1.0))
    if amplitude != 1.0:
        gf = type(gf)(n=gf.n, L=gf.L, N=gf.N, values=gf.values * amplitude,
                      node_offset=gf.node_offset)
    return member, gf


def cmd_verify(cfg: dict) -> dict:
    ps = _paramset(cfg)
    u, v, _ = _weight_pair(cfg)
    grid = _gridspec(cfg, ps.n)
    family = _family(cfg, grid)
    direction = _direction(cfg, ps.n)
    member, gf = _sample_configured_member(cfg, family, grid)
    direct = harness.carleman_ratio(gf, u, v, ps, ps.tau, direction, form="direct")
    tilted = harness.carleman_ratio(gf, u, v, ps, ps.tau, direction, form="tilted",
                                    with_bound=False)
    agreement = abs(direct.ratio - tilted.ratio) / direct.ratio
    results = {"member": member, "direct": direct.as_dict(),
               "tilted": tilted.as_dict(), "form_agreement_rel": agreement}
    print(f"ratio (direct) = {direct.ratio:.6g}, (tilted form) = {tilted.ratio:.6g}, "
          f"agreement {agreement:.2e}, bound A_u*A_v = {direct.c_tau_bound}")
    return results


def cmd_sweep_tau(cfg: dict) -> dict:
    ps = _paramset(cfg)
    u, v, _ = _weight_pair(cfg)
    grid = _gridspec(cfg, ps.n)
    family = _family(cfg, grid)
    tau_list = [float(t) for t in cfg.get("tau_list", [1, 2, 4, 8, 16])]
    rep = harness.tau_sweep(family, u, v, ps, tau_list, grid, _direction(cfg, ps.n))
    print(f"tau sweep verdict: {rep.verdict}; ratios "
          + ", ".join(f"{t}:{r:.4g}" for t, r in zip(rep.values, rep.ratios)))
    return {"sweep": rep.as_dict()}


def cmd_sweep_scale(cfg: dict) -> dict:
    ps = _paramset(cfg)
    grid = _gridspec(cfg, ps.n)
    family = _family(cfg, grid)
    idx = int(cfg.get("member", 0))
    member = dict(family.members[idx])
    lambda_list = [float(x) for x in cfg.get(
        "lambda_list", list(np.geomspace(0.125, 8.0, 9)))]
    alpha = float(cfg.get("alpha", 0.0))
    beta = float(cfg.get("beta", 0.0))
    rep = harness.scaling_sweep(family, member, alpha, beta, ps, ps.tau,
                                lambda_list, grid, _direction(cfg, ps.n))
    print(f"scaling sweep: slope {rep.slope:.5f} (predicted "
          f"{rep.extra['predicted_slope']:.5f}), verdict {rep.verdict}")
    return {"sweep": rep.as_dict()}


def cmd_pitt(cfg: dict) -> dict:
    ps = _paramset(cfg)
    grid = _gridspec(cfg, ps.n)
    family = _family(cfg, grid)
    pc = cfg.get("pitt", {})
    pp = float(pc.get("p", ps.p))
    qq = float(pc.get("q", ps.q))
    alpha = pc.get("alpha", [0.0, 0.0])
    beta = pc.get("beta", [0.0, 0.0])
    u = PiecewisePowerWeight(-float(alpha[0]), -float(alpha[1]))
    w = PiecewisePowerWeight(float(beta[0]), float(beta[1]))
    reports = []
    for member in family.members:
        gf = family.sample_member(family.clamp(member, grid), grid)
        reports.append(harness.pitt_ratio(gf, u, w, pp, qq))
    ratios = [r.ratio for r in reports]
    results = {
        "ratios": ratios,
        "max_over_min": max(ratios) / min(ratios) if min(ratios) > 0 else math.inf,
        "condition_bound": reports[0].c_tau_bound,
        "reports": [r.as_dict() for r in reports],
    }
    print(f"pitt ratios: min {min(ratios):.6g}, max {max(ratios):.6g}, "
          f"bound {reports[0].c_tau_bound}")
    return results


def cmd_uc(cfg: dict) -> dict:
    ps = _paramset(cfg)
    pw = _power_exponents(cfg)
    pot = cfg.get("potential")
    if pot is None:
        raise ConfigError("uc command needs a 'potential' section")
    V = PotentialSpec(s1=float(pot["s1"]), s2=float(pot["s2"]),
                      amplitude=float(pot.get("amplitude", 1.0)))
    results = {}
    results["potential_admissible"] = harness.potential_admissible(
        V.s1, V.s2, pw, ps, bool(cfg.get("compact_support", False)))
    if "support_box" in cfg:
        strip = harness.strip_epsilon(V, pw, ps, float(cfg.get("c1", 1.0)),
                                      cfg["support_box"])
        results["strip"] = strip.as_dict()
        print(f"strip epsilon = {strip.epsilon:.6g} (capped: {strip.capped})")
    if "domain_box" in cfg:
        thr = harness.dirichlet_threshold(V, pw, ps, cfg["domain_box"],
                                          float(cfg.get("c0", 1.0)))
        results["threshold"] = thr.as_dict()
        results["verdict"] = thr.verdict
        print(f"threshold = {thr.threshold:.6g}: {thr.verdict}")
    if not results["potential_admissible"]:
        results["verdict"] = "not admissible"
    return results


_CSV_BUILDERS = {
    "sweep-tau": lambda res: (
        ["tau", "ratio"],
        list(zip(res["sweep"]["values"], res["sweep"]["ratios"]))),
    "sweep-scale": lambda res: (
        ["lambda", "ratio"],
        list(zip(res["sweep"]["values"], res["sweep"]["ratios"]))),
    "pitt": lambda res: (
        ["member", "ratio"],
        list(enumerate(res["ratios"]))),
}

_COMMANDS = {
    "admissible": cmd_admissible,
    "constants": cmd_constants,
    "verify": cmd_verify,
    "sweep-tau": cmd_sweep_tau,
    "sweep-scale": cmd_sweep_scale,
    "pitt": cmd_pitt,
    "uc": cmd_uc,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="carleman",
        description="numerical verification of weighted gradient and "
                    "Fourier-transform norm inequalities")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", default=None, help="output directory for reports")
    parser.add_argument("--grid", default=None, help="override grid as n,L,N")
    parser.add_argument("--seed", type=int, default=None, help="override sampling seed")
    parser.add_argument("--csv", action="store_true", help="also write CSV rows")
    parser.add_argument("--compare", default=None,
                        help="byte-compare the report against a golden file "
                             "(timestamp excluded)")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config, args.command, args)
        results = _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except CarlemanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: malformed section ({exc!r})", file=sys.stderr)
        return 1

    outdir = Path(args.out or cfg.get("out", "."))
    csv_header = csv_rows = None
    if args.command in _CSV_BUILDERS:
        csv_header, csv_rows = _CSV_BUILDERS[args.command](_sanitize(results))
    path = _write_report(args.command, cfg, results, outdir,
                         csv_rows=csv_rows, csv_header=csv_header,
                         want_csv=args.csv)
    print(f"report written to {path}")

    if args.compare:
        if _compare(path, args.compare):
            print("compare: identical (timestamp excluded)")
        else:
            print("compare: MISMATCH", file=sys.stderr)
            return 3

    verdicts = _collect_verdicts(results)
    if any(v in NEGATIVE_VERDICTS for v in verdicts):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
