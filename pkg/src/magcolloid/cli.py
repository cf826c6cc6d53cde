"""Command-line front end.

    magcolloid spear --N 16 --alpha 36 --beta 3
    magcolloid ring --Ns 8,16,32 --format json
    magcolloid dynamics --init random --N 12 --seed 3 --out run.json
    magcolloid thresholds --beta 3
    magcolloid gershgorin --gamma 4 --c 0.01 --count 100

A ``--config`` file holds ``key = value`` lines using the long option names;
command-line flags override it.  Exit codes: 0 ok, 1 bad configuration,
2 solver/integrator failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import dynamics, gershgorin, ring, spear
from .errors import ConvergenceError, DomainError, IntegratorError, OverlapError
from .potential import LJParams, alpha_dag, alpha_star, characteristic_distances

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# ---------------------------------------------------------------------------
# serialisation


def fmt(x) -> str:
    """17 significant digits: lossless for float64."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return "%.17g" % float(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isfinite(f):
            return float(fmt(f))
        return "nan" if math.isnan(f) else ("inf" if f > 0 else "-inf")
    return obj


def to_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    return buf.getvalue()


def emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# configuration

_FLOAT_KEYS = {"A", "B", "B0", "alpha", "beta", "tol", "perturb", "mu", "radius", "nu",
               "horizon", "dt", "gamma", "c", "d"}
_INT_KEYS = {"N", "seed", "cadence", "count", "size", "k_max", "max_iter"}


def read_config(path) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments ignored."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            k, v = (s.strip() for s in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _coerce(key, value):
    try:
        if key in _FLOAT_KEYS:
            return float(value)
        if key in _INT_KEYS:
            return int(value)
        if key == "Ns":
            return parse_ns(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def parse_ns(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError:
        raise ConfigError(f"bad value for Ns: {text!r}") from None


def _global_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    for name in ("A", "B", "B0", "alpha", "beta"):
        g.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--config", default=None, help="key = value file; flags win")
    return p


def build_parser():
    parent = _global_parent()
    ap = _Parser(prog="magcolloid", description="Magnetic colloid chains, rings and dynamics.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("spear", parents=[parent], help="solve the aligned chain")
    sp.add_argument("--N", type=int, default=None)
    sp.add_argument("--Ns", default=None, help="comma list: asymptotic sweep instead of one solve")
    sp.add_argument("--max-iter", dest="max_iter", type=int, default=None)

    rp = sub.add_parser("ring", parents=[parent], help="explicit ring radius")
    rp.add_argument("--N", type=int, default=None)
    rp.add_argument("--Ns", default=None)

    dp = sub.add_parser("dynamics", parents=[parent], help="dissipative particle dynamics")
    dp.add_argument("--N", type=int, default=None)
    dp.add_argument("--init", choices=("random", "spear", "ring"), default=None)
    dp.add_argument("--perturb", type=float, default=None)
    dp.add_argument("--mu", type=float, default=None)
    dp.add_argument("--radius", type=float, default=None)
    dp.add_argument("--nu", type=float, default=None)
    dp.add_argument("--horizon", type=float, default=None)
    dp.add_argument("--dt", type=float, default=None)
    dp.add_argument("--cadence", type=int, default=None)
    dp.add_argument("--snapshots", default=None, help="snapshot CSV path")

    sub.add_parser("thresholds", parents=[parent], help="alpha thresholds and distances")

    gp = sub.add_parser("gershgorin", parents=[parent], help="inverse decay on random matrices")
    gp.add_argument("--gamma", type=float, default=None)
    gp.add_argument("--c", type=float, default=None)
    gp.add_argument("--d", type=float, default=None)
    gp.add_argument("--size", type=int, default=None)
    gp.add_argument("--count", type=int, default=None)
    gp.add_argument("--k-max", dest="k_max", type=int, default=None)
    return ap


DEFAULTS = {
    "common": {"A": 1.0, "B": 1.0, "B0": 1.0, "alpha": 12.0, "beta": 3.0, "out": None,
               "format": "csv", "seed": 0, "tol": 1e-10},
    "spear": {"N": 16, "Ns": None, "max_iter": 200},
    "ring": {"N": 12, "Ns": None},
    "dynamics": {"A": 0.5, "B": 2.0, "B0": 1.0, "format": "json", "N": 12, "init": "random",
                 "perturb": 0.0, "mu": 20.0, "radius": 0.5, "nu": 0.1, "horizon": 4000.0,
                 "dt": None, "cadence": 1000, "snapshots": None, "tol": 1e-6},
    "thresholds": {"format": "json", "tol": 1e-8},
    "gershgorin": {"format": "json", "gamma": 4.0, "c": 0.01, "d": 1.0, "size": 100,
                   "count": 100, "k_max": 8},
}


def resolve(args) -> dict:
    """Merge defaults < config file < flags into one validated dict."""
    cfg = dict(DEFAULTS["common"])
    cfg.update(DEFAULTS[args.command])
    if args.config:
        try:
            fromfile = read_config(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        for k, v in fromfile.items():
            if k not in cfg:
                raise ConfigError(f"unknown config key {k!r} for {args.command}")
            cfg[k] = _coerce(k, v)
    for k, v in vars(args).items():
        if k in ("command", "config") or v is None:
            continue
        cfg[k] = v
    if cfg.get("Ns") is not None:
        cfg["Ns"] = parse_ns(cfg["Ns"])
    try:
        cfg["lj"] = LJParams(cfg["A"], cfg["B"], cfg["B0"], cfg["alpha"], cfg["beta"])
    except DomainError as exc:
        raise ConfigError(f"model parameters: {exc}") from None
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if not cfg["tol"] > 0:
        raise ConfigError("tol must be positive")
    return cfg


def _model(cfg):
    return {k: cfg[k] for k in ("A", "B", "B0", "alpha", "beta")}


# ---------------------------------------------------------------------------
# commands


def cmd_spear(cfg) -> int:
    p = cfg["lj"]
    ds = characteristic_distances(p)
    if cfg["Ns"]:
        rep = spear.asymptotic_report(p, cfg["Ns"], tol=cfg["tol"])
        if cfg["format"] == "json":
            emit(to_json({"model": _model(cfg), **rep}), cfg["out"])
        else:
            cols = ["N", "center", "quarter", "boundary", "center_err", "boundary_to_tilde",
                    "boundary_to_bar", "min_minus_bar"]
            emit(to_csv(cols, [[r[c] for c in cols] for r in rep["rows"]]), cfg["out"])
        return EXIT_OK
    N = cfg["N"]
    if N is None or N < 2:
        raise ConfigError("N must be at least 2")
    sol = spear.solve_spear(N, p, tol=cfg["tol"], max_iter=cfg["max_iter"])
    res = spear.criticality_residual(sol.spacing, p)
    if cfg["format"] == "json":
        cert = sol.certificate
        emit(to_json({
            "model": _model(cfg), "N": N, "h": sol.h, "residual": res, "energy": sol.energy,
            "grad_norm": sol.grad_norm, "iterations": sol.iterations, "box_respected": sol.box_respected,
            "certificate": None if cert is None else vars(cert), "distances": ds.as_dict(),
        }), cfg["out"])
    else:
        rows = [[k + 1, sol.h[k], ds.h_bar, ds.h_check, ds.h_hat, res[k]] for k in range(N - 1)]
        emit(to_csv(["k", "h_k", "h_bar", "h_check", "h_hat", "residual_k"], rows), cfg["out"])
    return EXIT_OK


def cmd_ring(cfg) -> int:
    p = cfg["lj"]
    Ns = cfg["Ns"] or [cfg["N"]]
    if min(Ns) < 2:
        raise ConfigError("N must be at least 2")
    h_bar = characteristic_distances(p).h_bar
    cols = ["N", "A_tilde", "B_tilde", "r_star", "nn_distance", "nn_error", "h_bar"]
    rows = []
    for N in Ns:
        s = ring.ring_radius(N, p)
        rows.append([N, s.a_tilde, s.b_tilde, s.radius, s.nn_distance, abs(s.nn_distance - h_bar), h_bar])
    if cfg["format"] == "json":
        emit(to_json({"model": _model(cfg), "rows": [dict(zip(cols, r)) for r in rows]}), cfg["out"])
    else:
        emit(to_csv(cols, rows), cfg["out"])
    return EXIT_OK


SNAPSHOT_HEADER = ["t", "k", "x1", "x2", "x3", "m1", "m2", "m3", "v1", "v2", "v3", "w1", "w2", "w3"]


def snapshot_rows(snapshots):
    for s in snapshots:
        for k in range(s.n):
            yield [s.time, k, *s.x[k], *s.m[k], *s.v[k], *s.w[k]]


def _initial_state(cfg, pp):
    N, init, seed = cfg["N"], cfg["init"], cfg["seed"]
    if N is None or N < 2:
        raise ConfigError("N must be at least 2")
    if init == "random":
        st = dynamics.random_state(N, seed)
    elif init == "spear":
        st = dynamics.spear_configuration(spear.solve_spear(N, pp.lj, tol=min(cfg["tol"], 1e-12)).h)
    else:
        st = ring.ring_configuration(N, ring.ring_radius(N, pp.lj).radius)
    eps = cfg["perturb"]
    if eps < 0:
        raise ConfigError("perturb must be non-negative")
    if eps > 0:
        rng = np.random.default_rng(seed)
        st = dynamics.SystemState(st.x + eps * rng.normal(size=st.x.shape),
                                  st.m + eps * rng.normal(size=st.m.shape))
    return st


def cmd_dynamics(cfg) -> int:
    try:
        pp = dynamics.PhysicalParams(cfg["lj"], mu=cfg["mu"], radius=cfg["radius"], nu=cfg["nu"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    dt = cfg["dt"] or pp.stable_dt()
    if not dt > 0 or not cfg["horizon"] > 0 or cfg["cadence"] < 1:
        raise ConfigError("dt, horizon and cadence must be positive")
    st = _initial_state(cfg, pp)
    traj = dynamics.run(st, pp, cfg["horizon"], dt, cadence=cfg["cadence"], tol=cfg["tol"])
    summary = traj.summary()
    summary.update({
        "model": _model(cfg), "physical": {"mu": pp.mu, "radius": pp.radius, "nu": pp.nu,
                                           "zeta_tr": pp.zeta_tr, "zeta_r": pp.zeta_r, "inertia": pp.inertia},
        "dt": dt, "init": cfg["init"], "N": cfg["N"], "seed": cfg["seed"],
        "drift": float(np.max(np.abs(traj.final.x - st.x))),
    })
    if cfg["snapshots"]:
        emit(to_csv(SNAPSHOT_HEADER, snapshot_rows(traj.snapshots)), cfg["snapshots"])
    if cfg["format"] == "json":
        emit(to_json(summary), cfg["out"])
    else:
        emit(to_csv(SNAPSHOT_HEADER, snapshot_rows(traj.snapshots)), cfg["out"])
    return EXIT_OK


def cmd_thresholds(cfg) -> int:
    p = cfg["lj"]
    b = p.beta
    out = {
        "beta": b, "alpha": p.alpha,
        "alpha_dag": alpha_dag(b, tol=cfg["tol"]), "alpha_star": alpha_star(b, tol=cfg["tol"]),
        "distances": characteristic_distances(p).as_dict(), "model": _model(cfg),
    }
    if cfg["format"] == "json":
        emit(to_json(out), cfg["out"])
    else:
        flat = [["alpha_dag", out["alpha_dag"]], ["alpha_star", out["alpha_star"]]]
        flat += [[k, v] for k, v in out["distances"].items()]
        emit(to_csv(["key", "value"], flat), cfg["out"])
    return EXIT_OK


def cmd_gershgorin(cfg) -> int:
    try:
        spec = gershgorin.DecayMatrixSpec(cfg["gamma"], cfg["c"], cfg["d"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    if cfg["size"] < 1 or cfg["size"] > gershgorin.MAX_N or cfg["count"] < 1:
        raise ConfigError(f"size must be in [1, {gershgorin.MAX_N}] and count positive")
    rng = np.random.default_rng(cfg["seed"])
    hyp_ok, worst, counter = True, 0.0, None
    neumann_ok = True
    for i in range(cfg["count"]):
        M = gershgorin.random_decay_matrix(spec, cfg["size"], rng)
        rep = gershgorin.check_inverse_decay(M, spec)
        hyp_ok &= rep["hypotheses"]["all"]
        if rep["max_ratio"] is not None:
            worst = max(worst, rep["max_ratio"])
        if counter is None and rep["counterexample"] is not None:
            counter = {"instance": i, **rep["counterexample"]}
        if i == 0 and spec.contracting:
            neumann_ok = gershgorin.neumann_coefficients(M, spec, cfg["k_max"])["all"]
    out = {
        "spec": spec.as_dict(), "hypotheses": bool(hyp_ok), "r_plus": spec.r_plus,
        "kappa": spec.kappa, "max_ratio": worst if spec.contracting else None,
        "neumann": bool(neumann_ok), "counterexample": counter,
        "count": cfg["count"], "size": cfg["size"], "seed": cfg["seed"],
    }
    if cfg["format"] == "json":
        emit(to_json(out), cfg["out"])
    else:
        keys = ["hypotheses", "r_plus", "kappa", "max_ratio", "neumann"]
        emit(to_csv(["key", "value"], [[k, "" if out[k] is None else out[k]] for k in keys]), cfg["out"])
    return EXIT_CONVERGENCE if counter is not None else EXIT_OK


COMMANDS = {
    "spear": cmd_spear, "ring": cmd_ring, "dynamics": cmd_dynamics,
    "thresholds": cmd_thresholds, "gershgorin": cmd_gershgorin,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, OverlapError, IntegratorError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
