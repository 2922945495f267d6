"""Command-line front end.

    cddprof gl --rho 1 --N inf --D inf --v 0.5
    cddprof flat --rho 1 --N -1 --v-grid 33 --format json --out flat.json
    cddprof verify --suite all

Exit codes: 0 ok, 2 invalid parameters / usage / unwritable output, 3 analytically
divergent or undefined request, 4 verify failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .cdd_profiles import case_model_profile, finite_mass_exists, flat_cdd_profile, gl_profile
from .comparison import JacobianSample, jac_cd_check, sturm_compare
from .errors import DIVERGENT_CODES, CddError
from .functionals import (
    CHEEGER_C,
    SANDWICH_C,
    TWO_LEVEL_C,
    cheeger_N,
    fm_bound,
    nash_constant,
    poincare_bounds,
    stability_w1,
)
from .model_density import CDParams, ModelDensity, eval_J, support_roots
from .profile1d import (
    ProfileCurve,
    WeightedDensity1D,
    brute_force_flat,
    brute_force_interval_profile,
    concentration_from_profile,
    flat_profile,
)
from .verify import SUITES, run_suite

PROFILE_FNS = {"gl": gl_profile, "flat": flat_cdd_profile, "models": case_model_profile}

# built-in defaults; a --config file overrides these, explicit flags override both
DEFAULTS = {
    "rho": None,
    "N": None,
    "D": math.inf,
    "v": None,
    "v_grid": 33,
    "r_grid": 101,
    "r_max": 10.0,
    "tol": 1e-9,
    "format": "csv",
    "out": None,
    "method": "flat",
    "H": 0.0,
    "n": 20001,
    "d": None,
    "w1": 0.0,
    "p": 1.0,
    "suite": "all",
    "sample": None,
    "d_che": None,
}

_CHUNK = 8  # fixed v-chunk size, so output never depends on the thread count


class UsageError(Exception):
    pass


def number(text: str) -> float:
    """Float parser accepting inf / -inf tokens and rejecting nan."""
    t = text.strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    try:
        x = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(x):
        raise argparse.ArgumentTypeError("nan is not accepted")
    return x


def count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("grid size must be at least 2")
    return n


_TYPES = {"rho": number, "N": number, "D": number, "v": number, "v_grid": count,
          "r_grid": count, "r_max": number, "tol": number, "H": number, "n": count,
          "d": number, "w1": number, "p": number, "d_che": number}


def fmt_scalar(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return repr(float(x))


def _json_value(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=1) + "\n"


def read_config(path: str) -> dict:
    """key=value lines; '#' starts a comment."""
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from None
    out = {}
    for ln in lines:
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise UsageError(f"bad config line {ln!r}")
        key, val = (s.strip() for s in ln.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        try:
            out[key] = _TYPES[key](val) if key in _TYPES else val
        except argparse.ArgumentTypeError as e:
            raise UsageError(f"config {key}: {e}") from None
    return out


def _add_common(sp: argparse.ArgumentParser, params: bool = True):
    if params:
        sp.add_argument("--rho", type=number)
        sp.add_argument("--N", type=number)
        sp.add_argument("--D", type=number)
    sp.add_argument("--tol", type=number)
    sp.add_argument("--format", choices=("csv", "json", "svg"))
    sp.add_argument("--out")
    sp.add_argument("--config")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cddprof", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("density", help="model Jacobian J_{H,rho,N} on a t-grid or at --t")
    _add_common(sp)
    sp.add_argument("--H", type=number)
    sp.add_argument("--t", type=number, nargs="+")
    sp.add_argument("--v-grid", dest="v_grid", type=count, help="number of t-points")

    for name, what in (("gl", "Gromov-Levy profile"), ("flat", "flat profile"),
                       ("models", "flat profile from the explicit model families")):
        sp = sub.add_parser(name, help=what)
        _add_common(sp)
        sp.add_argument("--v", type=number)
        sp.add_argument("--v-grid", dest="v_grid", type=count)

    sp = sub.add_parser("cheeger", help="N-dimensional and linear Cheeger constants of a profile")
    _add_common(sp)
    sp.add_argument("--v-grid", dest="v_grid", type=count)
    sp.add_argument("--method", choices=tuple(PROFILE_FNS))

    sp = sub.add_parser("concentration", help="concentration bound K(r) from a profile")
    _add_common(sp)
    sp.add_argument("--v-grid", dest="v_grid", type=count)
    sp.add_argument("--r-grid", dest="r_grid", type=count)
    sp.add_argument("--r-max", dest="r_max", type=number)
    sp.add_argument("--method", choices=tuple(PROFILE_FNS))

    sp = sub.add_parser("poincare", help="applicable Poincare bounds")
    _add_common(sp)
    sp.add_argument("--d-che", dest="d_che", type=number, help="linear Cheeger constant if known")
    sp.add_argument("--v-grid", dest="v_grid", type=count)

    sp = sub.add_parser("constants", help="universal constants, first-moment and W1 bounds")
    _add_common(sp)
    sp.add_argument("--d", type=number, help="N-dimensional Cheeger constant")
    sp.add_argument("--w1", type=number)
    sp.add_argument("--p", type=number, help="Nash exponent")

    sp = sub.add_parser("sturm", help="check a sampled Jacobian against the model")
    _add_common(sp)
    sp.add_argument("--sample", required=False, help="CSV file with header t,J")
    sp.add_argument("--H", type=number)

    sp = sub.add_parser("oracle", help="flat profile of a model Jacobian vs the grid oracles")
    _add_common(sp)
    sp.add_argument("--H", type=number)
    sp.add_argument("--v-grid", dest="v_grid", type=count)
    sp.add_argument("--n", type=count, help="grid cells for the brute-force oracle")

    sp = sub.add_parser("verify", help="run the invariant suites")
    _add_common(sp, params=False)
    sp.add_argument("--suite", choices=("all",) + tuple(SUITES))
    return ap


def resolve(args: argparse.Namespace) -> dict:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    out = dict(DEFAULTS)
    out.update(cfg)
    for k, v in vars(args).items():
        if v is not None:
            out[k] = v
    return out


def params_of(o: dict) -> CDParams:
    if o["rho"] is None or o["N"] is None:
        raise UsageError("--rho and --N are required")
    return CDParams(o["rho"], o["N"], o["D"])


def v_grid(o: dict) -> np.ndarray:
    return np.linspace(0.0, 1.0, o["v_grid"])


def threads() -> int:
    try:
        return max(1, int(os.environ.get("CDDPROF_THREADS", "1")))
    except ValueError:
        return 1


def sweep(fn, p: CDParams, v: np.ndarray) -> np.ndarray:
    """fn(p, v) over fixed-size chunks of v, in parallel when CDDPROF_THREADS > 1."""
    chunks = [v[i:i + _CHUNK] for i in range(0, v.size, _CHUNK)]
    work = lambda c: np.atleast_1d(fn(p, c))
    n = min(threads(), len(chunks))
    if n <= 1:
        parts = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n) as ex:
            parts = list(ex.map(work, chunks))
    return np.concatenate(parts)


def profile_curve(method: str, p: CDParams, o: dict) -> ProfileCurve:
    if method == "flat" and not finite_mass_exists(p):
        raise CddError("infinite-mass", "every model Jacobian has infinite mass for these parameters")
    v = v_grid(o)
    return ProfileCurve(v, sweep(PROFILE_FNS[method], p, v),
                        {"rho": p.rho, "N": p.N, "D": p.D}, method)


def _table_csv(header, rows) -> str:
    return ",".join(header) + "\n" + "".join(",".join(fmt_scalar(x) for x in r) + "\n" for r in rows)


# ---------------------------------------------------------------------------
# subcommands; each returns the text to emit


def cmd_density(o: dict) -> str:
    p = params_of(o)
    H = o["H"]
    if o.get("t"):
        t = np.asarray(o["t"], dtype=float)
    else:
        r = support_roots(H, p)
        lo = max(r.xi_minus, -p.D / 2 if math.isfinite(p.D) else -5.0, -5.0)
        hi = min(r.xi_plus, p.D / 2 if math.isfinite(p.D) else 5.0, 5.0)
        t = np.linspace(lo, hi, o["v_grid"])
    J = np.atleast_1d(eval_J(H, p, t))
    if o["format"] == "json":
        return dump_json({"params": {"rho": p.rho, "N": p.N, "H": H},
                          "points": [{"t": float(a), "J": float(b)} for a, b in zip(t, J)]})
    if o["format"] == "svg":
        raise UsageError("density supports csv and json only")
    return _table_csv(("t", "J"), zip(t, J))


def cmd_profile(method: str, o: dict) -> str:
    p = params_of(o)
    if o["v"] is not None:
        if method == "flat" and not finite_mass_exists(p):
            raise CddError("infinite-mass", "every model Jacobian has infinite mass for these parameters")
        x = float(PROFILE_FNS[method](p, o["v"]))
        if o["format"] == "json":
            return dump_json({"params": {"rho": p.rho, "N": p.N, "D": p.D}, "method": method,
                              "v": o["v"], "value": x})
        if o["format"] == "svg":
            raise UsageError("a single value cannot be plotted; use --v-grid")
        return fmt_scalar(x) + "\n"
    return profile_curve(method, p, o).render(o["format"])


def cmd_cheeger(o: dict) -> str:
    p = params_of(o)
    rep = cheeger_N(profile_curve(o["method"], p, o), p.N)
    d = rep.to_dict()
    if o["format"] == "json":
        return dump_json(d)
    return _table_csv(("d_che_N", "d_che_inf", "argmin_v"),
                      [(rep.d_che_N, rep.d_che_inf, rep.argmin_v)])


def cmd_concentration(o: dict) -> str:
    p = params_of(o)
    r = np.linspace(0.0, o["r_max"], o["r_grid"])
    K = concentration_from_profile(profile_curve(o["method"], p, o), r)
    if o["format"] == "json":
        return dump_json({"params": {"rho": p.rho, "N": p.N, "D": p.D}, "method": o["method"],
                          "points": [{"r": float(a), "K": float(b)} for a, b in zip(r, K)]})
    if o["format"] == "svg":
        raise UsageError("concentration supports csv and json only")
    return _table_csv(("r", "K"), zip(r, K))


def cmd_poincare(o: dict) -> str:
    p = params_of(o)
    d_che = o["d_che"]
    if d_che is None:
        d_che = cheeger_N(profile_curve("flat", p, o), p.N).d_che_inf
    b = poincare_bounds(p, d_che)
    if o["format"] == "json":
        return dump_json({"params": {"rho": p.rho, "N": p.N, "D": p.D}, "d_che_inf": d_che,
                          "bounds": b})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("bound", "value", "hypothesis"))
    w.writerows((k, fmt_scalar(v["value"]), v["hypothesis"]) for k, v in b.items())
    return buf.getvalue()


def cmd_constants(o: dict) -> str:
    out = {"sandwich_c": SANDWICH_C, "two_level_c": TWO_LEVEL_C, "cheeger_c": CHEEGER_C}
    if o["d"] is not None:
        if o["N"] is None:
            raise UsageError("--d needs --N")
        N, d = o["N"], o["d"]
        out["fm_bound"] = fm_bound(d, N)
        out["stability_w1"] = stability_w1(d, N, o["w1"])
        if N < 0:
            nc = nash_constant(o["p"], N, d)
            out.update({f"nash_{k}": v for k, v in vars(nc).items() if isinstance(v, float)})
    if o["format"] == "json":
        return dump_json(out)
    return "name,value\n" + "".join(f"{k},{fmt_scalar(v)}\n" for k, v in out.items())


def cmd_sturm(o: dict) -> str:
    p = params_of(o)
    if not o["sample"]:
        raise UsageError("--sample is required")
    try:
        with open(o["sample"]) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read sample: {e}") from None
    H = o["H"] if o["sample_H_given"] else None  # otherwise estimated from the sample
    s = JacobianSample.from_csv(text, H)
    min_res = jac_cd_check(s, p)
    ok, excess = sturm_compare(s, p, tol=o["tol"])
    res = {"H": s.H, "min_residual": min_res, "dominated": ok, "excess": excess}
    if o["format"] == "json":
        return dump_json(res)
    return "H,min_residual,dominated,excess\n" + (
        f"{fmt_scalar(s.H)},{fmt_scalar(min_res)},{str(ok).lower()},{fmt_scalar(excess)}\n")


def cmd_oracle(o: dict) -> str:
    p = params_of(o)
    D = p.D
    interval = (-D / 2, D / 2) if math.isfinite(D) else (-math.inf, math.inf)
    wd = WeightedDensity1D(ModelDensity("jacobian", interval, H=o["H"], params=p))
    v = np.linspace(0.0, 1.0, o["v_grid"])[1:-1]
    flat = np.atleast_1d(flat_profile(wd, v))
    brute = np.atleast_1d(brute_force_flat(wd, o["n"], v))
    inter = np.atleast_1d(brute_force_interval_profile(wd, o["n"], v))
    rows = list(zip(v, flat, brute, inter))
    if o["format"] == "json":
        return dump_json({"params": {"rho": p.rho, "N": p.N, "D": p.D, "H": o["H"]},
                          "points": [dict(zip(("v", "flat", "brute_flat", "brute_interval"),
                                              map(float, r))) for r in rows]})
    if o["format"] == "svg":
        raise UsageError("oracle supports csv and json only")
    return _table_csv(("v", "flat", "brute_flat", "brute_interval"), rows)


def cmd_verify(o: dict) -> tuple[str, bool]:
    rows = run_suite(o["suite"])
    ok = all(r[1] for r in rows)
    if o["format"] == "json":
        text = dump_json({"passed": ok, "checks": [{"name": n, "passed": s, "detail": d}
                                                   for n, s, d in rows]})
    else:
        text = "".join(f"{'PASS' if s else 'FAIL'} {n} {d}".rstrip() + "\n" for n, s, d in rows)
    return text, ok


def emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from None


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # argparse already printed usage
        return 0 if e.code == 0 else 2
    try:
        o = resolve(args)
        cfg_H = bool(getattr(args, "config", None)) and "H" in read_config(args.config)
        o["sample_H_given"] = getattr(args, "H", None) is not None or cfg_H
        cmd = args.command
        ok = True
        if cmd == "verify":
            text, ok = cmd_verify(o)
        elif cmd in PROFILE_FNS:
            text = cmd_profile(cmd, o)
        else:
            text = {"density": cmd_density, "cheeger": cmd_cheeger,
                    "concentration": cmd_concentration, "poincare": cmd_poincare,
                    "constants": cmd_constants, "sturm": cmd_sturm,
                    "oracle": cmd_oracle}[cmd](o)
        emit(text, o["out"])
        return 0 if ok else 4
    except UsageError as e:
        print(f"cddprof: error: {e}", file=sys.stderr)
        return 2
    except CddError as e:
        print(f"cddprof: {e}", file=sys.stderr)
        return 3 if e.code in DIVERGENT_CODES else 2
    except (ValueError, KeyError, IndexError) as e:  # malformed input files and the like
        print(f"cddprof: error: {e}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
