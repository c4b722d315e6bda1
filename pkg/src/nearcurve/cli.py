"""Command line front end: ``python -m nearcurve <command> ...``.

Commands: count, selberg, oscdiag, analyze, sweep, accept. Every command
takes ``--config FILE`` (TOML); explicit flags override file values.
Exit codes: 0 success / pass, 1 check failed, 2 usage or input error.
"""

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import acceptance, asymptotics as asy, harness, oscillatory as osc, selberg
from .curve import CurveError, from_spec
from .lattice_count import CountQuery, QueryError, count, count_exact

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _number(s):
    """int, then Fraction for ``p/q``, then float."""
    s = str(s).strip()
    try:
        return int(s)
    except ValueError:
        pass
    if "/" in s:
        return Fraction(s)
    return float(s)


def parse_curve(text):
    """A builtin name or an inline TOML table such as ``{ poly = ["0", "0", "1"], eta = 1, xi = 2 }``."""
    if isinstance(text, dict):
        return from_spec(text)
    text = text.strip()
    if text.startswith("{"):
        try:
            spec = tomllib.loads("curve = " + text)["curve"]
        except tomllib.TOMLDecodeError as exc:
            raise UsageError(f"bad inline curve table: {exc}") from None
        return from_spec(spec)
    return from_spec(text)


def _out(path):
    return open(path, "w", newline="") if path and path != "-" else sys.stdout


def _dump_json(obj, path=None):
    fh = _out(path)
    fh.write(json.dumps(obj, default=_jsonable) + "\n")
    if fh is not sys.stdout:
        fh.close()


def _jsonable(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if dataclasses.is_dataclass(v):
        return dataclasses.asdict(v)
    if hasattr(v, "tolist"):
        return v.tolist()
    raise TypeError(f"not JSON serialisable: {type(v).__name__}")


# -- commands -----------------------------------------------------------------

COUNT_FIELDS = ["curve_id", "mode", "Q", "delta", "count", "boundary_hits", "elapsed_ms"]


def cmd_count(a):
    curve = parse_curve(a.curve)
    query = CountQuery(_number(a.Q), _number(a.delta), a.mode)
    if a.exact:
        res = count_exact(curve, query, per_q=a.per_q)
    else:
        res = count(curve, query, a.workers, per_q=a.per_q)
    fh = _out(a.out)
    w = csv.writer(fh)
    w.writerow(COUNT_FIELDS)
    w.writerow([res.curve_id, query.mode, a.Q, a.delta, res.count, res.boundary_hits,
                f"{res.elapsed * 1e3:.3f}"])
    if a.per_q:
        if fh is sys.stdout:
            fh.write("\n")
            pw = w
        else:
            pf = open(a.out + ".per_q.csv", "w", newline="")
            pw = csv.writer(pf)
        pw.writerow(["q", "count"])
        pw.writerows(res.per_q_counts)
        if fh is not sys.stdout:
            pf.close()
    if fh is not sys.stdout:
        fh.close()
    return EXIT_OK


def cmd_selberg(a):
    sign = {"plus": "majorant", "minus": "minorant"}.get(a.sign, a.sign)
    p = selberg.build(sign, int(a.K), float(_number(a.delta)))
    if a.dump_coeffs:
        with open(a.dump_coeffs, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "re", "im"])
            for k in range(-p.K, p.K + 1):
                c = p.coef(k)
                w.writerow([k, repr(float(c.real)), repr(float(c.imag))])
    out = {"sign": p.sign, "K": p.K, "delta": p.delta, "mean": p.mean}
    status = EXIT_OK
    if a.verify is not None:
        rep = selberg.verify(p, a.verify)
        out["verify"] = dataclasses.asdict(rep)
        out["verify"]["ok"] = rep.ok
        status = EXIT_OK if rep.ok else EXIT_FAIL
    _dump_json(out)
    return status


def _grid_arg(text):
    key, _, val = text.partition("=")
    if key != "grid" or not val:
        raise argparse.ArgumentTypeError("expected grid=N")
    return int(val)


def cmd_oscdiag(a):
    curve = parse_curve(a.curve)
    k, q = int(a.k), int(a.q)
    inputs = {"curve": curve.id, "k": k, "q": q, "h": a.h}
    diag = {}
    if a.op == "expsum":
        v = osc.exp_sum(curve, k, q)
        diag["terms"] = int(math.floor(curve.xi * q) - math.floor(curve.eta * q))
    elif a.op in ("integral", "stationary"):
        if a.h is None:
            raise UsageError(f"--op {a.op} needs --h")
        if a.op == "integral":
            r = osc.osc_integral(curve, k, a.h, q, full=True)
            v = r.value
            diag.update(error=r.error, panels=r.panels)
        else:
            pp = osc.stationary_point(curve, k, a.h)
            v = complex(pp.beta_h, 0.0)
            diag.update(beta_h=pp.beta_h, lambda_h=pp.lambda_h)
    elif a.op == "compare":
        r = osc.sum_integral_compare(curve, k, q)
        v = r.exp_sum - r.integral_sum
        diag.update(difference=r.difference, H=r.H, scaled=r.scaled)
    elif a.op == "census":
        # k plays the role of K and q the role of Q
        n = osc.small_lambda_census(curve, k, q)
        v = complex(n, 0.0)
        diag["census"] = n
    else:
        raise UsageError(f"unknown op {a.op!r}")
    _dump_json({"op": a.op, "inputs": inputs, "value_re": v.real, "value_im": v.imag, "diagnostics": diag})
    return EXIT_OK


def cmd_analyze(a):
    curve = parse_curve(a.curve)
    Q, delta = float(_number(a.Q)), float(_number(a.delta))
    theta = curve.theta if a.theta is None else a.theta
    params = asy.RegimeParams(theta, Q, delta, a.epsilon, a.regime_c)
    out = {"op": a.op, "curve": curve.id, "Q": Q, "delta": delta, "theta": theta, "epsilon": a.epsilon}
    if a.op == "mainterm":
        out["value"] = asy.main_term(curve.eta, curve.xi, Q, delta, a.mode)
    elif a.op == "error":
        out["value"] = asy.error_term(curve, Q, delta, a.mode, a.workers)
    elif a.op == "regime":
        out.update(value=asy.regime(params), threshold=asy.threshold(Q, theta),
                   admissible=asy.admissible_delta(params))
    elif a.op == "chooseK":
        kc = asy.choose_K(params)
        out.update(value=kc.K, regime=kc.regime, raw=kc.raw, delta_K_gt_1=kc.delta_K_gt_1,
                   K_le_Q_bound=kc.K_le_Q_bound)
    elif a.op == "bound":
        out.update(value=asy.error_bound(params), regime=asy.regime(params))
    elif a.op == "chain":
        K = a.K if a.K is not None else asy.choose_K(params).K
        bc = asy.bound_chain(curve, Q, delta, K, a.epsilon, theta)
        out.update(K=K, N0_plus=bc.N0_plus, N0_minus=bc.N0_minus, N1=bc.N1, N2=bc.N2, N3=bc.N3,
                   N4=bc.N4, N5=bc.N5, count=bc.count, main=bc.main, census=bc.census,
                   steps=[{"name": s.name, "diff": s.diff, "bound": s.bound, "bound_logQ": s.bound_logQ,
                           "ratio": s.ratio} for s in bc.step_errors])
    else:
        raise UsageError(f"unknown op {a.op!r}")
    _dump_json(out, a.out)
    return EXIT_OK


def cmd_sweep(a, raw):
    overrides = {"curve": a.curve, "mode": a.mode, "workers": a.workers, "csv": a.csv,
                 "cache_dir": a.cache_dir, "theta": a.theta, "epsilon": a.epsilon}
    cfg = harness.config_from_mapping(raw, **overrides)
    records = harness.run_sweep(cfg, parse_curve(cfg.curve))
    if not cfg.csv:
        harness.write_records(sys.stdout, records)
    if a.plot:
        harness.emit_plot_data(records, a.plot, a.plot_out or f"sweep-{a.plot}.dat", cfg.describe_schedule())
    return EXIT_OK


def cmd_accept(a):
    try:
        results = acceptance.run(a.suite, a.workers)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    for r in results:
        print("\n".join(r.lines()))
    if a.json:
        _dump_json([r.as_dict() for r in results], a.json)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="nearcurve", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--config", help="TOML file with default values for this command")
        return sp

    c = add("count", "count rational points near a curve")
    c.add_argument("--curve")
    c.add_argument("--Q")
    c.add_argument("--delta")
    c.add_argument("--mode", choices=["full", "tilde", "dyadic-block"])
    c.add_argument("--per-q", action="store_true")
    c.add_argument("--exact", action="store_true", help="decide every pair in rational arithmetic")
    c.add_argument("--workers", type=int)
    c.add_argument("--out", help="CSV path (default stdout)")

    s = add("selberg", "build and check a majorant or minorant polynomial")
    s.add_argument("--K", type=int)
    s.add_argument("--delta")
    s.add_argument("--sign", choices=["plus", "minus", "majorant", "minorant"])
    s.add_argument("--verify", type=_grid_arg, metavar="grid=N")
    s.add_argument("--dump-coeffs", metavar="PATH")

    o = add("oscdiag", "exponential sums, oscillatory integrals, stationary points")
    o.add_argument("--curve")
    o.add_argument("--k", type=int)
    o.add_argument("--q", type=int)
    o.add_argument("--h", type=int)
    o.add_argument("--op", choices=["expsum", "integral", "stationary", "compare", "census"])

    an = add("analyze", "main term, regime, K choice, error bound and the N0..N5 chain")
    an.add_argument("--curve")
    an.add_argument("--Q")
    an.add_argument("--delta")
    an.add_argument("--theta", type=float)
    an.add_argument("--epsilon", type=float)
    an.add_argument("--regime-c", type=float)
    an.add_argument("--mode", choices=["full", "tilde"])
    an.add_argument("--K", type=int, help="K for --op chain (default: chooseK)")
    an.add_argument("--workers", type=int)
    an.add_argument("--op", choices=["mainterm", "error", "regime", "chooseK", "bound", "chain"])
    an.add_argument("--out")

    w = add("sweep", "run a (Q, delta) grid and write records")
    w.add_argument("--curve")
    w.add_argument("--mode", choices=["full", "tilde"])
    w.add_argument("--workers", type=int)
    w.add_argument("--theta", type=float)
    w.add_argument("--epsilon", type=float)
    w.add_argument("--csv")
    w.add_argument("--cache-dir", help=f"overrides ${harness.CACHE_ENV}")
    w.add_argument("--plot", choices=["ratio", "error-loglog"])
    w.add_argument("--plot-out")

    ac = add("accept", "run acceptance suites")
    ac.add_argument("--suite", help=f"one of {', '.join(acceptance.SUITES)} or all")
    ac.add_argument("--workers", type=int)
    ac.add_argument("--json", help="write a machine-readable report here")
    return p


DEFAULTS = {
    "mode": "full", "workers": 1, "epsilon": asy.DEFAULT_EPSILON, "regime_c": 1.0,
    "suite": "all", "sign": "plus",
}
REQUIRED = {
    "count": ("curve", "Q", "delta"),
    "selberg": ("K", "delta"),
    "oscdiag": ("curve", "k", "q", "op"),
    "analyze": ("curve", "Q", "delta", "op"),
}


def _read_config(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None


def _merge(args, raw):
    """Fill unset flags from the config table, then from DEFAULTS."""
    for k, v in vars(args).items():
        if v is None and k in raw:
            setattr(args, k, raw[k])
        elif v is None and k in DEFAULTS:
            setattr(args, k, DEFAULTS[k])
    missing = [k for k in REQUIRED.get(args.command, ()) if getattr(args, k) is None]
    if missing:
        raise UsageError(f"{args.command}: missing {', '.join('--' + m for m in missing)}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        raw = _read_config(args.config) if args.config else {}
        if args.command == "sweep":
            return cmd_sweep(args, raw)
        _merge(args, raw)
        return {"count": cmd_count, "selberg": cmd_selberg, "oscdiag": cmd_oscdiag,
                "analyze": cmd_analyze, "accept": cmd_accept}[args.command](args)
    except (UsageError, CurveError, QueryError, harness.ConfigError, ValueError, TypeError) as exc:
        print(f"nearcurve {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
