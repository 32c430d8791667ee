"""Command-line entry point: ``explicit-primes <subcommand> [options]``.

Reports go to stdout (or ``--output``) as CSV or JSON; progress goes to
stderr. Exit status is 0 when everything checked out, 1 when a verification
failed (the witness is in the report) and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import additive, bounds, ramanujan, sieve, zeros
from . import explicit_formula as ef
from .errors import ExplicitPrimesError

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, int) or (hasattr(v, "dtype") and v.dtype.kind in "iu"):
        return int(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        v = float(v)
        if math.isnan(v) or math.isinf(v):
            return str(v)
        return float(format(v, ".12g"))
    if v is None:
        return ""
    return v


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return format(v, ".12g") if isinstance(v, float) else v


def render(rows: list[dict], fmt: str) -> str:
    rows = [{k: _fmt(v) for k, v in r.items()} for r in rows]
    if fmt == "json":
        return json.dumps(rows, indent=1) + "\n"
    keys: list[str] = []
    for r in rows:
        keys.extend(k for k in r if k not in keys)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _csv_cell(v) for k, v in r.items()})
    return buf.getvalue()


def _progress(args):
    return ramanujan.stderr_progress if args.progress else None


def _zero_table(path):
    if path is None:
        return zeros.default_zeros()
    try:
        return zeros.load_zeros(path)
    except FileNotFoundError:
        raise UsageError(f"zero file not found: {path}") from None


def _int(s: str) -> int:
    """Integer argument that also accepts 1e10 and 38_358_837_682."""
    s = s.replace("_", "").replace(",", "")
    try:
        return int(s)
    except ValueError:
        v = float(s)
        if not v.is_integer():
            raise argparse.ArgumentTypeError(f"not an integer: {s}") from None
        return int(v)


def _plan_row(s: str):
    parts = s.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"plan rows look like FROM:TO:SPACING, got {s}")
    return tuple(_int(p) for p in parts)


# --------------------------------------------------------------------------
# subcommands; each returns (rows, status)


def cmd_sieve(a):
    t = sieve.sieve_primes(a.lo, a.hi, threads=a.threads)
    if a.list:
        return [{"p": int(p)} for p in t.primes], OK
    row = {"lo": a.lo, "hi": a.hi, "prime_count": len(t.primes)}
    if a.lo <= 2:
        row.update(theta=sieve.theta(a.hi, threads=a.threads), psi=sieve.psi(a.hi, threads=a.threads))
    return [row], OK


def cmd_checkpoints(a):
    if a.load:
        cp = sieve.load_checkpoints(a.load)
    else:
        if not a.plan:
            raise UsageError("give --plan FROM:TO:SPACING (repeatable) or --load FILE")
        cp = sieve.build_checkpoints(a.plan, threads=a.threads)
    if a.save:
        cp.save(a.save)
    rows = [dict(range_lo=lo, range_hi=hi, spacing=s) for lo, hi, s in cp.spacing_plan]
    for r in rows:
        r["entries"] = len(cp)
        r["pi_at_hi"] = int(cp.pis[-1])
    return rows, OK


def cmd_zero_stats(a):
    table = _zero_table(a.file)
    rows = []
    status = OK
    checks = ("density", "window", "inverse-square") if a.check == "all" else (a.check,)
    for c in checks:
        if c == "density":
            g = zeros.check_density_grid(table, 20.0, table.max_height, 1.0)
        elif c == "window":
            g = zeros.check_window_grid(table, 50.0, min(5000.0, table.max_height), 0.01)
        else:
            s = table.inverse_square_sum()
            ok = s.contains(zeros.TRUE_INVERSE_SQUARE_SUM)
            rows.append(dict(
                check="inverse-square", zeros=len(table), horizon=s.horizon, partial=s.partial,
                upper=s.upper, expected=zeros.TRUE_INVERSE_SQUARE_SUM,
                contains_quoted=s.contains(zeros.QUOTED_INVERSE_SQUARE_SUM), ok=ok,
            ))
            status = max(status, OK if ok else FAILED)
            continue
        rows.append(dict(
            check=c, zeros=len(table), horizon=g.horizon, points=g.points, worst_margin=g.worst_margin,
            worst_at=g.worst_at, first_failure=g.first_failure, ok=g.ok,
        ))
        status = max(status, OK if g.ok else FAILED)
    return rows, status


def cmd_psi_formula(a):
    table = _zero_table(a.file)
    T = a.T if a.T is not None else table.max_height
    rows, status = [], OK
    for x in a.x:
        ev = ef.truncated_psi(x, T, table)
        rows.append({**ev.as_row(), "ok": ev.within_budget})
        if not ev.within_budget:
            status = FAILED
    return rows, status


def cmd_cube_bound(a):
    r = bounds.solve_cubes(a.A, a.c, a.k)
    return [r.as_row()], OK if r.certified else FAILED


def cmd_mpower_bound(a):
    rows, status = [], OK
    for m in a.m:
        r = bounds.solve_mpowers(m, a.A, a.c, a.k)
        rows.append(r.as_row())
        status = max(status, OK if r.certified else FAILED)
    if a.all_n is not None:
        rows.append(dict(m="all-n", loglog_n0=a.all_n, y_star=bounds.solve_all_n(a.all_n)))
    return rows, status


def cmd_cramer(a):
    alpha, val = bounds.cramer_argmin()
    integral, err = bounds.sinc2_integral(a.X)
    return [dict(
        argmin_alpha=alpha, min_value=val, four_over_pi=4 / math.pi,
        alpha=a.alpha, refined_c=bounds.cramer_refined_c(a.alpha),
        X=a.X, sinc2_integral=integral, quad_error=err,
        sinc2_closed_form=bounds.sinc2_closed_form(a.X),
    )], OK


def cmd_ramanujan_uncond(a):
    return [bounds.ramanujan_unconditional(a.a).as_row()], OK


def cmd_ramanujan_verify(a):
    prog = _progress(a)
    if a.exact:
        res = ramanujan.exhaustive_counterexample_scan(a.lo, a.hi, threads=a.threads, progress=prog)
        rows = []
        for first, last in res.merged_runs():
            e0, e1 = res.evaluate(first), res.evaluate(last)
            rows.append(dict(x=first, x_last=last, count=last - first + 1,
                             f_first=e0.f_value[0], f_last=e1.f_value[0], mode="exact"))
        rows.append(dict(mode="summary", lo=res.lo, hi=res.hi, counterexamples=res.count,
                         largest=res.largest, largest_prime=max(res.prime_counterexamples(), default=None),
                         jump_points=res.jump_points))
        return rows, FAILED if res.count else OK
    if a.checkpoints is None:
        raise UsageError("ramanujan-verify needs --checkpoints FILE or --exact")
    cp = sieve.load_checkpoints(a.checkpoints)
    rep = ramanujan.verify_range_stepping(
        a.lo, a.hi, cp, refine=not a.no_refine, sample_every=a.sample_every, progress=prog,
    )
    rows = []
    if a.samples:
        for x, eps, flo, fhi in rep.samples.tolist():
            rows.append(dict(x=x, f_interval_lo=flo, f_interval_hi=fhi, mode="table-bracketed",
                             log_x=math.log(x), log_neg_f=math.log(-fhi), step=eps))
    if rep.witness is not None:
        rows.append(rep.witness.as_row())
    rows.append(dict(x=rep.stopped_at, mode="summary", status=rep.status, steps=rep.steps,
                     refinements=rep.refinements, lo=rep.lo, hi=rep.hi))
    return rows, OK if rep.certified else FAILED


def cmd_estermann(a):
    s = additive.estermann_scan(a.lo, a.hi, a.lookback)
    summary = (f"all decomposed, max attempts {s.max_attempts}" if s.ok
               else f"{len(s.failures)} not decomposed within {a.lookback} primes")
    rows = [dict(lo=s.lo, hi=s.hi, checked=s.checked, max_attempts=s.max_attempts,
                 worst_n=s.worst_n, failures=len(s.failures), summary=summary)]
    rows.extend(dict(n=n, tried=t, summary="failure") for n, t in s.failures)
    return rows, OK if s.ok else FAILED


def cmd_erdos(a):
    s = additive.erdos_scan(a.lo, a.hi, a.P, escalate_to=a.escalate_to)
    summary = (f"all decomposed, largest p {s.max_p}" if s.ok
               else f"{len(s.unresolved)} not decomposed with p < {a.escalate_to}")
    rows = [dict(lo=s.lo, hi=s.hi, checked=s.checked, escalated=len(s.failures),
                 unresolved=len(s.unresolved), max_p=s.max_p, summary=summary)]
    rows.extend(dict(p=p, count=c, summary="histogram") for p, c in s.p_histogram.items())
    rows.extend(dict(n=n, summary="failure") for n in s.unresolved)
    return rows, OK if s.ok else FAILED


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: all cores)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", type=Path, default=None, help="write the report here instead of stdout")
    common.add_argument("--config", type=Path, default=None, help="JSON file of flag defaults")
    common.add_argument("--progress", action="store_true", help="progress messages on stderr")

    p = argparse.ArgumentParser(prog="explicit-primes", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, metavar="SUBCOMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    s = add("sieve", cmd_sieve, "count (or list) primes in [lo, hi]")
    s.add_argument("--lo", type=_int, default=2)
    s.add_argument("--hi", type=_int, required=True)
    s.add_argument("--list", action="store_true", help="emit every prime")

    s = add("checkpoints", cmd_checkpoints, "build, save or validate a pi(x) checkpoint table")
    s.add_argument("--plan", type=_plan_row, action="append", help="FROM:TO:SPACING, repeatable")
    s.add_argument("--save", type=Path)
    s.add_argument("--load", type=Path)

    s = add("zero-stats", cmd_zero_stats, "zero-counting checks on a zero table")
    s.add_argument("--file", type=Path, default=None, help=f"zero table (default ${zeros.ZEROS_ENV} or bundled)")
    s.add_argument("--check", choices=("density", "window", "inverse-square", "all"), default="all")

    s = add("psi-formula", cmd_psi_formula, "truncated explicit formula for psi(x) vs the sieve")
    s.add_argument("--x", type=float, action="append", required=True)
    s.add_argument("--T", type=float, default=None, help="zero height cut (default: table horizon)")
    s.add_argument("--file", type=Path, default=None)

    s = add("cube-bound", cmd_cube_bound, "threshold for primes between consecutive cubes")
    s.add_argument("--A", type=float, default=bounds.A_RAMARE)
    s.add_argument("--c", type=float, default=bounds.C_FORD)
    s.add_argument("--k", type=float, default=0.9359)

    s = add("mpower-bound", cmd_mpower_bound, "thresholds for consecutive m-th powers")
    s.add_argument("--m", type=int, action="append", required=True)
    s.add_argument("--A", type=float, default=bounds.A_RAMARE)
    s.add_argument("--c", type=float, default=bounds.C_FORD)
    s.add_argument("--k", type=float, default=0.97)
    s.add_argument("--all-n", type=float, default=None, metavar="LOGLOG",
                   help="also solve for the m that works for all n, given loglog n0")

    s = add("cramer", cmd_cramer, "constants in the Cramer-type short-interval bound")
    s.add_argument("--alpha", type=float, default=1e4)
    s.add_argument("--X", type=float, default=1e4)

    s = add("ramanujan-uncond", cmd_ramanujan_uncond, "unconditional thresholds y_a, y_a'")
    s.add_argument("--a", type=float, default=3130.0)

    s = add("ramanujan-verify", cmd_ramanujan_verify, "check Ramanujan's inequality on [lo, hi]")
    s.add_argument("--lo", type=_int, required=True)
    s.add_argument("--hi", type=_int, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--checkpoints", type=Path)
    g.add_argument("--exact", action="store_true", help="sieve scan of every integer")
    s.add_argument("--no-refine", action="store_true", help="stop at the first indeterminate step")
    s.add_argument("--sample-every", type=int, default=ramanujan.SAMPLE_EVERY)
    s.add_argument("--samples", action="store_true", help="emit (log x, log -f) rows for plotting")

    s = add("estermann", cmd_estermann, "n = prime + squarefree for every n in [lo, hi]")
    s.add_argument("--lo", type=_int, default=3)
    s.add_argument("--hi", type=_int, required=True)
    s.add_argument("--lookback", type=int, default=100)

    s = add("erdos", cmd_erdos, "n = p^2 + squarefree for n in [lo, hi], n != 1 mod 4")
    s.add_argument("--lo", type=_int, default=10)
    s.add_argument("--hi", type=_int, required=True)
    s.add_argument("--P", type=int, default=43)
    s.add_argument("--escalate-to", type=int, default=200)
    return p


def _apply_config(parser, argv):
    """Parse argv, taking flag defaults from the --config JSON file if one is given."""
    argv = sys.argv[1:] if argv is None else list(argv)
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", type=Path, default=None)
    known, _ = pre.parse_known_args(argv)
    subs = parser._subparsers._group_actions[0].choices
    name = next((a for a in argv if not a.startswith("-")), None)
    if known.config is not None and name in subs:
        try:
            conf = json.loads(known.config.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {known.config}: {exc}") from None
        if not isinstance(conf, dict):
            raise UsageError("config file must hold a JSON object")
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        sp = subs[name]
        actions = {a.dest: a for a in sp._actions}
        unknown = sorted(set(conf) - set(actions))
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for k in conf:
            actions[k].required = False
        sp.set_defaults(**conf)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be at least 1")
        sieve.set_default_threads(args.threads)
        rows, status = args.func(args)
        text = render(rows, args.format)
        if args.output:
            args.output.write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return status
    except SystemExit as exc:  # argparse
        return USAGE if exc.code else OK
    except (UsageError, ExplicitPrimesError, ValueError, OSError) as exc:
        print(f"explicit-primes: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
