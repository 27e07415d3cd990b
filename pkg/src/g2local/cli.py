"""Command-line front end: verification suites, closed-form tables, oracle runs.

Every report is JSON (or CSV for tables) with sorted keys, rationals as
"num/den" strings and rational functions as sorted exponent-vector term lists,
so identical configurations give identical bytes.  Exit status: 0 pass,
1 fail, 2 infeasible (budget exceeded or bad input).
"""

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import closedforms, cosets, heisenberg, macdonald, oracle, satake
from .exactalg import RationalFunc

EXIT_PASS, EXIT_FAIL, EXIT_INFEASIBLE = 0, 1, 2
SUITES = ("macdonald", "basic-identity", "convolution", "oracle", "all")
TABLES = ("fvalue", "dpsi", "ek", "cosets")


@dataclass(frozen=True)
class RunConfig:
    p: int = 5
    budget: int = oracle.DEFAULT_BUDGET
    truncation: int = 40
    tolerance: float = 1e-9
    fmt: str = "json"
    seed: int = 0


# -- serialization ------------------------------------------------------------


def rat(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def rf(x):
    """Canonical JSON for a rational function: denominator factors cancelled where they divide."""
    if not isinstance(x, RationalFunc):
        x = RationalFunc(x)
    return x.reduce().to_json()


def cx(z):
    z = complex(z)
    return [repr(round(z.real, 12)), repr(round(z.imag, 12))]


def parse_rational(text):
    return Fraction(text)


def parse_pair(text, conv=parse_rational):
    a, b = text.split(",")
    return conv(a), conv(b)


def emit(obj, out=None):
    out = out or sys.stdout
    out.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


# -- checks shared by suites ------------------------------------------------------


def _check(name, fn):
    """Run one check; returns a row {check, status, detail}."""
    try:
        ok, detail = fn()
        return {"check": name, "status": "pass" if ok else "fail", "detail": detail}
    except oracle.BudgetExceeded as e:
        return {"check": name, "status": "infeasible", "detail": str(e)}


def _macdonald_checks(cfg):
    rng = random.Random(cfg.seed)

    def formal():
        lhs, rhs = macdonald.macdonald_identity_sides()
        return lhs == rhs, {}

    def numeric():
        x1 = Fraction(rng.randint(1, 9), rng.randint(2, 11))
        x2 = Fraction(rng.randint(1, 9), rng.randint(2, 11))
        return _macdonald_numeric(cfg.p, (x1, x2), Fraction(1, 100), cfg.truncation, cfg.tolerance)

    def a1():
        lhs, rhs = macdonald.a1_identity_sides()
        vol = macdonald.double_coset_volume(macdonald.OMEGA1_VARPI)
        table = cosets.total_count(cfg.p)
        return lhs == rhs and vol.evaluate({"q": cfg.p}) == table, {"volume": rf(vol)}

    def poincare():
        for _ in range(10):
            p = satake.SatakeParam(Fraction(rng.randint(-9, 9), rng.randint(1, 9)),
                                   Fraction(rng.randint(1, 9), rng.randint(1, 9)))
            coeffs = satake.l_factor(p).u_series(12)
            for j, c in enumerate(coeffs):
                if c != satake.sym_power_trace(j, p):
                    return False, {"j": j}
        return True, {}

    return [
        _check("poincare u-series vs symmetric powers", poincare),
        _check("macdonald identity, formal", formal),
        _check("macdonald identity, truncated sum", numeric),
        _check("A1 as K plus K omega1 K", a1),
    ]


def _macdonald_numeric(q, param, u, limit, tol):
    x1, x2 = param
    lhs = macdonald.d_hat_truncated(q, float(x1), float(x2), float(u), limit=limit)
    p = satake.SatakeParam(x1, x2)
    rhs = (satake.l_factor(p, (5, -2)) * satake.q_hat(p)).evaluate({"q": Fraction(q), "u": Fraction(u)})
    err = abs(complex(lhs) - float(rhs))
    return err < tol, {"lhs": repr(float(complex(lhs).real)), "rhs": rat(rhs), "error": repr(err)}


def _basic_identity_checks(cfg, nmax=6, mmax=6, corrupt=None):
    def run():
        res = closedforms.verify_basic_identity(nmax, mmax, routes=("structured", "printed"), corrupt=corrupt)
        return res["pass"], {"checked": res["checked"], "off_support": res["off_support"],
                             "witnesses": res["witnesses"]}

    return [_check(f"basic identity 0<=n<={nmax}, 0<=m<={mmax}", run)]


CONVOLUTION_POINTS = ((0, 0), (1, 2), (2, 4), (1, 1), (2, 2), (2, 3), (3, 4), (3, 5))


def _convolution_checks(cfg):
    p = cfg.p

    def table():
        r = cosets.verify_coset_table(p)
        return r["count"] == r["expected"] and r["height_ok"] and r["distinct"], r

    def point(n, m):
        def run():
            classes = cosets.class_masses((n, m), p)
            exact, _ = cosets.convolve_indicator((n, m), p, classes)
            printed = closedforms.raw_convolution_cases(n, m).subs(q=Fraction(p))
            s = complex(0.3, 0.7)
            u = float(p) ** (-s)
            cval = cosets.convolve_indicator_complex((n, m), p, s, classes)
            pval = complex(closedforms.raw_convolution_cases(n, m).evaluate({"q": float(p), "u": u}))
            err = abs(cval - pval)
            assembled = closedforms.assemble_convolution(closedforms.f_toral(n, m), exact).subs(q=Fraction(p))
            tab = closedforms.p_convolve_closed(n, m).value.subs(q=Fraction(p))
            ok = exact == printed and err < cfg.tolerance and assembled == tab
            return ok, {"complex_error": repr(err)}

        return run

    rows = [_check(f"coset table at p={p}", table)]
    for n, m in CONVOLUTION_POINTS:
        rows.append(_check(f"convolution at t=({n},{m}), p={p}", point(n, m)))
    return rows


def _oracle_checks(cfg):
    p = cfg.p
    rows = []

    def lemma():
        bad = []
        for a in range(4):
            for b in range(4):
                for c in range(a + b + 1):
                    got, want = oracle.measuring_lemma_check(p, a, b, c)
                    if got != want:
                        bad.append([a, b, c])
        return not bad, {"mismatches": bad}

    def volumes():
        bad = []
        for n in range(3):
            for m in range(n, 2 * n + 1):
                g = heisenberg.GroupElementNF.toral(n, m)
                for k in (n, n + 1, n + 2):
                    got = oracle.fiber_volumes(g, k, p, source="full")
                    if got != closedforms.printed_fiber_volumes(n, m, k, p):
                        bad.append([n, m, k])
        return not bad, {"mismatches": bad}

    def vanishing():
        vals = []
        for g, k in oracle.nontoral_vanishing_cases(p):
            exact, cval = oracle.e_k_direct(g, k, p)
            vals.append((exact, abs(cval)))
        ok = all(e == 0 and c < cfg.tolerance for e, c in vals)
        return ok, {"values": [rat(e) for e, _ in vals]}

    rows.append(_check(f"measuring lemma a,b,c<=3 at p={p}", lemma))
    rows.append(_check(f"fiber volumes for E_k at p={p}", volumes))
    if p == 5:
        rows.append(_check("non-toral vanishing off S_Psi U T K at p=5", vanishing))
    for n in range(3):
        for m in range(3):
            g = heisenberg.GroupElementNF.toral(n, m)
            for k in (n, n + 1, n + 2):
                def run(g=g, k=k):
                    res = oracle.e_k_oracle(g, k, p, paths=("direct",))
                    want = closedforms.e_k_closed(g, k).subs(q=Fraction(p))
                    want = Fraction(want.evaluate({})) if not want.is_zero() else Fraction(0)
                    ok = res["direct"] == want and abs(res["direct_complex"] - float(want)) < cfg.tolerance
                    return ok, {"oracle": rat(res["direct"]), "closed": rat(want)}

                rows.append(_check(f"E_{k} at t=({n},{m}), p={p}", run))
    return rows


def run_suite(name, cfg, **kw):
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    parts = [name] if name != "all" else [s for s in SUITES if s != "all"]
    checks = []
    for part in parts:
        fn = {
            "macdonald": _macdonald_checks,
            "basic-identity": _basic_identity_checks,
            "convolution": _convolution_checks,
            "oracle": _oracle_checks,
        }[part]
        rows = fn(cfg, **kw) if part == "basic-identity" else fn(cfg)
        for r in rows:
            r["suite"] = part
        checks.extend(rows)
    status = "pass"
    if any(r["status"] == "fail" for r in checks):
        status = "fail"
    elif any(r["status"] == "infeasible" for r in checks):
        status = "infeasible"
    return {"suite": name, "config": asdict(cfg), "status": status, "checks": checks}


# -- tables -------------------------------------------------------------------


def table_rows(what, nmax, mmax, cfg):
    rows = []
    if what == "cosets":
        for rep in cosets.COSET_TABLE:
            rows.append({"label": rep.label, "torus": list(rep.torus),
                         "params": [list(x) for x in rep.params], "count": rep.count(cfg.p)})
        return rows
    for n in range(nmax + 1):
        for m in range(mmax + 1):
            g = heisenberg.GroupElementNF.toral(n, m)
            if what == "fvalue":
                v = closedforms.f_value(g)
                rows.append({"n": n, "m": m, "branch": v.label, "value": rf(v.value)})
            elif what == "dpsi":
                v = closedforms.d_psi_closed(g)
                rows.append({"n": n, "m": m, "branch": v.label, "value": rf(v.value)})
            elif what == "ek":
                for k in range(max(n - 1, 0), n + 3):
                    v = closedforms.e_k_closed(g, k)
                    branch = "support" if closedforms.in_support(g) else "off support"
                    rows.append({"n": n, "m": m, "k": k, "branch": branch, "value": rf(v)})
            else:
                raise ValueError(f"unknown table {what!r}")
    return rows


def rows_to_csv(rows):
    if not rows:
        return ""
    buf = io.StringIO()
    keys = sorted({k for r in rows for k in r})
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v
                    for k, v in r.items()})
    return buf.getvalue()


# -- commands -----------------------------------------------------------------


def _config(args):
    return RunConfig(
        p=getattr(args, "p", 5) or 5,
        budget=oracle.budget(),
        truncation=getattr(args, "truncation", 40),
        tolerance=getattr(args, "tol", 1e-9),
        fmt=getattr(args, "format", "json"),
        seed=getattr(args, "seed", 0),
    )


def cmd_lfactor(args):
    param = satake.SatakeParam(*parse_pair(args.param)) if args.param else satake.SatakeParam()
    shift = parse_pair(args.shift, int)
    L = satake.l_factor(param, shift)
    out = {"param": args.param, "shift": list(shift), "value": rf(L)}
    if args.order is not None:
        out["u_series"] = [c.to_json() for c in L.u_series(args.order)]
    emit(out) if args.json else print(L)
    return EXIT_PASS


def cmd_verify_macdonald(args):
    if args.formal or args.param is None:
        lhs, rhs = macdonald.macdonald_identity_sides()
        ok = lhs == rhs
        out = {"mode": "formal", "identity": ok, "lhs": rf(lhs), "rhs": rf(rhs)}
    else:
        ok, detail = _macdonald_numeric(args.q, parse_pair(args.param), parse_rational(args.u),
                                        args.truncation, args.tol)
        out = {"mode": "numeric", "identity": ok, **detail}
    emit(out)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_verify_basic_identity(args):
    corrupt = parse_pair(args.corrupt, int) if args.corrupt else None
    rep = run_suite("basic-identity", _config(args), nmax=args.nmax, mmax=args.mmax, corrupt=corrupt)
    emit(rep) if args.json else print(rep["status"])
    return _status_code(rep["status"])


def cmd_fvalue(args):
    if args.d_val is None or args.d_val >= 0:
        g = heisenberg.GroupElementNF.toral(args.n, args.m)
    else:
        g = heisenberg.GroupElementNF(args.n, args.m, args.d_val, args.bp1_val)
    v = closedforms.f_value(g)
    emit({"n": args.n, "m": args.m, "d_val": args.d_val, "branch": v.label, "value": rf(v.value),
          "in_support": closedforms.in_support(g)})
    return EXIT_PASS


def cmd_convolve(args):
    t0 = time.perf_counter()
    exact, _ = cosets.convolve_indicator((args.n, args.m), args.p)
    symbolic = cosets.convolve_indicator_symbolic(args.n, args.m)
    ok = exact == symbolic.subs(q=Fraction(args.p))
    out = {"n": args.n, "m": args.m, "p": args.p, "value": rf(exact), "symbolic": rf(symbolic),
           "routes_agree": ok}
    if args.u is not None:
        out["at_u"] = rat(exact.evaluate({"u": parse_rational(args.u), "q": Fraction(args.p)}))
    if args.timings:
        out["seconds"] = round(time.perf_counter() - t0, 3)
    emit(out) if args.json else print(exact)
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_cosets(args):
    rows = []
    for label, u, z, torus in cosets.right_coset_reps(args.p):
        if args.cls != "all" and label != args.cls:
            continue
        rows.append({"label": label, "torus": list(torus),
                     "r": [rat(x) for x in (u.r1, u.r2, u.r3, u.r4, u.r5)],
                     "z": rat(z) if z else "0/1"})
    emit({"p": args.p, "class": args.cls, "count": len(rows), "rows": rows})
    return EXIT_PASS


def cmd_oracle(args):
    t0 = time.perf_counter()
    try:
        if args.what == "ek":
            if args.d is None:
                g = heisenberg.GroupElementNF.toral(args.n, args.m)
            else:
                t1 = parse_rational(args.t1) if args.t1 else None
                t2 = parse_rational(args.t2) if args.t2 else None
                g = oracle.nontoral_element(args.n, args.m, parse_rational(args.d), t1, t2, args.p)
            rep = oracle.e_k_report(g, args.k, args.p)
            out = {"value": rat(rep["value"]), "complex": cx(rep["complex"]), "method": rep["method"],
                   "points_enumerated": rep["points_enumerated"]}
        else:
            with open(args.spec) as fh:
                spec = heisenberg.RegionSpec.from_json(json.load(fh))
            res = oracle.integrate(spec, args.p)
            out = {"value": rat(res.total), "method": "enumeration", "points_enumerated": res.cells}
    except oracle.BudgetExceeded as e:
        emit({"error": str(e), "status": "infeasible"})
        return EXIT_INFEASIBLE
    out["seconds"] = round(time.perf_counter() - t0, 3)
    emit(out)
    return EXIT_PASS


def cmd_suite(args):
    rep = run_suite(args.name, _config(args))
    emit(rep)
    return _status_code(rep["status"])


def cmd_table(args):
    cfg = _config(args)
    rows = table_rows(args.what, args.nmax, args.mmax, cfg)
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows))
    else:
        emit({"table": args.what, "config": asdict(cfg), "rows": rows})
    return EXIT_PASS


def _status_code(status):
    return {"pass": EXIT_PASS, "fail": EXIT_FAIL}.get(status, EXIT_INFEASIBLE)


def build_parser():
    ap = argparse.ArgumentParser(prog="g2local")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("lfactor", help="local L-factor as a rational function")
    s.add_argument("--param", help="x1,x2 (rationals); formal if omitted")
    s.add_argument("--shift", default="1,0", help="c,d for q^-d u^c")
    s.add_argument("--order", type=int, help="also print the u-series to this order")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_lfactor)

    s = sub.add_parser("verify-macdonald")
    s.add_argument("--formal", action="store_true")
    s.add_argument("--q", type=int, default=5)
    s.add_argument("--param")
    s.add_argument("--u", default="1/100")
    s.add_argument("--truncation", type=int, default=40)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(fn=cmd_verify_macdonald)

    s = sub.add_parser("verify-basic-identity")
    s.add_argument("--nmax", type=int, default=6)
    s.add_argument("--mmax", type=int, default=6)
    s.add_argument("--corrupt", help="n,m: perturb one table value")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_verify_basic_identity)

    s = sub.add_parser("fvalue")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--d-val", type=int, default=None, help="valuation of d (< 0 for non-toral)")
    s.add_argument("--bp1-val", type=int, default=0, help="valuation of b + 1 when |b| = 1")
    s.set_defaults(fn=cmd_fvalue)

    s = sub.add_parser("convolve")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--u")
    s.add_argument("--timings", action="store_true")
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_convolve)

    s = sub.add_parser("cosets")
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--class", dest="cls", default="all")
    s.set_defaults(fn=cmd_cosets)

    s = sub.add_parser("oracle")
    osub = s.add_subparsers(dest="what", required=True)
    e = osub.add_parser("ek")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--p", type=int, default=5)
    e.add_argument("--d", help="x_alpha parameter (rational); toral if omitted")
    e.add_argument("--t1")
    e.add_argument("--t2")
    e.set_defaults(fn=cmd_oracle)
    m = osub.add_parser("measure")
    m.add_argument("--spec", required=True)
    m.add_argument("--p", type=int, default=5)
    m.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("suite")
    s.add_argument("name", choices=SUITES)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--truncation", type=int, default=40)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_suite)

    s = sub.add_parser("table")
    s.add_argument("what", choices=TABLES)
    s.add_argument("--nmax", type=int, default=3)
    s.add_argument("--mmax", type=int, default=6)
    s.add_argument("--p", type=int, default=5)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(fn=cmd_table)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, ZeroDivisionError) as e:
        emit({"error": str(e), "status": "infeasible"})
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
