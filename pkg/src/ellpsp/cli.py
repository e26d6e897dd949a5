"""Command-line front end: ellpsp {test,search,stats,census,verify}.

Exit codes: 0 success, 1 a verification failed, 2 bad configuration,
3 an enumeration cap was exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import fp, psp, stats
from .curve import CapExceeded, Curve, group, make_point, reduce_rational_point
from .modarith import Factorization

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_CAP = 0, 1, 2, 3
CAP_ENV = "ELLPSP_CAP"


class ConfigError(ValueError):
    pass


def _cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return 10**6
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{CAP_ENV} must be an integer, got {raw!r}")


def parse_curve(text: str, d: int | None) -> Curve:
    try:
        a, b = (int(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"curve must be A,B with integers, got {text!r}")
    if d is not None and d <= 0:
        raise ConfigError("d must be positive")
    return Curve(a, b, d)


def parse_modulus(text: str) -> Factorization:
    try:
        return Factorization.parse(text)
    except ValueError as exc:
        raise ConfigError(f"bad modulus {text!r}: {exc}")


def parse_point(E: Curve, n: int, text: str):
    """'x,y' is an affine rational point reduced mod n; 'x:y:z' is taken mod n."""
    try:
        if ":" in text:
            x, y, z = (int(v) for v in text.split(":"))
            return make_point(E, n, x, y, z)
        x, y = (Fraction(v) for v in text.split(","))
        return reduce_rational_point(E, n, x, y)
    except ValueError as exc:
        raise ConfigError(f"bad point {text!r} mod {n}: {exc}")


def _write(out, line: str):
    out.write(line + "\n")


# ---------------------------------------------------------------------------


def cmd_test(args, out) -> int:
    E = parse_curve(args.curve, args.d)
    if args.flavor in ("g", "strong-g") and E.cm_disc is None and not args.no_gates:
        raise ConfigError("flavours g and strong-g need --d")
    coeffs = psp.LCoeffs(E)
    for text in args.n:
        F = parse_modulus(text)
        try:
            group(E, F)
        except ValueError as exc:
            raise ConfigError(str(exc))
        if args.all_points:
            pts = group(E, F).points(_cap())
        elif args.point:
            pts = [parse_point(E, F.n, args.point)]
        else:
            raise ConfigError("give --point or --all-points")
        for P in pts:
            try:
                if args.flavor in ("s", "strong-s"):
                    v = (psp.spsp_test if args.flavor == "s" else psp.strong_spsp_test)(
                        E, F, P, check_gates=not args.no_gates, coeffs=coeffs)
                elif args.flavor == "g":
                    v = psp.gpsp_test(E, F, P, check_gates=not args.no_gates)
                else:
                    v = psp.strong_gpsp_test(E, F, P, check_gates=not args.no_gates)
            except psp.NotComposite:
                v = psp.Verdict(args.flavor, F, E, P, False, psp.Reason.NOT_COMPOSITE)
            _write(out, v.to_json())
    return EXIT_OK


def cmd_search(args, out) -> int:
    E = parse_curve(args.curve, args.d)
    if args.flavor in ("g", "strong-g") and E.cm_disc is None and not args.no_gates:
        raise ConfigError("flavours g and strong-g need --d")
    try:
        x, y = (Fraction(v) for v in args.point.split(","))
    except ValueError:
        raise ConfigError("search needs a rational affine point x,y")
    if y * y != x**3 + E.a * x + E.b:
        raise ConfigError(f"({x}, {y}) is not on {E}")
    found = psp.search_pseudoprimes(args.flavor, E, x, y, args.lo, args.hi, not args.no_gates)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["N"])
        for n in found:
            w.writerow([n])
    else:
        for n in found:
            _write(out, json.dumps({"N": n, "test": args.flavor}))
    return EXIT_OK


def cmd_stats(args, out) -> int:
    if args.bound_check:
        if args.seed is None:
            raise ConfigError("--bound-check needs an explicit --seed")
        F = parse_modulus(args.n)
        if len(F.factors) < 2:
            raise ConfigError("N needs two distinct prime factors")
        p, q = (args.p, args.q) if args.p and args.q else F.primes[-2:]
        rec = stats.random_curve_bound_check(F, p, q, args.samples, args.seed, args.mode, enforce=False)
        _write(out, rec.to_json())
        return EXIT_OK if rec.within_bound() else EXIT_FAIL
    if args.exact:
        F = parse_modulus(args.n)
        if len(F.factors) < 2:
            raise ConfigError("N needs two distinct prime factors")
        p, q = F.primes[-2:]
        rows = []
        for mode, bound in (("all", stats.bound_all_points(p, q)), ("strong", stats.bound_strong_points(p, q))):
            val = stats.census_probability(F.primes, mode == "strong")
            rows.append({"N": F.n, "p": p, "q": q, "mode": mode, "exact": str(val),
                         "bound": str(bound), "ok": val <= bound})
        for r in rows:
            _write(out, json.dumps(r, sort_keys=True))
        return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL
    if args.h_table:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["s", "r", "t", "w", "h", "h_prime"])
        for s, r, t, w_ in stats.structures(args.grid, args.tw):
            h = ";".join(str(v) for v in stats.h_vector(s, r).entries)
            hp = ";".join(str(v) for v in stats.h_prime_vector(s, r, t, w_).entries)
            w.writerow([s, r, t, w_, h, hp])
        return EXIT_OK
    if args.p and args.q:
        _write(out, json.dumps({
            "p": args.p, "q": args.q,
            "bound_all": str(stats.bound_all_points(args.p, args.q)),
            "bound_strong": str(stats.bound_strong_points(args.p, args.q)),
        }, sort_keys=True))
        return EXIT_OK
    raise ConfigError("choose --bound-check, --exact, --h-table or --p/--q")


def cmd_census(args, out) -> int:
    rows = []
    for p in args.p:
        try:
            rows.append(fp.curve_census(p, args.space))
        except ValueError as exc:
            raise ConfigError(str(exc))
    if args.format == "csv":
        out.write(fp.census_csv(rows))
    else:
        for c in rows:
            _write(out, fp.census_json(c))
    ok = all(c.proportions() == fp.census_proportions(c.p) for c in rows)
    return EXIT_OK if ok else EXIT_FAIL


VERIFY_THEOREMS = ("max-h", "max-h-prime", "strong-g-sweep", "carmichael", "witness", "strong-s", "bounds")


def cmd_verify(args, out) -> int:
    th = args.theorem
    report: dict = {"theorem": th}
    if th == "max-h":
        rep = stats.verify_max_h(args.grid)
        report.update(rep.as_dict())
        report["ok"] = rep.ok and rep.maximum == Fraction(5, 8) and rep.argmax == [(1, 1, 1, 1)]
    elif th == "max-h-prime":
        rep = stats.verify_max_h_prime(args.grid, args.tw)
        report.update(rep.as_dict())
        report["ok"] = rep.ok and rep.maximum <= Fraction(9, 11)
    elif th == "strong-g-sweep":
        F = parse_modulus(args.n)
        worst_all = worst_snz = Fraction(0)
        count = 0
        for E in psp.sweep_curves(F):
            E = psp.with_sweep_disc(E, F.n)
            if not (psp.g_gates_hold(E, F) and psp.supersingular_somewhere(E, F)):
                continue
            count += 1
            worst_all = max(worst_all, stats.strong_g_point_fraction(E, F, "all", cap=_cap()))
            worst_snz = max(worst_snz, stats.strong_g_point_fraction(E, F, "strong", cap=_cap()))
        report.update({"N": F.n, "curves": count, "max_all": str(worst_all), "max_strong": str(worst_snz),
                       "ok": worst_all <= Fraction(5, 8) and worst_snz <= Fraction(9, 11)})
    elif th == "carmichael":
        F = parse_modulus(args.n)
        disagree = []
        count = 0
        for E in psp.sweep_curves(F):
            E = psp.with_sweep_disc(E, F.n)
            for flavor in ("g", "s"):
                for gates in (True, False):
                    a = psp.carmichael_test(E, F, flavor, "all", gates, _cap()).holds
                    b = psp.carmichael_test(E, F, flavor, "strong", gates, _cap()).holds
                    count += 1
                    if a != b:
                        disagree.append([E.a, E.b, flavor, gates])
        report.update({"N": F.n, "checked": count, "disagreements": disagree, "ok": not disagree})
    elif th == "witness":
        F = parse_modulus(args.n)
        gated = len(F.factors) > 1
        count = 0
        failures = []
        for E in psp.sweep_curves(F):
            E = psp.with_sweep_disc(E, F.n)
            if gated and not (psp.g_gates_hold(E, F) and psp.supersingular_somewhere(E, F)):
                continue
            count += 1
            try:
                W = psp.strong_g_witness(E, F, check_gates=gated)
                if not W.is_strong() or psp.strong_gpsp_test(E, F, W, check_gates=False).passed:
                    failures.append([E.a, E.b])
            except RuntimeError:
                failures.append([E.a, E.b])
        report.update({"N": F.n, "curves": count, "failures": failures, "ok": not failures})
    elif th == "strong-s":
        F = parse_modulus(args.n)
        tally: dict[str, int] = {}
        mismatches = []
        for E in psp.sweep_curves(F):
            verdict = psp.strong_s_snz_characterization(E, F)
            brute = psp.strong_s_snz_bruteforce(E, F)
            tally[verdict.value] = tally.get(verdict.value, 0) + 1
            if (verdict is not psp.StrongSClass.FAILS) != brute:
                mismatches.append([E.a, E.b, verdict.value, brute])
        report.update({"N": F.n, "tally": tally, "mismatches": mismatches, "ok": not mismatches})
    elif th == "bounds":
        F = parse_modulus(args.n)
        p, q = F.primes[-2:]
        exact_all = stats.census_probability(F.primes)
        exact_snz = stats.census_probability(F.primes, True)
        b_all, b_snz = stats.bound_all_points(p, q), stats.bound_strong_points(p, q)
        report.update({"N": F.n, "p": p, "q": q, "exact_all": str(exact_all), "bound_all": str(b_all),
                       "exact_strong": str(exact_snz), "bound_strong": str(b_snz),
                       "ok": exact_all <= b_all and exact_snz <= b_snz})
    _write(out, json.dumps(report, sort_keys=True, default=str))
    return EXIT_OK if report["ok"] else EXIT_FAIL


# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ellpsp", description="Elliptic pseudoprime tests and proportion statistics.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def curve_args(p):
        p.add_argument("--curve", required=True, help="coefficients A,B of y^2 = x^3 + Ax + B")
        p.add_argument("--d", type=int, default=None, help="CM discriminant d (field Q(sqrt(-d)))")
        p.add_argument("--flavor", choices=psp.FLAVORS, default="g")
        p.add_argument("--no-gates", action="store_true", help="run the test kernel only")

    t = sub.add_parser("test", help="run a pseudoprime test")
    curve_args(t)
    t.add_argument("--n", nargs="+", required=True, help="N or N=p^a*q factorization")
    t.add_argument("--point", help="x,y (rational, reduced mod N) or x:y:z")
    t.add_argument("--all-points", action="store_true", help="test every point of E(Z/NZ)")
    t.set_defaults(func=cmd_test)

    s = sub.add_parser("search", help="scan a range of N for pseudoprimes")
    curve_args(s)
    s.add_argument("--point", required=True, help="rational point x,y")
    s.add_argument("--from", dest="lo", type=int, default=9)
    s.add_argument("--to", dest="hi", type=int, required=True)
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_search)

    st = sub.add_parser("stats", help="proportion statistics and random-curve bounds")
    st.add_argument("--bound-check", action="store_true")
    st.add_argument("--exact", action="store_true", help="exact census probability against the bounds")
    st.add_argument("--h-table", action="store_true", help="CSV table of h and h' vectors")
    st.add_argument("--n", default="35")
    st.add_argument("--p", type=int)
    st.add_argument("--q", type=int)
    st.add_argument("--samples", type=int, default=10000)
    st.add_argument("--seed", type=int)
    st.add_argument("--mode", choices=("all", "strong"), default="all")
    st.add_argument("--grid", type=int, default=3)
    st.add_argument("--tw", type=int, default=3)
    st.set_defaults(func=cmd_stats)

    c = sub.add_parser("census", help="census of cubics over F_p")
    c.add_argument("--p", type=int, nargs="+", required=True)
    c.add_argument("--space", choices=("monic", "short"), default="monic")
    c.add_argument("--format", choices=("json", "csv"), default="csv")
    c.set_defaults(func=cmd_census)

    v = sub.add_parser("verify", help="numerical verification suites")
    v.add_argument("--theorem", choices=VERIFY_THEOREMS, required=True)
    v.add_argument("--grid", type=int, default=8)
    v.add_argument("--tw", type=int, default=9)
    v.add_argument("--n", default="35")
    v.set_defaults(func=cmd_verify)
    return ap


def _glue_negatives(argv):
    """Let '--curve -1,0' through: argparse would read -1,0 as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--curve", "--point"):
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _glue_negatives(sys.argv[1:] if argv is None else list(argv))
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
