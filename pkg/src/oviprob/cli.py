"""Batch front door: every module's checks and computations behind one
argparse tree, with JSON/CSV/pretty output, seeds and caps echoed into the
report.

Exit codes: 0 all checks pass, 1 any check failed, 2 usage error.  The
machine-readable report goes to stdout; in pretty mode a human summary goes
to stderr.  Exact rationals serialize as 'p/q' strings.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from .algebra.exact import QQi, RatPoly, scalar_from_str, scalar_to_str
from .cumulants import CumulantFamily, InfinitesimalLaw, \
    cumulants_to_moments, mixed_cumulant_test, moments_to_cumulants
from .errors import OviprobError
from .partitions import SetPartition, enumerate_partitions, moebius, \
    murua_omega, tree_factorial

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    L: int = 8
    mode: str = "exact"
    tol: float = 1e-8
    seed: int = 0
    fmt: str = "json"

    def to_json(self):
        d = asdict(self)
        if self.mode == "exact":
            d["tol"] = None  # exact mode ignores tolerance
        return d


def _jsonable(obj):
    if isinstance(obj, (Fraction, QQi)):
        return scalar_to_str(obj)
    if isinstance(obj, RatPoly):
        return repr(obj)
    if isinstance(obj, SetPartition):
        return obj.to_json()
    if hasattr(obj, "to_json"):
        return _jsonable(obj.to_json())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (int, str, bool)) or obj is None:
        return obj
    return str(obj)


def _parse_law(moments, inf_moments, L):
    m = [scalar_from_str(s) for s in moments.split(",")] if moments else []
    dm = [scalar_from_str(s) for s in inf_moments.split(",")] \
        if inf_moments else [Fraction(0)] * len(m)
    if len(dm) != len(m):
        raise OviprobError("--moments and --inf-moments lengths differ")
    if L and len(m) < L:
        m = m + [Fraction(0)] * (L - len(m))
        dm = dm + [Fraction(0)] * (L - len(dm))
    return InfinitesimalLaw(tuple(m[:L] if L else m), tuple(dm[:L] if L else dm))


def _parse_partition(text):
    return SetPartition.from_json(json.loads(text))


# -- subcommand handlers: each returns (rows, ok) -------------------------------


def _cmd_partitions(args, cfg):
    if args.op == "enumerate":
        parts = enumerate_partitions(args.n, args.cls)
        return [{"index": i, "blocks": p} for i, p in enumerate(parts)], True
    if args.op == "moebius":
        sigma, pi = _parse_partition(args.sigma), _parse_partition(args.pi)
        return [{"sigma": sigma, "pi": pi,
                 "moebius": moebius(sigma, pi)}], True
    if args.op == "treefact":
        pi = _parse_partition(args.pi)
        return [{"pi": pi, "tree_factorial": tree_factorial(pi)}], True
    if args.op == "omega":
        pi = _parse_partition(args.pi)
        return [{"pi": pi, "omega": murua_omega(pi)}], True
    raise OviprobError(f"unknown partitions op {args.op!r}")


def _cmd_cumulants(args, cfg):
    if args.op == "convert":
        law = _parse_law(args.moments, args.inf_moments, cfg.L)
        if args.direction == "moments-to-cumulants":
            fam = moments_to_cumulants(law, args.kind, verify_tilde=True)
            return [{"kind": args.kind, "direction": args.direction,
                     "values": list(fam.values),
                     "inf_values": list(fam.inf_values)}], True
        fam = CumulantFamily(args.kind, law.moments, law.inf_moments)
        out = cumulants_to_moments(fam)
        return [{"kind": args.kind, "direction": args.direction,
                 "moments": list(out.moments),
                 "inf_moments": list(out.inf_moments)}], True
    if args.op == "mixed-test":
        from .algebra.spaces import Family, FormalSpace
        import random as _random
        rng = _random.Random(cfg.seed)

        def fam(name, letters, order):
            moments, dmoments = {}, {}
            for a in letters:
                for b in letters:
                    moments[(a, b)] = Fraction(rng.randint(-3, 3), 2)
                    dmoments[(a, b)] = Fraction(rng.randint(-3, 3), 2)
                moments[(a,)] = Fraction(rng.randint(-2, 2), 2)
                dmoments[(a,)] = Fraction(rng.randint(-2, 2), 2)
            return Family(name, letters, order, moments, dmoments)

        space = FormalSpace([fam("f1", ("u", "v"), 0), fam("f2", ("w",), 1)],
                            args.kind, cap=args.max_len)
        rep = mixed_cumulant_test(space, args.kind, args.max_len)
        return [rep.to_json()], rep.ok
    raise OviprobError(f"unknown cumulants op {args.op!r}")


def _cmd_convolve(args, cfg):
    from .transforms import boolean_convolve_infinitesimal, \
        free_convolve_infinitesimal, monotone_convolve_infinitesimal

    mu = _parse_law(args.mu, args.mu_inf if args.infinitesimal else "", cfg.L)
    nu = _parse_law(args.nu, args.nu_inf if args.infinitesimal else "", cfg.L)
    op = {"boolean": boolean_convolve_infinitesimal,
          "monotone": monotone_convolve_infinitesimal,
          "free": free_convolve_infinitesimal}[args.kind]
    law, rep = op(mu, nu, L=cfg.L)
    row = {"kind": args.kind, "moments": list(law.moments),
           "inf_moments": list(law.inf_moments),
           "verification": rep.to_json()}
    return [row], rep.ok


def _cmd_clt(args, cfg):
    from .clt import finite_sum_convergence, scalar_inf_clt_identity, \
        svi_clt_law_check

    alpha = scalar_from_str(args.alpha)
    if args.op == "identity":
        rows, ok = [], True
        for kind in args.kinds.split(","):
            rep, law = scalar_inf_clt_identity(kind, alpha, cfg.L)
            ok = ok and rep.ok
            rows.append({"kind": kind, "ok": rep.ok,
                         "moments": list(law.moments),
                         "inf_moments": list(law.inf_moments)})
        return rows, ok
    if args.op == "laws":
        rows, ok = [], True
        for kind in args.kinds.split(","):
            rep, table = svi_clt_law_check(kind, alpha, args.k_max, cfg.tol)
            ok = ok and rep.ok
            for r in table:
                rows.append({"kind": kind, **r})
        return rows, ok
    if args.op == "finite-sum":
        m = [scalar_from_str(s) for s in args.moments.split(",")]
        dm = [scalar_from_str(s) for s in args.inf_moments.split(",")]
        rows = finite_sum_convergence(
            args.kind, tuple(m), tuple(dm), args.k,
            tuple(int(v) for v in args.n_values.split(",")))
        return rows, True
    raise OviprobError(f"unknown clt op {args.op!r}")


def _cmd_relations(args, cfg):
    from .relations import comb_identity_check, verify_all_relations

    if cfg.mode != "exact":
        raise OviprobError("relations require --mode exact")
    if args.op == "verify":
        rows, ok = [], True
        for mode in args.spaces.split(","):
            for rep in verify_all_relations(n_max=args.n_max, mode=mode,
                                            seed=cfg.seed,
                                            via_tilde=args.via_tilde):
                ok = ok and rep.ok
                rows.append({"space": mode, **rep.to_json()})
        return rows, ok
    if args.op == "comb-identity":
        rep = comb_identity_check(args.n)
        return [rep.to_json()], rep.ok
    raise OviprobError(f"unknown relations op {args.op!r}")


def _cmd_matrixmodel(args, cfg):
    from .matrixmodels import model_moment, monte_carlo, violation_report

    if args.op == "violations":
        rep, rows = violation_report(max_degree=args.max_degree)
        return ([{"check": r["check"], "predicted": r["predicted"],
                  "actual": r["actual"]} for r in rows]
                + [rep.to_json()]), rep.ok
    mm = model_moment(args.op, args.word)
    row = mm.to_json()
    row["provenance"] = "exact"
    rows = [row]
    if args.mc:
        res = monte_carlo(args.op, args.word, args.N, args.samples, cfg.seed)
        mc_row = res.to_json()
        mc_row["provenance"] = f"float(tol={cfg.tol})"
        rows.append(mc_row)
        return rows, res.sigmas <= 4.0
    return rows, True


def _cmd_lemmas(args, cfg):
    if args.op == "tilde":
        from .relations import tilde_lemma_suite
        reports = tilde_lemma_suite(n_max=args.n_max, seed=cfg.seed)
        return [r.to_json() for r in reports], all(r.ok for r in reports)
    if args.op == "weighted":
        import random as _random
        from .algebra.wordspace import WordSpace
        from .cumulants import OperatorCumulants
        from .multiplicative import check_weighted_multiplicativity
        from .partitions import tree_factorial as tf

        ws = WordSpace(k=2, seed=cfg.seed)
        engine = OperatorCumulants(ws.expectation_pair())
        rng = _random.Random(cfg.seed + 1)
        args_t = tuple(ws.random_arg(rng) for _ in range(args.n))
        weights = {
            "ones": lambda pi: Fraction(1),
            "irr_tree": lambda pi: (Fraction(1, tf(pi))
                                    if pi.is_irreducible() else Fraction(0)),
        }
        rows, ok = [], True
        for name, c in weights.items():
            rep = check_weighted_multiplicativity(
                engine.moment_family, c, args.n, args_t)
            rep.name = f"weighted[{name}]"
            rows.append(rep.to_json())
            ok = ok and rep.ok
        return rows, ok
    raise OviprobError(f"unknown lemmas op {args.op!r}")


# -- parser ---------------------------------------------------------------------


GLOBAL_DEFAULTS = {"format": "json", "mode": "exact", "L": 8,
                   "tol": 1e-8, "seed": 0}


def _add_global_flags(p):
    # SUPPRESS keeps subcommand-position flags from clobbering values given
    # before the subcommand; defaults are filled in after parsing
    p.add_argument("--format", choices=("json", "csv", "pretty"),
                   default=argparse.SUPPRESS)
    p.add_argument("--mode", choices=("exact", "float64"),
                   default=argparse.SUPPRESS)
    p.add_argument("--L", type=int, default=argparse.SUPPRESS,
                   help="truncation order")
    p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)


def build_parser():
    p = argparse.ArgumentParser(
        prog="oviprob",
        description="Exact workbench for infinitesimal free, Boolean and "
                    "monotone probability.")
    _add_global_flags(p)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("partitions")
    _add_global_flags(sp)
    sp.add_argument("op", choices=("enumerate", "moebius", "treefact",
                                   "omega"))
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--class", dest="cls", default="noncrossing",
                    choices=("all", "noncrossing", "interval", "irreducible",
                             "pairing"))
    sp.add_argument("--sigma", help="partition as JSON blocks")
    sp.add_argument("--pi", help="partition as JSON blocks")
    sp.set_defaults(func=_cmd_partitions)

    sc = sub.add_parser("cumulants")
    _add_global_flags(sc)
    sc.add_argument("op", choices=("convert", "mixed-test"))
    sc.add_argument("--kind", choices=("free", "boolean", "monotone"),
                    default="free")
    sc.add_argument("--direction", choices=("moments-to-cumulants",
                                            "cumulants-to-moments"),
                    default="moments-to-cumulants")
    sc.add_argument("--moments", default="")
    sc.add_argument("--inf-moments", default="")
    sc.add_argument("--max-len", type=int, default=5)
    sc.set_defaults(func=_cmd_cumulants)

    sv = sub.add_parser("convolve")
    _add_global_flags(sv)
    sv.add_argument("kind", choices=("boolean", "monotone", "free"))
    sv.add_argument("--mu", required=True, help="comma-separated moments")
    sv.add_argument("--nu", required=True)
    sv.add_argument("--mu-inf", default="")
    sv.add_argument("--nu-inf", default="")
    sv.add_argument("--infinitesimal", action="store_true")
    sv.set_defaults(func=_cmd_convolve)

    st = sub.add_parser("clt")
    _add_global_flags(st)
    st.add_argument("op", choices=("identity", "laws", "finite-sum"))
    st.add_argument("--kinds", default="free,boolean,monotone")
    st.add_argument("--kind", default="free")
    st.add_argument("--alpha", default="1")
    st.add_argument("--k-max", type=int, default=8)
    st.add_argument("--k", type=int, default=4)
    st.add_argument("--moments", default="0,1,0,2")
    st.add_argument("--inf-moments", default="0,1,0,0")
    st.add_argument("--n-values", default="1,2,4,6")
    st.set_defaults(func=_cmd_clt)

    sr = sub.add_parser("relations")
    _add_global_flags(sr)
    sr.add_argument("op", choices=("verify", "comb-identity"))
    sr.add_argument("--n-max", type=int, default=5)
    sr.add_argument("--n", type=int, default=5)
    sr.add_argument("--spaces", default="scalar",
                    help="comma list from {scalar, m2}")
    sr.add_argument("--via-tilde", action="store_true")
    sr.set_defaults(func=_cmd_relations)

    sm = sub.add_parser("matrixmodel")
    _add_global_flags(sm)
    sm.add_argument("op", choices=("antitrace", "partialtrace", "violations"))
    sm.add_argument("--word", default="A2")
    sm.add_argument("--exact", action="store_true", default=True)
    sm.add_argument("--mc", action="store_true")
    sm.add_argument("--N", type=int, default=200)
    sm.add_argument("--samples", type=int, default=10000)
    sm.add_argument("--max-degree", type=int, default=7)
    sm.set_defaults(func=_cmd_matrixmodel)

    sl = sub.add_parser("lemmas")
    _add_global_flags(sl)
    sl.add_argument("op", choices=("tilde", "weighted"))
    sl.add_argument("--n-max", type=int, default=4)
    sl.add_argument("--n", type=int, default=4)
    sl.set_defaults(func=_cmd_lemmas)
    return p


def _emit(rows, ok, cfg, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    payload = {"config": cfg.to_json(), "ok": ok,
               "results": _jsonable(rows)}
    if cfg.fmt == "csv":
        flat = [r for r in _jsonable(rows) if isinstance(r, dict)]
        keys = []
        for r in flat:
            for k in r:
                if k not in keys:
                    keys.append(k)
        buf = io.StringIO()
        buf.write("# config: " + json.dumps(payload["config"],
                                            sort_keys=True) + "\n")
        w = csv.DictWriter(buf, fieldnames=keys, extrasaction="ignore",
                           quoting=csv.QUOTE_MINIMAL)
        w.writeheader()
        for r in flat:
            w.writerow({k: json.dumps(v, sort_keys=True)
                        if isinstance(v, (dict, list)) else v
                        for k, v in r.items()})
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(payload, sort_keys=True, indent=None,
                             separators=(",", ":")))
        out.write("\n")
    if cfg.fmt == "pretty":
        err.write(f"[oviprob] {'PASS' if ok else 'FAIL'}: "
                  f"{len(rows)} result rows\n")
        for r in _jsonable(rows)[:20]:
            err.write(f"  {r}\n")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    for key, val in GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    cfg = RunConfig(L=args.L, mode=args.mode, tol=args.tol, seed=args.seed,
                    fmt=args.format)
    try:
        rows, ok = args.func(args, cfg)
    except OviprobError as e:
        sys.stderr.write(f"oviprob: {e}\n")
        return EXIT_USAGE
    _emit(rows, ok, cfg)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
