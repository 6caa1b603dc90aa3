"""Command-line interface.

Each subcommand prints a human-readable result followed by ``@key=value`` lines.
Exit status: 0 when a result was computed (also for a false verdict), 2 for
parse or usage errors including an unusable --prime, 3 when a resource cap or
unsupported case is hit, 1 for any other library error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .arithgen import generating_arithmetic
from .errors import DEFAULT_LIMITS, BadPrime, Limits, ParseError, ResourceError, SolvArithError
from .fileformat import format_group, read_group, read_lie
from .hirsch import hirsch_number
from .integrality import choose_prime, common_denominator, is_integral_sf
from .intercept import conjugating_matrix, integral_intercept
from .toplevel import STAGES, format_table, gn_dim, is_arithmetic_solvable, table1_harness


def _bool(x: bool) -> str:
    return "true" if x else "false"


def _emit(out, **fields) -> None:
    for k, v in fields.items():
        if isinstance(v, bool):
            v = _bool(v)
        out.write(f"@{k}={v}\n")


def _limits(args) -> Limits:
    return Limits(
        order_cap=args.order_cap or DEFAULT_LIMITS.order_cap,
        orbit_cap=args.orbit_cap or DEFAULT_LIMITS.orbit_cap,
        trial_division_bound=DEFAULT_LIMITS.trial_division_bound,
        pell_period_cap=DEFAULT_LIMITS.pell_period_cap,
        power_search_cap=DEFAULT_LIMITS.power_search_cap,
        prime=args.prime,
    )


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SOLVARITH_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ParseError(f"SOLVARITH_SEED={env!r} is not an integer") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_isintegral(args, out) -> None:
    S = read_group(args.group)
    lim = _limits(args)
    res = is_integral_sf(S, limits=lim, seed=_seed(args))
    out.write(_bool(res) + "\n")
    _emit(out, integral=res, prime=choose_prime(S, lim))


def cmd_commondenom(args, out) -> None:
    S = read_group(args.group)
    cert = common_denominator(S, seed=_seed(args))
    out.write(f"{cert.d}\n")
    _emit(out, d=cert.d, d1=cert.d1, d2=cert.d2, c=cert.c, e=cert.e,
          algebra_dim=len(cert.algebra_basis), gram_det=cert.gram_det)


def cmd_conjugate(args, out) -> None:
    S = read_group(args.group)
    g = conjugating_matrix(S, limits=_limits(args), seed=_seed(args))
    gi = g.inv()
    out.write("# conjugator g, its columns span the invariant lattice:\n")
    for row in g.rows():
        out.write("#   " + " ".join(str(x) for x in row) + "\n")
    out.write(format_group([gi * s * g for s in S.gens]))


def cmd_intercept(args, out) -> None:
    S = read_group(args.group)
    lim = _limits(args)
    seed = _seed(args)
    d = args.d
    if d is None:
        if not is_integral_sf(S, limits=lim, seed=seed):
            raise SolvArithError("group is not integral")
        d = common_denominator(S, seed=seed).d
    res = integral_intercept(S, d, limits=lim)
    out.write(f"# orbit size {len(res.orbit)}; stabilizer generators:\n")
    if res.stabilizer_gens:
        out.write(format_group(res.stabilizer_gens))
    _emit(out, d=d, orbit_size=len(res.orbit), stabilizer_gens=len(res.stabilizer_gens))


def cmd_hirsch(args, out) -> None:
    S = read_group(args.group)
    cert = hirsch_number(S, limits=_limits(args), seed=_seed(args))
    out.write(f"{cert.h}\n")
    _emit(out, h=cert.h, abelian_rank=cert.abelian_rank, unipotent_rank=cert.unipotent_rank, prime=cert.p)


def cmd_arithgen(args, out) -> None:
    g = read_lie(args.lie)
    res = generating_arithmetic(g, limits=_limits(args), seed=_seed(args))
    out.write(format_group(res.gens) if res.gens else "# no generators (trivial group)\n")
    _emit(out, torus=len(res.torus), unipotent=len(res.unipotent))


def cmd_isarith(args, out) -> None:
    S = read_group(args.group)
    g = read_lie(args.lie)
    dec = is_arithmetic_solvable(S, g, skip_integrality=args.skip_integrality,
                                 limits=_limits(args), seed=_seed(args))
    out.write(_bool(dec.verdict) + "\n")
    integ = "skipped" if dec.integrality is None else _bool(dec.integrality)
    _emit(out, verdict=dec.verdict, integrality=integ,
          h_input="none" if dec.h_input is None else dec.h_input,
          h_arith="none" if dec.h_arith is None else dec.h_arith)
    if args.timings:
        _emit(out, **{"time_" + k: f"{v:.4f}" for k, v in dec.timings.items()})


def cmd_bench(args, out) -> None:
    rows = table1_harness(args.n, runs=args.runs, seed=_seed(args), limits=_limits(args))
    if args.no_timings:
        out.write(f"{'n':>3} {'dim':>4} {'h':>4} {'ok':>5}\n")
        for r in rows:
            out.write(f"{r.n:>3} {r.dim:>4} {'?' if r.h is None else r.h:>4} {_bool(r.all_ok):>5}\n")
    else:
        out.write(format_table(rows) + "\n")
    for r in rows:
        fields = dict(n=r.n, dim=r.dim, h=r.h, expected_h=gn_dim(r.n) - 1, runs=r.runs, ok=r.all_ok,
                      max_entry_digits=r.max_entry_digits)
        if not args.no_timings:
            fields.update({"time_" + s: f"{r.avg[s]:.4f}" for s in STAGES})
        out.write("@" + " ".join(f"{k}={_bool(v) if isinstance(v, bool) else v}" for k, v in fields.items()) + "\n")


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=None, help="congruence prime (odd, not dividing denominators)")
    common.add_argument("--order-cap", type=int, default=None, help="max order of the finite image")
    common.add_argument("--orbit-cap", type=int, default=None, help="max orbit length of Z^n")
    common.add_argument("--seed", type=int, default=None, help="random seed (default: $SOLVARITH_SEED or 0)")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")

    p = argparse.ArgumentParser(prog="solvarith", description="Integrality and arithmeticity of solvable rational matrix groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, *files):
        sp = sub.add_parser(name, parents=[common], help=help_)
        for f in files:
            sp.add_argument(f, help=f"{f} file")
        sp.set_defaults(func=func)
        return sp

    add("isintegral", cmd_isintegral, "is <S> conjugate into GL(n,Z)?", "group")
    add("commondenom", cmd_commondenom, "d with d*H integral", "group")
    add("conjugate", cmd_conjugate, "conjugate an integral group into GL(n,Z)", "group")
    sp = add("intercept", cmd_intercept, "orbit of Z^n and stabilizer generators", "group")
    sp.add_argument("--d", type=int, default=None, help="common denominator (computed if omitted)")
    add("hirsch", cmd_hirsch, "Hirsch number of <S>", "group")
    add("arithgen", cmd_arithgen, "generators of an arithmetic subgroup for a Lie algebra", "lie")
    sp = add("isarith", cmd_isarith, "is <S> arithmetic in the group of the Lie algebra?", "group", "lie")
    sp.add_argument("--skip-integrality", action="store_true", help="omit the integrality test (unipotent G)")
    sp.add_argument("--timings", action="store_true", help="also print stage timings")
    sp = add("bench", cmd_bench, "benchmark family g(n)")
    sp.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    sp.add_argument("--runs", type=int, default=1)
    sp.add_argument("--no-timings", action="store_true", help="omit timings for byte-reproducible output")
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    try:
        args.func(args, out)
    except (ParseError, BadPrime, OSError) as exc:
        print(f"solvarith: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"solvarith: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except SolvArithError as exc:
        print(f"solvarith: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
