"""Command-line front end: generation, exhaustive checks, plane test, case census.

Reports go to stdout (JSON for `planes` and `census`, a plain table for
`verify`), progress notes to stderr, data files to the output directory.
Exit codes: 0 pass, 1 verification or threshold failure, 2 usage or I/O
error.  Every command is deterministic given its flags; seeds are given in
hex to keep 64-bit values unambiguous.
"""

import argparse
import json
import sys

from .engine import Params, seed_state, step, to_unit
from .experiment import ExperimentConfig, case_census, control_baseline, run_experiment
from .planes import family
from .xorapprox import compound_probability, count_cases, verify_xor_diff, verify_xor_sum


def _hex_word(text: str) -> int:
    value = int(text, 16)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {text}")
    return value


def _add_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=int, default=23, help="left-shift count (default 23)")
    parser.add_argument("--b", type=int, default=17, help="first right-shift count (default 17)")
    parser.add_argument("--c", type=int, default=26, help="second right-shift count (default 26)")


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=_hex_word, default=1, metavar="HEX",
        help="64-bit seed in hex (default 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xsplanes",
        description="xorshift128+ outputs, exhaustive xor-arithmetic checks, and plane-structure experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="print raw or unit-interval outputs")
    _add_params(p_gen)
    _add_seed(p_gen)
    p_gen.add_argument("--count", type=int, default=10, help="number of outputs (default 10)")
    p_gen.add_argument(
        "--format", choices=("hex", "unit"), default="hex",
        help="hex 64-bit words or unit-interval reals (default hex)",
    )

    p_verify = sub.add_parser("verify", help="exhaustive xor-vs-arithmetic checks")
    p_verify.add_argument(
        "--n-max", type=int, default=10,
        help="check widths 1..n_max (default 10, limit 12)",
    )

    p_planes = sub.add_parser("planes", help="slab sampling, hit statistics, plot data")
    _add_params(p_planes)
    _add_seed(p_planes)
    p_planes.add_argument("--epsilon", type=float, default=2.0**-10,
                          help="plane-proximity tolerance (default 2**-10)")
    p_planes.add_argument("--target-points", type=int, default=None,
                          help="slab points to collect (default 1000; 10000 with --full-scale)")
    p_planes.add_argument("--full-scale", action="store_true",
                          help="collect the full 10000-point cloud")
    p_planes.add_argument("--scan-cap", type=int, default=None,
                          help="hard cap on triples scanned (default: sized to the target)")
    p_planes.add_argument("--magnify-exp", type=int, default=None,
                          help="slab/magnification exponent e: x < 2**-e, x-axis scaled by 2**e (default a)")
    p_planes.add_argument("--grid", type=int, default=64,
                          help="mesh stations per axis (default 64)")
    p_planes.add_argument("--control-points", type=int, default=1 << 17,
                          help="control sample size (default 131072)")
    p_planes.add_argument("--control-seed", type=_hex_word, default=271828, metavar="HEX",
                          help="control generator key in hex (default 0x425d4)")
    p_planes.add_argument("--census-steps", type=int, default=50000,
                          help="steps for the case census (default 50000)")
    p_planes.add_argument("--n-bits", type=int, default=3,
                          help="top-bit width for the census (default 3)")
    p_planes.add_argument("--min-ratio", type=float, default=10.0,
                          help="pass threshold on hit/control ratio (default 10)")
    p_planes.add_argument("--method", choices=("auto", "sequential", "fast"), default="auto",
                          help="scan implementation (default auto)")
    p_planes.add_argument("--output-dir", default="planes_out",
                          help="directory for CSV/JSON data files (default planes_out)")
    p_planes.add_argument("--control-only", action="store_true",
                          help="compute only the control baseline")

    p_census = sub.add_parser("census", help="compound-case frequencies over a stream")
    _add_params(p_census)
    _add_seed(p_census)
    p_census.add_argument("--steps", type=int, default=50000,
                          help="steps to tally (default 50000)")
    p_census.add_argument("--n-bits", type=int, default=3,
                          help="top-bit width (default 3)")

    return parser


def cmd_gen(args) -> int:
    state = seed_state(args.seed, Params(args.a, args.b, args.c))
    if args.count < 0:
        print("count must be >= 0", file=sys.stderr)
        return 2
    for _ in range(args.count):
        state, out = step(state)
        if args.format == "hex":
            print(f"0x{out:016x}")
        else:
            print(format(to_unit(out), ".17g"))
    return 0


def cmd_verify(args) -> int:
    if not 1 <= args.n_max <= 12:
        print("--n-max must be in 1..12", file=sys.stderr)
        return 2
    header = f"{'n':>3} {'pairs':>10} {'sum':>8} {'diff':>8} {'rdiff':>8} {'union':>9} {'expected':>9} {'ineq':>5} {'ok':>3}"
    print(header)
    all_ok = True
    for n in range(1, args.n_max + 1):
        counts = count_cases(n)
        expected_union = 3 * 3**n - 3 * 2**n + 1
        counts_ok = (
            counts.total == 4**n
            and counts.n_sum == counts.n_diff == counts.n_rev_diff == 3**n
            and counts.n_sum_diff == counts.n_diff_rev_diff == counts.n_rev_diff_sum == 2**n
            and counts.n_all_three == 1
            and counts.n_any == expected_union
        )
        ineq_ok = verify_xor_sum(n) and verify_xor_diff(n)
        ok = counts_ok and ineq_ok
        all_ok = all_ok and ok
        print(
            f"{n:>3} {counts.total:>10} {counts.n_sum:>8} {counts.n_diff:>8} "
            f"{counts.n_rev_diff:>8} {counts.n_any:>9} {expected_union:>9} "
            f"{'yes' if ineq_ok else 'NO':>5} {'yes' if ok else 'NO':>3}"
        )
    return 0 if all_ok else 1


def cmd_planes(args) -> int:
    params = Params(args.a, args.b, args.c)
    if args.control_only:
        fam = family(params.a)
        fraction = control_baseline(args.control_points, fam, args.epsilon, args.control_seed)
        payload = {
            "control_points": args.control_points,
            "epsilon": args.epsilon,
            "control_hit_fraction": fraction,
            "uniform_union_rate": min(16.0 * args.epsilon, 1.0),
        }
        print(json.dumps(payload, indent=2))
        return 0
    target = args.target_points
    if target is None:
        target = 10000 if args.full_scale else 1000
    cfg = ExperimentConfig(
        params=params,
        seed=args.seed,
        epsilon=args.epsilon,
        magnify_exp=args.magnify_exp,
        target_points=target,
        scan_cap=args.scan_cap,
        method=args.method,
        control_points=args.control_points,
        control_seed=args.control_seed,
        census_steps=args.census_steps,
        n_bits=args.n_bits,
        grid=args.grid,
        output_dir=args.output_dir,
    )
    slab_exp = params.a if args.magnify_exp is None else args.magnify_exp
    print(f"scanning slab x < 2**-{slab_exp} for {target} points", file=sys.stderr)
    report = run_experiment(cfg)
    print(json.dumps(report.to_dict(), indent=2))
    if report.truncated:
        print(f"scan cap reached with {report.n_in_slab}/{target} points", file=sys.stderr)
    ratio = report.concentration_ratio
    if ratio is None or ratio < args.min_ratio:
        print(f"concentration ratio {ratio} below threshold {args.min_ratio}", file=sys.stderr)
        return 1
    print(f"concentration ratio {ratio:.2f} (threshold {args.min_ratio})", file=sys.stderr)
    return 0


def cmd_census(args) -> int:
    params = Params(args.a, args.b, args.c)
    state = seed_state(args.seed, params)
    census = case_census(state, args.steps, args.n_bits)
    payload = {
        "params": {"a": params.a, "b": params.b, "c": params.c},
        "seed": f"0x{args.seed:016x}",
        "n_steps": census.n_steps,
        "n_bits": census.n_bits,
        "grid": census.grid,
        "compound_frequency": census.compound_frequency,
        "uniform_model_estimate": census.uniform_model_estimate,
        "uniform_model_exact": str(compound_probability(census.n_bits)[0]),
        "carry_leak_frequency": census.carry_leak_frequency,
    }
    print(json.dumps(payload, indent=2))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": cmd_gen,
        "verify": cmd_verify,
        "planes": cmd_planes,
        "census": cmd_census,
    }
    try:
        return handlers[args.command](args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
