"""Command-line surface: run algorithms, Monte Carlo trials, sweeps, checks.

All randomness derives from the mandatory --seed; a repeated invocation
with the same flags produces byte-identical CSV output.  Exit codes:
0 success, 1 verification/crosscheck failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import crosscheck as crosscheck_mod
from . import fingerprint, qcompare, qmatch, resources
from .grover import durr_hoyer_min
from .sim import DENSE_WIDTH_CAP, Register, RegisterLayout, StructuredState, dump_state
from .strings_core import BitString, MatchInstance, compare_classical

MATCH_HEADER = "trial,seed,result_d,hash_verified,exact_verified,copies_used,qubits,gate_units,inner_iters"
COMPARE_HEADER = "trial,seed,verdict,expected,a0,phases,qubits,gate_units"
MINFIND_HEADER = "trial,found_index,phases,iterations"
PRIMES_HEADER = "r,p,epsilon,delta,max_len"
STRUCTURED_TEXT_CAP = 1 << 16


def _parse_bits(value: str, ascii_mode: bool) -> BitString:
    if value.startswith("@"):
        with open(value[1:], encoding="ascii") as fh:
            value = fh.read().strip()
    return BitString.from_ascii(value) if ascii_mode else BitString.from_text(value)


def _emit(lines: list[str], csv_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if csv_path:
        with open(csv_path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flag_echo(argv: list[str]) -> str:
    return "# qstrings " + " ".join(argv)


def _match_trial(args: tuple) -> str:
    text, pattern, epsilon, seed, trial, mode = args
    inst = MatchInstance(BitString.from_text(text), BitString.from_text(pattern))
    rng = np.random.default_rng((seed, trial))
    params = qmatch.match_params(inst, epsilon, rng)
    result = qmatch.match_search(inst, params, rng, mode=mode, seed=seed)
    ledger = result.ledger
    return ",".join(
        str(x)
        for x in (
            trial,
            seed,
            result.position if result.position is not None else "",
            int(result.hash_verified),
            int(result.exactly_verified),
            result.copies_used,
            ledger.qubits_total,
            ledger.gate_units_total,
            ledger.inner_grover_iterations,
        )
    )


def _compare_trial(args: tuple) -> str:
    u_text, v_text, algo, epsilon, seed, trial = args
    u = BitString.from_text(u_text)
    v = BitString.from_text(v_text)
    rng = np.random.default_rng((seed, trial))
    expected = compare_classical(u, v)
    if algo == "grover":
        result = qcompare.compare_grover(u, v, rng)
    else:
        params = qcompare.compare_params(u, v, epsilon, rng)
        result = qcompare.compare_bsearch(u, v, params, rng)
    ledger = result.ledger
    return ",".join(
        str(x)
        for x in (
            trial,
            seed,
            result.verdict,
            expected,
            result.first_difference if result.first_difference is not None else "",
            result.phases,
            ledger.qubits_total,
            ledger.gate_units_total,
        )
    )


def _pool_map(worker, jobs_list, jobs: int) -> list[str]:
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, jobs_list))
    return [worker(j) for j in jobs_list]


def _cmd_match(args, argv) -> int:
    inst_text = _parse_bits(args.text, args.ascii)
    inst_pattern = _parse_bits(args.pattern, args.ascii)
    inst = MatchInstance(inst_text, inst_pattern)
    if args.mode == "structured" and inst.n > STRUCTURED_TEXT_CAP:
        print(f"text length {inst.n} exceeds structured-mode cap {STRUCTURED_TEXT_CAP}", file=sys.stderr)
        return 2
    if args.mode == "dense":
        width = (
            max(1, resources.index_width(inst.num_windows))
            + resources.nominal_hash_width(inst.num_windows, inst.m, args.epsilon)
            + 1
        )
        if width > DENSE_WIDTH_CAP:
            print(
                f"dense mode would need {width} qubits, above the {DENSE_WIDTH_CAP}-qubit cap",
                file=sys.stderr,
            )
            return 2
        if args.dump_state:
            rng = np.random.default_rng((args.seed, 0))
            params = qmatch.match_params(inst, args.epsilon, rng)
            spec = qmatch.prepare_match_state(inst, params)
            dump_state(spec.make_copy("dense").state, args.dump_state)
    trials = [
        (str(inst_text), str(inst_pattern), args.epsilon, args.seed, t, args.mode)
        for t in range(args.trials)
    ]
    rows = _pool_map(_match_trial, trials, args.jobs)
    _emit([_flag_echo(argv), MATCH_HEADER, *rows], args.csv)
    any_verified = any(row.split(",")[4] == "1" for row in rows)
    return 0 if any_verified else 1


def _cmd_compare(args, argv) -> int:
    u = _parse_bits(args.u, args.ascii)
    v = _parse_bits(args.v, args.ascii)
    trials = [
        (str(u), str(v), args.algo, args.epsilon, args.seed, t) for t in range(args.trials)
    ]
    rows = _pool_map(_compare_trial, trials, args.jobs)
    _emit([_flag_echo(argv), COMPARE_HEADER, *rows], args.csv)
    return 0


def _cmd_min_find(args, argv) -> int:
    values = [int(x) for x in args.values.split(",") if x != ""]
    if not values:
        print("--values must list at least one integer", file=sys.stderr)
        return 2
    domain = len(values)
    width = max(1, resources.index_width(domain))
    layout = RegisterLayout([Register("idx", width, "index")])
    rows = []
    for trial in range(args.trials):
        rng = np.random.default_rng((args.seed, trial))
        found, phases, iterations = durr_hoyer_min(
            values, domain, rng, lambda _p, _r: StructuredState(layout, domain)
        )
        rows.append(f"{trial},{found},{phases},{iterations}")
    _emit([_flag_echo(argv), MINFIND_HEADER, *rows], args.csv)
    return 0


def _cmd_sweep(args, argv) -> int:
    grid = tuple(int(x) for x in args.grid.split(","))
    config = resources.SweepConfig(
        algo=args.algo.replace("-", "_"),
        grid=grid,
        m=args.m,
        epsilon=args.epsilon,
        trials=args.trials,
        seed=args.seed,
        backend=args.mode,
        jobs=args.jobs,
    )
    rows = resources.run_sweep(config)
    text = resources.sweep_csv(rows, comment="qstrings " + " ".join(argv))
    if args.csv:
        with open(args.csv, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_crosscheck(args, argv) -> int:
    report = crosscheck_mod.run_crosscheck(args.seed, max_width=args.max_width)
    print(_flag_echo(argv))
    print(report.render())
    return 0 if report.passed else 1


def _cmd_primes(args, argv) -> int:
    rng = np.random.default_rng(args.seed)
    params = fingerprint.choose_prime(rng, args.delta, args.max_len, args.epsilon)
    _emit(
        [
            _flag_echo(argv),
            PRIMES_HEADER,
            f"{params.r},{params.p},{params.epsilon},{params.delta},{params.max_len}",
        ],
        args.csv,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qstrings",
        description=(
            "Simulate hash-fingerprinted quantum string matching and comparison, "
            "with exact classical oracles and a qubit/gate-unit resource ledger."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default=1):
        p.add_argument("--seed", type=int, required=True, help="master seed; all randomness derives from it")
        p.add_argument("--epsilon", type=float, default=0.1, help="hash error budget in (0,1)")
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--csv", default=None, help="write output CSV here instead of stdout")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for independent trials/points")

    p = sub.add_parser("match", help="search for a pattern in a text")
    p.add_argument("--text", required=True, help="bit string, or @path to read a file")
    p.add_argument("--pattern", required=True)
    p.add_argument("--ascii", action="store_true", help="bit-expand ASCII input, MSB first")
    p.add_argument("--mode", choices=("dense", "structured"), default="structured")
    p.add_argument("--dump-state", default=None, help="dump the prepared dense state of trial 0")
    common(p)
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("compare", help="lexicographically compare two strings")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--ascii", action="store_true")
    p.add_argument("--algo", choices=("grover", "bsearch"), required=True)
    common(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("min-find", help="minimum finding over a value list")
    p.add_argument("--values", required=True, help="comma-separated integers")
    common(p, trials_default=100)
    p.set_defaults(func=_cmd_min_find)

    p = sub.add_parser("sweep", help="scaling regression over a parameter grid")
    p.add_argument("--algo", choices=("match", "compare-grover", "compare-bsearch"), required=True)
    p.add_argument("--grid", required=True, help="comma-separated n (match) or k values")
    p.add_argument("--m", type=int, default=8, help="pattern length for match sweeps")
    p.add_argument("--mode", choices=("dense", "structured"), default="structured")
    common(p, trials_default=20)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("crosscheck", help="dense/structured backend equivalence battery")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-width", type=int, default=24)
    p.set_defaults(func=_cmd_crosscheck)

    p = sub.add_parser("primes", help="print the sized prime universe and drawn modulus")
    p.add_argument("--delta", type=int, required=True, help="planned number of hash comparisons")
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=_cmd_primes)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args, argv)
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
