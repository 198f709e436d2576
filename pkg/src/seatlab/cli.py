"""Command-line front end.

Every command prints one JSON envelope (or CSV, where offered) to stdout::

    {"command": ..., "params": ..., "results": ..., "seed": ...}

Exit codes: 0 success, 2 a size bound was hit, 64 usage error.
``--workers`` never changes the output and is not echoed in ``params``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import backward, exact, forward, pd, rednow
from .core import Instance, InvalidInstance, SeatlabError, TooLarge
from .rng import SplitMix64
from .stats import Z, wilson_interval

EXIT_OK = 0
EXIT_TOO_LARGE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _num(x: float | None):
    """Round to 12 significant digits for stable output."""
    return None if x is None else float(f"{x:.12g}")


def _rat(p: Fraction) -> str:
    return exact.format_rational(p)


def _add_instance_args(p):
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int, help="passengers 1..k lost their passes")
    g.add_argument("--lost", type=_int_list, help="comma-separated lost passengers")


def _instance(args) -> Instance:
    if args.k is not None:
        if args.k < 0:
            raise UsageError("--k must be >= 0")
        return Instance(args.n, frozenset(range(1, args.k + 1)))
    return Instance(args.n, frozenset(args.lost))


def _instance_params(inst: Instance) -> dict:
    return {"n": inst.n, "lost": list(inst.lost_sorted)}


def _with_float(payload: dict, p: Fraction, enabled: bool) -> dict:
    if enabled:
        payload["float"] = _num(float(p))
    return payload


def cmd_exact(args) -> dict:
    inst = _instance(args)
    params = _instance_params(inst)
    if args.event is not None:
        params["event"] = args.event
        p = exact.event_prob(inst, args.event)
        results = _with_float({"passenger": args.event, "result": _rat(p)}, p, args.float)
        if inst.is_consecutive and 1 <= inst.k < args.event <= inst.n:
            results["closed_form"] = _rat(exact.closed_form(inst.n, inst.k, args.event))
    elif args.joint is not None:
        params["joint"] = sorted(set(args.joint))
        p = exact.joint_prob(inst, args.joint)
        prod = Fraction(1)
        for m in set(args.joint):
            prod *= exact.event_prob(inst, m)
        results = _with_float(
            {"passengers": params["joint"], "result": _rat(p), "product_of_marginals": _rat(prod)},
            p,
            args.float,
        )
    elif args.distribution:
        params["distribution"] = True
        dist = exact.enumerate_outcomes(inst)
        results = {
            "count": len(dist),
            "outcomes": [
                _with_float({"seat_of": list(o.seat_of), "probability": _rat(p)}, p, args.float)
                for o, p in dist.entries
            ],
        }
    else:
        params["verify_independence"] = True
        report = exact.verify_independence(inst)
        results = {
            "subsets_checked": report.subsets_checked,
            "independent": report.independent,
            "violations": [
                {"passengers": list(v.passengers), "joint": _rat(v.joint), "product": _rat(v.product)}
                for v in report.violations
            ],
        }
    return {"command": "exact", "params": params, "results": results}


def _freq_record(count: int, trials: int) -> dict:
    lo, hi = wilson_interval(count, trials, Z[0.999])
    return {"count": count, "frequency": _num(count / trials), "wilson_lo": _num(lo), "wilson_hi": _num(hi)}


def cmd_simulate(args) -> dict:
    inst = _instance(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    events = args.events
    if events is None:
        events = [inst.n] if inst.n not in inst.lost else []
    for m in events:
        if not 1 <= m <= inst.n or m in inst.lost:
            raise UsageError(f"event passenger {m} is lost or out of range")
    batch = forward.run_batch(inst, args.trials, args.seed, args.workers)
    params = {**_instance_params(inst), "trials": args.trials, "events": events}
    results = {
        "confidence": 0.999,
        "last_correct": _freq_record(batch.last_correct_count, args.trials),
        "events": [
            {"passenger": m, **_freq_record(int(batch.event_counts[m - 1]), args.trials)}
            for m in events
        ],
    }
    return {"command": "simulate", "params": params, "results": results, "seed": args.seed}


def _simulate_csv(env: dict) -> list[list]:
    trials = env["params"]["trials"]
    res = env["results"]
    rows = [["quantity", "passenger", "count", "trials", "frequency", "wilson_lo", "wilson_hi"]]
    last = res["last_correct"]
    rows.append(["last_correct", env["params"]["n"], last["count"], trials,
                 last["frequency"], last["wilson_lo"], last["wilson_hi"]])
    for e in res["events"]:
        rows.append(["occupied", e["passenger"], e["count"], trials,
                     e["frequency"], e["wilson_lo"], e["wilson_hi"]])
    return rows


def cmd_backward(args) -> dict:
    n, k = args.n, args.k
    params = {"n": n, "k": k}
    if args.records and k != 1:
        raise UsageError("--records needs --k 1")
    if args.check_forward:
        params["check_forward"] = True
        back = backward.backward_distribution(n, k)
        fwd = exact.enumerate_outcomes(Instance.consecutive(n, k))
        a, b = fwd.as_dict(), back.as_dict()
        worst = None
        for key in sorted(set(a) | set(b)):
            gap = abs(a.get(key, Fraction(0)) - b.get(key, Fraction(0)))
            if gap and (worst is None or gap > worst[0]):
                worst = (gap, key)
        deviation = None
        if worst is not None:
            key = worst[1]
            deviation = {
                "seat_of": list(key),
                "forward": _rat(a.get(key, Fraction(0))),
                "backward": _rat(b.get(key, Fraction(0))),
            }
        results = {"equal": worst is None, "outcomes": len(a), "max_deviation": deviation}
        return {"command": "backward", "params": params, "results": results}
    if args.sample:
        if args.seed is None:
            raise UsageError("--sample needs --seed")
        params["sample"] = True
        params["records"] = bool(args.records)
        rng = SplitMix64.for_trial(args.seed, 0)
        if args.records:
            colored = backward.sample_coloring_via_records(n, rng)
        else:
            colored = backward.sample_coloring(n, k, rng)
        outcome = backward.seat_from_coloring(colored)
        results = {"coloring": colored.to_json(), "seat_of": list(outcome.seat_of)}
        return {"command": "backward", "params": params, "results": results, "seed": args.seed}
    if args.records:
        params["records"] = True
        rec = backward.record_coloring_distribution(n)
        ind = backward.independent_coloring_distribution(n)
        results = {"equal": rec == ind, "colorings": len(ind)}
        return {"command": "backward", "params": params, "results": results}
    raise UsageError("one of --sample, --check-forward or --records is required")


def cmd_pd(args) -> dict:
    if args.trials < 2:
        raise UsageError("--trials must be >= 2")
    report = pd.convergence_report(args.n_list, args.k, args.trials, args.seed, args.workers)
    rows = []
    for row in report.rows:
        rec = row.as_record()
        for key in ("ks_distance", "mean_largest", "var_largest", "max_cross_corr"):
            rec[key] = _num(rec[key])
        rows.append(rec)
    params = {"n_list": args.n_list, "k": args.k, "trials": args.trials}
    results = {"oracle_mean_largest": _num(report.oracle_mean_largest), "rows": rows}
    return {"command": "pd", "params": params, "results": results, "seed": args.seed}


def _pd_csv(env: dict) -> list[list]:
    cols = list(pd.ConvergenceRow.COLUMNS)
    out = [cols]
    for rec in env["results"]["rows"]:
        out.append(["" if rec[c] is None else rec[c] for c in cols])
    return out


def cmd_rednow(args) -> dict:
    deck = rednow.Deck(args.reds, args.blacks)
    strategy = rednow.parse_strategy(args.strategy)
    params = {"reds": args.reds, "blacks": args.blacks, "strategy": args.strategy, "mode": args.mode}
    if args.exact:
        p = rednow.win_probability_exact(deck, strategy, args.mode)
        results = _with_float(
            {"result": _rat(p), "red_fraction": _rat(Fraction(deck.reds, deck.size))}, p, args.float
        )
        return {"command": "rednow", "params": params, "results": results}
    if args.trials is None or args.seed is None:
        raise UsageError("give --exact, or both --trials and --seed")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    params["trials"] = args.trials
    batch = rednow.win_frequency_mc(deck, strategy, args.trials, args.seed, args.mode, args.workers)
    freq = _freq_record(batch.wins, args.trials)
    results = {"wins": freq.pop("count"), **freq}
    return {"command": "rednow", "params": params, "results": results, "seed": args.seed}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seatlab", description="Lost boarding pass process toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact occupancy probabilities")
    _add_instance_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--event", type=int)
    g.add_argument("--joint", type=_int_list)
    g.add_argument("--distribution", action="store_true")
    g.add_argument("--verify-independence", action="store_true")
    p.add_argument("--float", action="store_true", help="add a decimal approximation")
    p.set_defaults(func=cmd_exact, fmt="json")

    p = sub.add_parser("simulate", help="Monte Carlo occupancy frequencies")
    _add_instance_args(p)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--events", type=_int_list)
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate, csv=_simulate_csv)

    p = sub.add_parser("backward", help="backward colouring construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--sample", action="store_true")
    g.add_argument("--check-forward", action="store_true")
    p.add_argument("--records", action="store_true", help="record-value colouring (k=1)")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_backward, fmt="json")

    p = sub.add_parser("pd", help="Poisson-Dirichlet convergence report")
    p.add_argument("--n-list", type=_int_list, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="csv")
    p.set_defaults(func=cmd_pd, csv=_pd_csv)

    p = sub.add_parser("rednow", help="Red Now game")
    p.add_argument("--reds", type=int, required=True)
    p.add_argument("--blacks", type=int, required=True)
    p.add_argument("--strategy", required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=rednow.MODES, default="next")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--float", action="store_true")
    p.set_defaults(func=cmd_rednow, fmt="json")
    return parser


def _emit(env: dict, args, out) -> None:
    if args.fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\r\n").writerows(args.csv(env))
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(env, indent=2) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "workers", 1) < 1:
        print("seatlab: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        env = args.func(args)
    except TooLarge as exc:
        err = {
            "command": args.command,
            "error": {"type": "TooLarge", "message": str(exc), "bound": exc.bound, "estimate": exc.estimate},
        }
        sys.stdout.write(json.dumps(err, indent=2) + "\n")
        return EXIT_TOO_LARGE
    except (UsageError, InvalidInstance, SeatlabError, ValueError) as exc:
        print(f"seatlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(env, args, sys.stdout)
    return EXIT_OK


def run() -> None:
    sys.exit(main())
