"""Command-line front end: ``qmincut solve | gen | bench``.

Exit codes: 0 on success, 1 when ``--verify`` finds a mismatch, 2 for bad
input (flags, graph file, disconnected graph, infeasible family
parameters), 3 when every run exceeded the contraction budget.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import GraphError, WeightedGraph
from .instances import (
    InfeasibleParameters,
    Instance,
    bipartite_lb_instance,
    bipartite_lb_params,
    bipartite_patterns,
    bits_with_weight,
    gen_random,
    gen_two_cluster,
    matrix_lb_instance,
    matrix_lb_params,
    quadruple_lb_instance,
    quadruple_lb_params,
    two_cluster_max_edges,
)
from .pipeline import DELTA, SPARSIFIER_EPS, BudgetExceeded, format_rational, majority_min_cut
from .query import MODELS
from .rng import derive_seed
from .solvers import stoer_wagner

log = logging.getLogger("qmincut")

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
FAMILIES = ("matrix-lb", "bipartite-lb", "quadruple-lb", "random", "two-cluster")


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return x


def _seed(text: str) -> int:
    try:
        s = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not 0 <= s < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _positive(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if k < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return k


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


# solve


def _load(path: str) -> WeightedGraph:
    try:
        with open(path) as fh:
            return WeightedGraph.loads(fh.read())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"invalid graph file {path}: {e}")


def cmd_solve(args) -> int:
    g = _load(args.input)
    if g.n < 2:
        raise UsageError("graph needs at least two vertices")
    if not g.is_connected():
        raise UsageError("graph is disconnected")
    best, values = majority_min_cut(g, args.model, args.seed, args.repeats, delta=args.delta, eps=args.eps)
    out = best.to_dict()
    if args.repeats > 1:
        out["votes"] = [None if v is None else format_rational(Fraction(v) / g.scale) for v in values]
    code = EXIT_OK
    if args.verify:
        ref, _ = stoer_wagner(g)
        out["verified"] = ref == best.value
        if ref != best.value:
            print(f"verify: pipeline gave {out['lambda']}, reference gives "
                  f"{format_rational(Fraction(ref) / g.scale)}", file=sys.stderr)
            code = EXIT_VERIFY
    _emit(json.dumps(out), args.out)
    return code


# gen


def _hamming(value: Optional[str], length: int, pivot: Fraction, named: dict[str, int]) -> int:
    """Resolve ``--hamming``: an integer, or a name relative to the family's critical value."""
    if value is None:
        h = math.floor(pivot)
    elif value in named:
        h = named[value]
    elif value == "below":
        h = math.ceil(pivot) - 1
    elif value == "above":
        h = math.floor(pivot) + 1
    else:
        try:
            h = int(value)
        except ValueError:
            raise UsageError(f"unknown --hamming value {value!r}")
    if not 0 <= h <= length:
        raise UsageError(f"--hamming {value} resolves to {h}, outside [0, {length}]")
    return h


def make_instance(args) -> Instance:
    fam, n, tau, seed = args.family, args.n, args.tau, args.seed
    if n is None:
        raise UsageError("--n is required")
    if fam == "random":
        m = args.m if args.m is not None else min(n * (n - 1) // 2, 2 * n)
        return Instance(gen_random(n, m, tau, seed), None)
    if fam == "two-cluster":
        m = args.m if args.m is not None else min(8 * n, two_cluster_max_edges(n))
        return Instance(gen_two_cluster(n, m, tau, seed), Fraction(1))
    if fam == "matrix-lb":
        k, length = matrix_lb_params(n, tau)
        h = _hamming(args.hamming, length, Fraction(k), {"k-1": k - 1, "k": k, "k+1": k + 1})
        return matrix_lb_instance(n, tau, bits_with_weight(length, h, seed))
    if fam == "quadruple-lb":
        count = quadruple_lb_params(n, tau)
        h = _hamming(args.hamming, count, Fraction(count, 2), {})
        return quadruple_lb_instance(n, tau, bits_with_weight(count, h, seed))
    left, _, _ = bipartite_lb_params(n)
    light = args.light if args.light is not None else 1
    if not 0 <= light <= left:
        raise UsageError(f"--light must lie in [0, {left}]")
    return bipartite_lb_instance(n, args.weight_eps, bipartite_patterns(n, light, seed))


def cmd_gen(args) -> int:
    inst = make_instance(args)
    text = inst.graph.dumps()
    lam = None if inst.lam is None else format_rational(inst.lam)
    if args.out:
        _emit(text, args.out)
        if lam is not None:
            print(json.dumps({"predicted_lambda": lam}))
    else:
        _emit(text, None)
        if lam is not None:
            print(f"predicted lambda: {lam}", file=sys.stderr)
    return EXIT_OK


# bench


BENCH_FIELDS = ("family", "model", "n", "m", "tau", "seed", "quantum_charge", "classical_queries", "correct")


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Least-squares slope of ``log y`` against ``log x``; ``None`` with fewer than two distinct x."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    if len(np.unique(xs)) < 2:
        return None
    return float(np.polyfit(xs, ys, 1)[0])


def bench_rows(family: str, ns, taus, seeds: int, models, m=None, repeats: int = 1, seed: int = 0, hamming=None):
    """One dict per (model, n, tau, seed) cell, in grid order."""
    rows = []
    for model in models:
        for n in ns:
            for tau in taus:
                for s in range(seeds):
                    cell_seed = derive_seed(seed, family, n, tau, s)
                    ns_args = argparse.Namespace(
                        family=family, n=n, tau=tau, seed=cell_seed, m=m, hamming=hamming, light=None,
                        weight_eps=Fraction(1, 2),
                    )
                    try:
                        inst = make_instance(ns_args)
                    except (InfeasibleParameters, UsageError) as e:
                        log.warning("skipping n=%d tau=%d: %s", n, tau, e)
                        break
                    g = inst.graph
                    ref, _ = stoer_wagner(g)
                    try:
                        res, _ = majority_min_cut(g, model, derive_seed(cell_seed, "solve"), repeats)
                        charge, classical, ok = res.ledger.quantum_charge, res.ledger.classical_queries, res.value == ref
                    except BudgetExceeded:
                        charge, classical, ok = "", "", False
                    rows.append(dict(
                        family=family, model=model, n=n, m=g.m, tau=tau, seed=s,
                        quantum_charge=charge, classical_queries=classical, correct=ok,
                    ))
    return rows


def bench_summary(rows) -> list[str]:
    """Fitted log-log slopes of mean charge versus n, tau and sqrt(m n tau), per model."""
    out = []
    for model in sorted({r["model"] for r in rows}):
        cells: dict[tuple[int, int], list] = {}
        for r in rows:
            if r["model"] == model and r["quantum_charge"] != "":
                cells.setdefault((r["n"], r["tau"]), []).append(r)
        if not cells:
            continue
        mean = {k: float(np.mean([r["quantum_charge"] for r in v])) for k, v in cells.items()}
        ns = sorted({k[0] for k in cells})
        taus = sorted({k[1] for k in cells})
        fits = {
            "n": loglog_slope(ns, [mean[(n, taus[0])] for n in ns]) if all((n, taus[0]) in mean for n in ns) else None,
            "tau": loglog_slope(taus, [mean[(ns[-1], t)] for t in taus]) if all((ns[-1], t) in mean for t in taus) else None,
        }
        flat = [r for v in cells.values() for r in v]
        fits["sqrt_mn_tau"] = loglog_slope(
            [math.sqrt(r["m"] * r["n"] * r["tau"]) for r in flat], [r["quantum_charge"] for r in flat]
        )
        correct = [r["correct"] for r in rows if r["model"] == model]
        for name, val in fits.items():
            if val is not None:
                out.append(f"# slope model={model} vs={name} value={val:.4f}")
        out.append(f"# correct model={model} fraction={sum(correct) / len(correct):.4f}")
    return out


def cmd_bench(args) -> int:
    rows = bench_rows(args.family, args.n, args.tau, args.seeds, args.models, args.m, args.repeats, args.seed,
                      args.hamming)
    dest = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(dest, BENCH_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        for line in bench_summary(rows):
            dest.write(line + "\n")
    finally:
        if args.out:
            dest.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qmincut", description="Minimum cuts with simulated quantum query accounting.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="compute a minimum cut of a graph file")
    s.add_argument("--input", required=True, metavar="PATH")
    s.add_argument("--model", choices=MODELS, default="matrix")
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--repeats", type=_positive, default=1, help="majority vote over this many runs")
    s.add_argument("--eps", type=_rational, default=SPARSIFIER_EPS, help="sparsifier accuracy")
    s.add_argument("--delta", type=_rational, default=DELTA, help="per-subroutine failure probability")
    s.add_argument("--verify", action="store_true", help="compare against Stoer-Wagner")
    s.add_argument("--out", metavar="PATH")
    s.set_defaults(func=cmd_solve)

    gp = sub.add_parser("gen", help="generate a graph from a family")
    gp.add_argument("--family", choices=FAMILIES, required=True)
    gp.add_argument("--n", type=int)
    gp.add_argument("--m", type=int, help="edge count (random, two-cluster)")
    gp.add_argument("--tau", type=int, default=1)
    gp.add_argument("--hamming", help="|x|: an integer, k-1, k, k+1, below or above")
    gp.add_argument("--light", type=int, help="number of light rows (bipartite-lb)")
    gp.add_argument("--eps", dest="weight_eps", type=_rational, default=Fraction(1, 2),
                    help="weight perturbation (bipartite-lb)")
    gp.add_argument("--seed", type=_seed, default=0)
    gp.add_argument("--out", metavar="PATH")
    gp.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="query-charge benchmark over an (n, tau, seed) grid")
    b.add_argument("--family", choices=FAMILIES, default="two-cluster")
    b.add_argument("--n", type=_int_list, default=[16, 32, 64])
    b.add_argument("--tau", type=_int_list, default=[1])
    b.add_argument("--m", type=int)
    b.add_argument("--hamming")
    b.add_argument("--seeds", type=_positive, default=3)
    b.add_argument("--models", type=lambda t: t.split(","), default=list(MODELS))
    b.add_argument("--repeats", type=_positive, default=1)
    b.add_argument("--seed", type=_seed, default=0)
    b.add_argument("--out", metavar="PATH")
    b.set_defaults(func=cmd_bench)
    return p


def _configure_logging() -> None:
    level = os.environ.get("QMINCUT_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "models", None):
        bad = [m for m in args.models if m not in MODELS]
        if bad:
            parser.error(f"unknown model(s): {', '.join(bad)}")
    try:
        return args.func(args)
    except (UsageError, GraphError) as e:
        print(f"qmincut: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"qmincut: error: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
