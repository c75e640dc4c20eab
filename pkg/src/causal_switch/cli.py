"""Command-line front end writing CSV artifacts.

    causal-switch sweep      --p-min 0.5 --p-max 1.0 --step 0.005 [--verify-optimizer]
    causal-switch herald     --p 0.5 --q 0.5 --trials 100000
    causal-switch filtration flips 0.5 0.5 --grid 32
    causal-switch choi       switch 0.5 0.5

Every command takes ``--out PATH`` (stdout when omitted). Summary lines are
written into the CSV as ``# key=value`` comments.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import channel, entropic, filtration, herald
from .switch import flip_switch, switched_choi

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_UNITARY_FOUND = 3
EXIT_INCONCLUSIVE = 4

SEED_ENV = "CAUSAL_SWITCH_SEED"
DEFAULT_SEED = 42


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    """12 significant digits, locale independent."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _write(path, header, rows, comments):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if not isinstance(v, str) else v for v in r])
    for c in comments:
        buf.write(f"# {c}\n")
    with _output(path) as fh:
        fh.write(buf.getvalue())


def _summary(path, lines):
    # echo conclusions to stderr when the CSV itself went to a file
    if path not in (None, "-"):
        for line in lines:
            print(f"# {line}", file=sys.stderr)


@dataclass(frozen=True)
class SweepRow:
    p: float
    q1_switch: float
    q_single: float
    advantage: bool


def sweep_rows(p_min: float, p_max: float, step: float) -> list:
    if not (0 <= p_min <= p_max <= 1):
        raise UsageError("need 0 <= p-min <= p-max <= 1")
    if step <= 0:
        raise UsageError("step must be positive")
    n = int(np.floor((p_max - p_min) / step + 1e-9))
    rows = []
    for k in range(n + 1):
        p = round(p_min + k * step, 12)
        q1 = entropic.switch_flip_coherent_info_closed(p)
        single = channel.dephasing_capacity(p)
        rows.append(SweepRow(p, q1, single, q1 > single))
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(args.p_min, args.p_max, args.step)
    header = ["p", "q1_switch", "q_single", "advantage"]
    table = [[r.p, r.q1_switch, r.q_single, r.advantage] for r in rows]
    comments = []
    if args.verify_optimizer:
        header.append("q1_numeric")
        settings = entropic.OptimizerSettings(starts=args.starts, seed=_seed(args.seed))
        dev = 0.0
        for r, line in zip(rows, table):
            num = entropic.maximize_coherent_information(flip_switch(r.p, r.p), settings).value
            line.append(num)
            dev = max(dev, abs(num - r.q1_switch))
        comments.append(f"max_abs_deviation={fmt(dev)}")
    cross = next((r.p for r in rows if r.advantage), None)
    comments.insert(0, f"crossover_p={fmt(cross) if cross is not None else 'none'}")
    _write(args.out, header, table, comments)
    _summary(args.out, comments)
    return EXIT_OK


def cmd_herald(args) -> int:
    for name in ("p", "q"):
        v = getattr(args, name)
        if not 0 <= v <= 1:
            raise UsageError(f"--{name} must lie in [0, 1]")
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    stats = herald.monte_carlo_herald(args.p, args.q, args.trials, _seed(args.seed))
    rows = [[s.label, s.trials, s.successes, s.success_frequency, s.mean_fidelity] for s in stats.per_input]
    comments = [
        f"success_frequency={fmt(stats.success_frequency)}",
        f"analytic={fmt(stats.analytic)}",
        f"std_error={fmt(stats.std_error)}",
        f"within_3sigma={fmt(stats.within_sigmas(3.0))}",
        f"mean_fidelity={fmt(stats.mean_fidelity)}",
        f"min_fidelity={fmt(stats.min_fidelity)}",
        f"max_fidelity_error={fmt(stats.max_fidelity_error)}",
        f"key_rate_factor={fmt(stats.key_rate_factor)}",
        f"seed={stats.seed}",
    ]
    _write(args.out, ["input", "trials", "successes", "success_frequency", "mean_fidelity"], rows, comments)
    _summary(args.out, comments)
    return EXIT_OK


def _parse_probs(values, kind):
    if len(values) != 2:
        raise UsageError(f"'{kind}' takes two probabilities P Q")
    try:
        p, q = (float(v) for v in values)
    except ValueError:
        raise UsageError(f"'{kind}' probabilities must be numbers")
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise UsageError("probabilities must lie in [0, 1]")
    return p, q


def cmd_filtration(args) -> int:
    kind, rest = args.ensemble[0], args.ensemble[1:]
    hyp = None
    if kind == "pauli-independent":
        if rest:
            raise UsageError("'pauli-independent' takes no arguments")
        e0 = e1 = filtration.pauli_ensemble()
    elif kind == "flips":
        e0, e1 = filtration.flip_ensembles(*_parse_probs(rest, kind))
    elif kind == "singleton":
        if rest:
            raise UsageError("'singleton' takes no arguments")
        e0 = e1 = [(np.eye(2), 1.0)]
    elif kind == "switch-correlated":
        p, q = _parse_probs(rest, kind)
        e0 = e1 = None
    else:
        raise UsageError(f"unknown ensemble spec {kind!r}")

    lines = [f"ensemble={' '.join(args.ensemble)}"]
    if e0 is not None:
        hyp = filtration.check_no_go_hypotheses(e0, e1)
        lines.append(f"hypotheses_met={fmt(hyp.met)}")
        lines.append(f"linear_independence_rank={hyp.rank}")
        if not hyp.met:
            lines.append("no-go hypotheses not met")
        search = filtration.search_postselection(e0, e1, grid=args.grid)
    else:
        lines.append("hypotheses_met=false")
        lines.append("no-go hypotheses not met (paths are correlated)")
        pairs = filtration.switch_pairs(p, q)
        search = filtration.search_postselection_pairs(pairs, grid=args.grid)
        demo = filtration.switch_correlated_demo(p, q)
        lines.append(f"switch_postselection_score={fmt(demo.score)}")
        lines.append(f"switch_postselection_acceptance={fmt(demo.acceptance)}")

    ta, pa, tb, pb = search.angles
    lines += [
        f"grid={search.grid}",
        f"grid_score={fmt(search.grid_score)}",
        f"best_score={fmt(search.best_score)}",
        f"theta_alpha={fmt(ta)}",
        f"phi_alpha={fmt(pa)}",
        f"theta_beta={fmt(tb)}",
        f"phi_beta={fmt(pb)}",
        f"acceptance={fmt(search.acceptance)}",
    ]
    if search.unitary_found():
        verdict, code = "unitary postselection found", EXIT_UNITARY_FOUND
    elif hyp is not None and hyp.met and search.certified():
        verdict, code = "certified non-unitary", EXIT_OK
    else:
        verdict, code = "inconclusive", EXIT_INCONCLUSIVE
    lines.append(f"verdict={verdict}")

    with _output(args.out) as fh:
        for line in lines:
            fh.write(f"# {line}\n")
    _summary(args.out, lines[-1:])
    return code


def _channel_from_spec(spec):
    kind, rest = spec[0], spec[1:]

    def one_prob():
        if len(rest) != 1:
            raise UsageError(f"'{kind}' takes one probability")
        try:
            v = float(rest[0])
        except ValueError:
            raise UsageError(f"'{kind}' probability must be a number")
        if not 0 <= v <= 1:
            raise UsageError("probability must lie in [0, 1]")
        return v

    if kind == "identity":
        if rest:
            raise UsageError("'identity' takes no arguments")
        return channel.identity_channel(2)
    if kind == "bit-flip":
        return channel.bit_flip(one_prob())
    if kind == "phase-flip":
        return channel.phase_flip(one_prob())
    if kind == "depolarizing":
        return channel.depolarizing(one_prob())
    if kind == "switch":
        return flip_switch(*_parse_probs(rest, kind))
    raise UsageError(f"unknown channel spec {kind!r}")


def cmd_choi(args) -> int:
    ch = _channel_from_spec(args.channel)
    c = switched_choi(ch) if not isinstance(ch, channel.KrausChannel) else channel.kraus_to_choi(ch)
    n = c.mat.shape[0]
    rows = [[i, j, c.mat[i, j].real, c.mat[i, j].imag] for i in range(n) for j in range(n)]
    comments = [f"d_in={c.d_in}", f"d_out={c.d_out}", f"trace={fmt(np.trace(c.mat).real)}"]
    _write(args.out, ["row", "col", "re", "im"], rows, comments)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causal-switch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="closed-form coherent information vs single-channel capacity")
    sp.add_argument("--p-min", type=float, default=0.5)
    sp.add_argument("--p-max", type=float, default=1.0)
    sp.add_argument("--step", type=float, default=0.005)
    sp.add_argument("--verify-optimizer", action="store_true")
    sp.add_argument("--starts", type=int, default=16)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sweep)

    hp = sub.add_parser("herald", help="Monte Carlo of heralded transmission over BB84 inputs")
    hp.add_argument("--p", type=float, default=0.5)
    hp.add_argument("--q", type=float, default=0.5)
    hp.add_argument("--trials", type=int, default=100000)
    hp.add_argument("--seed", type=int, default=None)
    hp.add_argument("--out", default=None)
    hp.set_defaults(func=cmd_herald)

    fp = sub.add_parser("filtration", help="search for a noiseless postselection")
    fp.add_argument(
        "ensemble", nargs="+", metavar="SPEC", help="pauli-independent | flips P Q | switch-correlated P Q | singleton"
    )
    fp.add_argument("--grid", type=int, default=32)
    fp.add_argument("--out", default=None)
    fp.set_defaults(func=cmd_filtration)

    cp = sub.add_parser("choi", help="dump a trace-one Choi matrix")
    cp.add_argument(
        "channel", nargs="+", metavar="SPEC", help="identity | bit-flip P | phase-flip Q | depolarizing P | switch P Q"
    )
    cp.add_argument("--out", default=None)
    cp.set_defaults(func=cmd_choi)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
