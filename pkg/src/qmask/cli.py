"""Command-line interface: ``qmask {validate,region,capacity,simulate,example}``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .channels import MeasurementChannel, RandomParameterChannel, parse_channel_spec, validate_channel
from .errors import QMaskError, SpecError
from .optimize import OptimizerOptions, optimize_rate, region_boundary
from .region import evaluate_strategy, strategy_to_json

CSV_HEADER = "budget_bits,R_bits,L_bits,n,seed"


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    """10 significant digits, locale independent."""
    return format(float(x), "#.10g")


def write_atomic(path: str, text: str):
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=".qmask-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_budgets(text: str) -> list:
    """``start:end:step`` (inclusive within half a step) or a comma list."""
    try:
        if ":" in text:
            start, end, step = (float(v) for v in text.split(":"))
            if step <= 0 or end < start:
                raise UsageError(f"bad budget range {text!r}: need step > 0 and end >= start")
            count = int(math.floor((end - start) / step + 0.5)) + 1
            return [round(start + i * step, 12) for i in range(count)]
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse budgets {text!r}") from None
    if not values:
        raise UsageError("empty budget list")
    return values


def default_threads() -> int:
    raw = os.environ.get("QMASK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _load_spec(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None
    return parse_channel_spec(text)


def _options(args) -> OptimizerOptions:
    opts = OptimizerOptions(restarts=args.restarts, iterations=args.iterations, seed=args.seed,
                            alphabet_size=args.alphabet_size, threads=args.threads,
                            search_csi_basis=args.search_csi_basis)
    try:
        opts.check()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return opts


# -- commands ----------------------------------------------------------------------

def cmd_validate(args) -> int:
    spec = _load_spec(args.spec)
    chan = spec.channel
    kind = {RandomParameterChannel: "random_parameter", MeasurementChannel: "measurement"}.get(
        type(chan), "kraus")
    print(f"type: {kind}")
    print(f"dims: E={getattr(chan, 'dim_e', '-')} A={chan.dim_a} B={chan.dim_b}")
    rep = validate_channel(chan)
    if spec.source is not None:
        print(f"source dims: E0={spec.source.dim_e0} E={spec.source.dim_e} C={spec.source.dim_c}")
        print(f"source norm residual: {fmt(spec.source.norm_residual())}")
        rep = type(rep)(rep.violations + validate_channel(spec.source).violations)
    chan_l, src_l = spec.lifted()
    if not isinstance(chan_l, MeasurementChannel):
        print(f"trace residual: {fmt(chan_l.trace_residual())}")
    print(f"trivial leakage threshold: {fmt(2 * math.log2(chan_l.dim_b))} bits")
    print(str(rep))
    return 0 if rep.ok else 1


def cmd_region(args) -> int:
    budgets = parse_budgets(args.budgets)
    if any(b < 0 for b in budgets):
        raise UsageError("budgets must be nonnegative")
    chan, src = _load_spec(args.channel).lifted()
    points = region_boundary(src, chan, sorted(budgets), _options(args))
    lines = [CSV_HEADER]
    for b, p in zip(sorted(budgets), points):
        lines.append(f"{fmt(b)},{fmt(p.R)},{fmt(p.L)},{p.n},{args.seed}")
    text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_capacity(args) -> int:
    if args.budget < 0:
        raise UsageError("budget must be nonnegative")
    chan, src = _load_spec(args.channel).lifted()
    point, strategy = optimize_rate(src, chan, args.budget, _options(args))
    print(f"R={fmt(point.R)} L={fmt(point.L)}")
    if args.strategy_out:
        write_atomic(args.strategy_out, strategy_to_json(strategy))
    return 0


def _simulation_setup(args):
    from .codesim import configs
    from .codesim.model import ClassicalStrategy

    if args.config == "modadd":
        W, q = configs.modadd_channel(), configs.modadd_state_pmf(args.p_s)
        strategy = configs.modadd_binning_strategy()
        encoder = configs.modadd_correction_encoder() if args.encoder == "correction" else "binning"
        return W, q, strategy, encoder
    if args.encoder == "correction":
        raise UsageError("--encoder correction is only defined for --config modadd")
    if args.config == "projection":
        return (configs.projection_channel_tensor(), configs.projection_state_pmf(args.epsilon),
                configs.projection_sim_strategy(args.alpha), "binning")
    # channel spec: measurement channel with a classical CSI copy source
    if not args.channel or not args.strategy:
        raise UsageError("--config spec needs --channel and --strategy")
    spec = _load_spec(args.channel)
    W, q = classical_tensor_from_spec(spec)
    try:
        doc = json.loads(Path(args.strategy).read_text(encoding="utf-8"))
        strategy = ClassicalStrategy(np.array(doc["cond_pmf"], dtype=float), np.array(doc["input_map"]))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise SpecError(f"cannot read strategy {args.strategy}: {exc}") from None
    return W, q, strategy, "binning"


def classical_tensor_from_spec(spec):
    """W[a, s, y] = Tr(Lambda_y (|s><s| (x) |a><a|)) for a measurement channel with classical CSI."""
    chan = spec.channel
    if isinstance(chan, RandomParameterChannel) or not isinstance(chan, MeasurementChannel):
        raise SpecError("simulation needs a measurement channel spec")
    src = spec.source
    if src is None or not (src.dim_e0 == src.dim_e == src.dim_c):
        raise SpecError("simulation needs a classical-copy source (E0 = E = C)")
    d = src.dim_e
    expected = np.zeros(d**3, dtype=complex)
    probs = np.abs(src.vector.reshape(d, d, d)[np.arange(d), np.arange(d), np.arange(d)]) ** 2
    expected[[s * d * d + s * d + s for s in range(d)]] = np.sqrt(probs)
    phase = np.vdot(expected, src.vector)
    if abs(abs(phase) - 1.0) > 1e-9:
        raise SpecError("source is not a classical copy sum_s sqrt(q(s)) |s,s,s>")
    ops = chan.povm.operators
    da = chan.dim_a
    W = np.empty((da, d, len(ops)))
    for a in range(da):
        for s in range(d):
            i = s * da + a
            W[a, s] = np.real(ops[:, i, i])
    return W, probs


def cmd_simulate(args) -> int:
    from .codesim.simulate import SimConfig, simulate

    W, q, strategy, encoder = _simulation_setup(args)
    try:
        config = SimConfig(args.n, args.rate, args.trials, args.seed, delta=args.delta,
                           Rtilde=args.rtilde, encoder=encoder)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = simulate(config, W, q, strategy, threads=args.threads)
    text = result.to_json()
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_example(args) -> int:
    from . import examples

    if args.name == "projection":
        if args.measured:
            chan, src = examples.projection_measurement_channel(args.epsilon)
        else:
            chan, src = _lift_projection(args.epsilon)
        point = evaluate_strategy(src, examples.projection_strategy(args.alpha), chan)
        print(f"R={fmt(point.R)} L={fmt(point.L)}")
        return 0
    chan, src = examples.depolarizing_lifted(args.epsilon)
    rpc = examples.build_depolarizing(args.epsilon)
    worst = 0.0
    for s in range(4):
        for b in range(2):
            ket = np.eye(2)[b]
            rho = examples.PAULIS[s] @ np.outer(ket, ket) @ examples.PAULIS[s]
            worst = max(worst, float(np.max(np.abs(rpc.apply_branch(s, rho) - np.outer(ket, ket)))))
    point = evaluate_strategy(src, examples.depolarizing_correction_strategy(), chan)
    print(f"correction residual: {fmt(worst)}")
    print(f"R={fmt(point.R)} L={fmt(point.L)} raw_rate={fmt(point.raw_rate)}")
    return 0


def _lift_projection(eps):
    from .channels import lift_random_parameter
    from .examples import build_projection

    return lift_random_parameter(build_projection(eps))


# -- parser ------------------------------------------------------------------------

def _add_optimizer_flags(p):
    p.add_argument("--channel", required=True, help="channel-spec JSON file")
    p.add_argument("--seed", type=int, required=True, help="random seed (integer >= 0)")
    p.add_argument("--restarts", type=int, default=8, help="random restarts per budget (default 8)")
    p.add_argument("--iterations", type=int, default=30, help="alternation sweeps per restart (default 30)")
    p.add_argument("--alphabet-size", type=int, default=None,
                   help="auxiliary alphabet size |X| (default (dim_A^2+1) dim_E0)")
    p.add_argument("--search-csi-basis", action="store_true",
                   help="also try random projective CSI measurement bases")
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker threads (default $QMASK_THREADS or 1); output does not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmask", description="Rate-leakage regions with state masking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel-spec JSON file")
    p.add_argument("spec", help="channel-spec JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("region", help="sweep leakage budgets and write the capacity-leakage curve")
    _add_optimizer_flags(p)
    p.add_argument("--budgets", required=True,
                   help="leakage budgets in bits per channel use: start:end:step (inclusive) or a comma list")
    p.add_argument("--out", help="output CSV file (default stdout)")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("capacity", help="best rate (bits per use) at one leakage budget")
    _add_optimizer_flags(p)
    p.add_argument("--budget", type=float, required=True, help="leakage budget in bits per channel use")
    p.add_argument("--strategy-out", help="write the optimal strategy JSON here")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("simulate", help="Monte Carlo run of the binning scheme on a classical channel analog")
    p.add_argument("--config", choices=("modadd", "projection", "spec"), default="modadd",
                   help="built-in channel analog, or 'spec' with --channel/--strategy")
    p.add_argument("--channel", help="measurement channel spec with a classical-copy source (config spec)")
    p.add_argument("--strategy", help="JSON with cond_pmf and input_map (config spec)")
    p.add_argument("--encoder", choices=("binning", "correction"), default="binning",
                   help="binning scheme or the letterwise correction encoder (modadd only)")
    p.add_argument("--p-s", type=float, default=0.25, help="state flip probability for modadd")
    p.add_argument("--epsilon", type=float, default=0.5, help="projection probability for projection")
    p.add_argument("--alpha", type=float, default=0.5, help="strategy parameter in [0, 1/2] for projection")
    p.add_argument("--n", type=int, required=True, help="block length (<= 10 letters)")
    p.add_argument("--rate", type=float, required=True, help="message rate R in bits per channel use")
    p.add_argument("--rtilde", type=float, default=None,
                   help="codebook rate in bits per use (default R + I(X;S) + 0.1)")
    p.add_argument("--delta", type=float, default=0.25, help="typicality slack (frequency units)")
    p.add_argument("--trials", type=int, required=True, help="number of Monte Carlo trials")
    p.add_argument("--seed", type=int, required=True, help="random seed (integer in [0, 2^64))")
    p.add_argument("--threads", type=int, default=default_threads(),
                   help="worker threads (default $QMASK_THREADS or 1); output does not depend on it")
    p.add_argument("--out", help="output JSON file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", help="reproduce a built-in example")
    p.add_argument("name", choices=("projection", "depolarizing"))
    p.add_argument("--epsilon", type=float, default=0.5, help="channel parameter eps in (0, 1]")
    p.add_argument("--alpha", type=float, default=0.5, help="projection strategy parameter in [0, 1/2]")
    p.add_argument("--measured", action="store_true",
                   help="use the measured (classical output) version of the projection channel")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        print("qmask: error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qmask: error: {exc}", file=sys.stderr)
        return 2
    except QMaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # parameter values outside their documented ranges
        print(f"qmask: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
