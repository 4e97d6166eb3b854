"""Command-line entry point.

Subcommands: list-states, describe-tritter, discriminate, teleport, mdiqkd,
keyrate.  Outputs are byte-identical across repeated runs with the same
configuration.  Exit codes: 0 success, 2 configuration error, 3 internal
assertion (e.g. a non-disjoint generated click table).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import keyrate as kr
from .discrimination import derive_rng, mc_trial
from .discrimination import ParityModel, analytic_outcome_probabilities
from .errors import AmbiguousPattern
from .fock import state_to_json
from .optics import decompose_dft
from .protocols import NoiseConfig, TeleportTarget, mdi_qkd_run, teleport
from .states import build_phi, build_psi

DEFAULT_SEED = 42


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _parse_d_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _named_state(name: str, d: int):
    name = name.lower()
    if name.startswith("psi"):
        if d != 3:
            raise ValueError("psi states are defined for d=3")
        return build_psi(int(name[3:]))
    if name.startswith("phi"):
        return build_phi(int(name[3:]), d)
    raise ValueError(f"unknown state name {name!r} (use psi0..psi8 or phi0..phi{d - 1})")


# -- subcommand handlers -------------------------------------------------------


def _cmd_list_states(args) -> int:
    d = args.d
    named: list[tuple[str, object]] = []
    if d == 3:
        named.extend((f"psi{i}", build_psi(i)) for i in range(9))
    named.extend((f"phi{i}", build_phi(i, d)) for i in range(d))
    lines = [f"{name} = {state}" for name, state in named]
    _write_text(None, "\n".join(lines) + "\n")
    if args.dump_state:
        payload = {name: state_to_json(state) for name, state in named}
        _write_text(args.dump_state, _json_dumps(payload))
    return 0


def _cmd_describe_tritter(args) -> int:
    network = decompose_dft(args.d)
    _write_text(args.out, _json_dumps(network.to_json()))
    return 0


def _cmd_discriminate(args) -> int:
    state = _named_state(args.state, args.d)
    model = ParityModel(args.eta)
    counts: dict[str, int] = {}
    for trial in range(args.trials):
        outcome = mc_trial(state, model, args.d, derive_rng(args.seed, trial))
        key = str(outcome)
        counts[key] = counts.get(key, 0) + 1
    analytic = analytic_outcome_probabilities(state, args.d, args.eta)
    report = {
        "state": args.state,
        "d": args.d,
        "eta": args.eta,
        "seed": args.seed,
        "trials": args.trials,
        "counts": counts,
        "empirical": {k: v / args.trials for k, v in counts.items()},
        "analytic": analytic,
    }
    _write_text(args.out, _json_dumps(report))
    return 0


def _cmd_teleport(args) -> int:
    counts: dict[str, int] = {}
    fidelity_sum = 0.0
    n_conclusive = 0
    for trial in range(args.trials):
        rng = derive_rng(args.seed, trial)
        target = TeleportTarget.haar_random(rng)
        result = teleport(target, rng)
        key = str(result.outcome)
        counts[key] = counts.get(key, 0) + 1
        if result.outcome.is_conclusive:
            n_conclusive += 1
            fidelity_sum += result.fidelity
    report = {
        "trials": args.trials,
        "seed": args.seed,
        "counts": counts,
        "conclusive_fraction": n_conclusive / args.trials,
        "mean_conclusive_fidelity": (fidelity_sum / n_conclusive) if n_conclusive else None,
    }
    _write_text(args.out, _json_dumps(report))
    return 0


def _cmd_mdiqkd(args) -> int:
    result = mdi_qkd_run(args.trials, eta=args.eta, noise=NoiseConfig(args.noise), seed=args.seed)
    header = "trial,alice_basis,alice_value,bob_basis,bob_value,outcome,sifted,alice_symbol,bob_symbol"
    lines = [header]
    for rec in result.records:
        a_sym = "" if rec.alice_symbol is None else str(rec.alice_symbol)
        b_sym = "" if rec.bob_symbol is None else str(rec.bob_symbol)
        lines.append(
            f"{rec.trial},{rec.alice_basis},{rec.alice_value},{rec.bob_basis},"
            f"{rec.bob_value},{rec.outcome},{int(rec.sifted)},{a_sym},{b_sym}"
        )
    _write_text(args.out, "\n".join(lines) + "\n")
    summary = {
        "trials": args.trials,
        "eta": args.eta,
        "noise": args.noise,
        "seed": args.seed,
        "sift_rate": result.sift_rate,
        "qber": result.qber,
    }
    if args.out is not None:
        _write_text(None, _json_dumps(summary))
    return 0


def _cmd_keyrate(args) -> int:
    if args.mode == "thresholds":
        lines = ["d,eta_threshold"]
        for d in range(2, args.d_max + 1):
            lines.append(f"{d},{kr.eta_threshold(d)!r}")
        _write_text(args.out, "\n".join(lines) + "\n")
        return 0
    d_values = _parse_d_list(args.d)
    n_steps = int(round(args.q_max / args.q_step))
    q_values = [i * args.q_step for i in range(n_steps + 1)]
    rows = kr.keyrate_table(d_values, q_values, eta=args.eta)
    header = "d,Q,r_sifted,R_total" + ("" if args.eta is None else ",eta")
    lines = [header]
    for row in rows:
        line = f"{row.d},{row.q!r},{row.r_sifted!r},{row.r_total!r}"
        if args.eta is not None:
            line += f",{row.eta!r}"
        lines.append(line)
    _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esdsim",
        description="Entangled-state discrimination, teleportation, and MDI-QKD simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = {"formatter_class": argparse.ArgumentDefaultsHelpFormatter}

    p = sub.add_parser("list-states", help="print state-family basis expansions", **fmt)
    p.add_argument("--d", type=int, default=3, help="dimension")
    p.add_argument("--dump-state", metavar="PATH", help="also write the states as JSON")
    p.set_defaults(func=_cmd_list_states)

    p = sub.add_parser("describe-tritter", help="element decomposition of the d-port DFT", **fmt)
    p.add_argument("--d", type=int, default=3, help="dimension")
    p.add_argument("--out", metavar="PATH", help="write JSON here instead of stdout")
    p.set_defaults(func=_cmd_describe_tritter)

    p = sub.add_parser("discriminate", help="sample the discrimination measurement", **fmt)
    p.add_argument("--d", type=int, default=3, help="dimension")
    p.add_argument("--state", default="psi0", help="psi0..psi8 (d=3) or phi0..phi{d-1}")
    p.add_argument("--trials", type=int, default=1000, help="number of sampled trials")
    p.add_argument("--eta", type=float, default=1.0, help="parity-device success probability")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base RNG seed")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.set_defaults(func=_cmd_discriminate)

    p = sub.add_parser("teleport", help="teleport Haar-random targets", **fmt)
    p.add_argument("--trials", type=int, default=1000, help="number of sampled trials")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base RNG seed")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.set_defaults(func=_cmd_teleport)

    p = sub.add_parser("mdiqkd", help="simulate the key-distribution protocol", **fmt)
    p.add_argument("--trials", type=int, default=1000, help="number of sampled trials")
    p.add_argument("--eta", type=float, default=1.0, help="parity-device success probability")
    p.add_argument("--noise", type=float, default=0.0, help="phase-flip probability per port")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="base RNG seed")
    p.add_argument("--out", metavar="PATH", help="write the per-trial CSV here")
    p.set_defaults(func=_cmd_mdiqkd)

    p = sub.add_parser("keyrate", help="rate tables and efficiency thresholds", **fmt)
    p.add_argument("mode", nargs="?", default="table", choices=("table", "thresholds"))
    p.add_argument("--d", default="2,3,4,5", help="comma-separated dimensions")
    p.add_argument("--q-max", type=float, default=0.12, help="largest error rate in the grid")
    p.add_argument("--q-step", type=float, default=0.002, help="error-rate grid step")
    p.add_argument("--eta", type=float, default=None, help="apply the eta^d factor to R")
    p.add_argument("--d-max", type=int, default=10, help="for thresholds mode")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    p.set_defaults(func=_cmd_keyrate)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(args)
        return args.func(args)
    except AmbiguousPattern as exc:
        print(f"internal assertion failed: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _validate(args) -> None:
    if getattr(args, "trials", 1) < 1:
        raise ValueError("--trials must be >= 1")
    eta = getattr(args, "eta", None)
    if eta is not None and not 0.0 <= eta <= 1.0:
        raise ValueError("--eta must lie in [0, 1]")
    noise = getattr(args, "noise", None)
    if noise is not None and not 0.0 <= noise <= 1.0:
        raise ValueError("--noise must lie in [0, 1]")
    d = getattr(args, "d", None)
    if isinstance(d, int) and d < 2:
        raise ValueError("--d must be >= 2")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
