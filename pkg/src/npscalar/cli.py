"""Batch command-line front door.

Commands: run, attack-demo, count, bench, oracle. Every flag can also be
supplied through an environment variable with the NPSCALAR_ prefix
(NPSCALAR_SEED, NPSCALAR_POLICY, NPSCALAR_MODULUS, NPSCALAR_CONFIG,
NPSCALAR_TRANSCRIPT); explicit flags win over the environment, which wins
over the config file.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import analysis
from .config import RunConfig, parse_config, parse_modulus
from .errors import ScalarProtocolError
from .protocol import Policy, run_protocol
from .ring import Ring

ENV_PREFIX = "NPSCALAR_"


def _env(name: str):
    return os.environ.get(ENV_PREFIX + name.upper())


def _load_config(args) -> RunConfig:
    path = args.config or _env("config")
    if not path:
        raise ScalarProtocolError("a config file is required (--config PATH)")
    cfg = parse_config(Path(path).read_text())
    seed = args.seed if args.seed is not None else _env("seed")
    if seed is not None:
        cfg.seed = int(seed)
    policy = args.policy or _env("policy")
    if policy:
        cfg.policy = Policy(policy.lower())
    modulus = args.modulus or _env("modulus")
    if modulus:
        cfg.modulus = parse_modulus(modulus)
        cfg.parties = [(n, tuple(e % cfg.modulus for e in v)) for n, v in cfg.parties]
    transcript = getattr(args, "transcript", None) or _env("transcript")
    if transcript:
        cfg.emit_transcript = transcript
    if getattr(args, "verify", False):
        cfg.verify = True
    return cfg


def _emit(lines) -> None:
    for line in lines:
        print(line)


def _run_once(cfg: RunConfig):
    return run_protocol(
        cfg.vectors, modulus=cfg.modulus, seed=cfg.seed, policy=cfg.policy
    )


def cmd_run(args) -> int:
    cfg = _load_config(args)
    start = time.perf_counter()
    run = _run_once(cfg)
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    lines = [
        f"result: {run.result}",
        f"policy: {cfg.policy.value}",
        f"seed: {cfg.seed}",
        f"modulus: {cfg.modulus}",
        f"parties: {' '.join(cfg.names)}",
        f"instances: {run.instance_count}",
        f"messages: {run.message_count}",
    ]
    status = 0
    if cfg.verify:
        oracle = analysis.plaintext_oracle(cfg.vectors, Ring(cfg.modulus))
        match = oracle == run.result
        lines += [f"oracle: {oracle}", f"oracle-match: {str(match).lower()}"]
        status = 0 if match else 1
    lines.append(f"elapsed-ms: {elapsed_ms:.1f}")
    if cfg.emit_transcript:
        Path(cfg.emit_transcript).write_text(run.transcript.export_jsonl() + "\n")
        lines.append(f"transcript: {cfg.emit_transcript}")
    _emit(lines)
    return status


def cmd_attack_demo(args) -> int:
    cfg = _load_config(args)
    if len(cfg.parties) == 2:
        _emit(
            [
                "warning: no sub-protocols exist for 2 parties;",
                "the flawed and secure policies behave identically",
            ]
        )
        return 0
    lines = []
    name_of = {f"p{i + 1}": name for i, name in enumerate(cfg.names)}
    truth = {f"p{i + 1}": vec for i, vec in enumerate(cfg.vectors)}
    outcomes = {}
    for policy in (Policy.FLAWED, Policy.SECURE):
        run = run_protocol(
            cfg.vectors, modulus=cfg.modulus, seed=cfg.seed, policy=policy
        )
        view = run.view_of(run.ttp)
        recovered = analysis.reconstruct_inputs(view)
        lines.append(f"policy {policy.value}:")
        if recovered:
            for party in sorted(recovered, key=lambda p: p.sort_key):
                exact = recovered[party] == truth[str(party)]
                lines.append(
                    f"  recovered {name_of[str(party)]}: {list(recovered[party])}"
                    f" exact={str(exact).lower()}"
                )
        else:
            lines.append("  recovered: none")
        if policy is Policy.SECURE:
            guesses = analysis.forced_guess_inputs(view)
            mismatches = sum(
                1 for p, g in guesses.items() if g != truth[str(p)]
            )
            lines.append(
                f"  forced-guess mismatches: {mismatches}/{len(guesses)}"
            )
            outcomes["secure_empty"] = not recovered
            outcomes["guesses_wrong"] = mismatches == len(guesses) > 0
        else:
            outcomes["flawed_full"] = all(
                recovered.get(p) == truth[str(p)]
                for p in (analysis.PartyId.data(i + 1) for i in range(len(cfg.parties)))
            )
    dichotomy = all(outcomes.values())
    lines.append(f"dichotomy: {str(dichotomy).lower()}")
    _emit(lines)
    return 0 if dichotomy else 1


def cmd_count(args) -> int:
    lines = ["n direct-children total-instances messages"]
    for n in range(args.min, args.max + 1):
        c = analysis.count_instances(n)
        lines.append(
            f"{c.n} {c.direct_children} {c.total_instances} {c.messages}"
        )
    _emit(lines)
    return 0


def cmd_bench(args) -> int:
    modulus = parse_modulus(args.modulus) if args.modulus else None
    seed = args.seed if args.seed is not None else 0
    policy = Policy(args.policy.lower()) if args.policy else Policy.SECURE
    import random as _random

    lines = [
        "n direct total census-messages executed-instances executed-messages"
        " oracle-match ms"
    ]
    status = 0
    for n in range(args.min, args.max + 1):
        c = analysis.count_instances(n)
        row = f"{n} {c.direct_children} {c.total_instances} {c.messages}"
        if n <= args.execute_max:
            r = _random.Random(n * 1_000_003 + seed)
            vectors = [
                [r.randrange(2) for _ in range(args.length)] for _ in range(n)
            ]
            start = time.perf_counter()
            run = run_protocol(vectors, modulus=modulus, seed=seed, policy=policy)
            ms = (time.perf_counter() - start) * 1000.0
            oracle = analysis.plaintext_oracle(vectors, run.ring)
            match = oracle == run.result
            if not match:
                status = 1
            row += (
                f" {run.instance_count} {run.message_count}"
                f" {str(match).lower()} {ms:.1f}"
            )
        else:
            row += " - - - -"
        lines.append(row)
    _emit(lines)
    return status


def cmd_oracle(args) -> int:
    cfg = _load_config(args)
    value = analysis.plaintext_oracle(cfg.vectors, Ring(cfg.modulus))
    _emit([f"oracle: {value}", f"modulus: {cfg.modulus}"])
    return 0


def _add_common(parser, transcript=True, verify=False):
    parser.add_argument("--config", help="path to a YAML run config")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--policy", choices=["secure", "flawed"], default=None)
    parser.add_argument("--modulus", default=None, help='e.g. "2^64" or "251"')
    if transcript:
        parser.add_argument("--transcript", default=None, help="write a JSONL transcript")
    if verify:
        parser.add_argument(
            "--verify", action="store_true", help="check the result against the oracle"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npscalar",
        description="simulator and analysis harness for the masked n-party "
        "scalar product protocol",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one protocol run")
    _add_common(p, verify=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("attack-demo", help="semi-honest TTP attack, both policies")
    _add_common(p)
    p.set_defaults(func=cmd_attack_demo)

    p = sub.add_parser("count", help="instance census table")
    p.add_argument("--min", type=int, default=2)
    p.add_argument("--max", type=int, default=10)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("bench", help="census plus timed executions")
    p.add_argument("--min", type=int, default=2)
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--execute-max", type=int, default=6)
    p.add_argument("--length", type=int, default=4)
    _add_common(p, transcript=False)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="plaintext oracle value for a config")
    _add_common(p, transcript=False)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScalarProtocolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
