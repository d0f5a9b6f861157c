"""Command-line frontend.

Every check reads a net file in the package's text format and reports a
verdict as text or JSON (``--json``).  Exit codes: 0 the property holds,
1 it fails, 2 unknown (a cap truncated the search), 64 usage or parse
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import gadgets, soundness
from .explore import DEFAULT_NODE_CAP, ExploreCaps
from .nets import NetError, ValidationError
from .soundness import DEFAULT_K_MAX, SoundNums, Verdict
from .textfmt import ParseError, parse_net, serialize_net, serialize_workflow

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON document")
    common.add_argument(
        "--node-cap",
        type=int,
        default=DEFAULT_NODE_CAP,
        metavar="N",
        help="explicit exploration cap (markings)",
    )
    parser = _Parser(prog="wfsound", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the workflow conditions")
    p.add_argument("file")

    p = sub.add_parser("classical", parents=[common], help="classical soundness")
    p.add_argument("file")

    p = sub.add_parser("ksound", parents=[common], help="k-soundness")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("file")

    p = sub.add_parser("generalised", parents=[common], help="k-soundness for every k")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("--constant", type=int, default=1)
    p.add_argument("file")

    p = sub.add_parser("structural", parents=[common], help="k-soundness for some k")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("file")

    p = sub.add_parser("sound-numbers", parents=[common], help="the set of sound k")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    p.add_argument("file")

    p = sub.add_parser("oracle", parents=[common], help="brute-force k-soundness")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("file")

    p = sub.add_parser("gen", parents=[common], help="generate nets")
    p.add_argument(
        "kind", choices=["fig1", "pspace", "structural", "expspace", "random"]
    )
    p.add_argument("-o", "--output", required=True, metavar="FILE")
    p.add_argument("--which", choices=["left", "middle", "right"])
    p.add_argument("--net", metavar="FILE", help="input net for reductions")
    p.add_argument("--source", metavar="MARKING", help="e.g. 'p1:1,p2:2'")
    p.add_argument("--target", metavar="MARKING")
    p.add_argument("--cn", type=int, help="budget bound for the expspace assembly")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--places", type=int, default=4)
    p.add_argument("--transitions", type=int, default=4)
    p.add_argument("--max-weight", type=int, default=2)
    return parser


def _load_workflow(path: str):
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    parsed = parse_net(text)
    if parsed.initial is None or parsed.final is None:
        raise UsageError(f"{path}: missing an initial or final designation")
    return parsed.workflow()


def _parse_marking(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            name, _, count = item.partition(":")
            out[name.strip()] = int(count)
        else:
            out[item] = 1
    return out


def _document(verdict: Verdict, elapsed_ms: int) -> dict:
    doc = {
        "property": verdict.prop,
        "holds": verdict.holds_str,
        "parameters": verdict.params,
    }
    if verdict.certificate is not None:
        doc["certificate"] = verdict.certificate
    doc["complete"] = verdict.complete
    doc["stats"] = {
        "verticesExplored": verdict.stats.get("verticesExplored", 0),
        "timeMs": elapsed_ms,
    }
    return doc


def _emit(verdict: Verdict, label: str, as_json: bool, elapsed_ms: int) -> int:
    if as_json:
        print(json.dumps(_document(verdict, elapsed_ms), indent=2))
    else:
        print(f"{label}: {verdict.holds_str}")
        if verdict.certificate:
            cert = verdict.certificate
            if "reason" in cert:
                print(f"  reason: {cert['reason']}")
            if "run" in cert:
                print(f"  run: {' '.join(cert['run']) if cert['run'] else '(empty)'}")
            if "marking" in cert:
                print(f"  marking: {cert['marking']}")
            if "k" in cert:
                print(f"  at k = {cert['k']}")
        if not verdict.complete:
            print("  (search truncated: verdict covers only the checked range)")
    return {True: EXIT_HOLDS, False: EXIT_FAILS, None: EXIT_UNKNOWN}[verdict.holds]


def _run_check(args) -> int:
    t0 = time.monotonic()
    if args.command == "validate":
        with open(args.file, encoding="utf-8") as handle:
            parsed = parse_net(handle.read())
        if parsed.initial is None or parsed.final is None:
            raise UsageError(f"{args.file}: missing an initial or final designation")
        verdict = Verdict("validate", None, params={"file": args.file})
        try:
            parsed.workflow()
            verdict.holds = True
        except ValidationError as err:
            verdict.holds = False
            verdict.certificate = {"reason": str(err)}
        label = "valid workflow net"
    elif args.command == "classical":
        wf = _load_workflow(args.file)
        verdict = soundness.check_classical(wf, node_cap=args.node_cap)
        label = "classically sound"
    elif args.command == "ksound":
        wf = _load_workflow(args.file)
        verdict = soundness.check_k_sound(wf, args.k, node_cap=args.node_cap)
        label = f"{args.k}-sound"
    elif args.command == "generalised":
        wf = _load_workflow(args.file)
        verdict = soundness.check_generalised(
            wf, k_max=args.k_max, constant=args.constant, node_cap=args.node_cap
        )
        label = "generalised sound"
    elif args.command == "structural":
        wf = _load_workflow(args.file)
        verdict = soundness.check_structural(
            wf, k_max=args.k_max, node_cap=args.node_cap
        )
        label = "structurally sound"
    elif args.command == "sound-numbers":
        wf = _load_workflow(args.file)
        nums = soundness.compute_sound_numbers(
            wf, k_max=args.k_max, node_cap=args.node_cap
        )
        verdict = _sound_numbers_verdict(nums)
        label = "structurally sound"
    elif args.command == "oracle":
        wf = _load_workflow(args.file)
        caps = ExploreCaps(max_vertices=args.node_cap)
        verdict = soundness.oracle_k_sound(wf, args.k, caps)
        label = f"{args.k}-sound (oracle)"
    else:
        raise AssertionError(args.command)
    elapsed_ms = int((time.monotonic() - t0) * 1000)
    code = _emit(verdict, label, args.json, elapsed_ms)
    if args.command == "sound-numbers" and not args.json:
        nums_doc = verdict.params
        print(f"  p = {nums_doc['p']}, kLimit = {nums_doc['kLimit']}")
    return code


def _sound_numbers_verdict(nums: SoundNums) -> Verdict:
    verdict = Verdict(
        "sound-numbers",
        nums.p > 0,
        complete=nums.complete,
        params={
            "p": nums.p,
            "kLimit": nums.k_limit if nums.k_limit is not None else None,
            **nums.params,
        },
    )
    if nums.p == 0:
        verdict.certificate = {"reason": "no sound budget found"}
    return verdict


def _run_gen(args) -> int:
    if args.kind == "fig1":
        if not args.which:
            raise UsageError("gen fig1 requires --which {left,middle,right}")
        left, middle, right = gadgets.fig1_examples()
        wf = {"left": left, "middle": middle, "right": right}[args.which]
        text = serialize_workflow(wf, header={"generator": "fig1", "which": args.which})
    elif args.kind == "random":
        wf = gadgets.random_workflow(
            args.seed,
            places=args.places,
            transitions=args.transitions,
            max_weight=args.max_weight,
        )
        text = serialize_workflow(
            wf,
            header={
                "generator": "random",
                "seed": args.seed,
                "places": args.places,
                "transitions": args.transitions,
                "maxWeight": args.max_weight,
            },
        )
    elif args.kind == "structural":
        if not args.net:
            raise UsageError("gen structural requires --net FILE")
        wf = _load_workflow(args.net)
        out = gadgets.structural_hardness_transform(wf)
        text = serialize_workflow(out, header={"generator": "structural-hardness"})
    elif args.kind in ("pspace", "expspace"):
        if not (args.net and args.source and args.target):
            raise UsageError(f"gen {args.kind} requires --net, --source and --target")
        with open(args.net, encoding="utf-8") as handle:
            net = parse_net(handle.read()).net
        m = _parse_marking(args.source)
        m_prime = _parse_marking(args.target)
        try:
            if args.kind == "pspace":
                instance = gadgets.pspace_reduction(net, m, m_prime)
            else:
                cn = args.cn
                if cn is None:
                    cn = gadgets.suggest_cn(net, net.marking(m), net.marking(m_prime))
                    if cn is None:
                        raise UsageError(
                            "target unreachable; pass --cn explicitly"
                        )
                instance = gadgets.expspace_reduction(net, m, m_prime, cn)
        except NetError as err:
            raise UsageError(str(err))
        text = serialize_workflow(
            instance.wf,
            header={"generator": args.kind, **_jsonable(instance.params)},
        )
    else:
        raise AssertionError(args.kind)
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(text)
    print(f"wrote {args.output}")
    return EXIT_HOLDS


def _jsonable(params: dict) -> dict:
    return json.loads(json.dumps(params, default=str))


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "gen":
            return _run_gen(args)
        return _run_check(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError,) as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (NetError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main(argv=sys.argv[1:]))
