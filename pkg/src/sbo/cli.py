"""Command-line front end: evaluate, optimize, generate, verify-reduction.

Instances and bid vectors travel as JSON documents with a top-level
``schemaVersion``.  Exit codes: 0 success, 2 validation error, 3 size/cap
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from sbo import optimize
from sbo.core import Instance, Keyword, canonical_order, canonicalize
from sbo.errors import SboError, SizeError, ValidationError
from sbo.dist import DiscretePMF, Fixed, Independent, Proportional, Scenario
from sbo.evaluate import (
    eval_auto,
    eval_fixed,
    eval_independent_exact,
    eval_independent_ptas,
    eval_monte_carlo,
    eval_proportional,
    eval_scenario,
)
from sbo.generate import (
    GenConfig,
    gen_clique_reduction,
    gen_gap_example,
    gen_nonprefix_example,
    gen_random,
    parse_graph,
)

SCHEMA_VERSION = 1
DEFAULT_EPSILON = 0.05
DEFAULT_SAMPLES = 10**5

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SIZE = 3
EXIT_IO = 4

MODEL_TAGS = {"fixed": Fixed, "proportional": Proportional, "independent": Independent,
              "scenario": Scenario}


def instance_to_document(instance: Instance) -> dict:
    doc = {
        "schemaVersion": SCHEMA_VERSION,
        "budget": instance.budget,
        "keywords": [
            {"id": k.id, "cpc": k.cpc, **({"weight": k.weight} if k.weight != 1.0 else {})}
            for k in instance.keywords
        ],
    }
    model = instance.model
    if isinstance(model, Fixed):
        doc["model"] = "fixed"
        doc["clicks"] = list(model.clicks)
    elif isinstance(model, Proportional):
        doc["model"] = "proportional"
        doc["q"] = list(model.q)
        doc["totalClicksPmf"] = [
            {"value": v, "prob": p} for v, p in model.total_clicks.points
        ]
    elif isinstance(model, Independent):
        doc["model"] = "independent"
        doc["pmfs"] = [
            [{"value": v, "prob": p} for v, p in pmf.points] for pmf in model.pmfs
        ]
    elif isinstance(model, Scenario):
        doc["model"] = "scenario"
        doc["scenarios"] = [
            {"prob": p, "clicks": list(clicks)} for p, clicks in model.scenarios
        ]
    else:
        raise ValidationError(f"unknown model {type(model).__name__}")
    return doc


def instance_from_document(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise ValidationError("instance document must be a JSON object")
    if doc.get("schemaVersion") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schemaVersion {doc.get('schemaVersion')!r}")
    tag = doc.get("model")
    if tag not in MODEL_TAGS:
        raise ValidationError(f"unknown model tag {tag!r}; expected one of {sorted(MODEL_TAGS)}")
    try:
        keywords = tuple(
            Keyword(id=str(k["id"]), cpc=float(k["cpc"]), weight=float(k.get("weight", 1.0)))
            for k in doc["keywords"]
        )
        if tag == "fixed":
            model = Fixed(tuple(float(c) for c in doc["clicks"]))
        elif tag == "proportional":
            pmf = DiscretePMF(tuple((p["value"], p["prob"]) for p in doc["totalClicksPmf"]))
            model = Proportional(tuple(float(x) for x in doc["q"]), pmf)
        elif tag == "independent":
            model = Independent(
                tuple(
                    DiscretePMF(tuple((p["value"], p["prob"]) for p in pmf))
                    for pmf in doc["pmfs"]
                )
            )
        else:
            model = Scenario(
                tuple(
                    (float(s["prob"]), tuple(float(c) for c in s["clicks"]))
                    for s in doc["scenarios"]
                )
            )
        return Instance(keywords=keywords, budget=float(doc["budget"]), model=model)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed instance document: {exc}") from None


def bids_from_document(doc: dict, instance: Instance) -> tuple[float, ...]:
    if not isinstance(doc, dict) or doc.get("schemaVersion") != SCHEMA_VERSION:
        raise ValidationError("bids document must be a JSON object with schemaVersion 1")
    bids = doc.get("bids")
    if not isinstance(bids, list):
        raise ValidationError("bids document needs a 'bids' array")
    from sbo.core import check_bids

    return check_bids(bids, instance.n)


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _write_text(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _load_instance(path: str) -> Instance:
    return instance_from_document(json.loads(_read_text(path)))


def _report_dict(report) -> dict:
    return {
        "value": report.value,
        "lower": report.lower,
        "upper": report.upper,
        "method": report.method,
        "epsilon": report.epsilon,
    }


def cmd_evaluate(args) -> int:
    instance = _load_instance(args.instance)
    bids_doc = json.loads(_read_text(args.bids))
    bids = bids_from_document(bids_doc, instance)
    # evaluate in canonical order; bids follow the document's keyword order
    order = canonical_order(instance)
    instance = canonicalize(instance)
    bids = tuple(bids[i] for i in order)

    model = instance.model
    method = args.method
    if method == "auto":
        report = eval_auto(bids, instance, args.epsilon)
    elif method == "mc":
        report = eval_monte_carlo(bids, instance, args.samples, args.seed)
    elif method == "ptas":
        if not isinstance(model, Independent):
            raise ValidationError(
                "method 'ptas' is only valid for the independent model; "
                "valid methods here: exact, mc, auto"
            )
        report = eval_independent_ptas(bids, instance, args.epsilon)
    elif method == "exact":
        if isinstance(model, Fixed):
            report = eval_fixed(bids, instance)
        elif isinstance(model, Scenario):
            report = eval_scenario(bids, instance)
        elif isinstance(model, Proportional):
            report = eval_proportional(bids, instance)
        else:
            report = eval_independent_exact(bids, instance)
    else:
        raise ValidationError(f"unknown method {method!r}")

    out = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "evaluate",
        "method": args.method,
        "epsilon": args.epsilon,
        "samples": args.samples,
        "seed": args.seed,
        "report": _report_dict(report),
    }
    print(dumps_document(out), end="")
    return EXIT_OK


def cmd_optimize(args) -> int:
    instance = canonicalize(_load_instance(args.instance))
    model = instance.model
    method = args.method
    if method == "auto":
        result = optimize.opt_auto(instance, args.epsilon)
    elif method == "prefix":
        result = optimize.opt_prefix_search(instance, args.epsilon)
    elif method == "exact":
        if isinstance(model, Fixed):
            result = optimize.opt_fixed_fractional(instance)
        elif isinstance(model, Proportional):
            result = optimize.opt_proportional_exact(instance)
        else:
            raise ValidationError(
                "method 'exact' is only valid for fixed and proportional models"
            )
    elif method == "bruteforce":
        if isinstance(model, Scenario):
            result = optimize.opt_scenario_bruteforce(instance)
        elif isinstance(model, Fixed):
            result = optimize.opt_fixed_integer(instance)
        else:
            raise ValidationError(
                "method 'bruteforce' is only valid for scenario and fixed models"
            )
    elif method == "ptas":
        if isinstance(model, Proportional):
            result = optimize.opt_proportional_ptas(instance, args.epsilon)
        elif isinstance(model, Independent):
            result = optimize.opt_independent_prefix(instance, args.epsilon)
        else:
            raise ValidationError(
                "method 'ptas' is only valid for proportional and independent models"
            )
    else:
        raise ValidationError(f"unknown method {method!r}")

    out = {
        "schemaVersion": SCHEMA_VERSION,
        "command": "optimize",
        "method": args.method,
        "epsilon": args.epsilon,
        "bruteforceCap": optimize.bruteforce_cap(),
        "bids": list(result.bids),
        "guarantee": result.guarantee,
        "optimizer": result.method,
        "report": _report_dict(result.value),
    }
    print(dumps_document(out), end="")
    return EXIT_OK


def cmd_generate(args) -> int:
    sidecar = None
    if args.kind == "nonprefix":
        instance = gen_nonprefix_example()
    elif args.kind == "gap":
        if args.n is None or args.c is None or args.budget is None:
            raise ValidationError("kind 'gap' needs --n, --c and --budget")
        instance = gen_gap_example(args.n, args.c, args.budget)
    elif args.kind == "clique":
        if args.graph is None or args.k is None:
            raise ValidationError("kind 'clique' needs --graph and --k")
        graph = parse_graph(_read_text(args.graph))
        instance, target, params = gen_clique_reduction(graph, args.k)
        sidecar = {
            "schemaVersion": SCHEMA_VERSION,
            "targetValue": target,
            "params": dataclasses.asdict(params),
        }
    elif args.kind == "random":
        if args.model is None or args.n is None:
            raise ValidationError("kind 'random' needs --model and --n")
        instance = gen_random(args.model, args.n, args.seed, GenConfig())
    else:
        raise ValidationError(f"unknown kind {args.kind!r}")

    _write_text(args.out, dumps_document(instance_to_document(instance)))
    if sidecar is not None:
        path = args.out + ".params.json" if args.out != "-" else "-"
        _write_text(path, dumps_document(sidecar))
    return EXIT_OK


def cmd_verify_reduction(args) -> int:
    graph = parse_graph(_read_text(args.graph))
    if graph.node_count + graph.edge_count > optimize.bruteforce_cap():
        raise SizeError(
            f"{graph.node_count + graph.edge_count} keywords exceed the "
            f"exhaustive-search cap {optimize.bruteforce_cap()}"
        )
    instance, target, params = gen_clique_reduction(graph, args.k)
    result = optimize.opt_scenario_bruteforce(instance)
    verdict = "CLIQUE-YES" if result.value.value >= target * (1 - 1e-12) else "CLIQUE-NO"
    print(verdict)
    print(f"optimum={result.value.value!r} target={target!r} k={args.k}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbo", description="Stochastic budget optimization toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="evaluate a bid vector on an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--bids", required=True)
    p.add_argument("--method", default="auto", choices=["auto", "exact", "ptas", "mc"])
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("optimize", help="find good bids for an instance")
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--method", default="auto", choices=["auto", "prefix", "exact", "bruteforce", "ptas"]
    )
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("generate", help="write an instance file")
    p.add_argument("--kind", required=True, choices=["nonprefix", "gap", "clique", "random"])
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--budget", type=float)
    p.add_argument("--graph")
    p.add_argument("--k", type=int)
    p.add_argument("--model", choices=sorted(MODEL_TAGS))
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify-reduction", help="exhaustively check a clique reduction")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_verify_reduction)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except SboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
