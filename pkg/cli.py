#!/usr/bin/env python3
"""
Command line interface for orders of split semisimple groups over finite fields.

Usage:
    python cli.py order --group A1 --q 9
    python cli.py reduce --pair "B3*B3|D4*G2"
    python cli.py verify prop31 --rank-max 4 --q-max 25 --json
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Tuple

# Add the repository root to path so both src and config resolve as packages
sys.path.insert(0, str(Path(__file__).parent))

from src.coincidence import (
    SearchBudgetError,
    evaluate_word,
    generator,
    generator_catalog,
    parse_pair,
    reduce_to_word,
    search_coincidences,
    search_two_factor_pairs,
    serialize_word,
    verify_generator_independence,
    verify_generators,
    verify_two_factor_classification,
)
from src.config import get_config
from src.cyclotomic import (
    verify_contribution_bound,
    verify_cyclotomic_identity,
    verify_inequality_monotonicity,
    verify_primitive_divisors,
    verify_valuation_rules,
)
from src.factorization import FactorizationBudgetError, factor_group_order
from src.geometry import catalog_document, verify_maximal_exponent_pairs, verify_triples
from src.lie_core import (
    PrimePowerField,
    group_order,
    order_polynomial,
    parse_group,
    prime_powers,
    verify_artin_tits,
)
from src.models import CommandResult, VerificationReport
from src.recovery import (
    build_order_atlas,
    recover_candidates,
    recover_from_atlas,
    search_cross_characteristic,
    verify_counterexample_classification,
)
from src.utils import atlas_from_file, atlas_to_file, load_atlas, save_atlas, save_catalog
from config.config import (
    DEFAULT_MAX_DEGREE,
    DEFAULT_MAX_RANK,
    DEFAULT_N_MAX,
    DEFAULT_Q_MAX,
    LOG_FORMAT,
    LOG_LEVEL,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

# Each handler returns (json results, text lines, success flag)
Outcome = Tuple[List[Any], List[str], bool]

logger = logging.getLogger(__name__)


def setup_logging(level: str = LOG_LEVEL):
    """Setup logging configuration."""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=LOG_FORMAT,
        stream=sys.stderr
    )


def _field(q: int) -> PrimePowerField:
    return PrimePowerField.from_q(q)


def cmd_order(args) -> Outcome:
    g, f = parse_group(args.group), _field(args.q)
    order = group_order(g, f)
    n_exp, degs = order_polynomial(g)
    return [{"group": str(g), "q": str(f.q), "order": str(order), "N": n_exp}], [str(order)], True


def cmd_degrees(args) -> Outcome:
    g = parse_group(args.group)
    n_exp, degs = order_polynomial(g)
    text = f"N={n_exp} degrees={' '.join(map(str, degs))}"
    return [{"group": str(g), "N": n_exp, "degrees": list(degs)}], [text], True


def cmd_factor(args) -> Outcome:
    g, f = parse_group(args.group), _field(args.q)
    fac = factor_group_order(g, f, seed=args.seed)
    result = {"group": str(g), "q": str(f.q), "order": str(fac.value),
              "factors": {str(p): e for p, e in fac.prime_powers()}}
    return [result], [f"{fac.value} = {fac}"], True


def cmd_recover(args) -> Outcome:
    N = int(args.order)
    atlas_path = args.atlas or get_config()["atlas"]["path"]
    candidates = None
    if args.q_max is not None:
        q_values = [f.q for f in prime_powers(args.q_max)]
        stored = load_atlas(atlas_path)
        if stored is not None and stored.covers(args.max_rank, q_values):
            logger.info(f"Answering from atlas {atlas_path}")
            candidates = recover_from_atlas(N, atlas_from_file(stored), args.max_rank, args.q_max)
        elif stored is not None:
            logger.warning(f"Atlas {atlas_path} bounds {stored.bounds} do not cover the query, recomputing")
        if args.build_atlas:
            atlas = build_order_atlas(args.max_rank, q_values)
            save_atlas(atlas_to_file(atlas, args.max_rank, q_values), atlas_path)
    elif args.build_atlas:
        logger.warning("--build-atlas needs --q-max, skipping")
    if candidates is None:
        candidates = recover_candidates(N, args.max_rank, args.q_max, seed=args.seed)
    results = [{"group": str(c.group), "q": str(c.field.q) if c.field else None} for c in candidates]
    lines = [str(c) for c in candidates] or ["no candidates"]
    return results, lines, True


def cmd_coincide(args) -> Outcome:
    if args.max_degree is not None:
        classes = search_two_factor_pairs(args.max_degree)
    else:
        classes = search_coincidences(args.max_rank, args.factors)
    return [str(c) for c in classes], [str(c) for c in classes], True


def cmd_reduce(args) -> Outcome:
    c = parse_pair(args.pair)
    word = reduce_to_word(c)
    ok = evaluate_word(word) == c
    return [{"pair": str(c), "word": serialize_word(word)}], [serialize_word(word)], ok


def cmd_generators(args) -> Outcome:
    results, lines = [], []
    for gid in generator_catalog(args.b_max, args.d_max):
        c = generator(gid)
        results.append({"generator": str(gid), "pair": str(c)})
        lines.append(f"{gid}: {c}")
    return results, lines, True


def cmd_cross_char(args) -> Outcome:
    results, lines = [], []
    for order, candidates in search_cross_characteristic(args.max_rank, args.q_max):
        names = [str(c) for c in candidates]
        results.append({"order": str(order), "candidates": names})
        lines.append(f"{order}: {', '.join(names)}")
    return results, lines or ["no cross-characteristic coincidences within bounds"], True


def cmd_catalog(args) -> Outcome:
    document = catalog_document(args.n_max)
    if args.output:
        save_catalog(document, args.output)
    lines = [f"{r.ambient} | {r.sub1} | {r.sub2} | {r.intersection}  ->  {r.left}|{r.right} = {r.word}"
             for r in document.rows]
    return [document.model_dump()], lines, True


def _q_values(q_max: int) -> List[int]:
    return [f.q for f in prime_powers(q_max)]


# target -> (runner over resolved bounds, default bounds); only listed bounds are accepted
VERIFY_TARGETS: Dict[str, Tuple[Callable[[Dict[str, int], Any], VerificationReport], Dict[str, int]]] = {
    "prop31": (lambda b, seed: verify_counterexample_classification(b["rank_max"], b["q_max"], seed=seed),
               {"rank_max": DEFAULT_MAX_RANK, "q_max": DEFAULT_Q_MAX}),
    "thm42": (lambda b, seed: verify_two_factor_classification(b["max_degree"]),
              {"max_degree": DEFAULT_MAX_DEGREE}),
    "triples": (lambda b, seed: verify_triples(b["n_max"], _q_values(b["q_max"])),
                {"n_max": DEFAULT_N_MAX, "q_max": 5}),
    "artin-tits": (lambda b, seed: verify_artin_tits(b["n_max"], b["q_max"]),
                   {"n_max": 6, "q_max": 9}),
    "lemma21": (lambda b, seed: verify_valuation_rules(b["p_max"], b["a_max"], b["n_max"]),
                {"p_max": 13, "a_max": 12, "n_max": 24}),
    "contribution-bound": (lambda b, seed: verify_contribution_bound(_q_values(b["q_max"]), b["n_max"]),
                           {"q_max": 9, "n_max": 6}),
    "monotonicity": (lambda b, seed: verify_inequality_monotonicity(b["q_max"], b["n_max"]),
                     {"q_max": 16, "n_max": 16}),
    "zsygmondy": (lambda b, seed: verify_primitive_divisors(b["a_max"], b["n_max"]),
                  {"a_max": 12, "n_max": 30}),
    "cyclotomic": (lambda b, seed: verify_cyclotomic_identity(b["n_max"]),
                   {"n_max": 105}),
    "generators": (lambda b, seed: _merge(verify_generators(b["b_max"], b["d_max"], _q_values(b["q_max"])),
                                          verify_generator_independence(b["b_max"], b["d_max"]),
                                          verify_maximal_exponent_pairs(b["n_max"])),
                   {"b_max": 15, "d_max": 16, "q_max": 9, "n_max": DEFAULT_N_MAX}),
}

BOUND_FLAGS = ("rank_max", "q_max", "n_max", "max_degree", "p_max", "a_max", "b_max", "d_max")


def _merge(*reports: VerificationReport) -> VerificationReport:
    merged = VerificationReport(name="+".join(r.name for r in reports))
    for r in reports:
        merged.checked += r.checked
        merged.failures.extend(r.failures)
        merged.details[r.name] = r.details
    if merged.failures:
        merged.status = "failed"
    return merged


def cmd_verify(args) -> Outcome:
    runner, defaults = VERIFY_TARGETS[args.target]
    unused = [f"--{name.replace('_', '-')}" for name in BOUND_FLAGS
              if getattr(args, name) is not None and name not in defaults]
    if unused:
        raise ValueError(f"verify {args.target} does not take {', '.join(unused)}")
    bounds = {name: default if getattr(args, name) is None else getattr(args, name)
              for name, default in defaults.items()}
    for name in BOUND_FLAGS:
        setattr(args, name, bounds.get(name))
    report = runner(bounds, args.seed)
    summary = {k: v for k, v in report.model_dump().items() if k != "details"}
    summary["details"] = {k: v for k, v in report.details.items() if k != "rows"}
    lines = [f"{report.name}: {report.status} ({report.checked} cases)"]
    lines += [f"  FAIL {msg}" for msg in report.failures]
    if "counterexamples" in report.details:
        lines.append(f"  counterexamples: {', '.join(report.details['counterexamples'])}")
    return [summary], lines, report.passed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print a JSON envelope instead of text")
    common.add_argument("--seed", type=int, default=None, help="Seed for factorization randomness")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        description="Orders of split semisimple groups over finite fields",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py order --group A1 --q 9
  python cli.py factor --group B2 --q 3
  python cli.py recover --order 720 --max-rank 4
  python cli.py reduce --pair "B3*B3|D4*G2"
  python cli.py verify prop31 --rank-max 4 --q-max 25 --json
        """
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("order", parents=[common], help="Order of a group over F_q")
    p.add_argument("--group", required=True)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(handler=cmd_order)

    p = sub.add_parser("degrees", parents=[common], help="Weyl degrees and exponent N")
    p.add_argument("--group", required=True)
    p.set_defaults(handler=cmd_degrees)

    p = sub.add_parser("factor", parents=[common], help="Factor a group order")
    p.add_argument("--group", required=True)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(handler=cmd_factor)

    p = sub.add_parser("recover", parents=[common], help="All (group, q) with a given order")
    p.add_argument("--order", required=True, help="Order as a decimal string")
    p.add_argument("--max-rank", type=int, default=DEFAULT_MAX_RANK)
    p.add_argument("--q-max", type=int, default=None)
    p.add_argument("--atlas", default=None, help="Atlas path (default from LIEORDER_ATLAS)")
    p.add_argument("--build-atlas", action="store_true", help="Rebuild the atlas for these bounds")
    p.set_defaults(handler=cmd_recover)

    p = sub.add_parser("coincide", parents=[common], help="Search for order coincidences")
    p.add_argument("--max-rank", type=int, default=DEFAULT_MAX_RANK)
    p.add_argument("--factors", type=int, default=2)
    p.add_argument("--max-degree", type=int, default=None, help="Two-factor join up to this degree")
    p.set_defaults(handler=cmd_coincide)

    p = sub.add_parser("reduce", parents=[common], help="Reduce a pair to a generator word")
    p.add_argument("--pair", required=True, help="LEFT|RIGHT")
    p.set_defaults(handler=cmd_reduce)

    p = sub.add_parser("generators", parents=[common], help="List the generator classes")
    p.add_argument("--b-max", type=int, default=15)
    p.add_argument("--d-max", type=int, default=16)
    p.set_defaults(handler=cmd_generators)

    p = sub.add_parser("cross-char", parents=[common], help="Orders shared across characteristics")
    p.add_argument("--max-rank", type=int, default=2)
    p.add_argument("--q-max", type=int, default=9)
    p.set_defaults(handler=cmd_cross_char)

    p = sub.add_parser("catalog", parents=[common], help="Transitive triple catalog")
    p.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p.add_argument("--output", "-o", default=None, help="Write the catalog JSON here")
    p.set_defaults(handler=cmd_catalog)

    p = sub.add_parser("verify", parents=[common], help="Run a bounded verification")
    p.add_argument("target", choices=sorted(VERIFY_TARGETS))
    p.add_argument("--rank-max", type=int, default=None, help="Largest total rank (prop31)")
    p.add_argument("--q-max", type=int, default=None, help="Largest field size or base")
    p.add_argument("--n-max", type=int, default=None, help="Largest family parameter, exponent or product length")
    p.add_argument("--max-degree", type=int, default=None, help="Largest Weyl degree (thm42)")
    p.add_argument("--p-max", type=int, default=None, help="Largest prime (lemma21)")
    p.add_argument("--a-max", type=int, default=None, help="Largest base a (lemma21, zsygmondy)")
    p.add_argument("--b-max", type=int, default=None, help="Largest B generator index (generators)")
    p.add_argument("--d-max", type=int, default=None, help="Largest D generator index (generators)")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    """Main CLI function."""
    parser = build_parser()
    args = parser.parse_args(argv)

    log_level = "DEBUG" if args.verbose else LOG_LEVEL
    setup_logging(log_level)

    start = time.time()
    try:
        results, lines, ok = args.handler(args)
    except (FactorizationBudgetError, SearchBudgetError) as e:
        logger.error(f"Budget exceeded: {e}")
        return EXIT_BUDGET
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE
    elapsed_ms = (time.time() - start) * 1000
    # handlers may fill in resolved defaults, so inputs are read afterwards
    inputs = {k: v for k, v in vars(args).items()
              if k not in ("handler", "json", "verbose") and not (k in BOUND_FLAGS and v is None)}

    if args.json:
        envelope = CommandResult(command=args.command, inputs=inputs, results=results, elapsed_ms=elapsed_ms)
        print(envelope.model_dump_json(indent=2))
    else:
        print("\n".join(lines))
    return EXIT_OK if ok else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
