"""
Command line
Subcommands gen, fas, discrepancy, quasi, experiment and serve.
Exit status: 0 success, 1 input or precondition error, 2 budget refusal.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from .config import get_settings
from .constructions import FAMILIES, c4_arrow, generate
from .discrepancy import bfree_fas, prefix_cut_witness, witness_from_sets
from .errors import BudgetExceededError, FasLabError
from .exact_oracle import beta_exact, tau_exact, tau_partition_exact, tau_star_exact
from .graph_core import DiscrepancyWitness, FasResult, format_edge_list, read_edge_list, verify_fas
from .greedy_fas import randomized_fas
from .harness import experiment_scaling, load_experiment_spec, report_serialize
from .quasirandom import balance_partition, quasirandom_report

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse reports usage errors by exiting with 2, which is reserved for budget refusals"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _format_set(vertices) -> str:
    return " ".join(str(v) for v in sorted(vertices))


def _cmd_gen(args) -> int:
    family = args.family
    if args.random:
        if family != "bipartite":
            raise UsageError(f"--random applies only to the bipartite family, not {family!r}")
        family = "bipartite-random"
    names = FAMILIES[family].params if family in FAMILIES else ()
    if len(args.params) != len(names):
        raise UsageError(f"family {family!r} takes parameters {list(names)}, got {args.params}")
    G = generate(family, dict(zip(names, args.params)), seed=args.seed)
    _emit(format_edge_list(G), args.out)
    return 0


def _cmd_fas(args) -> int:
    G = read_edge_list(args.file)
    if args.algo == "exact":
        result = beta_exact(G)
        fas: FasResult = result.fas
        verify_fas(G, fas)
        print(f"beta={result.beta}")
    else:
        if args.trials < 1:
            raise UsageError(f"--trials must be at least 1, got {args.trials}")
        if args.algo == "bfree":
            fas = bfree_fas(G, c4_arrow(), regime=args.regime, trials=args.trials, seed=args.seed)
        else:
            fas = randomized_fas(G, trials=args.trials, seed=args.seed, refine=args.refine)
        verify_fas(G, fas)
        print(f"fas_size={fas.size}")
    print(f"surplus={fas.surplus}")
    print(f"ordering={' '.join(str(v) for v in fas.ordering)}")
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="") as fh:
            fh.writelines(f"{u} {v}\n" for u, v in sorted(fas.deleted))
    return 0


def _cmd_discrepancy(args) -> int:
    G = read_edge_list(args.file)
    witness: Optional[DiscrepancyWitness]
    if args.mode == "exact":
        if args.which == "tau":
            value, witness = tau_exact(G)
        elif args.which == "tau-star":
            value, witness = tau_star_exact(G)
        else:
            value, witness = tau_partition_exact(G), None
    else:
        # polynomial witnesses: lower bounds for tau and tau-star, exact for tau-part
        if args.which == "tau-part":
            balance = balance_partition(G)
            value = balance.tau_part
            witness = witness_from_sets(G, balance.sources, balance.sinks)
        else:
            ordering = randomized_fas(G, trials=args.trials, seed=args.seed).ordering
            witness = prefix_cut_witness(G, ordering)
            value = witness.difference
    print(f"{args.which}={value}")
    if witness is not None:
        print(f"A={_format_set(witness.sources)}")
        print(f"B={_format_set(witness.targets)}")
    return 0


def _cmd_quasi(args) -> int:
    G = read_edge_list(args.file)
    try:
        ks = [int(k) for k in args.k.split(",") if k.strip()]
    except ValueError:
        raise UsageError(f"--k expects a comma-separated list of integers, got {args.k!r}")
    report = quasirandom_report(G, delta=args.delta, ks=ks, trials=args.trials, seed=args.seed)
    text = report_serialize(report)
    if not args.json:
        text = json.dumps(json.loads(text), indent=2)
    _emit(text + "\n", args.out)
    return 0


def _cmd_experiment(args) -> int:
    spec = load_experiment_spec(args.spec)
    result = experiment_scaling(spec, output=args.out)
    if not (args.out or spec.output):
        sys.stdout.write(result.table.to_csv(index=False, lineterminator="\n"))
    if result.fit is None:
        print("fit=null")
    else:
        print(f"slope={result.fit.slope:.6f}")
        print(f"intercept={result.fit.intercept:.6f}")
        print(f"residual={result.fit.residual:.6f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("Fas_Lab.backend.main:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = _Parser(prog="fas-lab", description="Feedback arc set laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a digraph family as an edge list")
    gen.add_argument("family", choices=sorted(FAMILIES))
    gen.add_argument("params", nargs="*", type=int)
    gen.add_argument("--random", action="store_true", help="random orientation (bipartite only)")
    gen.add_argument("--seed", type=int, default=settings.default_seed)
    gen.add_argument("--out")
    gen.set_defaults(handler=_cmd_gen)

    fas = sub.add_parser("fas", help="compute a feedback arc set")
    fas.add_argument("file")
    fas.add_argument("--algo", choices=["greedy", "exact", "bfree"], default="greedy")
    fas.add_argument("--trials", type=int, default=settings.default_trials)
    fas.add_argument("--seed", type=int, default=settings.default_seed)
    fas.add_argument("--refine", action="store_true", help="insertion post-pass after each greedy trial")
    fas.add_argument("--regime", choices=["auto", "dense", "sparse"], default="auto")
    fas.add_argument("--out", help="write the deleted edges here")
    fas.set_defaults(handler=_cmd_fas)

    disc = sub.add_parser("discrepancy", help="directional discrepancy of a digraph")
    disc.add_argument("file")
    disc.add_argument("--which", choices=["tau", "tau-star", "tau-part"], default="tau")
    disc.add_argument("--mode", choices=["exact", "witness"], default="exact")
    disc.add_argument("--trials", type=int, default=settings.default_trials)
    disc.add_argument("--seed", type=int, default=settings.default_seed)
    disc.set_defaults(handler=_cmd_discrepancy)

    quasi = sub.add_parser("quasi", help="quasirandom diagnostics report")
    quasi.add_argument("file")
    quasi.add_argument("--delta", type=float, default=0.5)
    quasi.add_argument("--k", default="4,6")
    quasi.add_argument("--json", action="store_true", help="compact single-line JSON")
    quasi.add_argument("--trials", type=int, default=20)
    quasi.add_argument("--seed", type=int, default=settings.default_seed)
    quasi.add_argument("--out")
    quasi.set_defaults(handler=_cmd_quasi)

    exp = sub.add_parser("experiment", help="run a scaling experiment from a JSON spec")
    exp.add_argument("spec")
    exp.add_argument("--out", help="CSV path (overrides the spec)")
    exp.set_defaults(handler=_cmd_experiment)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)
    return parser


def cli_dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceededError as exc:
        logger.warning(str(exc))
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except FasLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0


def main(argv: Optional[List[str]] = None) -> None:
    logging.basicConfig(level=get_settings().log_level)
    sys.exit(cli_dispatch(argv))
