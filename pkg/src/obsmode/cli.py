"""Command-line interface.

Exit codes: 0 success, 1 infeasible (or a failed check), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import kernels
from .belief import belief_stats, belief_to_dot, build_belief
from .casestudy import bundled_raw
from .formats import (InputError, dumps, load_model, load_strategy, save_model,
                      save_strategy)
from .model import format_cost, validate_model
from .oracle import check_instance, verify_strategy
from .product import CONVENTIONS, TARGET, build_product, product_stats, product_to_dot
from .runtime import RUNNING, feed_observation, next_command, start_session
from .scltl import (FormulaSyntaxError, atoms, compile_to_dfa, dfa_to_dot, dfa_to_json,
                    parse_formula)
from .synthesis import Infeasible, synth_bounded, synth_unbounded, wtg_profile

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT = 0, 1, 2
DEFAULT_FUZZ_SEEDS = "0..199"
EXHAUSTIVE_LIMIT = 100000


def _emit(doc, out=None):
    text = dumps(doc)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _formula(text, aps=None):
    try:
        return parse_formula(text, aps)
    except FormulaSyntaxError as exc:
        raise InputError(f"formula: {exc}") from None


def _belief_product(model, formula, labeling):
    dfa = compile_to_dfa(formula, model.atomic_props)
    product = build_product(model, dfa, labeling)
    return build_belief(product)


def _summary(strategy, bp):
    first = strategy.command(bp.init, 0)
    return {
        "status": "ok",
        "kind": strategy.kind,
        "bound": strategy.bound,
        "labeling": bp.product.convention,
        "total_cost": format_cost(strategy.total_cost),
        "first_command": None if first is None else list(first),
        "beliefs": len(bp.beliefs),
    }


def cmd_synth(args):
    model = load_model(args.model)
    formula = _formula(args.formula, model.atomic_props)
    bp = _belief_product(model, formula, args.labeling)
    try:
        if args.bound is None:
            strategy = synth_unbounded(bp, args.backend)
        else:
            strategy = synth_bounded(bp, args.bound, args.backend)
    except Infeasible as exc:
        if args.trace:
            _write(args.trace, dumps(exc.trace.as_records() if exc.trace else []))
        _emit({"status": "infeasible", "message": str(exc)})
        return EXIT_INFEASIBLE
    if args.trace:
        _write(args.trace, dumps(strategy.trace.as_records()))
    if args.dot:
        _write(args.dot, belief_to_dot(bp))
    if args.out:
        save_strategy(strategy, args.formula, args.out)
        _emit(_summary(strategy, bp))
    else:
        sys.stdout.write(save_strategy(strategy, args.formula))
    return EXIT_OK


def cmd_verify(args):
    model = load_model(args.model)
    strategy, formula = load_strategy(args.strategy, model)
    if args.formula is not None and _formula(args.formula, model.atomic_props) != formula:
        raise InputError("formula differs from the one the strategy was built for")
    report = verify_strategy(model, formula, strategy, strategy.bp)
    doc = report.as_dict()
    doc["reported_total_cost"] = format_cost(strategy.total_cost)
    _emit(doc)
    return EXIT_OK if report.satisfies else EXIT_INFEASIBLE


def _true_successors(bp, p, j):
    a, _ = bp.belief_actions[j]
    return bp.product.succ[p][a]


def _step_record(run, session, state, cmd, obs):
    return {"run": run, "step": session.steps, "belief": session.current_belief,
            "state": state, "command": list(cmd), "observation": sorted(obs),
            "cost": format_cost(session.accumulated_cost)}


def _final_record(run, session, state):
    return {"run": run, "final": True, "status": session.status, "state": state,
            "belief": session.current_belief, "steps": session.steps,
            "cost": format_cost(session.accumulated_cost)}


def _simulate_run(run, strategy, bp, choose, max_steps):
    """Play one run; ``choose(options)`` resolves the non-determinism."""
    product, model = bp.product, bp.model
    records = []
    session = start_session(strategy, bp)
    p = product.init
    while session.status == RUNNING and session.steps < max_steps:
        cmd = next_command(session)
        p = choose(_true_successors(bp, p, session.pending))
        state = product.states[p][0]
        _, m = bp.belief_actions[session.pending]
        obs = model.modes[m].obs_fn[state]
        records.append(_step_record(run, session, state, cmd, obs))
        feed_observation(session, obs)
    records.append(_final_record(run, session, product.states[p][0]))
    return records


def cmd_simulate(args):
    model = load_model(args.model)
    strategy, _ = load_strategy(args.strategy, model)
    bp = strategy.bp
    max_steps = len(bp.beliefs) + 1
    out = []
    if args.adversary == "random":
        rng = random.Random(args.seed)
        for run in range(args.runs):
            out.extend(_simulate_run(run, strategy, bp, lambda opts: rng.choice(opts), max_steps))
    else:
        # enumerate every resolution depth-first, one run per leaf
        prefixes = [[]]
        run = 0
        while prefixes:
            script = prefixes.pop()
            pos = [0]
            branch = []

            def choose(opts, script=script, pos=pos, branch=branch):
                i = pos[0]
                pos[0] += 1
                if i < len(script):
                    return opts[script[i]]
                branch.append(len(opts))
                return opts[0]

            records = _simulate_run(run, strategy, bp, choose, max_steps)
            out.extend(records)
            run += 1
            if run > EXHAUSTIVE_LIMIT:
                raise InputError(f"more than {EXHAUSTIVE_LIMIT} runs")
            base = list(script)
            new = []
            for width in branch:
                for alt in range(1, width):
                    new.append(base + [alt])
                base = base + [0]
            prefixes.extend(reversed(new))
    for rec in out:
        sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    bad = any(r.get("final") and r["status"] != "satisfied" for r in out)
    return EXIT_INFEASIBLE if bad else EXIT_OK


def cmd_inspect(args):
    model = load_model(args.model)
    doc = {
        "states": len(model.states),
        "actions": len(model.actions),
        "modes": [{"name": m.name, "cost": format_cost(m.cost)} for m in model.modes],
        "atomic_props": list(model.atomic_props),
        "observations": len(model.observations),
    }
    if args.formula is not None:
        formula = _formula(args.formula, model.atomic_props)
        dfa = compile_to_dfa(formula, model.atomic_props)
        product = build_product(model, dfa, args.labeling)
        ps = product_stats(product)
        doc["labeling"] = args.labeling
        doc["dfa_states"] = len(dfa.delta)
        doc["product"] = {"states": ps.state_count, "transitions": ps.transition_count,
                          "nondeterminism": ps.degree_of_nondeterminism}
        if args.product_dot:
            _write(args.product_dot, product_to_dot(product))
        if not args.no_belief:
            bp = build_belief(product)
            bs = belief_stats(bp)
            doc["belief"] = {"states": bs.belief_count, "transitions": bs.transition_count}
            if args.belief_dot:
                _write(args.belief_dot, belief_to_dot(bp))
    elif args.product_dot or args.belief_dot:
        raise InputError("--product-dot and --belief-dot need --formula")
    _emit(doc)
    return EXIT_OK


def cmd_compile_formula(args):
    if args.ap is not None:
        aps = [p for p in args.ap.split(",") if p]
        formula = _formula(args.formula, aps)
    else:
        formula = _formula(args.formula)
        aps = sorted(atoms(formula))
    try:
        dfa = compile_to_dfa(formula, aps)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.dot:
        _write(args.dot, dfa_to_dot(dfa))
    _emit(dfa_to_json(dfa))
    return EXIT_OK


def cmd_casestudy(args):
    model = validate_model(bundled_raw(args.name))
    text = save_model(model)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def parse_seeds(text):
    """``a..b`` (inclusive), ``a,b,c`` or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"bad seed range {text!r}") from None


def cmd_fuzz(args):
    text = args.seeds or os.environ.get("OBSMODE_SEED") or DEFAULT_FUZZ_SEEDS
    seeds = parse_seeds(text)
    problems = []
    for seed in seeds:
        problems.extend(check_instance(seed, args.backend))
    _emit({"instances": len(seeds), "problems": problems})
    return EXIT_INFEASIBLE if problems else EXIT_OK


def cmd_sweep(args):
    model = load_model(args.model)
    formula = _formula(args.formula, model.atomic_props)
    bp = _belief_product(model, formula, args.labeling)
    offset = model.modes[bp.m_init].cost if args.labeling == TARGET else 0
    profile = wtg_profile(bp, args.k_max, args.backend)
    rows = [{"k": k, "total_cost": None if v is None else format_cost(offset + v)}
            for k, v in enumerate(profile, start=1)]
    feasible = [r["k"] for r in rows if r["total_cost"] is not None]
    _emit({"labeling": args.labeling, "min_feasible_k": feasible[0] if feasible else None,
           "profile": rows})
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--labeling", choices=CONVENTIONS, default=TARGET,
                        help="which state label the automaton reads on a transition")
    common.add_argument("--backend", choices=sorted(kernels.BACKENDS), default=None,
                        help="synthesis kernels (default: compiled when available)")

    parser = argparse.ArgumentParser(prog="obsmode", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="synthesize an optimal strategy")
    p.add_argument("model")
    p.add_argument("--formula", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--bound", type=_positive, help="satisfy within this many steps")
    group.add_argument("--unbounded", action="store_true", help="no step bound (default)")
    p.add_argument("--out", help="write the strategy here and print a summary")
    p.add_argument("--trace", help="write per-iteration records here ('-' for stdout)")
    p.add_argument("--dot", help="write the belief graph as DOT")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", parents=[common], help="check a strategy exhaustively")
    p.add_argument("model")
    p.add_argument("strategy")
    p.add_argument("--formula")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="run a strategy against an adversary")
    p.add_argument("model")
    p.add_argument("strategy")
    p.add_argument("--adversary", choices=("random", "exhaustive"), default="random")
    p.add_argument("--runs", type=_positive, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("inspect", parents=[common], help="model, product and belief sizes")
    p.add_argument("model")
    p.add_argument("--formula")
    p.add_argument("--no-belief", action="store_true", help="skip the belief construction")
    p.add_argument("--product-dot")
    p.add_argument("--belief-dot")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("compile-formula", parents=[common], help="formula to minimal DFA")
    p.add_argument("formula")
    p.add_argument("--ap", help="comma-separated propositions (default: those used)")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_compile_formula)

    p = sub.add_parser("casestudy", parents=[common], help="write a bundled model")
    p.add_argument("name", choices=("grid", "running"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_casestudy)

    p = sub.add_parser("fuzz", parents=[common], help="random cross-check battery")
    p.add_argument("--seeds", help="a..b, a,b,c or n (default: $OBSMODE_SEED or "
                   f"{DEFAULT_FUZZ_SEEDS})")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("sweep", parents=[common], help="optimal cost for k = 1..k_max")
    p.add_argument("model")
    p.add_argument("--formula", required=True)
    p.add_argument("--k-max", type=_positive, required=True)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return exc.code
    try:
        return args.func(args)
    except InputError as exc:
        sys.stderr.write(dumps({"errors": exc.errors}))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
