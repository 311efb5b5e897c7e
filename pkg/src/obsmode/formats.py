"""JSON model and strategy files."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .belief import build_belief
from .model import ModelError, NtsModel, format_cost, model_to_raw, to_cost, validate_model
from .product import CONVENTIONS, build_product
from .scltl import compile_to_dfa, parse_formula
from .synthesis import BOUNDED, UNBOUNDED, Strategy

MODEL_KEYS = {"states", "actions", "transitions", "init", "ap", "labels",
              "observations", "modes", "init_mode"}
STRATEGY_FORMAT = "obsmode-strategy"


class InputError(Exception):
    """Bad input file; ``errors`` is a list of human-readable problems."""

    def __init__(self, errors):
        self.errors = list(errors) if not isinstance(errors, str) else [errors]
        super().__init__("; ".join(self.errors))


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def read_json(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"{path}: not UTF-8 (byte {exc.start})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        offset = len(text[:exc.pos].encode("utf-8"))
        raise InputError(f"{path}: JSON syntax error at byte {offset}: {exc.msg}") from None


def model_from_doc(doc) -> NtsModel:
    if not isinstance(doc, dict):
        raise InputError("model: expected a JSON object")
    unknown = sorted(set(doc) - MODEL_KEYS)
    errors = [f"unknown key {k}" for k in unknown]
    try:
        model = validate_model(doc)
    except ModelError as exc:
        errors.extend(exc.violations)
    if errors:
        raise InputError(errors)
    return model


def load_model(path) -> NtsModel:
    return model_from_doc(read_json(path))


def save_model(model: NtsModel, path=None) -> str:
    text = dumps(model_to_raw(model))
    if path is not None:
        Path(path).write_text(text)
    return text


def _command_doc(bp, j):
    a, m = bp.action_name(j)
    return {"action": a, "mode": m}


def strategy_to_doc(strategy: Strategy, formula_text: str) -> dict:
    bp = strategy.bp
    doc = {
        "format": STRATEGY_FORMAT,
        "labeling": bp.product.convention,
        "formula": formula_text,
        "kind": strategy.kind,
        "bound": strategy.bound,
        "beliefs": [{"members": [list(x) for x in bp.members(i)], "mode": bp.mode_name(i)}
                    for i in range(len(bp.beliefs))],
        "init": bp.init,
        "choices": {str(b): _command_doc(bp, j) for b, j in sorted(strategy.choice.items())},
        "wtg": {str(b): format_cost(v) for b, v in sorted(strategy.wtg.items())},
        "total_cost": format_cost(strategy.total_cost),
    }
    if strategy.kind == BOUNDED:
        doc["layers"] = [{str(b): _command_doc(bp, j) for b, j in sorted(layer.items())}
                         for layer in strategy.layers]
    return doc


def save_strategy(strategy: Strategy, formula_text: str, path=None) -> str:
    text = dumps(strategy_to_doc(strategy, formula_text))
    if path is not None:
        Path(path).write_text(text)
    return text


def _choice_map(bp, raw, where):
    out = {}
    if not isinstance(raw, dict):
        raise InputError(f"{where}: expected an object")
    for key, cmd in raw.items():
        try:
            b = int(key)
            out[b] = bp.action_index(cmd["action"], cmd["mode"])
        except (ValueError, KeyError, TypeError):
            raise InputError(f"{where}[{key}]: bad command {cmd!r}") from None
        if not 0 <= b < len(bp.beliefs) or out[b] not in bp.edges[b]:
            raise InputError(f"{where}[{key}]: command not offered in that belief")
    return out


def strategy_from_doc(doc, model: NtsModel):
    """Rebuild the belief product for ``model`` and attach the stored choices.

    Returns ``(strategy, formula)``.  The stored beliefs must coincide with
    the rebuilt ones, which catches a strategy paired with the wrong model.
    """
    if not isinstance(doc, dict) or doc.get("format") != STRATEGY_FORMAT:
        raise InputError("not a strategy file")
    conv = doc.get("labeling")
    if conv not in CONVENTIONS:
        raise InputError(f"labeling: unknown convention {conv!r}")
    kind = doc.get("kind")
    if kind not in (UNBOUNDED, BOUNDED):
        raise InputError(f"kind: unknown strategy kind {kind!r}")
    try:
        formula = parse_formula(doc.get("formula", ""), model.atomic_props)
    except ValueError as exc:
        raise InputError(f"formula: {exc}") from None
    dfa = compile_to_dfa(formula, model.atomic_props)
    bp = build_belief(build_product(model, dfa, conv))

    stored = doc.get("beliefs")
    if not isinstance(stored, list) or len(stored) != len(bp.beliefs):
        raise InputError("beliefs: do not match the model")
    for i, item in enumerate(stored):
        try:
            members = [tuple(x) for x in item["members"]]
            same = members == bp.members(i) and item["mode"] == bp.mode_name(i)
        except (KeyError, TypeError):
            same = False
        if not same:
            raise InputError(f"beliefs[{i}]: does not match the model")
    if doc.get("init") != bp.init:
        raise InputError("init: does not match the model")

    choice = _choice_map(bp, doc.get("choices", {}), "choices")
    try:
        wtg = {int(b): to_cost(v) for b, v in doc.get("wtg", {}).items()}
    except ValueError as exc:
        raise InputError(f"wtg: {exc}") from None
    bound, layers = None, None
    if kind == BOUNDED:
        bound = doc.get("bound")
        if not isinstance(bound, int) or bound < 1:
            raise InputError("bound: must be a positive integer")
        raw_layers = doc.get("layers")
        if not isinstance(raw_layers, list) or not raw_layers:
            raise InputError("layers: missing")
        layers = [_choice_map(bp, layer, f"layers[{r}]") for r, layer in enumerate(raw_layers)]
    strategy = Strategy(bp, choice, wtg, kind=kind, bound=bound, layers=layers)
    total = doc.get("total_cost")
    if total is not None and bp.init in wtg and to_cost(total) != strategy.total_cost:
        raise InputError("total_cost: inconsistent with wtg")
    return strategy, formula


def load_strategy(path, model: NtsModel):
    return strategy_from_doc(read_json(path), model)


def cost_or_none(value: Fraction | None):
    return None if value is None else format_cost(value)
