"""JSON encodings. Rationals are always ``"p/q"`` strings (integers allowed)."""
from __future__ import annotations

import json
from fractions import Fraction

from .builder import ApproxSpace, StepFunctionSpace
from .core_metric import FiniteMetricSpace, as_rat, rat_str, validate


class FormatError(ValueError):
    pass


def _rat(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise FormatError(f"expected a 'p/q' string, got {v!r}")
    try:
        return as_rat(v)
    except (ValueError, ZeroDivisionError) as e:
        raise FormatError(str(e)) from None


def space_to_dict(X: FiniteMetricSpace) -> dict:
    return {"n": X.n, "d": [[rat_str(v) for v in row] for row in X.d]}


def space_from_dict(obj: dict, check: bool = True) -> FiniteMetricSpace:
    try:
        n, rows = obj["n"], obj["d"]
    except (KeyError, TypeError):
        raise FormatError("metric space needs keys 'n' and 'd'") from None
    if len(rows) != n:
        raise FormatError(f"'n' is {n} but 'd' has {len(rows)} rows")
    try:
        X = FiniteMetricSpace([[_rat(v) for v in row] for row in rows])
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e)) from None
    if check:
        bad = validate(X)
        if bad:
            raise FormatError(f"not a metric: {bad[0]}")
    return X


def approx_to_dict(A: ApproxSpace) -> dict:
    out = space_to_dict(A.space)
    out.update(
        alphabet=[rat_str(v) for v in A.alphabet],
        rounds=A.rounds,
        budget=A.budget,
        seed=A.seed,
        completion=A.completion,
        added_per_round=list(A.added_per_round),
    )
    return out


def approx_from_dict(obj: dict) -> ApproxSpace:
    X = space_from_dict(obj)
    try:
        return ApproxSpace(
            space=X,
            alphabet=tuple(sorted(_rat(v) for v in obj["alphabet"])),
            rounds=int(obj["rounds"]),
            budget=int(obj["budget"]),
            seed=int(obj["seed"]),
            completion=obj.get("completion", "random"),
            added_per_round=list(obj.get("added_per_round", [])),
        )
    except KeyError as e:
        raise FormatError(f"approximation is missing {e}") from None


def steps_to_dict(F: StepFunctionSpace) -> dict:
    return {
        "m": F.m,
        "depth": F.depth,
        "functions": [[rat_str(v) for v in f] for f in F.functions],
    }


def steps_from_dict(obj: dict) -> StepFunctionSpace:
    funcs = tuple(tuple(_rat(v) for v in f) for f in obj["functions"])
    if any(len(f) != 2 ** obj["depth"] for f in funcs):
        raise FormatError("step function length must be 2**depth")
    return StepFunctionSpace(int(obj["m"]), int(obj["depth"]), funcs)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1) + "\n"


def load_space(path: str, check: bool = True) -> FiniteMetricSpace:
    """Metric space from a JSON file; approximation files are accepted too."""
    with open(path) as fh:
        obj = json.load(fh)
    return space_from_dict(obj, check)


def load_any(path: str):
    """An :class:`ApproxSpace` if the file carries build fields, else a plain space."""
    with open(path) as fh:
        obj = json.load(fh)
    if "alphabet" in obj:
        return approx_from_dict(obj)
    return space_from_dict(obj)


def load_targets(path: str) -> list[FiniteMetricSpace]:
    """A JSON list of metric spaces, or an object with a ``targets`` list."""
    with open(path) as fh:
        obj = json.load(fh)
    items = obj["targets"] if isinstance(obj, dict) else obj
    return [space_from_dict(t) for t in items]
