"""JSON schemas for instances and reports.

Three file formats, documented field by field in the README:

* client-element instances: clients, priced elements, inflation factor, a
  kind-specific problem payload, and an optional scenario distribution;
* stochastic-LP instances: first-stage costs, box polytope, and dense
  scenario blocks (matrices as row-major nested lists);
* gap instances: ground set, marginals, and a named or tabulated set
  function.

Reports are serialized with sorted keys and a trailing newline so that
reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .gap import GapInstance
from .model import (
    Explicit,
    IndependentBernoulli,
    KPartition,
    ProblemInstance,
    ScenarioDistribution,
)
from .problems import (
    set_cover_problem,
    steiner_problem,
    ufl_problem,
    vertex_cover_problem,
)
from .saa import Polytope, ScenarioBlock, StochasticLPInstance
from .setfun import from_json as setfun_from_json

PROBLEM_KINDS = ("steiner", "ufl", "set_cover", "vertex_cover")


def _require(payload: dict, key: str, where: str):
    if key not in payload:
        raise SchemaError(f"missing field {key!r} in {where}")
    return payload[key]


def load_distribution(payload: dict) -> ScenarioDistribution:
    kind = _require(payload, "kind", "distribution")
    if kind == "explicit":
        outcomes = _require(payload, "outcomes", "distribution")
        return Explicit(tuple((frozenset(o["subset"]), float(o["prob"]))
                              for o in outcomes))
    if kind == "independent":
        marg = _require(payload, "marginals", "distribution")
        return IndependentBernoulli(tuple((j, float(p)) for j, p in marg.items()))
    if kind == "k_partition":
        blocks = _require(payload, "blocks", "distribution")
        return KPartition(tuple(frozenset(b) for b in blocks))
    raise SchemaError(f"unknown distribution kind {kind!r}")


def dump_distribution(dist: ScenarioDistribution) -> dict:
    if isinstance(dist, Explicit):
        return {"kind": "explicit",
                "outcomes": [{"subset": sorted(s), "prob": p}
                             for s, p in dist.outcomes]}
    if isinstance(dist, IndependentBernoulli):
        return {"kind": "independent", "marginals": dict(dist.marginals)}
    if isinstance(dist, KPartition):
        return {"kind": "k_partition", "blocks": [sorted(b) for b in dist.blocks]}
    raise SchemaError(f"cannot serialize distribution {dist!r}")


def load_instance(payload: dict):
    """Parse a client-element instance; returns (problem, distribution|None)."""
    try:
        clients = tuple(_require(payload, "clients", "instance"))
        elements = _require(payload, "elements", "instance")
        costs = {e["id"]: float(e["cost"]) for e in elements}
        order = tuple(e["id"] for e in elements)
        sigma = float(_require(payload, "sigma", "instance"))
        problem = _require(payload, "problem", "instance")
        kind = _require(problem, "kind", "problem")
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"malformed instance: {exc}") from exc

    if kind == "steiner":
        edges = {e: tuple(uv) for e, uv in _require(problem, "edges", "problem").items()}
        _check_ids(order, edges, "edges")
        inst = steiner_problem(clients, {e: edges[e] for e in order}, costs,
                               sigma, root=problem.get("root"))
    elif kind == "set_cover":
        sets = {e: tuple(m) for e, m in _require(problem, "sets", "problem").items()}
        _check_ids(order, sets, "sets")
        inst = set_cover_problem(clients, {e: sets[e] for e in order}, costs, sigma)
    elif kind == "vertex_cover":
        edges = {c: tuple(uv) for c, uv in _require(problem, "edges", "problem").items()}
        if set(edges) != set(clients):
            raise SchemaError("vertex-cover edges must be keyed by client ids")
        inst = vertex_cover_problem(order, edges, costs, sigma)
    elif kind == "ufl":
        facilities = tuple(_require(problem, "facilities", "problem"))
        assigns = {a: tuple(p) for a, p in
                   _require(problem, "assignments", "problem").items()}
        if set(order) != set(facilities) | set(assigns):
            raise SchemaError(
                "element ids must be exactly the facilities plus assignments")
        open_costs = {i: costs[i] for i in facilities}
        assign_costs = {a: costs[a] for a in assigns}
        inst = ufl_problem(clients, facilities, open_costs, assigns,
                           assign_costs, sigma)
    else:
        raise SchemaError(f"unknown problem kind {kind!r}")

    dist = None
    if payload.get("distribution") is not None:
        dist = load_distribution(payload["distribution"])
        _check_distribution_clients(dist, set(inst.clients))
    return inst, dist


def _check_distribution_clients(dist: ScenarioDistribution, clients: set):
    if isinstance(dist, Explicit):
        mentioned = set().union(*(s for s, _ in dist.outcomes)) if dist.outcomes else set()
    elif isinstance(dist, IndependentBernoulli):
        mentioned = set(dist.clients())
    else:
        mentioned = set().union(*dist.blocks)
    unknown = mentioned - clients
    if unknown:
        raise SchemaError(
            f"distribution mentions unknown clients: {sorted(map(str, unknown))}")


def _check_ids(order: tuple, mapping: dict, what: str):
    if set(order) != set(mapping):
        raise SchemaError(f"element ids and {what} keys disagree")


def dump_instance(problem: ProblemInstance,
                  dist: ScenarioDistribution | None = None) -> dict:
    payload: dict = {"kind": problem.kind}
    if problem.kind == "steiner":
        payload["edges"] = {e: list(uv) for e, uv in problem.payload["edges"].items()}
        payload["root"] = problem.payload["root"]
    elif problem.kind == "set_cover":
        payload["sets"] = {e: sorted(m) for e, m in problem.payload["sets"].items()}
    elif problem.kind == "vertex_cover":
        payload["edges"] = {c: list(uv) for c, uv in problem.payload["edges"].items()}
    elif problem.kind == "ufl":
        payload["facilities"] = list(problem.payload["facilities"])
        payload["assignments"] = {a: list(p) for a, p in
                                  problem.payload["assignments"].items()}
    else:
        raise SchemaError(f"cannot serialize problem kind {problem.kind!r}")
    out = {
        "clients": list(problem.clients),
        "elements": [{"id": e, "cost": problem.first_stage_cost[e]}
                     for e in problem.elements],
        "sigma": problem.inflation,
        "problem": payload,
    }
    if dist is not None:
        out["distribution"] = dump_distribution(dist)
    return out


def load_stochastic_lp(payload: dict) -> StochasticLPInstance:
    try:
        w = np.asarray(_require(payload, "first_stage_cost", "lp instance"),
                       dtype=float)
        poly_payload = _require(payload, "polytope", "lp instance")
        poly = Polytope(
            lower=np.asarray(poly_payload.get("lower", np.zeros(w.size)), dtype=float),
            upper=np.asarray(poly_payload.get("upper", np.ones(w.size)), dtype=float),
            rows=(np.asarray(poly_payload["rows"], dtype=float)
                  if poly_payload.get("rows") else None),
            row_rhs=(np.asarray(poly_payload["row_rhs"], dtype=float)
                     if poly_payload.get("rows") else None),
            radius=poly_payload.get("radius"),
        )
        blocks = []
        for blk in _require(payload, "scenarios", "lp instance"):
            k = len(blk["requirement"])
            aux = np.asarray(blk.get("aux_cost", []), dtype=float)
            if aux.size:
                coupling = np.asarray(blk["coupling"], dtype=float).reshape(k, -1)
            else:
                coupling = np.zeros((k, 0))
            blocks.append(ScenarioBlock(
                probability=float(blk["probability"]),
                recourse_cost=np.asarray(blk["recourse_cost"], dtype=float),
                aux_cost=aux,
                coupling=coupling,
                technology=np.asarray(blk["technology"], dtype=float),
                requirement=np.asarray(blk["requirement"], dtype=float),
            ))
    except (TypeError, KeyError, ValueError) as exc:
        raise SchemaError(f"malformed stochastic LP: {exc}") from exc
    return StochasticLPInstance(w, poly, tuple(blocks))


def dump_stochastic_lp(instance: StochasticLPInstance) -> dict:
    poly = instance.polytope
    out: dict = {
        "first_stage_cost": instance.first_stage_cost.tolist(),
        "polytope": {
            "lower": poly.lower.tolist(),
            "upper": poly.upper.tolist(),
            "radius": poly.radius,
        },
        "scenarios": [],
    }
    if poly.rows is not None:
        out["polytope"]["rows"] = poly.rows.tolist()
        out["polytope"]["row_rhs"] = poly.row_rhs.tolist()
    for blk in instance.scenarios:
        out["scenarios"].append({
            "probability": blk.probability,
            "recourse_cost": blk.recourse_cost.tolist(),
            "aux_cost": blk.aux_cost.tolist(),
            "coupling": blk.coupling.tolist(),
            "technology": blk.technology.tolist(),
            "requirement": blk.requirement.tolist(),
        })
    return out


def load_gap_instance(payload: dict) -> GapInstance:
    try:
        ground = tuple(_require(payload, "ground", "gap instance"))
        marginals = {i: float(_require(payload, "marginals", "gap instance")[str(i)])
                     for i in ground}
        f = setfun_from_json(_require(payload, "set_function", "gap instance"), ground)
    except (TypeError, KeyError) as exc:
        raise SchemaError(f"malformed gap instance: {exc}") from exc
    return GapInstance(ground, f, marginals)


def canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from exc


def write_json(path, obj, overwrite: bool = False):
    path = Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"{path} exists; pass --overwrite to replace it")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(canonical_json(obj), encoding="utf-8")
