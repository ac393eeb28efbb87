"""RCP-C and WMSR resilient consensus, adversary models and simulation.

Each normal node, every round:

1. reads the values of its neighbors;
2. among neighbors strictly above (below) its own value keeps aside the F
   highest (lowest), or all of them if there are fewer than F;
3. (RCP-C only) groups the set-aside values by color and re-admits every
   group except the one holding the extreme value;
4. replaces its value by a convex combination of itself, the neighbors that
   were never set aside, and the re-admitted ones.

WMSR is the same rule with step 3 skipped.  Ties are broken toward the lower
node id, both inside step 2 and when picking the extreme value in step 3.

The per-node functions here are plain Python and serve as the readable
reference; ``run_simulation`` drives the vectorized kernels in
``rcpc.kernels``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

import numpy as np

from . import kernels
from .graph import ColoredGraph, color_classes, graph_from_dict, load_graph
from .robustness import is_rs_robust_classic, is_rs_robust_colored, valid_nodes

DEFAULT_T = 10_000
DEFAULT_EPS = 1e-6
SAFETY_ATOL = 1e-12


class ScenarioError(ValueError):
    pass


class Scope(enum.Enum):
    F_TOTAL = "F-total"
    F_LOCAL = "F-local"


class Protocol(enum.Enum):
    RCPC = "rcpc"
    WMSR = "wmsr"


# -- adversary strategies ------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    """Broadcast a fixed value; nodes missing from ``values`` keep their
    initial value."""
    values: dict = field(default_factory=dict)
    kind = "constant"

    def trajectory(self, nodes, x0: np.ndarray, T: int) -> np.ndarray:
        out = np.repeat(x0[None, :], T + 1, axis=0)
        for v in nodes:
            out[:, v] = self.values.get(v, x0[v])
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "values": {str(k): v for k, v in sorted(self.values.items())}}


@dataclass(frozen=True)
class Ramp:
    """Start at the initial value and move by ``slopes[v]`` every step."""
    slopes: dict = field(default_factory=dict)
    kind = "ramp"

    def trajectory(self, nodes, x0: np.ndarray, T: int) -> np.ndarray:
        out = np.repeat(x0[None, :], T + 1, axis=0)
        t = np.arange(T + 1, dtype=np.float64)
        for v in nodes:
            out[:, v] = x0[v] + self.slopes.get(v, 0.0) * t
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "slopes": {str(k): v for k, v in sorted(self.slopes.items())}}


@dataclass(frozen=True)
class Oscillate:
    """Sinusoid around the initial value."""
    amplitude: float = 1.0
    period: float = 10.0
    kind = "oscillate"

    def trajectory(self, nodes, x0: np.ndarray, T: int) -> np.ndarray:
        out = np.repeat(x0[None, :], T + 1, axis=0)
        wave = self.amplitude * np.sin(2 * np.pi * np.arange(T + 1) / self.period)
        for v in nodes:
            out[:, v] = x0[v] + wave
        return out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "amplitude": self.amplitude, "period": self.period}


Strategy = Constant | Ramp | Oscillate


def strategy_from_dict(d: dict) -> Strategy:
    kind = d.get("kind")
    if kind == "constant":
        return Constant({int(k): float(v) for k, v in d.get("values", {}).items()})
    if kind == "ramp":
        return Ramp({int(k): float(v) for k, v in d.get("slopes", {}).items()})
    if kind == "oscillate":
        period = float(d.get("period", 10.0))
        if period <= 0:
            raise ScenarioError("oscillate period must be positive")
        return Oscillate(float(d.get("amplitude", 1.0)), period)
    raise ScenarioError(f"unknown adversary strategy {kind!r}")


@dataclass(frozen=True)
class AdversaryModel:
    scope: Scope = Scope.F_TOTAL
    F: int = 0
    nodes: frozenset[int] = frozenset()
    strategy: Strategy = field(default_factory=Constant)

    def to_dict(self) -> dict:
        return {"scope": self.scope.value, "F": self.F, "nodes": sorted(self.nodes),
                "strategy": self.strategy.to_dict()}


@dataclass(frozen=True)
class WeightRule:
    """Uniform weights over the considered set, self included.  ``alpha``,
    when given, is a floor that every weight must respect."""
    rule: str = "uniform"
    alpha: float | None = None

    def to_dict(self) -> dict:
        d = {"rule": self.rule}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


@dataclass(frozen=True, eq=False)
class Scenario:
    graph: ColoredGraph
    initial: np.ndarray | None = None
    adversary: AdversaryModel = field(default_factory=AdversaryModel)
    protocol: Protocol = Protocol.RCPC
    weights: WeightRule = field(default_factory=WeightRule)
    T: int = DEFAULT_T
    eps: float = DEFAULT_EPS
    seed: int = 0

    def initial_values(self) -> np.ndarray:
        if self.initial is not None:
            return np.asarray(self.initial, dtype=np.float64)
        return np.random.default_rng(self.seed).uniform(0.0, 1.0, self.graph.n)

    def with_(self, **kw) -> "Scenario":
        return replace(self, **kw)


@dataclass(eq=False)
class Trace:
    states: np.ndarray
    normal: np.ndarray
    protocol: Protocol = Protocol.RCPC

    @property
    def T(self) -> int:
        return self.states.shape[0] - 1

    @property
    def adversaries(self) -> list[int]:
        return [int(v) for v in np.flatnonzero(~self.normal)]

    @property
    def M_series(self) -> np.ndarray:
        if not self.normal.any():
            return np.full(self.states.shape[0], -np.inf)
        return self.states[:, self.normal].max(axis=1)

    @property
    def m_series(self) -> np.ndarray:
        if not self.normal.any():
            return np.full(self.states.shape[0], np.inf)
        return self.states[:, self.normal].min(axis=1)

    @property
    def spread(self) -> np.ndarray:
        return self.M_series - self.m_series


@dataclass(frozen=True)
class Outcome:
    """Summary of a run that need not keep the whole trace."""
    steps: int
    agree_step: int | None
    safe: bool
    final_spread: float
    final: np.ndarray

    @property
    def converged(self) -> bool:
        return self.agree_step is not None


# -- protocol steps (reference implementation) -----------------------------------

def _check_normal_node(g: ColoredGraph, i: int) -> None:
    if not (0 <= i < g.n):
        raise ScenarioError(f"node {i} not in graph with {g.n} nodes")


def partition_extremes(g: ColoredGraph, x, i: int, F: int) -> tuple[list[int], list[int]]:
    """The neighbors node ``i`` sets aside above and below its own value.

    Returned lists are ordered from the most extreme value inward (ties by
    lower id), so element 0 is the extreme node.
    """
    _check_normal_node(g, i)
    if F < 0:
        raise ScenarioError("F must be >= 0")
    xi = x[i]
    nbrs = sorted(g.neighbors[i])
    above = sorted((j for j in nbrs if x[j] > xi), key=lambda j: (-x[j], j))
    below = sorted((j for j in nbrs if x[j] < xi), key=lambda j: (x[j], j))
    return above[:F], below[:F]


def rescue_by_color(g: ColoredGraph, x, removed: list[int], side: str) -> list[int]:
    """Drop the color class holding the extreme value; return the rest.

    ``removed`` may be in any order; the extreme is found here (max for
    ``side='max'``, min for ``'min'``, ties toward the lower id).
    """
    if side not in ("max", "min"):
        raise ValueError("side must be 'max' or 'min'")
    if not removed:
        return []
    sign = -1.0 if side == "max" else 1.0
    extreme = min(removed, key=lambda j: (sign * x[j], j))
    classes = color_classes(g, removed)
    dropped = classes[g.colors[extreme]]
    return sorted(j for j in removed if j not in dropped)


def considered_set(g: ColoredGraph, x, i: int, F: int, rescue: bool = True) -> list[int]:
    r_hi, r_lo = partition_extremes(g, x, i, F)
    removed = set(r_hi) | set(r_lo)
    keep = {i} | (set(g.neighbors[i]) - removed)
    if rescue:
        keep |= set(rescue_by_color(g, x, r_hi, "max"))
        keep |= set(rescue_by_color(g, x, r_lo, "min"))
    return sorted(keep)


def _weighted(x, members: list[int], weights: WeightRule | None) -> float:
    if weights is not None and weights.rule != "uniform":
        raise ScenarioError(f"unsupported weight rule {weights.rule!r}")
    total = 0.0
    for j in sorted(members):  # same summation order as the kernels
        total += float(x[j])
    return total / len(members)


def rcpc_step(g: ColoredGraph, x, i: int, F: int, weights: WeightRule | None = None) -> float:
    """Next value of normal node ``i`` under RCP-C."""
    return _weighted(x, considered_set(g, x, i, F, rescue=True), weights)


def wmsr_step(g: ColoredGraph, x, i: int, F: int, weights: WeightRule | None = None) -> float:
    """Next value of normal node ``i`` under WMSR (no color rescue)."""
    return _weighted(x, considered_set(g, x, i, F, rescue=False), weights)


# -- validation --------------------------------------------------------------------

def adversary_violations(g: ColoredGraph, adv: AdversaryModel) -> list[str]:
    """Names of the adversary-placement invariants that ``adv`` breaks."""
    problems = []
    bad = [v for v in adv.nodes if not (0 <= v < g.n)]
    if bad:
        return [f"adversary nodes {sorted(bad)} not in graph"]
    if adv.F < 0:
        problems.append("F must be >= 0")
    if len({g.colors[v] for v in adv.nodes}) > 1:
        problems.append("adversaries must share one color")
    if adv.scope is Scope.F_TOTAL:
        if len(adv.nodes) > adv.F:
            problems.append(f"F-total bound: {len(adv.nodes)} adversaries > F={adv.F}")
    else:
        for v in range(g.n):
            k = len(g.neighbors[v] & adv.nodes)
            if k > adv.F:
                problems.append(f"F-local bound: node {v} has {k} adversarial neighbors > F={adv.F}")
                break
    return problems


def validate_adversary_placement(g: ColoredGraph, adv: AdversaryModel) -> bool:
    return not adversary_violations(g, adv)


def validate_scenario(sc: Scenario) -> None:
    problems = adversary_violations(sc.graph, sc.adversary)
    if sc.T < 1:
        problems.append("horizon T must be >= 1")
    if not sc.eps > 0:
        problems.append("tolerance eps must be > 0")
    if sc.initial is not None and len(sc.initial) != sc.graph.n:
        problems.append(f"initial values have length {len(sc.initial)}, expected {sc.graph.n}")
    if sc.weights.rule != "uniform":
        problems.append(f"unsupported weight rule {sc.weights.rule!r}")
    elif sc.weights.alpha is not None:
        floor = 1.0 / (sc.graph.max_degree + 1)
        if not 0 < sc.weights.alpha < 1 or sc.weights.alpha > floor:
            problems.append(f"weight floor alpha={sc.weights.alpha} not met by uniform "
                            f"weights (smallest is {floor:.6g})")
    if problems:
        raise ScenarioError("; ".join(problems))


# -- simulation ----------------------------------------------------------------------

def _csr(g: ColoredGraph) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(g.n + 1, dtype=np.int64)
    idx = []
    for v in range(g.n):
        nb = sorted(g.neighbors[v])
        idx.extend(nb)
        ptr[v + 1] = ptr[v] + len(nb)
    return ptr, np.asarray(idx, dtype=np.int64)


def _prepare(sc: Scenario):
    validate_scenario(sc)
    g = sc.graph
    x0 = sc.initial_values()
    is_adv = np.zeros(g.n, dtype=np.bool_)
    nodes = sorted(sc.adversary.nodes)
    is_adv[nodes] = True
    adv_values = sc.adversary.strategy.trajectory(nodes, x0, sc.T)
    ptr, idx = _csr(g)
    return ptr, idx, g.color_array, x0, is_adv, adv_values


def run_simulation(sc: Scenario) -> Trace:
    """Simulate ``sc.T`` synchronous rounds and keep every state."""
    ptr, idx, colors, x0, is_adv, adv_values = _prepare(sc)
    states, *_ = kernels.simulate(ptr, idx, colors, x0, is_adv, adv_values,
                                  sc.adversary.F, sc.protocol is Protocol.RCPC, sc.T,
                                  sc.eps, False, True, SAFETY_ATOL)
    return Trace(states, ~is_adv, sc.protocol)


def simulate_outcome(sc: Scenario, early_stop: bool = True) -> Outcome:
    """Run without recording the trace.

    With ``early_stop`` the run ends at the first step where the normal
    spread drops below ``sc.eps``; under RCP-C the spread never increases
    again, so this is the same verdict as running to ``T``.
    """
    ptr, idx, colors, x0, is_adv, adv_values = _prepare(sc)
    _, final, steps, agree, safe = kernels.simulate(
        ptr, idx, colors, x0, is_adv, adv_values, sc.adversary.F,
        sc.protocol is Protocol.RCPC, sc.T, sc.eps, early_stop, False, SAFETY_ATOL)
    normal = ~is_adv
    spread = float(final[normal].max() - final[normal].min()) if normal.any() else 0.0
    return Outcome(int(steps), None if agree < 0 else int(agree), bool(safe), spread, final)


def check_safety(tr: Trace, atol: float = SAFETY_ATOL) -> bool:
    """Every normal value at every step inside [m[0], M[0]] (up to ``atol``
    of floating-point slack)."""
    if not tr.normal.any():
        return True
    vals = tr.states[:, tr.normal]
    lo, hi = vals[0].min(), vals[0].max()
    return bool((vals >= lo - atol).all() and (vals <= hi + atol).all())


def check_agreement(tr: Trace, eps: float) -> bool:
    if not eps > 0:
        raise ValueError("eps must be > 0")
    if not tr.normal.any():
        return True
    return bool(tr.spread[-1] < eps)


# -- necessity construction ------------------------------------------------------------

def necessity_witness(g: ColoredGraph, F: int, protocol: Protocol = Protocol.RCPC,
                      T: int = DEFAULT_T, eps: float = DEFAULT_EPS,
                      low: float = 0.0, high: float = 1.0) -> Scenario | None:
    """A stuck scenario for a graph that is not (F+1, F+1)-robust.

    The violating pair (S1, S2) comes from the checker (the colored one for
    RCP-C, the classical one for WMSR), choosing the pair that needs the
    fewest adversaries.  Its valid nodes become adversaries
    holding their set's value; S1 starts at ``low``, S2 at ``high`` and
    every other node halfway between.  Returns None if the graph is robust.
    """
    if F < 0:
        raise ScenarioError("F must be >= 0")
    check = is_rs_robust_colored if protocol is Protocol.RCPC else is_rs_robust_classic
    verdict = check(g, F + 1, F + 1, fewest_valid=True)
    if verdict.holds:
        return None
    w = verdict.witness
    work = g if protocol is Protocol.RCPC else g.with_colors([0] * g.n)
    adv = valid_nodes(work, w.s1, F + 1) | valid_nodes(work, w.s2, F + 1)
    x0 = np.full(g.n, (low + high) / 2)
    x0[sorted(w.s1)] = low
    x0[sorted(w.s2)] = high
    values = {v: float(x0[v]) for v in adv}
    return Scenario(g, x0, AdversaryModel(Scope.F_TOTAL, F, frozenset(adv), Constant(values)),
                    protocol, WeightRule(), T, eps, 0)


# -- file formats ------------------------------------------------------------------------

def scenario_from_dict(d: dict, base_dir: str | Path = ".") -> Scenario:
    if "graph" not in d:
        raise ScenarioError("scenario needs a 'graph' (path or inline object)")
    gref = d["graph"]
    if isinstance(gref, str):
        p = Path(gref)
        g = load_graph(p if p.is_absolute() else Path(base_dir) / p)
    else:
        g = graph_from_dict(gref)
    a = d.get("adversary", {})
    try:
        scope = Scope(a.get("scope", "F-total"))
    except ValueError:
        raise ScenarioError(f"unknown scope {a.get('scope')!r}") from None
    adv = AdversaryModel(scope, int(a.get("F", 0)), frozenset(int(v) for v in a.get("nodes", [])),
                         strategy_from_dict(a.get("strategy", {"kind": "constant"})))
    try:
        protocol = Protocol(str(d.get("protocol", "rcpc")).lower().replace("-", ""))
    except ValueError:
        raise ScenarioError(f"unknown protocol {d.get('protocol')!r}") from None
    w = d.get("weights", {})
    initial = d.get("initial")
    sc = Scenario(g, None if initial is None else np.asarray(initial, dtype=np.float64), adv,
                  protocol, WeightRule(w.get("rule", "uniform"), w.get("alpha")),
                  int(d.get("T", DEFAULT_T)), float(d.get("eps", DEFAULT_EPS)),
                  int(d.get("seed", 0)))
    validate_scenario(sc)
    return sc


def scenario_to_dict(sc: Scenario) -> dict:
    d = {"graph": sc.graph.to_dict(),
         "adversary": sc.adversary.to_dict(),
         "protocol": sc.protocol.value,
         "weights": sc.weights.to_dict(),
         "T": sc.T, "eps": sc.eps, "seed": sc.seed}
    if sc.initial is not None:
        d["initial"] = [float(v) for v in sc.initial]
    return d


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return scenario_from_dict(d, path.parent)


def save_scenario(sc: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n")


def write_trace_csv(tr: Trace, path: str | Path) -> Path:
    """CSV of all states (12 significant digits) plus ``<stem>.meta.json``
    listing the adversarial nodes.  Returns the sidecar path."""
    path = Path(path)
    n = tr.states.shape[1]
    lines = [",".join(["t"] + [f"node_{v}" for v in range(n)])]
    for t, row in enumerate(tr.states):
        lines.append(",".join([str(t)] + [format(float(v), ".12g") for v in row]))
    path.write_text("\n".join(lines) + "\n")
    side = path.with_suffix(".meta.json")
    side.write_text(json.dumps({"adversaries": tr.adversaries,
                                "protocol": tr.protocol.value}, indent=1) + "\n")
    return side


def read_trace_csv(path: str | Path) -> Trace:
    path = Path(path)
    rows = path.read_text().strip().splitlines()
    states = np.array([[float(v) for v in r.split(",")[1:]] for r in rows[1:]])
    meta = json.loads(path.with_suffix(".meta.json").read_text())
    normal = np.ones(states.shape[1], dtype=bool)
    normal[meta["adversaries"]] = False
    return Trace(states, normal, Protocol(meta.get("protocol", "rcpc")))


def same_color_subsets(g: ColoredGraph, max_size: int) -> Iterable[frozenset[int]]:
    """All nonempty single-color node sets of size <= ``max_size``."""
    from itertools import combinations
    for members in color_classes(g, range(g.n)).values():
        ms = sorted(members)
        for k in range(1, min(max_size, len(ms)) + 1):
            for c in combinations(ms, k):
                yield frozenset(c)


__all__ = [
    "AdversaryModel", "Constant", "DEFAULT_EPS", "DEFAULT_T", "Oscillate", "Outcome",
    "Protocol", "Ramp", "Scenario", "ScenarioError", "Scope", "Trace", "WeightRule",
    "adversary_violations", "check_agreement", "check_safety", "considered_set",
    "load_scenario", "necessity_witness", "partition_extremes", "rcpc_step",
    "read_trace_csv", "rescue_by_color", "run_simulation", "same_color_subsets",
    "save_scenario", "scenario_from_dict", "scenario_to_dict", "simulate_outcome",
    "strategy_from_dict", "validate_adversary_placement", "validate_scenario",
    "wmsr_step", "write_trace_csv",
]
