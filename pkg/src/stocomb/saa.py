"""Sample-average pipeline over two-stage stochastic linear programs.

An instance carries first-stage prices over a box polytope and a list of
scenario blocks; each block prices extra purchases and auxiliary variables
and couples them to the first stage through a nonnegative technology
matrix.  The expected-cost objective is convex and piecewise linear, its
subgradients come for free from the recourse duals, and the minimizer here
is plain projected subgradient descent.  The deterministic-equivalent LP
(one big program expanding all scenarios) is the exact oracle everything is
measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import caps
from .errors import CapExceeded, Infeasible, Unbounded
from .lp import (
    INFEASIBLE,
    LinearProgram,
    UNBOUNDED,
    solve_lp,
    solve_prepared,
)

PROB_TOL = 1e-12


@dataclass(frozen=True)
class ScenarioBlock:
    """One scenario: probability, recourse prices, and its constraint block.

    The recourse LP for first-stage vector x is

        min recourse_cost . r + aux_cost . s
        s.t. technology @ r + coupling @ s >= requirement - technology @ x,
             r, s >= 0

    ``technology`` must be entrywise nonnegative.
    """

    probability: float
    recourse_cost: np.ndarray
    aux_cost: np.ndarray
    coupling: np.ndarray      # multiplies the auxiliary variables
    technology: np.ndarray    # multiplies both recourse purchases and x
    requirement: np.ndarray

    def __post_init__(self):
        for name in ("recourse_cost", "aux_cost", "requirement"):
            object.__setattr__(self, name, np.atleast_1d(
                np.asarray(getattr(self, name), dtype=float)))
        k = self.requirement.size
        m = self.recourse_cost.size
        n = self.aux_cost.size
        tech = np.asarray(self.technology, dtype=float).reshape(k, m)
        coup = np.asarray(self.coupling, dtype=float).reshape(k, n)
        object.__setattr__(self, "technology", tech)
        object.__setattr__(self, "coupling", coup)
        if (tech < 0).any():
            raise ValueError("technology matrix must be nonnegative")
        if self.probability < 0:
            raise ValueError("negative scenario probability")


@dataclass(frozen=True)
class Polytope:
    """A box with optional extra linear rows (sense >=) and a radius bound."""

    lower: np.ndarray
    upper: np.ndarray
    rows: np.ndarray | None = None
    row_rhs: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        if self.rows is not None:
            object.__setattr__(self, "rows",
                               np.atleast_2d(np.asarray(self.rows, dtype=float)))
            object.__setattr__(self, "row_rhs",
                               np.atleast_1d(np.asarray(self.row_rhs, dtype=float)))
        if self.radius is None:
            object.__setattr__(self, "radius",
                               float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi)))))

    @property
    def dim(self) -> int:
        return self.lower.size

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if (x < self.lower - tol).any() or (x > self.upper + tol).any():
            return False
        if self.rows is not None and (self.rows @ x < self.row_rhs - tol).any():
            return False
        return True

    def clip(self, x) -> np.ndarray:
        return np.minimum(np.maximum(x, self.lower), self.upper)


def unit_box(m: int) -> Polytope:
    return Polytope(np.zeros(m), np.ones(m))


@dataclass(frozen=True)
class StochasticLPInstance:
    first_stage_cost: np.ndarray
    polytope: Polytope
    scenarios: tuple

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.first_stage_cost, dtype=float))
        object.__setattr__(self, "first_stage_cost", w)
        object.__setattr__(self, "scenarios", tuple(self.scenarios))
        if self.polytope.dim != w.size:
            raise ValueError("polytope dimension must match the cost vector")
        total = sum(b.probability for b in self.scenarios)
        if self.scenarios and abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"scenario probabilities sum to {total}, not 1")
        for b in self.scenarios:
            if b.recourse_cost.size != w.size:
                raise ValueError("recourse cost length must match the first stage")

    def probabilities(self) -> np.ndarray:
        return np.array([b.probability for b in self.scenarios])

    def price_ratio(self) -> float:
        """max(1, worst scenario-to-first-stage price ratio), the lambda bound."""
        worst = 1.0
        w = self.first_stage_cost
        for b in self.scenarios:
            for e in range(w.size):
                if w[e] > 0:
                    worst = max(worst, b.recourse_cost[e] / w[e])
                elif b.recourse_cost[e] > 0:
                    return math.inf
        return worst

    def lipschitz_bound(self) -> float:
        return self.price_ratio() * float(np.linalg.norm(self.first_stage_cost))


@dataclass(frozen=True)
class SubgradientVector:
    """A vector claimed to be an omega-subgradient (omega = 0 means exact)."""

    d: np.ndarray
    omega: float = 0.0


@dataclass(frozen=True)
class GridSpec:
    """Parameters of the extended grid and the derived level count.

    ``levels`` is the dyadic depth ceil(log2(2 K R / epsilon)) and ``omega``
    the per-level subgradient slack gamma / (8 levels).
    """

    epsilon: float
    gamma: float
    lipschitz: float
    radius: float

    def __post_init__(self):
        if not (0 < self.gamma <= 1):
            raise ValueError("gamma must lie in (0, 1]")
        if min(self.epsilon, self.lipschitz, self.radius) <= 0:
            raise ValueError("epsilon, lipschitz, and radius must be positive")

    @property
    def levels(self) -> int:
        return max(1, math.ceil(math.log2(
            2.0 * self.lipschitz * self.radius / self.epsilon)))

    @property
    def omega(self) -> float:
        return self.gamma / (8.0 * self.levels)

    def spacing(self, m: int) -> float:
        return self.epsilon / (self.lipschitz * self.levels * math.sqrt(m))


def _prepared_blocks(instance: StochasticLPInstance):
    """Per-scenario constraint matrices, cached once per hot loop."""
    out = []
    for b in instance.scenarios:
        A = np.hstack([b.technology, b.coupling])
        c = np.concatenate([b.recourse_cost, b.aux_cost])
        out.append((A, c, b.technology, b.requirement))
    return out


def _recourse_prepared(prepared, index, x):
    A, c, tech, req = prepared[index]
    status, y, duals, value = solve_prepared(A, req - tech @ x, c)
    if status == 1:
        raise Infeasible(f"recourse LP infeasible in scenario {index}")
    if status == 2:
        raise Unbounded(f"recourse LP unbounded in scenario {index}")
    return value, duals


def recourse_value(instance: StochasticLPInstance, index: int, x):
    """Optimal recourse cost and dual vector for one scenario at x."""
    x = np.asarray(x, dtype=float)
    return _recourse_prepared(_prepared_blocks(instance), index, x)


def h_exact(instance: StochasticLPInstance, x, weights=None) -> float:
    """First-stage cost plus the weighted sum of exact recourse values."""
    x = np.asarray(x, dtype=float)
    if weights is None:
        weights = instance.probabilities()
    prepared = _prepared_blocks(instance)
    total = float(instance.first_stage_cost @ x)
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        value, _ = _recourse_prepared(prepared, i, x)
        total += w * value
    return total


def subgradient_at(instance: StochasticLPInstance, x,
                   weights=None) -> SubgradientVector:
    """Dual-formula subgradient: first-stage prices minus the weighted
    pullback of the recourse duals through each technology matrix."""
    x = np.asarray(x, dtype=float)
    if weights is None:
        weights = instance.probabilities()
    prepared = _prepared_blocks(instance)
    d = instance.first_stage_cost.astype(float).copy()
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        _, duals = _recourse_prepared(prepared, i, x)
        d -= w * (prepared[i][2].T @ duals)
    return SubgradientVector(d=d, omega=0.0)


def _value_and_subgradient(instance, prepared, x, weights):
    value = float(instance.first_stage_cost @ x)
    d = instance.first_stage_cost.astype(float).copy()
    for i, w in enumerate(weights):
        if w == 0.0:
            continue
        v, duals = _recourse_prepared(prepared, i, x)
        value += w * v
        d -= w * (prepared[i][2].T @ duals)
    return value, d


def sample_size(m: int, price_ratio: float, lipschitz: float, radius: float,
                epsilon: float, delta: float, gamma: float) -> int:
    """Sample count sufficient for the high-probability guarantee.

    Derived from the dyadic level count, the per-level slack, and a grid
    union bound; astronomically conservative by design and exercised here
    only as a formula.
    """
    return math.ceil(sample_size_raw(m, price_ratio, lipschitz, radius,
                                     epsilon, delta, gamma))


def sample_size_raw(m: int, price_ratio: float, lipschitz: float, radius: float,
                    epsilon: float, delta: float, gamma: float) -> float:
    if not (0 < delta < 1):
        raise ValueError("delta must lie in (0, 1)")
    spec = GridSpec(epsilon=epsilon, gamma=gamma,
                    lipschitz=lipschitz, radius=radius)
    levels = spec.levels
    omega = spec.omega
    grid_bound = levels * (2.0 * radius / spec.spacing(m)) ** (2 * m)
    lead = 4.0 * (1.0 + price_ratio) ** 2 / (3.0 * omega ** 2)
    return lead * math.log(2.0 * m * grid_bound / delta)


def build_sample_average(instance: StochasticLPInstance, n_samples: int,
                         rng) -> StochasticLPInstance:
    """Instance reweighted by empirical scenario frequencies.

    Scenarios never sampled are dropped; the rest keep their order with
    probability count/n.
    """
    probs = instance.probabilities()
    counts = rng.multinomial(n_samples, probs)
    blocks = []
    for b, c in zip(instance.scenarios, counts):
        if c == 0:
            continue
        blocks.append(ScenarioBlock(
            probability=c / n_samples,
            recourse_cost=b.recourse_cost,
            aux_cost=b.aux_cost,
            coupling=b.coupling,
            technology=b.technology,
            requirement=b.requirement,
        ))
    return StochasticLPInstance(instance.first_stage_cost, instance.polytope,
                                tuple(blocks))


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    value: float
    converged: bool
    iterations: int
    trace: tuple = field(repr=False, default=())


def minimize(instance: StochasticLPInstance, tolerance: float = 1e-6,
             max_iterations: int = 10_000, window: int = 500,
             keep_trace: bool = False) -> MinimizeResult:
    """Projected subgradient descent over the instance's box polytope.

    Steps follow (R / G) / sqrt(t) with G the Lipschitz bound; the loop
    stops early once the best value has not improved by ``tolerance`` within
    ``window`` iterations, and flags non-convergence otherwise while still
    returning the best iterate.
    """
    poly = instance.polytope
    if poly.rows is not None:
        raise ValueError("the subgradient minimizer supports box polytopes only")
    prepared = _prepared_blocks(instance)
    weights = instance.probabilities()
    radius = poly.radius
    gbound = instance.lipschitz_bound()
    if not math.isfinite(gbound) or gbound <= 0.0:
        gbound = max(1.0, float(np.linalg.norm(instance.first_stage_cost)))
    x = poly.clip(0.5 * (poly.lower + poly.upper))
    best_x = x.copy()
    best_value = math.inf
    last_improve = 0
    trace = []
    converged = False
    t = 0
    for t in range(1, max_iterations + 1):
        value, d = _value_and_subgradient(instance, prepared, x, weights)
        if value < best_value - tolerance:
            best_value = value
            best_x = x.copy()
            last_improve = t
        elif value < best_value:
            best_value = value
            best_x = x.copy()
        step = (radius / gbound) / math.sqrt(t)
        if keep_trace:
            trace.append((t, float(value), float(step)))
        if t - last_improve >= window:
            converged = True
            break
        x = poly.clip(x - step * d)
    return MinimizeResult(best_x, best_value, converged, t, tuple(trace))


def base_grid(spec: GridSpec, polytope: Polytope) -> np.ndarray:
    """Lattice of spacing epsilon/(K * levels * sqrt(m)) inside the polytope."""
    m = polytope.dim
    if m > 3:
        raise CapExceeded("grids are validation-scale: m <= 3")
    spacing = spec.spacing(m)
    axes = []
    for i in range(m):
        lo = math.ceil(polytope.lower[i] / spacing - 1e-12)
        hi = math.floor(polytope.upper[i] / spacing + 1e-12)
        axes.append(np.arange(lo, hi + 1) * spacing)
    mesh = np.meshgrid(*axes, indexing="ij")
    base = np.stack([g.ravel() for g in mesh], axis=1) if m else np.zeros((0, 0))
    keep = np.array([polytope.contains(p) for p in base], dtype=bool)
    return base[keep]


def extended_grid(spec: GridSpec, polytope: Polytope) -> np.ndarray:
    """Base lattice inside the polytope, extended by dyadic interpolation.

    For every ordered pair of base points the points x + 2^-i (y - x) for
    i = 1..levels are appended.  The total point count is capped.
    """
    base = base_grid(spec, polytope)
    nbase = base.shape[0]
    total = nbase + nbase * nbase * 2 * spec.levels
    if total > caps.cap("STOCOMB_CAP_GRID_POINTS"):
        raise CapExceeded(f"extended grid would hold about {total} points")
    points = [base]
    fractions = [2.0 ** -(i + 1) for i in range(spec.levels)]
    for frac in fractions:
        for a in range(nbase):
            diff = base - base[a]
            points.append(base[a] + frac * diff)
            points.append(base - frac * diff)
    stacked = np.vstack(points)
    return np.unique(np.round(stacked, 12), axis=0)


def check_omega_subgradient(h_oracle, x, d, omega: float, polytope: Polytope,
                            trials: int, rng, tol: float = 1e-7):
    """Sample the polytope and test the relaxed subgradient inequality.

    Returns ``(True, None)`` or ``(False, witness_point)``.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    hx = h_oracle(x)
    for _ in range(trials):
        y = rng.uniform(polytope.lower, polytope.upper)
        if polytope.rows is not None:
            for _retry in range(200):
                if polytope.contains(y):
                    break
                y = rng.uniform(polytope.lower, polytope.upper)
        if h_oracle(y) - hx < d @ (y - x) - omega * hx - tol:
            return False, y
    return True, None


# -- Facility-location encoding and the deterministic equivalent -------------

@dataclass(frozen=True)
class TwoStageUFL:
    """Facility-location data for the stochastic-LP encoding.

    Opening a facility costs ``open_cost`` now or ``second_open_cost`` after
    the scenario is revealed; ``service_cost[i, j]`` prices assigning client
    j to facility i.  Scenarios list (client subset, probability).
    """

    facilities: tuple
    clients: tuple
    open_cost: np.ndarray
    second_open_cost: np.ndarray
    service_cost: np.ndarray
    scenarios: tuple

    def __post_init__(self):
        object.__setattr__(self, "open_cost",
                           np.asarray(self.open_cost, dtype=float))
        object.__setattr__(self, "second_open_cost",
                           np.asarray(self.second_open_cost, dtype=float))
        object.__setattr__(self, "service_cost",
                           np.asarray(self.service_cost, dtype=float).reshape(
                               len(self.facilities), len(self.clients)))
        object.__setattr__(self, "scenarios",
                           tuple((frozenset(s), float(p)) for s, p in self.scenarios))


def encode_ufl(data: TwoStageUFL) -> StochasticLPInstance:
    """Stochastic-LP blocks for two-stage facility location.

    Per scenario, auxiliary variables are the assignments of active clients;
    each client needs its assignments to sum to at least one, and an
    assignment is allowed only up to the opened mass of its facility,
    first-stage or recourse.
    """
    nf = len(data.facilities)
    blocks = []
    for subset, p in data.scenarios:
        active = [j for j in data.clients if j in subset]
        cindex = {j: t for t, j in enumerate(active)}
        na = len(active)
        nvar_aux = nf * na
        rows = na + nf * na
        coupling = np.zeros((rows, nvar_aux))
        technology = np.zeros((rows, nf))
        requirement = np.zeros(rows)
        # Coverage: for each active client, assignments sum to >= 1.
        for j in active:
            r = cindex[j]
            for i in range(nf):
                coupling[r, i * na + cindex[j]] = 1.0
            requirement[r] = 1.0
        # Linking: assignment (i, j) needs facility i opened in some stage.
        for i in range(nf):
            for j in active:
                r = na + i * na + cindex[j]
                coupling[r, i * na + cindex[j]] = -1.0
                technology[r, i] = 1.0
                requirement[r] = 0.0
        aux_cost = np.array([data.service_cost[i, data.clients.index(j)]
                             for i in range(nf) for j in active])
        blocks.append(ScenarioBlock(
            probability=p,
            recourse_cost=data.second_open_cost,
            aux_cost=aux_cost if na else np.zeros(0),
            coupling=coupling if na else np.zeros((rows, 0)),
            technology=technology,
            requirement=requirement,
        ))
    return StochasticLPInstance(
        first_stage_cost=data.open_cost,
        polytope=unit_box(nf),
        scenarios=tuple(blocks),
    )


def deterministic_equivalent(instance: StochasticLPInstance) -> LinearProgram:
    """One LP over (x, all scenario variables) with the exact objective."""
    m = instance.first_stage_cost.size
    sizes = [(b.recourse_cost.size, b.aux_cost.size) for b in instance.scenarios]
    nvar = m + sum(mr + ns for mr, ns in sizes)
    rows_n = sum(b.requirement.size for b in instance.scenarios)
    poly = instance.polytope
    lower_idx = np.nonzero(poly.lower > 0)[0]
    extra = (0 if poly.rows is None else poly.rows.shape[0]) + lower_idx.size
    A = np.zeros((rows_n + extra, nvar))
    b_vec = np.zeros(rows_n + extra)
    c = np.zeros(nvar)
    c[:m] = instance.first_stage_cost
    col = m
    row = 0
    for blk, (mr, ns) in zip(instance.scenarios, sizes):
        k = blk.requirement.size
        A[row:row + k, :m] = blk.technology
        A[row:row + k, col:col + mr] = blk.technology
        A[row:row + k, col + mr:col + mr + ns] = blk.coupling
        b_vec[row:row + k] = blk.requirement
        c[col:col + mr] = blk.probability * blk.recourse_cost
        c[col + mr:col + mr + ns] = blk.probability * blk.aux_cost
        col += mr + ns
        row += k
    if poly.rows is not None:
        nr = poly.rows.shape[0]
        A[rows_n:rows_n + nr, :m] = poly.rows
        b_vec[rows_n:rows_n + nr] = poly.row_rhs
        row = rows_n + nr
    else:
        row = rows_n
    for t, i in enumerate(lower_idx):
        A[row + t, i] = 1.0
        b_vec[row + t] = poly.lower[i]
    upper = np.full(nvar, np.inf)
    upper[:m] = poly.upper
    lp = LinearProgram(c, A, b_vec, upper_bounds=upper)
    return lp


def solve_deterministic_equivalent(instance: StochasticLPInstance):
    """Exact optimum (value, x) of the two-stage objective."""
    lp = deterministic_equivalent(instance)
    res = solve_lp(lp)
    if res.status == INFEASIBLE:
        raise Infeasible("deterministic equivalent is infeasible")
    if res.status == UNBOUNDED:
        raise Unbounded("deterministic equivalent is unbounded")
    m = instance.first_stage_cost.size
    return res.value, res.primal[:m]
