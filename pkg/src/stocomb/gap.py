"""Worst-case versus independent expectations of a monotone set function.

Fixing per-item marginals, the worst-case expectation is the optimum of a
small LP over all distributions with those marginals (one variable per
subset), and the correlation gap is its ratio to the expectation under the
independent product measure.  The split operation, which clones items into
equal-marginal copies, preserves the worst case and can only shrink the
independent side, and cost-sharing schemes transfer to split instances by
paying only the earliest copy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from . import caps
from ._kernels import bernoulli_weights
from .errors import CapExceeded, DegenerateInstance, UncertifiedScheme
from .lp import OPTIMAL, LinearProgram, solve_lp
from .setfun import E_RATIO, table
from .sharing import OrderedCostShareScheme, SchemeReport

GAP_TOL = 1e-9


@dataclass(frozen=True)
class GapInstance:
    """Ground set, nondecreasing cost oracle, and per-item marginals."""

    ground: tuple
    f: Callable[[frozenset], float]
    marginals: Mapping

    def __post_init__(self):
        object.__setattr__(self, "ground", tuple(self.ground))
        object.__setattr__(self, "marginals", dict(self.marginals))
        for i in self.ground:
            p = self.marginals[i]
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"marginal of {i!r} outside [0, 1]")

    def marginal_vector(self) -> np.ndarray:
        return np.array([self.marginals[i] for i in self.ground])


@dataclass(frozen=True)
class GapReport:
    worst_case: float
    independent: float
    kappa: float
    bound: float
    worst_distribution: dict


@dataclass(frozen=True)
class Estimate:
    value: float
    mode: str
    ci_halfwidth: float | None = None


@dataclass(frozen=True)
class SplitMap:
    """How many equal-marginal copies each item becomes."""

    copies: Mapping

    def __post_init__(self):
        object.__setattr__(self, "copies", dict(self.copies))
        for i, n in self.copies.items():
            if n < 1 or int(n) != n:
                raise ValueError(f"copy count for {i!r} must be a positive integer")

    def ground_of(self, inst: GapInstance) -> tuple:
        out = []
        for i in inst.ground:
            for k in range(1, self.copies.get(i, 1) + 1):
                out.append((i, k))
        return tuple(out)

    @staticmethod
    def project(subset: frozenset) -> frozenset:
        return frozenset(orig for orig, _k in subset)


def _mask_subset(ground: tuple, mask: int) -> frozenset:
    return frozenset(ground[i] for i in range(len(ground)) if (mask >> i) & 1)


def worst_case_expectation(inst: GapInstance):
    """Optimal value and attaining distribution of the fixed-marginal LP.

    Maximizes the expectation of f over all subset distributions whose
    item marginals match the instance; solved as a dense LP with one column
    per subset.
    """
    n = len(inst.ground)
    if n > caps.cap("STOCOMB_CAP_GAP_CLIENTS"):
        raise CapExceeded("ground set too large for the worst-case LP")
    size = 1 << n
    values = table(inst.f, inst.ground)
    p = inst.marginal_vector()
    # Equality rows doubled into >= pairs: item marginals, then total mass.
    rows = []
    rhs = []
    for i in range(n):
        row = np.array([(mask >> i) & 1 for mask in range(size)], dtype=float)
        rows.extend([row, -row])
        rhs.extend([p[i], -p[i]])
    ones = np.ones(size)
    rows.extend([ones, -ones])
    rhs.extend([1.0, -1.0])
    res = solve_lp(LinearProgram(-values, np.array(rows), np.array(rhs)))
    if res.status != OPTIMAL:
        raise DegenerateInstance(f"worst-case LP ended {res.status}")
    alpha = res.primal
    dist = {_mask_subset(inst.ground, mask): float(alpha[mask])
            for mask in range(size) if alpha[mask] > 1e-12}
    return -res.value, dist


def independent_expectation(inst: GapInstance, mode: str = "exact",
                            rng=None, runs: int = 100_000) -> Estimate:
    """Expectation of f under the independent product measure."""
    n = len(inst.ground)
    p = inst.marginal_vector()
    if mode == "exact":
        if n > caps.cap("STOCOMB_CAP_SUPPORT_CLIENTS"):
            raise CapExceeded("exact product expectation needs 2^|V| terms")
        weights = bernoulli_weights(p)
        values = table(inst.f, inst.ground)
        return Estimate(float(weights @ values), "exact")
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        raise ValueError("monte_carlo mode needs a random generator")
    draws = rng.random((runs, n)) < p
    vals = np.empty(runs)
    for t in range(runs):
        vals[t] = inst.f(frozenset(inst.ground[i] for i in range(n) if draws[t, i]))
    half = 2.5758293035489004 * float(vals.std(ddof=1)) / math.sqrt(runs)
    return Estimate(float(vals.mean()), "monte_carlo", half)


def correlation_gap(inst: GapInstance, eta: float = 1.0,
                    beta: float = 1.0) -> GapReport:
    """Worst-case over independent expectation, with the claimed bound."""
    worst, dist = worst_case_expectation(inst)
    indep = independent_expectation(inst).value
    if indep <= 1e-12:
        raise DegenerateInstance("independent expectation is zero; ratio undefined")
    return GapReport(
        worst_case=worst,
        independent=indep,
        kappa=worst / indep,
        bound=eta * beta * E_RATIO,
        worst_distribution=dist,
    )


def split(inst: GapInstance, split_map: SplitMap) -> GapInstance:
    """Clone items into equal-marginal copies; cost looks only at originals."""
    ground = split_map.ground_of(inst)
    marginals = {(i, k): inst.marginals[i] / split_map.copies.get(i, 1)
                 for (i, k) in ground}
    base_f = inst.f
    cache: dict = {}

    def f(subset: frozenset) -> float:
        key = frozenset(subset)
        if key not in cache:
            cache[key] = base_f(SplitMap.project(key))
        return cache[key]

    return GapInstance(ground=ground, f=f, marginals=marginals)


def split_scheme(scheme: OrderedCostShareScheme,
                 split_map: SplitMap) -> OrderedCostShareScheme:
    """Transfer an ordered scheme to a split instance.

    Scanning the order, the first copy of each original inherits that
    original's share in the projected instance; every later copy gets zero.
    """
    base_chi = scheme.chi

    def chi(copy, subset: frozenset, order: tuple) -> float:
        if copy not in subset:
            raise ValueError(f"{copy!r} is not in the served set")
        if frozenset(order) != frozenset(subset):
            raise ValueError("order must enumerate exactly the served set")
        reps = {}
        rep_order = []
        for c in order:
            orig = c[0]
            if orig not in reps:
                reps[orig] = c
                rep_order.append(orig)
        if reps[copy[0]] != copy:
            return 0.0
        projected = frozenset(rep_order)
        return base_chi(copy[0], projected, tuple(rep_order))

    return OrderedCostShareScheme(chi=chi, eta=scheme.eta, beta=scheme.beta,
                                  certified=scheme.certified)


@dataclass(frozen=True)
class SplitReport:
    monotone: bool
    worst_case_preserved: bool
    independent_shrinks: bool
    original_worst: float
    split_worst: float
    original_independent: float
    split_independent: float

    @property
    def ok(self) -> bool:
        return (self.monotone and self.worst_case_preserved
                and self.independent_shrinks)


def check_split_invariants(inst: GapInstance, split_map: SplitMap,
                           value_tol: float = 1e-7) -> SplitReport:
    """Monotonicity transfer, worst-case preservation, independent shrinkage."""
    new = split(inst, split_map)
    n = len(new.ground)
    if n > caps.cap("STOCOMB_CAP_GAP_CLIENTS"):
        raise CapExceeded("split instance too large for the worst-case LP")
    vals = table(new.f, new.ground)
    monotone = True
    for mask in range(1 << n):
        for i in range(n):
            if not (mask >> i) & 1 and vals[mask | (1 << i)] < vals[mask]:
                monotone = False
    worst_old, _ = worst_case_expectation(inst)
    worst_new, _ = worst_case_expectation(new)
    ind_old = independent_expectation(inst).value
    ind_new = independent_expectation(new).value
    return SplitReport(
        monotone=monotone,
        worst_case_preserved=abs(worst_old - worst_new) <= value_tol,
        independent_shrinks=ind_new <= ind_old + GAP_TOL,
        original_worst=worst_old,
        split_worst=worst_new,
        original_independent=ind_old,
        split_independent=ind_new,
    )


def verify_gap_bound(inst: GapInstance, eta: float, beta: float,
                     certificate) -> bool:
    """True when kappa stays within eta * beta * e/(e-1) (small slack).

    ``certificate`` must be evidence that some (eta, beta) scheme exists for
    this cost function: either a measured :class:`SchemeReport` within the
    claimed factors, or a certified scheme construction.
    """
    if certificate is None:
        raise UncertifiedScheme("no scheme evidence supplied")
    if isinstance(certificate, SchemeReport):
        if (certificate.eta_hat > eta + GAP_TOL
                or certificate.beta_hat > beta + GAP_TOL
                or not certificate.cross_monotone):
            raise UncertifiedScheme("measured factors exceed the claimed ones")
    elif isinstance(certificate, OrderedCostShareScheme):
        if not certificate.certified:
            raise UncertifiedScheme("scheme construction is not certified")
        if certificate.eta > eta + GAP_TOL or certificate.beta > beta + GAP_TOL:
            raise UncertifiedScheme("scheme claims weaker factors than requested")
    else:
        raise UncertifiedScheme(f"unrecognized certificate {certificate!r}")
    report = correlation_gap(inst, eta=eta, beta=beta)
    return report.kappa <= report.bound + 1e-6
