"""Small named instances used across the documentation and the test suite."""

from __future__ import annotations

from .gap import GapInstance
from .model import Explicit
from .problems import set_cover_problem, steiner_problem
from .setfun import weighted_rank


def tri3(sigma: float = 1.0):
    """Triangle graph on vertices 1,2,3 with edge costs 1, 1, 3."""
    return steiner_problem(
        vertices=("1", "2", "3"),
        edges={"e12": ("1", "2"), "e23": ("2", "3"), "e13": ("1", "3")},
        costs={"e12": 1.0, "e23": 1.0, "e13": 3.0},
        sigma=sigma,
    )


def cov3(sigma: float = 1.0):
    """Three clients covered by sets {1,2}, {2,3}, {3}, all unit cost."""
    return set_cover_problem(
        clients=("1", "2", "3"),
        sets={"sA": ("1", "2"), "sB": ("2", "3"), "sC": ("3",)},
        costs={"sA": 1.0, "sB": 1.0, "sC": 1.0},
        sigma=sigma,
    )


def edge1(q: float = 0.5, sigma: float = 2.0):
    """One client, one unit-cost element that serves it; the client shows up
    with probability q.  Returns (problem, distribution)."""
    problem = set_cover_problem(
        clients=("j",),
        sets={"e": ("j",)},
        costs={"e": 1.0},
        sigma=sigma,
    )
    dist = Explicit(((frozenset({"j"}), q), (frozenset(), 1.0 - q)))
    return problem, dist


def gap2():
    """Two items, half marginals, cost min(|S|, 1); the gap ratio is 4/3."""
    return GapInstance(("a", "b"), weighted_rank({"a": 1.0, "b": 1.0}, 1.0),
                       {"a": 0.5, "b": 0.5})
