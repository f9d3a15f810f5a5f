"""Exact and approximate solvers for weighted Max CSP instances.

The exact route exhausts all d^n assignments (an oracle for tests and for
validating rewritten instances, not an algorithm with good asymptotics).
The approximate route derandomizes the uniform random assignment by
conditional expectations: variables are fixed one at a time to the value
maximizing the expected satisfied weight of a uniform completion, so the
final cost is at least the initial expectation, which is at least
total_weight / d^max_arity when every constraint is satisfiable as applied.

Also here: per-variable occurrence counting (a variable occurring t times
in a constraint of weight s contributes t*s) and the classic graph
encoding with one disequality constraint per edge, whose optimum is the
maximum k-colourable subgraph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .core import FORMAT_VERSION, Constraint, Instance, _check_format, neq_predicate

DEFAULT_BUDGET = 10**7


def brute_force_opt(
    instance: Instance, budget: int = DEFAULT_BUDGET
) -> tuple[dict[str, int], int]:
    """Exact optimum by exhaustion; the lexicographically least maximizer wins.

    Raises when d^n exceeds the evaluation budget.
    """
    d = instance.domain_size
    n = len(instance.variables)
    if d**n > budget:
        raise ValueError(f"assignment space {d}^{n} exceeds budget {budget}")
    best_values: tuple[int, ...] | None = None
    best_cost = -1
    for values in itertools.product(range(d), repeat=n):
        assignment = dict(zip(instance.variables, values))
        cost = instance.evaluate(assignment)
        if cost > best_cost:
            best_values, best_cost = values, cost
    return dict(zip(instance.variables, best_values)), best_cost


def _expected_weight(instance: Instance, fixed: Mapping[str, int]) -> Fraction:
    # exact expectation of the satisfied weight when the unfixed variables
    # are completed uniformly at random
    d = instance.domain_size
    total = Fraction(0)
    for c in instance.constraints:
        pred = instance.predicates[c.predicate]
        free = [i for i, v in enumerate(c.scope) if v not in fixed]
        satisfied = 0
        for values in itertools.product(range(d), repeat=len(free)):
            args = [fixed.get(v, 0) for v in c.scope]
            for i, val in zip(free, values):
                args[i] = val
            satisfied += pred.evaluate(args)
        total += Fraction(c.weight * satisfied, d ** len(free))
    return total


def approx_solve(instance: Instance) -> tuple[dict[str, int], int]:
    """Greedy conditional-expectation assignment.

    Each step keeps the expected satisfied weight from decreasing, so the
    result is at least total_weight / d^max_arity whenever each constraint
    is satisfiable as applied (automatic for non-trivial predicates on
    distinct scope variables; a repeated variable can defeat it).  Ties
    break toward the lowest domain value.
    """
    fixed: dict[str, int] = {}
    for var in instance.variables:
        best_value, best_expectation = 0, None
        for value in range(instance.domain_size):
            fixed[var] = value
            expectation = _expected_weight(instance, fixed)
            if best_expectation is None or expectation > best_expectation:
                best_value, best_expectation = value, expectation
        fixed[var] = best_value
    return fixed, instance.evaluate(fixed)


def occurrence_stats(instance: Instance) -> tuple[dict[str, int], int]:
    """Occurrence count per variable and the maximum over them.

    A variable appearing t times in the scope of a weight-s constraint
    contributes t*s (weight counts as copies of the constraint).
    """
    counts = {v: 0 for v in instance.variables}
    for c in instance.constraints:
        for v in c.scope:
            counts[v] += c.weight
    return counts, max(counts.values(), default=0)


# ---------------------------------------------------------------------------
# graphs


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices 0..n-1 with positive integer edge weights."""

    vertices: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.vertices < 0:
            raise ValueError("vertex count must be non-negative")
        normalized = []
        for e in self.edges:
            if len(e) == 2:
                u, v, w = e[0], e[1], 1
            else:
                u, v, w = e
            if not 0 <= u < self.vertices or not 0 <= v < self.vertices:
                raise ValueError(f"edge ({u}, {v}) outside vertex range")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not isinstance(w, int) or w < 1:
                raise ValueError(f"edge weights must be positive integers, got {w!r}")
            normalized.append((u, v, w))
        object.__setattr__(self, "edges", tuple(normalized))

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "vertices": self.vertices,
            "edges": [[u, v] if w == 1 else [u, v, w] for u, v, w in self.edges],
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "Graph":
        _check_format(payload, "graph")
        return cls(int(payload["vertices"]), tuple(tuple(e) for e in payload["edges"]))


def graph_to_maxkcut_instance(graph: Graph, k: int) -> Instance:
    """One k-ary disequality constraint per edge; Opt = max k-colourable subgraph."""
    if k < 2:
        raise ValueError("need at least two colours")
    variables = tuple(f"v{i}" for i in range(graph.vertices))
    constraints = tuple(
        Constraint("neq", (f"v{u}", f"v{v}"), w) for u, v, w in graph.edges
    )
    return Instance(k, {"neq": neq_predicate(k)}, variables, constraints)
