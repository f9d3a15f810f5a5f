"""Solver tests: oracle cross-check, approximation bound, graph encoding."""

import itertools
import math
import random

import pytest

from mcsp.core import Constraint, Instance, Predicate, neq_predicate, unary_subset_predicate
from mcsp.solver import (
    Graph,
    approx_solve,
    brute_force_opt,
    graph_to_maxkcut_instance,
    occurrence_stats,
)


def reference_opt(instance):
    # independent exhaustion: sums predicate lookups directly
    best = -1
    for values in itertools.product(
        range(instance.domain_size), repeat=len(instance.variables)
    ):
        a = dict(zip(instance.variables, values))
        cost = sum(
            c.weight
            for c in instance.constraints
            if instance.predicates[c.predicate].evaluate([a[v] for v in c.scope])
        )
        best = max(best, cost)
    return best


def random_instance(rng, max_vars=4, max_arity=2):
    d = rng.randint(2, 3)
    n = rng.randint(1, max_vars)
    variables = tuple(f"x{i}" for i in range(n))
    predicates = {}
    constraints = []
    for i in range(rng.randint(1, 5)):
        m = rng.randint(1, min(max_arity, n))
        table = [rng.randint(0, 1) for _ in range(d**m)]
        if not any(table):
            table[rng.randrange(len(table))] = 1
        predicates[f"p{i}"] = Predicate(d, m, tuple(table))
        # distinct scope variables keep every constraint satisfiable as
        # applied, the premise of the expectation bound
        scope = tuple(rng.sample(variables, m))
        constraints.append(Constraint(f"p{i}", scope, rng.randint(1, 3)))
    return Instance(d, predicates, variables, tuple(constraints))


def test_brute_force_matches_reference():
    rng = random.Random(30)
    for _ in range(100):
        inst = random_instance(rng)
        _, cost = brute_force_opt(inst)
        assert cost == reference_opt(inst)


def test_brute_force_prefers_lexicographic():
    inst = Instance(
        2,
        {"neq": neq_predicate(2), "u_0": unary_subset_predicate(2, (0,))},
        ("x", "y"),
        (Constraint("neq", ("x", "y")), Constraint("u_0", ("x",))),
    )
    assignment, cost = brute_force_opt(inst)
    assert cost == 2
    assert assignment == {"x": 0, "y": 1}


def test_brute_force_budget():
    inst = Instance(2, {}, tuple(f"x{i}" for i in range(24)), ())
    with pytest.raises(ValueError):
        brute_force_opt(inst)
    small = Instance(2, {}, ("x", "y"), ())
    assert brute_force_opt(small, budget=4)[1] == 0
    with pytest.raises(ValueError):
        brute_force_opt(small, budget=3)


def test_approx_bound_random():
    rng = random.Random(31)
    for _ in range(1000):
        inst = random_instance(rng, max_vars=3)
        assignment, cost = approx_solve(inst)
        a = max(inst.predicates[c.predicate].arity for c in inst.constraints)
        assert cost >= math.ceil(inst.total_weight() / inst.domain_size**a)
        assert inst.evaluate(assignment) == cost


def test_approx_below_optimum():
    rng = random.Random(32)
    for _ in range(100):
        inst = random_instance(rng)
        assert approx_solve(inst)[1] <= brute_force_opt(inst)[1]


def test_approx_single_constraint_is_exact():
    rng = random.Random(33)
    for _ in range(50):
        d = rng.randint(2, 4)
        table = [rng.randint(0, 1) for _ in range(d**2)]
        table[rng.randrange(d**2)] = 1
        inst = Instance(
            d,
            {"p": Predicate(d, 2, tuple(table))},
            ("x", "y"),
            (Constraint("p", ("x", "y"), 5),),
        )
        assert approx_solve(inst)[1] == 5


def test_approx_tie_breaks_low():
    inst = Instance(2, {"neq": neq_predicate(2)}, ("x", "y"), (Constraint("neq", ("x", "y")),))
    assignment, cost = approx_solve(inst)
    assert assignment == {"x": 0, "y": 1} and cost == 1


def test_approx_disequality_half():
    # for disequality constraints the uniform expectation is already half
    # the total, and the greedy never drops below it
    rng = random.Random(34)
    for _ in range(50):
        n = rng.randint(2, 5)
        variables = tuple(f"x{i}" for i in range(n))
        constraints = tuple(
            Constraint("neq", tuple(rng.sample(variables, 2)))
            for _ in range(rng.randint(1, 6))
        )
        inst = Instance(2, {"neq": neq_predicate(2)}, variables, constraints)
        assert approx_solve(inst)[1] * 2 >= len(constraints)


def test_occurrence_stats():
    inst = Instance(
        2,
        {"neq": neq_predicate(2), "same": Predicate(2, 2, (1, 0, 0, 1))},
        ("x", "y", "z"),
        (Constraint("same", ("x", "x")), Constraint("neq", ("x", "y"), 2)),
    )
    counts, top = occurrence_stats(inst)
    assert counts == {"x": 4, "y": 2, "z": 0}
    assert top == 4
    assert occurrence_stats(Instance(2, {}, (), ()))[1] == 0


def test_graph_validation_and_round_trip():
    g = Graph(4, ((0, 1), (1, 2, 3), (2, 3)))
    assert g.edges == ((0, 1, 1), (1, 2, 3), (2, 3, 1))
    assert Graph.from_json(g.to_json()) == g
    with pytest.raises(ValueError):
        Graph(3, ((0, 0),))
    with pytest.raises(ValueError):
        Graph(2, ((0, 1, 0),))
    with pytest.raises(ValueError):
        Graph(2, ((0, 5),))


def test_maxkcut_triangle():
    triangle = Graph(3, ((0, 1), (1, 2), (0, 2)))
    assert brute_force_opt(graph_to_maxkcut_instance(triangle, 2))[1] == 2
    assert brute_force_opt(graph_to_maxkcut_instance(triangle, 3))[1] == 3
    empty = Graph(3, ())
    assert brute_force_opt(graph_to_maxkcut_instance(empty, 2))[1] == 0
    with pytest.raises(ValueError):
        graph_to_maxkcut_instance(triangle, 1)


def test_maxkcut_matches_best_colouring():
    rng = random.Random(35)
    for _ in range(30):
        n = rng.randint(2, 5)
        edges = tuple(
            (u, v)
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.5
        )
        g = Graph(n, edges)
        k = rng.randint(2, 3)
        _, cost = brute_force_opt(graph_to_maxkcut_instance(g, k))
        best = max(
            sum(1 for u, v in edges if colours[u] != colours[v])
            for colours in itertools.product(range(k), repeat=n)
        )
        assert cost == best
