"""Digraphs as binary predicates and List H-coloring optimization.

A digraph H on d vertices is the same data as a binary predicate on a
d-element domain: (u, v) is an arc iff h(u, v) = 1.  Under this bridge,
mapping the vertices of an input digraph G into H so as to maximize the
total weight of preserved arcs (plus optional per-vertex list scores) is
a weighted Max CSP instance over the language {h} plus unary subset
predicates.  H is tractable exactly when its adjacency matrix can be
made anti-Monge by reordering the vertices, up to all-ones lines, which
never matter; otherwise a small vertex subset witnesses hardness.

Score functions are encoded by their superlevel sets: rho = sum of
c_j * u_{S_j} with S_1 contains S_2 contains ... and every c_j positive.
This is the unique decomposition into nested unary subset terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import (
    FORMAT_VERSION,
    Constraint,
    Instance,
    Predicate,
    _check_format,
    unary_name,
    unary_subset_predicate,
)
from .monge import SquareMatrix, find_amonge_permutation
from .supermod import (
    ClassificationResult,
    HardnessWitness,
    SlicedPredicate,
    strip_all_ones,
)


@dataclass(frozen=True)
class Digraph:
    """Directed graph on vertices 0..n-1; loops allowed, arcs unweighted.

    Arcs are stored deduplicated in sorted order, so equal digraphs
    compare equal and the predicate correspondence is a bijection.
    """

    vertices: int
    arcs: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.vertices < 0:
            raise ValueError("vertex count must be non-negative")
        seen = set()
        for a in self.arcs:
            if len(a) != 2:
                raise ValueError(f"arc {a!r} is not a pair")
            u, v = a
            if not 0 <= u < self.vertices or not 0 <= v < self.vertices:
                raise ValueError(f"arc ({u}, {v}) outside vertex range")
            seen.add((u, v))
        object.__setattr__(self, "arcs", tuple(sorted(seen)))

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in set(self.arcs)

    def adjacency(self) -> SquareMatrix:
        arcs = set(self.arcs)
        return SquareMatrix(
            tuple(
                tuple(1 if (u, v) in arcs else 0 for v in range(self.vertices))
                for u in range(self.vertices)
            )
        )

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "vertices": self.vertices,
            "edges": [[u, v] for u, v in self.arcs],
            "directed": True,
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "Digraph":
        _check_format(payload, "digraph")
        if payload.get("directed") is not True:
            raise ValueError('digraph JSON requires "directed": true')
        return cls(
            int(payload["vertices"]),
            tuple(tuple(a) for a in payload["edges"]),
        )


def digraph_to_predicate(H: Digraph) -> Predicate:
    """The binary predicate with h(u, v) = 1 iff (u, v) is an arc of H."""
    if H.vertices == 0:
        raise ValueError("a digraph with no vertices has no predicate")
    d = H.vertices
    arcs = set(H.arcs)
    table = tuple(
        1 if (u, v) in arcs else 0
        for u in range(d)
        for v in range(d)
    )
    return Predicate(d, 2, table)


def predicate_to_digraph(h: Predicate) -> Digraph:
    """Inverse of digraph_to_predicate."""
    if h.arity != 2:
        raise ValueError("only binary predicates correspond to digraphs")
    d = h.domain_size
    arcs = tuple(
        (u, v) for u in range(d) for v in range(d) if h.table[u * d + v]
    )
    return Digraph(d, arcs)


# ---------------------------------------------------------------------------
# list/score instances


def score_terms(rho: Mapping[int, int]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """Superlevel-set decomposition of a positive score function.

    Returns ((subset, weight), ...) with subsets strictly nested
    decreasing and weights positive; for every value a, the weights of
    the subsets containing a sum to rho[a] exactly.
    """
    for a, s in rho.items():
        if not isinstance(s, int) or isinstance(s, bool) or s < 1:
            raise ValueError(f"score at {a} must be a positive integer, got {s!r}")
    thresholds = sorted(set(rho.values()))
    terms = []
    previous = 0
    for t in thresholds:
        subset = tuple(sorted(a for a, s in rho.items() if s >= t))
        terms.append((subset, t - previous))
        previous = t
    return tuple(terms)


def build_list_hcoloring_instance(
    G: Digraph,
    H: Digraph,
    lists: Mapping[int, Sequence[int]] | None = None,
    scores: Mapping[int, Mapping[int, int]] | None = None,
    arc_weights: Mapping[tuple[int, int], int] | None = None,
) -> Instance:
    """Weighted Max CSP instance for mapping G into H.

    One h-constraint per arc of G (weight from arc_weights, default 1)
    plus, for each vertex with a list, unary subset constraints whose
    collected weight at each listed value equals its score.  Vertices
    may carry a list without scores (every listed value then scores 1)
    or scores alone (the list defaults to the scored values); listed
    but unscored values also score 1.  A scored value must be listed,
    and an empty list cannot carry scores.
    """
    lists = dict(lists or {})
    scores = dict(scores or {})
    arc_weights = dict(arc_weights or {})
    for v in itertools.chain(lists, scores):
        if not 0 <= v < G.vertices:
            raise ValueError(f"list/score vertex {v} outside G")
    for arc in arc_weights:
        if tuple(arc) not in set(G.arcs):
            raise ValueError(f"weight given for non-arc {arc!r}")

    h = digraph_to_predicate(H)
    predicates: dict[str, Predicate] = {"h": h}
    variables = tuple(f"v{i}" for i in range(G.vertices))
    constraints = [
        Constraint("h", (f"v{u}", f"v{v}"), arc_weights.get((u, v), 1))
        for u, v in G.arcs
    ]

    for v in sorted(set(lists) | set(scores)):
        rho = dict(scores.get(v, {}))
        listed = set(lists[v]) if v in lists else set(rho)
        if not listed <= set(range(H.vertices)):
            raise ValueError(f"list at vertex {v} is not a subset of H's vertices")
        if not set(rho) <= listed:
            if not listed:
                raise ValueError(f"vertex {v} has an empty list but non-empty scores")
            raise ValueError(f"vertex {v} scores values outside its list")
        for a in listed - set(rho):
            rho[a] = 1
        if not rho:
            continue
        for subset, weight in score_terms(rho):
            name = unary_name(subset)
            predicates[name] = unary_subset_predicate(H.vertices, subset)
            constraints.append(Constraint(name, (f"v{v}",), weight))

    return Instance(H.vertices, predicates, variables, tuple(constraints))


# ---------------------------------------------------------------------------
# classification


def classify_digraph(H: Digraph) -> ClassificationResult:
    """Dichotomy verdict for H-coloring optimization with lists and scores.

    Strips all-ones lines from the adjacency matrix (they never affect
    which vertex orderings work), then searches for an ordering making
    it anti-Monge.  Agrees with classifying the language {h} together
    with all fixed-value unaries, but never builds the language, so it
    also covers the arcless digraph that the language constructor
    rejects as identically zero.
    """
    h = digraph_to_predicate(H)
    stripped, log = strip_all_ones(h)
    search = find_amonge_permutation(SquareMatrix.from_predicate(stripped))
    if search.found:
        return ClassificationResult(verdict="tractable", chain=search.permutation)
    # witness indices computed on the stripped matrix stay valid for h:
    # the zeroed lines are all-ones in h, hence all-ones lines of the
    # restricted submatrix, which never affect its chains
    witness = HardnessWitness(
        predicates=(SlicedPredicate("h", h, (), (), log),),
        sub_domain=search.witness_indices,
    )
    if not witness.verify():
        raise AssertionError("digraph hardness witness failed its own verification")
    return ClassificationResult(verdict="apx_complete", witness=witness)
