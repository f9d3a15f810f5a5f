"""Anti-Monge matrix structure: recognition, decomposition, small witnesses.

A square integer matrix M is anti-Monge (a-Monge) when

    M(i, s) + M(r, j) <= M(i, j) + M(r, s)   for all i < r, s < j,

equivalently when Delta(i, j, k, l) = M(i,k) + M(j,l) - M(i,l) - M(j,k) >= 0
for all i < j, k < l.  Delta telescopes over adjacent index pairs, so the
full property follows from the (n-1)^2 adjacent checks, which this module
exploits everywhere a permutation has to be tested.

A matrix is permuted a-Monge when simultaneously reordering rows and
columns by some permutation makes it a-Monge.  The module recognizes this
by exhausting permutations (intended for small matrices, n <= 8) and, on
failure, extracts a principal submatrix witness on at most 4 indices; for
families of matrices it extracts a witness of at most 3 matrices and at
most 4 indices admitting no common reordering.  Witnesses are verified by
exhaustion before being returned, so a reported witness is always genuine.

Non-zero 0/1 a-Monge matrices without all-ones lines decompose into an
upper-left block of ones, a lower-right block of ones, or a disjoint union
of both; ``decompose_01_amonge`` recovers the block parameters.

The set of reorderings keeping an a-Monge matrix a-Monge is described by
two mutually reverse ordered partitions of the index set (partition
classes group indices with pairwise equivalent rows and columns); their
linear extensions are exactly the a-Monge permutations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .core import FORMAT_VERSION, Predicate, _check_format

# JSON carries matrix entries as 64-bit signed integers.
MAX_ENTRY = 2**63 - 1

PERMUTATION_SEARCH_BOUND = 8


@dataclass(frozen=True)
class SquareMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if n == 0:
            raise ValueError("matrix must be non-empty")
        for r in self.rows:
            if len(r) != n:
                raise ValueError("matrix must be square")
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ValueError(f"matrix entries must be integers, got {x!r}")

    @property
    def size(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> int:
        return self.rows[i][j]

    @classmethod
    def from_predicate(cls, f: Predicate) -> "SquareMatrix":
        return cls(f.matrix_rows())

    @classmethod
    def from_bits(cls, rows: Sequence[str]) -> "SquareMatrix":
        return cls(tuple(tuple(int(c) for c in r) for r in rows))

    def is_zero_one(self) -> bool:
        return all(x in (0, 1) for r in self.rows for x in r)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.rows for x in r)

    def submatrix(self, indices: Sequence[int]) -> "SquareMatrix":
        idx = tuple(indices)
        return SquareMatrix(tuple(tuple(self.rows[i][j] for j in idx) for i in idx))

    def permuted(self, pi: Sequence[int]) -> "SquareMatrix":
        """Simultaneous row/column reorder: result(i, j) = M(pi(i), pi(j))."""
        return SquareMatrix(
            tuple(tuple(self.rows[pi[i]][pi[j]] for j in range(self.size))
                  for i in range(self.size))
        )

    def to_json(self) -> dict:
        return {"format": FORMAT_VERSION, "size": self.size,
                "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_json(cls, payload: Mapping) -> "SquareMatrix":
        _check_format(payload, "matrix")
        rows = payload["rows"]
        if int(payload.get("size", len(rows))) != len(rows):
            raise ValueError("size field does not match row count")
        for r in rows:
            for x in r:
                if not isinstance(x, int) or isinstance(x, bool):
                    raise ValueError(f"matrix entries must be integers, got {x!r}")
                if abs(x) > MAX_ENTRY:
                    raise ValueError(f"matrix entry {x} exceeds the 64-bit range")
        return cls(tuple(tuple(r) for r in rows))


def delta(M: SquareMatrix, i: int, j: int, k: int, l: int) -> int:
    return M.rows[i][k] + M.rows[j][l] - M.rows[i][l] - M.rows[j][k]


def delta2(M: SquareMatrix, i: int, j: int) -> int:
    return delta(M, i, j, i, j)


def is_anti_monge(
    M: SquareMatrix, method: str = "adjacent"
) -> tuple[bool, tuple[int, int, int, int] | None]:
    """Check a-Mongeness; on failure returns a violating (i, j, k, l), i<j, k<l.

    method "adjacent" checks the (n-1)^2 adjacent sums, "full" all quadruples,
    "both" runs the two and insists they agree.
    """
    if method not in ("adjacent", "full", "both"):
        raise ValueError(f"unknown method {method!r}")
    n = M.size
    adjacent = full = None
    if method in ("adjacent", "both"):
        adjacent = next(
            (
                (s, s + 1, t, t + 1)
                for s in range(n - 1)
                for t in range(n - 1)
                if delta(M, s, s + 1, t, t + 1) < 0
            ),
            None,
        )
    if method in ("full", "both"):
        full = next(
            (
                (i, j, k, l)
                for i in range(n)
                for j in range(i + 1, n)
                for k in range(n)
                for l in range(k + 1, n)
                if delta(M, i, j, k, l) < 0
            ),
            None,
        )
    if method == "both" and (adjacent is None) != (full is None):
        raise AssertionError("adjacent and full a-Monge checks disagree")
    violation = adjacent if method != "full" else full
    return violation is None, violation


def _is_amonge_under(M: SquareMatrix, pi: Sequence[int]) -> bool:
    rows = M.rows
    n = M.size
    for s in range(n - 1):
        a, b = pi[s], pi[s + 1]
        ra, rb = rows[a], rows[b]
        for t in range(n - 1):
            c, e = pi[t], pi[t + 1]
            if ra[c] + rb[e] - ra[e] - rb[c] < 0:
                return False
    return True


def line_equivalent(
    M: SquareMatrix, axis: str, s: int, t: int
) -> tuple[bool, int | None]:
    """Whether lines s and t differ by a constant; returns (flag, offset).

    axis "row" compares rows (offset alpha with M(s, i) = M(t, i) + alpha),
    axis "col" columns.
    """
    if axis not in ("row", "col"):
        raise ValueError(f"axis must be 'row' or 'col', got {axis!r}")
    n = M.size
    if axis == "row":
        diffs = {M.rows[s][i] - M.rows[t][i] for i in range(n)}
    else:
        diffs = {M.rows[i][s] - M.rows[i][t] for i in range(n)}
    if len(diffs) == 1:
        return True, diffs.pop()
    return False, None


# ---------------------------------------------------------------------------
# 0/1 structure


@dataclass(frozen=True)
class Decomposition:
    """Structure of a 0/1 a-Monge matrix.

    kind is one of "L" (ones block anchored at the upper-left corner,
    rows 0..p by columns 0..q), "R" (ones block anchored at the
    lower-right corner, rows s.. by columns t..), "LplusR" (disjoint
    union of both blocks), "all_zero", "all_ones_line" (some full row or
    column of ones, structure not classified further), or "not_amonge"
    with a violating quadruple.
    """

    kind: str
    p: int | None = None
    q: int | None = None
    s: int | None = None
    t: int | None = None
    axis: str | None = None
    index: int | None = None
    violation: tuple[int, int, int, int] | None = None

    def reconstruct(self, n: int) -> SquareMatrix:
        if self.kind == "all_zero":
            return SquareMatrix(tuple(tuple(0 for _ in range(n)) for _ in range(n)))
        if self.kind not in ("L", "R", "LplusR"):
            raise ValueError(f"cannot reconstruct from kind {self.kind!r}")
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                v = 0
                if self.kind in ("L", "LplusR") and i <= self.p and j <= self.q:
                    v = 1
                if self.kind in ("R", "LplusR") and i >= self.s and j >= self.t:
                    v = 1
                row.append(v)
            rows.append(tuple(row))
        return SquareMatrix(tuple(rows))


def decompose_01_amonge(M: SquareMatrix) -> Decomposition:
    """Classify a 0/1 matrix by its a-Monge block structure (identity order)."""
    if not M.is_zero_one():
        raise ValueError("decomposition requires a 0/1 matrix")
    ok, violation = is_anti_monge(M)
    if not ok:
        return Decomposition(kind="not_amonge", violation=violation)
    if M.is_zero():
        return Decomposition(kind="all_zero")
    n = M.size
    for i in range(n):
        if all(M.rows[i][j] == 1 for j in range(n)):
            return Decomposition(kind="all_ones_line", axis="row", index=i)
    for j in range(n):
        if all(M.rows[i][j] == 1 for i in range(n)):
            return Decomposition(kind="all_ones_line", axis="col", index=j)

    has_l = M.rows[0][0] == 1
    has_r = M.rows[n - 1][n - 1] == 1
    dec: Decomposition
    if has_l and has_r:
        p = max(i for i in range(n) if M.rows[i][0] == 1)
        q = max(j for j in range(n) if M.rows[0][j] == 1)
        s = min(i for i in range(n) if M.rows[i][n - 1] == 1)
        t = min(j for j in range(n) if M.rows[n - 1][j] == 1)
        dec = Decomposition(kind="LplusR", p=p, q=q, s=s, t=t)
    elif has_l:
        p = max(i for i in range(n) if M.rows[i][0] == 1)
        q = max(j for j in range(n) if M.rows[0][j] == 1)
        dec = Decomposition(kind="L", p=p, q=q)
    elif has_r:
        s = min(i for i in range(n) if M.rows[i][n - 1] == 1)
        t = min(j for j in range(n) if M.rows[n - 1][j] == 1)
        dec = Decomposition(kind="R", s=s, t=t)
    else:
        raise AssertionError("non-zero a-Monge 0/1 matrix without corner ones")
    if dec.reconstruct(n).rows != M.rows:
        raise AssertionError("block reconstruction mismatch on an a-Monge matrix")
    return dec


# ---------------------------------------------------------------------------
# permutation search and witnesses


@dataclass(frozen=True)
class PermutationSearch:
    """Outcome of a (common) a-Monge permutation search.

    Either ``permutation`` is set, or ``witness_indices`` names a principal
    index set (at most 4 indices) on which no permutation works; for family
    searches ``witness_members`` names the at most 3 matrices involved.
    """

    permutation: tuple[int, ...] | None = None
    witness_indices: tuple[int, ...] | None = None
    witness_members: tuple[int, ...] | None = None

    @property
    def found(self) -> bool:
        return self.permutation is not None


def _both_equivalent(M: SquareMatrix, s: int, t: int) -> bool:
    return line_equivalent(M, "row", s, t)[0] and line_equivalent(M, "col", s, t)[0]


def _collapse_representatives(M: SquareMatrix) -> list[int]:
    """One index per class of simultaneously row- and column-equivalent indices."""
    reps: list[int] = []
    for i in range(M.size):
        if not any(_both_equivalent(M, r, i) for r in reps):
            reps.append(i)
    return reps


def _no_permutation_works(mats: Sequence[SquareMatrix], indices: Sequence[int]) -> bool:
    subs = [m.submatrix(indices) for m in mats]
    k = len(indices)
    return not any(
        all(_is_amonge_under(s, pi) for s in subs)
        for pi in itertools.permutations(range(k))
    )


def find_amonge_permutation(
    M: SquareMatrix, max_size: int = PERMUTATION_SEARCH_BOUND
) -> PermutationSearch:
    """First a-Monge permutation in lexicographic order, or a bad index set.

    On failure the witness is the lexicographically first index set (sizes
    tried in increasing order, over representatives of equivalent-line
    classes) whose principal submatrix admits no a-Monge permutation; it
    has at most 4 indices.
    """
    n = M.size
    if n > max_size:
        raise ValueError(f"matrix size {n} exceeds the search bound {max_size}")
    for pi in itertools.permutations(range(n)):
        if _is_amonge_under(M, pi):
            return PermutationSearch(permutation=pi)
    reps = _collapse_representatives(M)
    for size in range(2, min(4, len(reps)) + 1):
        for B in itertools.combinations(reps, size):
            if _no_permutation_works([M], B):
                return PermutationSearch(witness_indices=B)
    raise AssertionError("no bad principal submatrix found on a bad matrix")


def find_common_amonge_permutation(
    mats: Sequence[SquareMatrix], max_size: int = PERMUTATION_SEARCH_BOUND
) -> PermutationSearch:
    """Common a-Monge permutation for a family, or a small joint witness.

    On failure, returns at most 4 indices and at most 3 member positions
    such that the named submatrices admit no common a-Monge permutation
    (verified by exhausting the permutations of the index set).  Smaller
    index sets are preferred, then fewer members, then lexicographic order.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("family must be non-empty")
    n = mats[0].size
    if any(m.size != n for m in mats):
        raise ValueError("family members must share a size")
    if n > max_size:
        raise ValueError(f"matrix size {n} exceeds the search bound {max_size}")
    for pi in itertools.permutations(range(n)):
        if all(_is_amonge_under(m, pi) for m in mats):
            return PermutationSearch(permutation=pi)
    for size in range(2, min(4, n) + 1):
        for count in range(1, min(3, len(mats)) + 1):
            for B in itertools.combinations(range(n), size):
                for members in itertools.combinations(range(len(mats)), count):
                    if _no_permutation_works([mats[i] for i in members], B):
                        return PermutationSearch(
                            witness_indices=B, witness_members=members
                        )
    raise AssertionError("no joint witness found for a family with no common permutation")


# ---------------------------------------------------------------------------
# the permutation family of an a-Monge matrix


@dataclass(frozen=True)
class MultipartiteOrder:
    """An ordered partition of indices; cross-class pairs are comparable.

    ``classes`` lists the partition classes from least to greatest.  A
    single-class order is degenerate: it orders nothing (every
    permutation extends it).
    """

    classes: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "classes", tuple(tuple(sorted(c)) for c in self.classes)
        )

    @property
    def is_degenerate(self) -> bool:
        return len(self.classes) <= 1

    def reverse(self) -> "MultipartiteOrder":
        return MultipartiteOrder(tuple(reversed(self.classes)))

    def relation(self) -> set[tuple[int, int]]:
        """All ordered pairs (a, b) with a strictly before b."""
        pairs = set()
        for i, ci in enumerate(self.classes):
            for cj in self.classes[i + 1 :]:
                pairs.update(itertools.product(ci, cj))
        return pairs

    def linear_extensions(self) -> Iterator[tuple[int, ...]]:
        pools = [itertools.permutations(c) for c in self.classes]
        for parts in itertools.product(*pools):
            yield tuple(itertools.chain.from_iterable(parts))


def amonge_permutation_family(M: SquareMatrix) -> tuple[MultipartiteOrder, MultipartiteOrder]:
    """The two mutually reverse orders whose linear extensions keep M a-Monge.

    Requires M to be a-Monge as given.  Partition classes group indices
    whose rows and columns are simultaneously equivalent; they are
    contiguous in the current index order.
    """
    ok, violation = is_anti_monge(M)
    if not ok:
        raise ValueError(f"matrix is not a-Monge as given (violation {violation})")
    classes: list[list[int]] = []
    for i in range(M.size):
        if classes and _both_equivalent(M, classes[-1][-1], i):
            classes[-1].append(i)
        else:
            classes.append([i])
    # classes of equivalent lines are intervals of the a-Monge order
    for c in classes:
        for a, b in itertools.combinations(c, 2):
            if not _both_equivalent(M, a, b):
                raise AssertionError("equivalence classes are not contiguous")
    order = MultipartiteOrder(tuple(tuple(c) for c in classes))
    return order, order.reverse()


# ---------------------------------------------------------------------------
# merging precedence information


@dataclass(frozen=True)
class PrecedenceGraph:
    """Union of precedence constraints; each arc remembers its origins."""

    size: int
    arcs: Mapping[tuple[int, int], tuple[str, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", dict(self.arcs))

    def topological_order(self) -> tuple[int, ...] | None:
        indegree = {v: 0 for v in range(self.size)}
        out: dict[int, list[int]] = {v: [] for v in range(self.size)}
        for a, b in self.arcs:
            out[a].append(b)
            indegree[b] += 1
        ready = sorted(v for v, deg in indegree.items() if deg == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for w in sorted(out[v]):
                indegree[w] -= 1
                if indegree[w] == 0:
                    ready.append(w)
            ready.sort()
        return tuple(order) if len(order) == self.size else None


@dataclass(frozen=True)
class ConflictWitness:
    """A directed cycle in merged precedence constraints.

    For conflicting multipartite orders a 2-cycle always exists; ``cycle``
    then holds the two indices and ``origins`` the orders contributing the
    two opposing arcs.
    """

    cycle: tuple[int, ...]
    origins: tuple[tuple[str, ...], ...]


def merge_orders(
    orders: Sequence[MultipartiteOrder], size: int
) -> PrecedenceGraph | ConflictWitness:
    """Union the orders' precedence arcs; detect conflicts.

    Returns the merged graph when the union is acyclic.  Otherwise returns
    a ConflictWitness; a 2-cycle is reported when one exists (for a
    conflicting pair of multipartite orders it always does).
    """
    arcs: dict[tuple[int, int], list[str]] = {}
    for idx, order in enumerate(orders):
        for pair in order.relation():
            arcs.setdefault(pair, []).append(f"order{idx}")
    graph = PrecedenceGraph(size, {k: tuple(v) for k, v in arcs.items()})
    if graph.topological_order() is not None:
        return graph
    for (a, b), origin in sorted(graph.arcs.items()):
        if (b, a) in graph.arcs:
            return ConflictWitness((a, b), (tuple(origin), tuple(graph.arcs[(b, a)])))
    cycle = _find_cycle(graph)
    origins = tuple(
        tuple(graph.arcs[(cycle[i], cycle[(i + 1) % len(cycle)])])
        for i in range(len(cycle))
    )
    return ConflictWitness(cycle, origins)


def _find_cycle(graph: PrecedenceGraph) -> tuple[int, ...]:
    out: dict[int, list[int]] = {v: [] for v in range(graph.size)}
    for a, b in graph.arcs:
        out[a].append(b)
    color = {v: 0 for v in range(graph.size)}
    stack: list[int] = []

    def visit(v: int) -> tuple[int, ...] | None:
        color[v] = 1
        stack.append(v)
        for w in sorted(out[v]):
            if color[w] == 1:
                return tuple(stack[stack.index(w):])
            if color[w] == 0:
                found = visit(w)
                if found:
                    return found
        stack.pop()
        color[v] = 2
        return None

    for v in range(graph.size):
        if color[v] == 0:
            found = visit(v)
            if found:
                return found
    raise AssertionError("cycle reported but none found")
