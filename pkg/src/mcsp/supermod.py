"""Supermodularity on chains and the tractable/APX-complete classifier.

A predicate f is supermodular on a chain (a total order of the domain)
when f(a) + f(b) <= f(a meet b) + f(a join b) for all argument tuples,
with meet and join the componentwise min and max in the chain order.  For
binary predicates this is exactly the anti-Monge property of the table
matrix reordered by the chain, and a predicate of higher arity is
supermodular iff every binary slice (all but two argument positions fixed
to constants) is, so everything reduces to the matrix engine.

The classifier decides, for a finite language taken together with all
fixed-value unary predicates, whether the weighted constraint-maximization
problem is solvable exactly in polynomial time (supermodular on some
common chain) or APX-complete (everything else).  A negative verdict
carries a hardness witness: at most 3 binary slices and a sub-domain of at
most 4 elements on which no chain works, small enough to re-verify by
exhausting every chain of the sub-domain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .core import (
    FORMAT_VERSION,
    ConstraintLanguage,
    Predicate,
    fix_predicate,
    identity_chain,
    restrict_predicate,
    validate_chain,
)
from .monge import SquareMatrix, find_common_amonge_permutation, is_anti_monge


def _chain_meet_join(
    a: Sequence[int], b: Sequence[int], ranks: Sequence[int]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    meet = tuple(x if ranks[x] <= ranks[y] else y for x, y in zip(a, b))
    join = tuple(y if ranks[x] <= ranks[y] else x for x, y in zip(a, b))
    return meet, join


def _direct_violation(
    f: Predicate, chain: Sequence[int]
) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    ranks = [0] * f.domain_size
    for pos, v in enumerate(chain):
        ranks[v] = pos
    tuples = list(itertools.product(range(f.domain_size), repeat=f.arity))
    for a in tuples:
        fa = f.evaluate(a)
        for b in tuples:
            meet, join = _chain_meet_join(a, b, ranks)
            if fa + f.evaluate(b) > f.evaluate(meet) + f.evaluate(join):
                return a, b
    return None


def binary_slices(
    f: Predicate,
) -> list[tuple[Predicate, tuple[int, ...], tuple[int, ...]]]:
    """All binary restrictions of f obtained by fixing all but two positions.

    Each entry is (slice, fixed positions, fixed constants); the slice keeps
    the surviving positions in their original order.  An arity-2 predicate
    yields itself with nothing fixed.
    """
    if f.arity < 2:
        raise ValueError("slicing requires arity at least 2")
    if f.arity == 2:
        return [(f, (), ())]
    out = []
    for keep in itertools.combinations(range(f.arity), 2):
        fixed = tuple(p for p in range(f.arity) if p not in keep)
        for constants in itertools.product(range(f.domain_size), repeat=len(fixed)):
            out.append((fix_predicate(f, fixed, constants), fixed, constants))
    return out


def is_supermodular_on_chain(
    f: Predicate, chain: Sequence[int]
) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]] | None]:
    """Supermodularity of f on the chain; a violating tuple pair on failure.

    Unary predicates are always supermodular.  For arity >= 2 the direct
    all-pairs check and the slice-to-matrix route are both evaluated and
    must agree.
    """
    chain = validate_chain(chain, f.domain_size)
    if f.arity == 1:
        return True, None
    violation = _direct_violation(f, chain)
    by_slices = all(
        is_anti_monge(SquareMatrix.from_predicate(g).permuted(chain))[0]
        for g, _, _ in binary_slices(f)
    )
    if by_slices != (violation is None):
        raise AssertionError("pairwise and sliced supermodularity checks disagree")
    return violation is None, violation


def strip_all_ones(
    h: Predicate,
) -> tuple[Predicate, tuple[tuple[str, int], ...]]:
    """Zero out all-ones rows/columns of a binary predicate, to a fixpoint.

    Chain-supermodularity is insensitive to this rewrite, so the stripped
    table has the same set of good chains as the original.  Columns are
    scanned before rows at each step; the log lists the zeroed lines in
    order.  The result may be trivial (all-zero).
    """
    if h.arity != 2:
        raise ValueError("stripping requires a binary predicate")
    d = h.domain_size
    rows = [list(r) for r in h.matrix_rows()]
    log: list[tuple[str, int]] = []
    while True:
        target = next(
            (("col", j) for j in range(d) if all(rows[i][j] == 1 for i in range(d))),
            None,
        ) or next(
            (("row", i) for i in range(d) if all(rows[i][j] == 1 for j in range(d))),
            None,
        )
        if target is None:
            break
        log.append(target)
        axis, idx = target
        for k in range(d):
            if axis == "col":
                rows[k][idx] = 0
            else:
                rows[idx][k] = 0
    stripped = Predicate(d, 2, tuple(x for r in rows for x in r))
    return stripped, tuple(log)


# ---------------------------------------------------------------------------
# common chains for languages


@dataclass(frozen=True)
class SlicedPredicate:
    """A binary slice of a language predicate, with its provenance.

    ``predicate`` is the slice as cut from the source (before stripping);
    ``stripped_lines`` records the all-ones lines the classifier zeroed
    while searching for a witness.
    """

    source: str
    predicate: Predicate
    fixed_positions: tuple[int, ...] = ()
    fixed_constants: tuple[int, ...] = ()
    stripped_lines: tuple[tuple[str, int], ...] = ()

    def to_json(self) -> dict:
        return {
            "source": self.source,
            "table": self.predicate.table_string,
            "fixed_positions": list(self.fixed_positions),
            "fixed_constants": list(self.fixed_constants),
            "stripped_lines": [list(line) for line in self.stripped_lines],
        }


def _language_slices(language: ConstraintLanguage) -> list[SlicedPredicate]:
    # unary members never constrain the chain
    out = []
    for name, pred in language:
        if pred.arity < 2:
            continue
        for g, positions, constants in binary_slices(pred):
            stripped, log = strip_all_ones(g)
            out.append(SlicedPredicate(name, g, positions, constants, log))
    return out


def find_common_chain(language: ConstraintLanguage) -> tuple[int, ...] | None:
    """A chain making every language predicate supermodular, or None.

    The first chain in lexicographic order is returned, so verdicts are
    deterministic.  Unary-only languages return the identity chain.
    """
    slices = _language_slices(language)
    if not slices:
        return identity_chain(language.domain_size)
    mats = [SquareMatrix.from_predicate(s.predicate) for s in slices]
    search = find_common_amonge_permutation(mats)
    return search.permutation if search.found else None


def condition_star(language: ConstraintLanguage) -> bool:
    """Every restriction to a proper non-empty sub-domain has a common chain.

    Trivial (all-zero) restrictions are dropped before the chain search, in
    line with how restricted languages are formed.
    """
    d = language.domain_size
    for size in range(1, d):
        for sub in itertools.combinations(range(d), size):
            restricted = {}
            for name, pred in language:
                r = restrict_predicate(pred, sub)
                if not r.is_trivial:
                    restricted[name] = r
            if not restricted:
                continue
            if find_common_chain(ConstraintLanguage(size, restricted)) is None:
                return False
    return True


# ---------------------------------------------------------------------------
# the classifier


@dataclass(frozen=True)
class HardnessWitness:
    """A small obstruction to supermodularity on every chain.

    ``predicates`` holds at most 3 binary slices of language members and
    ``sub_domain`` at most 4 domain elements; restricting the slices to
    the sub-domain leaves no chain on which all of them are supermodular,
    which ``verify`` re-checks by exhausting the sub-domain's chains.
    """

    predicates: tuple[SlicedPredicate, ...]
    sub_domain: tuple[int, ...]

    def verify(self) -> bool:
        restricted = [
            restrict_predicate(s.predicate, self.sub_domain) for s in self.predicates
        ]
        k = len(self.sub_domain)
        for chain in itertools.permutations(range(k)):
            if all(is_supermodular_on_chain(r, chain)[0] for r in restricted):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "predicates": sorted({s.source for s in self.predicates}),
            "sub_domain": list(self.sub_domain),
            "slice_provenance": [s.to_json() for s in self.predicates],
        }


@dataclass(frozen=True)
class ClassificationResult:
    """Dichotomy verdict for a language taken together with all
    fixed-value unary predicates.

    Exactly one of ``chain`` (verdict "tractable") and ``witness``
    (verdict "apx_complete") is set.  The verdict says nothing about the
    language without the fixed-value predicates.
    """

    verdict: str
    chain: tuple[int, ...] | None = None
    witness: HardnessWitness | None = None

    @property
    def tractable(self) -> bool:
        return self.verdict == "tractable"

    def to_json(self) -> dict:
        payload: dict = {
            "format": FORMAT_VERSION,
            "verdict": self.verdict,
            "includes_fixed_values": True,
        }
        if self.chain is not None:
            payload["chain"] = list(self.chain)
        if self.witness is not None:
            payload["witness"] = self.witness.to_json()
        return payload


def classify_with_fixed_values(language: ConstraintLanguage) -> ClassificationResult:
    """Tractable (a common chain exists) or APX-complete (witness attached).

    The fixed-value unary predicates are treated as implicitly present;
    they do not constrain the chain but pin the hardness side of the
    dichotomy, so the verdict only applies to the language together with
    them.
    """
    if len(language) == 0:
        raise ValueError("cannot classify an empty language")
    chain = find_common_chain(language)
    if chain is not None:
        return ClassificationResult(verdict="tractable", chain=chain)

    # no common chain: minimize a witness over the stripped binary slices
    # (stripping all-ones lines never changes a slice's good chains, and a
    # slice stripped to nothing is good on every chain, so dropping it is
    # harmless)
    slices = _language_slices(language)
    pool = []
    for s in slices:
        stripped, _ = strip_all_ones(s.predicate)
        if not stripped.is_trivial:
            pool.append((s, stripped))
    search = find_common_amonge_permutation(
        [SquareMatrix.from_predicate(stripped) for _, stripped in pool]
    )
    if search.found:
        raise AssertionError("stripped slices admit a chain but the language does not")
    witness = HardnessWitness(
        predicates=tuple(pool[i][0] for i in search.witness_members),
        sub_domain=search.witness_indices,
    )
    if not witness.verify():
        raise AssertionError("hardness witness failed its own verification")
    return ClassificationResult(verdict="apx_complete", witness=witness)
