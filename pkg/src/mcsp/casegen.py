"""Reproduction of the three exhaustive case analyses on the 4-element domain.

Case 1 regenerates, from all 65536 binary tables, the 27 canonical classes
of predicates that have no all-ones line, are supermodular on no chain,
and whose proper restrictions all stay chain-supermodular; they must
coincide with the shipped ``hard`` dataset.  Case 2 regenerates the
27-entry list of pairs whose members are individually chain-supermodular
but share no chain (again with the restriction condition), matching the
shipped C-series catalog items, and accounts for every admissible pair
class outside that list by a verified reduction into it.  Case 3
searches for a triple with the
analogous minimality properties and must come up empty on the 4-element
domain; the same search on 3 elements finds triples and is cross-checked
against a brute-force oracle in the tests.

The workhorse is a chain-mask table: every binary table carries one bit
per chain (set iff the reordered matrix is anti-Monge) plus one mask per
proper sub-domain for the restricted table.  All three cases then reduce
to bitwise filters, and Case 3 to a Helly-type pattern over mask
signatures (pairwise intersecting, jointly empty) that is checked before
any individual predicate is touched.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .core import (
    FORMAT_VERSION,
    CanonicalClass,
    Predicate,
    canonical_class,
)
from .impls import appendix_catalog, reference_predicates

SUB_DOMAINS = {
    d: [
        sub
        for size in range(2, d)
        for sub in itertools.combinations(range(d), size)
    ]
    for d in (3, 4)
}


def _table_string(t: int, d: int) -> str:
    return format(t, f"0{d * d}b")


def _predicate(t: int, d: int) -> Predicate:
    return Predicate.from_table_string(d, 2, _table_string(t, d))


@dataclass(frozen=True)
class MaskTables:
    """Per-table chain masks for every binary table on a domain.

    ``chain_mask`` has bit c set iff the table is supermodular on
    ``chains[c]``; ``restriction_masks[sub]`` does the same for the
    table restricted to the sub-domain, over that sub-domain's chains.
    An all-zero restriction is supermodular on every chain, so its mask
    is full and never blocks a filter.
    """

    domain_size: int
    chains: tuple[tuple[int, ...], ...]
    chain_mask: np.ndarray
    restriction_masks: Mapping[tuple[int, ...], np.ndarray]
    has_all_ones_line: np.ndarray
    is_trivial: np.ndarray
    one_rectangle: np.ndarray

    def star_ok(self) -> np.ndarray:
        ok = np.ones(len(self.chain_mask), dtype=bool)
        for mask in self.restriction_masks.values():
            ok &= mask != 0
        return ok


def _supermodular_bits(
    bits: np.ndarray, d: int, positions: Sequence[int], order: Sequence[int]
) -> np.ndarray:
    # adjacent anti-Monge conditions of the sub-matrix on `positions`,
    # reordered by `order` (a permutation of positions)
    ok = np.ones(bits.shape[0], dtype=bool)
    k = len(order)
    for r in range(k - 1):
        for c in range(k - 1):
            a, a2 = order[r], order[r + 1]
            b, b2 = order[c], order[c + 1]
            lhs = bits[:, a * d + b].astype(np.int16) + bits[:, a2 * d + b2]
            rhs = bits[:, a * d + b2].astype(np.int16) + bits[:, a2 * d + b]
            ok &= lhs >= rhs
    return ok


@lru_cache(maxsize=4)
def mask_tables(domain_size: int) -> MaskTables:
    d = domain_size
    if d not in (3, 4):
        raise ValueError("mask tables are built for domain sizes 3 and 4")
    n = d * d
    count = 1 << n
    t = np.arange(count, dtype=np.uint32)
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint32)
    bits = ((t[:, None] >> shifts[None, :]) & 1).astype(np.uint8)

    chains = tuple(itertools.permutations(range(d)))
    chain_mask = np.zeros(count, dtype=np.int64)
    for idx, chain in enumerate(chains):
        good = _supermodular_bits(bits, d, range(d), chain)
        chain_mask |= good.astype(np.int64) << idx

    restriction_masks = {}
    for sub in SUB_DOMAINS[d]:
        mask = np.zeros(count, dtype=np.int64)
        for idx, order in enumerate(itertools.permutations(sub)):
            good = _supermodular_bits(bits, d, sub, order)
            mask |= good.astype(np.int64) << idx
        restriction_masks[sub] = mask

    grid = bits.reshape(count, d, d)
    has_line = grid.all(axis=2).any(axis=1) | grid.all(axis=1).any(axis=1)
    trivial = (t == 0) | (t == count - 1)
    # ones forming a single combinatorial rectangle {rows} x {cols};
    # for line-free chain-supermodular tables the alternative is exactly
    # the two-block shape, and the distinction survives relabeling
    ones = grid.sum(axis=(1, 2))
    rect = grid.any(axis=2).sum(axis=1) * grid.any(axis=1).sum(axis=1)
    one_rectangle = ones == rect
    return MaskTables(
        domain_size=d,
        chains=chains,
        chain_mask=chain_mask,
        restriction_masks=restriction_masks,
        has_all_ones_line=has_line,
        is_trivial=trivial,
        one_rectangle=one_rectangle,
    )


@dataclass(frozen=True)
class CaseReport:
    """Outcome of one case analysis: canonical items plus filter counts."""

    case_id: int
    items: tuple
    stage_counts: tuple[tuple[str, int], ...]
    seconds: float
    audit: Mapping | None = None
    detail: Mapping | None = None

    def to_json(self) -> dict:
        if self.case_id == 1:
            items = [p.table_string for p in self.items]
        elif self.case_id == 2:
            items = [[a.table_string, b.table_string] for a, b in self.items]
        else:
            items = [[p.table_string for p in triple] for triple in self.items]
        return {
            "format": FORMAT_VERSION,
            "case": self.case_id,
            "items": items,
            "stages": [[name, count] for name, count in self.stage_counts],
            "seconds": round(self.seconds, 3),
            "audit": dict(self.audit) if self.audit is not None else None,
            "detail": dict(self.detail) if self.detail is not None else None,
        }


# ---------------------------------------------------------------------------
# Case 1


def generate_case1(audit: bool = False) -> CaseReport:
    """All binary tables with no all-ones line, no chain, and chain-
    supermodular proper restrictions, up to relabeling and transposition."""
    start = time.perf_counter()
    d = 4
    masks = mask_tables(d)
    count = len(masks.chain_mask)

    no_line = ~masks.has_all_ones_line
    no_chain = masks.chain_mask == 0
    star = masks.star_ok()

    survivors = no_line & no_chain & star
    raw = np.flatnonzero(survivors)

    classes: dict[str, CanonicalClass] = {}
    for t in raw:
        cls = canonical_class(_predicate(int(t), d))
        classes.setdefault(cls.key, cls)
    items = tuple(sorted((c.representative[0] for c in classes.values()),
                         key=lambda p: p.table_string))

    stage_counts = (
        ("tables", count),
        ("no_all_ones_line", int(no_line.sum())),
        ("no_chain", int((no_line & no_chain).sum())),
        ("restrictions_have_chains", int(raw.size)),
        ("canonical_classes", len(items)),
    )
    audit_data = None
    if audit:
        first_failure = np.full(count, -1, dtype=np.int8)
        first_failure[~no_line] = 0
        first_failure[no_line & ~no_chain] = 1
        first_failure[no_line & no_chain & ~star] = 2
        audit_data = {
            "filters": ["all_ones_line", "supermodular_on_a_chain", "bad_restriction"],
            "first_failure": first_failure.tolist(),
        }
    return CaseReport(1, items, stage_counts, time.perf_counter() - start, audit_data)


# ---------------------------------------------------------------------------
# Case 2


def _two_block_tables() -> list[int]:
    # every disjoint union of an upper-left ones block (rows 0..p, cols
    # 0..q) and a lower-right one (rows s..3, cols t..3); blocks may share
    # rows or columns as long as no cell lands in both and no line fills up
    out = []
    for p in range(3):
        for q in range(3):
            for s in range(1, 4):
                for t in range(1, 4):
                    if not (p < s or q < t):
                        continue
                    rows = [
                        [int((a <= p and b <= q) or (a >= s and b >= t)) for b in range(4)]
                        for a in range(4)
                    ]
                    if any(all(r) for r in rows):
                        continue
                    if any(all(r[b] for r in rows) for b in range(4)):
                        continue
                    bits = 0
                    for row in rows:
                        for v in row:
                            bits = (bits << 1) | v
                    out.append(bits)
    return out


def _orbit_under_symmetries(t: int, d: int = 4) -> set[int]:
    # transpose and the order-reversing relabeling preserve the normalized
    # first-component role in the pair enumeration
    p = _predicate(t, d)
    rev = tuple(range(d - 1, -1, -1))
    from .core import permute_predicate, transpose_predicate

    orbit = set()
    for q in (p, transpose_predicate(p)):
        for r in (q, permute_predicate(q, rev)):
            orbit.add(int(r.table_string, 2))
    return orbit


def first_component_candidates() -> dict[str, dict]:
    """The normalized first components of Case 2, with exclusion reasons.

    Starts from the 18 shipped two-block representatives, drops those for
    which no admissible partner exists at all (the pair restriction
    condition already fails), and drops those the shipped X-series
    implementations reduce to other representatives.  The survivors are
    the first components realized in the shipped pair catalog.
    """
    refs = reference_predicates()
    masks = mask_tables(4)
    d = 4

    # the raw two-block tables fall into 18 symmetry orbits, one per
    # shipped representative
    raw = _two_block_tables()
    assert len(raw) == len(set(raw))
    sup_ints = {
        name: int(refs[name].table_string, 2)
        for name in refs
        if name.startswith("sup")
    }
    covered = set()
    for t in raw:
        orbit = _orbit_under_symmetries(t)
        hits = [name for name, ti in sup_ints.items() if ti in orbit]
        assert len(hits) == 1, (t, hits)
        covered.add(hits[0])
    assert len(covered) == 18

    implementing = set()
    for item in appendix_catalog():
        if item.series == "X":
            implementing.update(item.base)

    no_line = ~masks.has_all_ones_line
    some_chain = masks.chain_mask != 0
    out = {}
    for i in range(1, 19):
        name = f"sup{i}"
        t = sup_ints[name]
        partner_ok = no_line & some_chain & ((masks.chain_mask & int(masks.chain_mask[t])) == 0)
        for sub, rmask in masks.restriction_masks.items():
            partner_ok &= (rmask & int(rmask[t])) != 0
        partners = int(partner_ok.sum())
        if partners == 0:
            status = "no_admissible_partner"
        elif name in implementing:
            status = "implements_another_representative"
        else:
            status = "kept"
        out[name] = {"status": status, "admissible_partners": partners}
    return out


def _implemented_copies(f2: Predicate) -> list[tuple[str, Predicate]]:
    # if f2 is a relabeled copy (possibly transposed) of a predicate with
    # a shipped single-predicate implementation, return the matching
    # copies of what it implements
    from .core import permute_predicate, transpose_predicate

    refs = reference_predicates()
    out = []
    for item in appendix_catalog():
        if item.series != "X":
            continue
        (h,) = item.base
        target = item.implementation.target
        n = f2.domain_size
        for pi in itertools.permutations(range(n)):
            if permute_predicate(f2, pi).table == refs[h].table:
                back = tuple(pi.index(i) for i in range(n))
                out.append((h, permute_predicate(target, back)))
        f2t = transpose_predicate(f2)
        for pi in itertools.permutations(range(n)):
            if permute_predicate(f2t, pi).table == refs[h].table:
                back = tuple(pi.index(i) for i in range(n))
                out.append((h, transpose_predicate(permute_predicate(target, back))))
    return out


def _pair_admissible(masks: MaskTables, t1: int, t2: int) -> bool:
    if masks.has_all_ones_line[t2] or masks.chain_mask[t2] == 0:
        return False
    if masks.one_rectangle[t2]:
        return False
    if masks.chain_mask[t1] & masks.chain_mask[t2]:
        return False
    return all(
        int(rm[t1]) & int(rm[t2]) != 0 for rm in masks.restriction_masks.values()
    )


def generate_case2(audit: bool = False) -> CaseReport:
    """Pairs with both members chain-supermodular but sharing no chain,
    jointly chain-supermodular restrictions, and both members two-block
    on their own chains (a one-block member trades for its two-block
    completion, so those pairs are redundant).

    The admissible pairs fall into 33 canonical classes.  26 of them
    carry a shipped pair implementation; the reference list spells those
    out as 27 entries, writing one class twice in forms its dedupe did
    not identify.  The remaining 7 classes have a second member that is
    a relabeled copy of a predicate with a shipped single-predicate
    implementation; replacing that member with what it implements lands
    in an implementation-carrying class (within two steps), which is
    recorded per class and re-verified here.  ``items`` mirrors the
    27-entry reference list; the reduced classes are in ``detail``.
    """
    start = time.perf_counter()
    d = 4
    masks = mask_tables(4)
    refs = reference_predicates()
    candidates = first_component_candidates()
    kept = [name for name, info in candidates.items() if info["status"] == "kept"]

    no_line = ~masks.has_all_ones_line
    some_chain = masks.chain_mask != 0
    stage_counts = [("first_components", len(kept))]
    classes: dict[str, tuple[Predicate, Predicate]] = {}
    members: dict[str, list[tuple[str, Predicate]]] = {}
    pair_count = 0
    audit_pairs = []
    for name in kept:
        f1 = refs[name]
        t1 = int(f1.table_string, 2)
        ok = no_line & some_chain & ~masks.one_rectangle
        ok &= (masks.chain_mask & int(masks.chain_mask[t1])) == 0
        for sub, rmask in masks.restriction_masks.items():
            ok &= (rmask & int(rmask[t1])) != 0
        raw = np.flatnonzero(ok)
        for t2 in raw:
            f2 = _predicate(int(t2), d)
            cls = canonical_class((f1, f2))
            classes.setdefault(cls.key, cls.representative)
            members.setdefault(cls.key, []).append((name, f2))
            if audit:
                audit_pairs.append([name, f2.table_string, cls.key])
        stage_counts.append((f"{name}_pairs", int(raw.size)))
        pair_count += int(raw.size)

    anchored = reference_case2_classes()
    sources = {}
    for key, source_list in anchored.items():
        for source in source_list:
            sources[source] = key
    extra_keys = sorted(set(classes) - set(anchored))

    # every class without a shipped pair implementation must reduce to
    # one that has: swap the copied member for what it implements and
    # re-check admissibility, following at most a few hops
    reductions: dict[str, dict] = {}

    def reduce_class(key: str, seen: tuple[str, ...]) -> dict | None:
        if key in anchored:
            return {"lands": anchored[key][0], "depth": len(seen)}
        if key in seen or len(seen) > 4:
            return None
        for f1_name, f2 in members.get(key, ()):
            t1 = int(refs[f1_name].table_string, 2)
            for via, copy in _implemented_copies(f2):
                if not _pair_admissible(masks, t1, int(copy.table_string, 2)):
                    continue
                next_key = canonical_class((refs[f1_name], copy)).key
                deeper = reduce_class(next_key, seen + (key,))
                if deeper is not None:
                    return {
                        "first": f1_name,
                        "second": f2.table_string,
                        "via": via,
                        "lands": deeper["lands"],
                        "depth": deeper["depth"],
                    }
        return None

    for key in extra_keys:
        chain = reduce_class(key, ())
        if chain is None:
            raise AssertionError(f"class {key} has no hardness continuation")
        reductions[key] = chain

    # the reference list, regenerated entry by entry
    item_sources = sorted(sources, key=lambda s: int(s.split("#")[1]))
    items = tuple(classes[sources[source]] for source in item_sources)

    stage_counts.append(("raw_pairs", pair_count))
    stage_counts.append(("canonical_classes", len(classes)))
    stage_counts.append(("implemented_classes", len(anchored)))
    stage_counts.append(("reduced_classes", len(reductions)))
    stage_counts.append(("list_entries", len(items)))

    detail = {
        "sources": {source: sources[source] for source in item_sources},
        "duplicate_entries": sorted(
            tuple(v) for v in anchored.values() if len(v) > 1
        ),
        "reduced": {
            key: reductions[key] for key in extra_keys
        },
    }
    audit_data = {"pairs": audit_pairs} if audit else None
    return CaseReport(
        2,
        items,
        tuple(stage_counts),
        time.perf_counter() - start,
        audit_data,
        detail,
    )


# ---------------------------------------------------------------------------
# Case 3


def search_case3(domain_size: int = 4) -> CaseReport:
    """Triples that are minimal non-chain-supermodular with good
    restrictions.  Empty on the 4-element domain; the 3-element analog
    finds triples and doubles as a pruning cross-check in the tests.

    Works on mask signatures: a qualifying triple needs pairwise
    intersecting but jointly empty chain masks (with every restriction
    mask intersection non-empty), so signature triples are screened with
    bitwise tests before any predicates are materialized.
    """
    start = time.perf_counter()
    d = domain_size
    masks = mask_tables(d)

    candidate = ~masks.has_all_ones_line & (masks.chain_mask != 0) & ~masks.is_trivial
    cand_idx = np.flatnonzero(candidate)

    # group candidates by full signature (chain mask + restriction masks)
    subs = list(masks.restriction_masks)
    sig_of = {}
    members: dict[tuple, list[int]] = {}
    for t in cand_idx:
        sig = (int(masks.chain_mask[t]),) + tuple(
            int(masks.restriction_masks[sub][t]) for sub in subs
        )
        members.setdefault(sig, []).append(int(t))
        sig_of[int(t)] = sig
    signatures = sorted(members)

    # coarse screen on chain masks alone: pairwise non-empty, triple empty
    chain_values = sorted({sig[0] for sig in signatures})
    cv = np.array(chain_values, dtype=np.int64)
    coarse = []
    for i in range(len(cv)):
        for j in range(i + 1, len(cv)):
            if cv[i] & cv[j] == 0:
                continue
            tail = cv[j + 1 :]
            hit = (
                ((tail & cv[i]) != 0)
                & ((tail & cv[j]) != 0)
                & ((tail & cv[i] & cv[j]) == 0)
            )
            for k in np.flatnonzero(hit):
                coarse.append((int(cv[i]), int(cv[j]), int(cv[j + 1 + k])))

    # refine: all restriction-mask intersections must be non-empty
    by_chain: dict[int, list[tuple]] = {}
    for sig in signatures:
        by_chain.setdefault(sig[0], []).append(sig)
    found: list[tuple[int, int, int]] = []
    refined = 0
    for a, b, c in coarse:
        for sa in by_chain[a]:
            for sb in by_chain[b]:
                if any(x & y == 0 for x, y in zip(sa[1:], sb[1:])):
                    continue
                for sc in by_chain[c]:
                    if any(
                        x & y & z == 0
                        for x, y, z in zip(sa[1:], sb[1:], sc[1:])
                    ):
                        continue
                    refined += 1
                    found.extend(
                        itertools.product(members[sa], members[sb], members[sc])
                    )

    items = tuple(
        tuple(_predicate(t, d) for t in sorted(triple))
        for triple in sorted(tuple(sorted(t)) for t in found)
    )
    stage_counts = (
        ("tables", len(masks.chain_mask)),
        ("candidates", int(cand_idx.size)),
        ("signatures", len(signatures)),
        ("distinct_chain_masks", len(chain_values)),
        ("coarse_mask_triples", len(coarse)),
        ("signature_triples", refined),
        ("bad_triples", len(items)),
    )
    return CaseReport(3, items, stage_counts, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# comparison against the shipped data


def reference_case1_classes() -> dict[str, str]:
    refs = reference_predicates()
    return {
        canonical_class(refs[f"hard{i}"]).key: f"hard{i}" for i in range(1, 28)
    }


def reference_case2_classes() -> dict[str, list[str]]:
    """Canonical class key -> sources of the shipped pair items in it.

    Two entries of the reference list are the same class (their forms
    differ by a transformation the original dedupe did not apply), so
    one key carries two sources.
    """
    out: dict[str, list[str]] = {}
    for item in appendix_catalog():
        if item.series != "C":
            continue
        partner = next(b for b in item.base if b != "f")
        pair = (reference_predicates()[partner], item.local["f"])
        out.setdefault(canonical_class(pair).key, []).append(item.source)
    return out


def diff_against_reference(report: CaseReport) -> dict:
    """Class-level comparison of a report against the shipped datasets.

    For case 2 a generated class absent from the shipped pair list is
    unexpected only if it also lacks a recorded reduction; the report's
    detail carries those records.
    """
    if report.case_id == 1:
        expected = reference_case1_classes()
        got = {canonical_class(p).key for p in report.items}
        missing = sorted(expected[k] for k in expected.keys() - got)
        unexpected = sorted(got - expected.keys())
    elif report.case_id == 2:
        expected = reference_case2_classes()
        got = {canonical_class(pair).key for pair in report.items}
        missing = sorted(
            s for k in expected.keys() - got for s in expected[k]
        )
        reduced = set((report.detail or {}).get("reduced", ()))
        unexpected = sorted(got - expected.keys() - reduced)
    else:
        expected = {}
        missing = []
        unexpected = [
            " ".join(p.table_string for p in triple) for triple in report.items
        ]
    return {
        "matched": len(got & expected.keys()) if report.case_id != 3 else 0,
        "missing": missing,
        "unexpected": unexpected,
        "agrees": not missing and not unexpected,
    }
