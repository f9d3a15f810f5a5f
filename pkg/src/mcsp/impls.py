"""Strict implementations: verification, catalog, search, instance rewriting.

A strict alpha-implementation expresses a target predicate g over primary
variables Y through a sum of constraints over Y and auxiliary variables Z:

    g(y) + (alpha - 1) = max over Z of the constraint sum,   for every y.

With Z empty the right side is the plain sum.  The equality is what
``verify_strict_implementation`` checks by exhaustion; nothing is trusted
by construction except where noted.

The shipped catalog holds 58 such implementations over the 4-element
domain: 27 reducing each predicate of the ``hard`` dataset to something
with a bad 2- or 3-element restriction or to another ``hard`` predicate
(series B), 27 doing the same for pairs {sup_i, f} (series C, each item
carrying its partner predicate f inline), and 4 inline reductions among
the ``sup`` predicates themselves (series X).  Each item records the
claimed consequence, re-checked against the reference tables by
``check_catalog_item``.

Also here: the unary-sum decomposition of subset predicates into
fixed-value predicates, slice binarization for predicates of arity >= 3,
the block-matrix normalization steps, a bounded brute-force search for
implementations, and the two instance rewrites (constraint replacement
with fresh auxiliaries, domain restriction lifting) whose optimum offsets
are exact and oracle-testable.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import (
    FORMAT_VERSION,
    Constraint,
    ConstraintLanguage,
    Instance,
    Predicate,
    _check_format,
    fix_predicate,
    parse_unary_name,
    permute_predicate,
    restrict_predicate,
    transpose_predicate,
    unary_name,
    unary_subset_predicate,
)
from .monge import SquareMatrix, decompose_01_amonge, is_anti_monge
from .solver import occurrence_stats

DATA_DIR = Path(__file__).parent / "data"


def aux_names(count: int) -> tuple[str, ...]:
    if count <= 2:
        return ("z", "w")[:count]
    return tuple(f"z{i}" for i in range(1, count + 1))


def primary_names(arity: int) -> tuple[str, ...]:
    if arity <= 2:
        return ("x", "y")[:arity]
    return tuple(f"x{i}" for i in range(1, arity + 1))


@dataclass(frozen=True)
class ImplConstraint:
    predicate: Predicate
    scope: tuple[str, ...]
    name: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scope", tuple(self.scope))
        if len(self.scope) != self.predicate.arity:
            raise ValueError(
                f"scope length {len(self.scope)} does not match arity "
                f"{self.predicate.arity}"
            )

    def render(self) -> str:
        label = self.name if self.name is not None else "g?"
        return f"{label}({','.join(self.scope)})"


@dataclass(frozen=True)
class StrictImplementation:
    """Target, slack alpha, and the constraint sum over primary + auxiliary
    variables.  The defining equality is checked by verify, not assumed."""

    target: Predicate
    alpha: int
    primary: tuple[str, ...]
    auxiliary: tuple[str, ...]
    constraints: tuple[ImplConstraint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "primary", tuple(self.primary))
        object.__setattr__(self, "auxiliary", tuple(self.auxiliary))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.alpha < 1:
            raise ValueError(f"alpha must be a positive integer: {self.alpha}")
        if len(self.primary) != self.target.arity:
            raise ValueError("one primary variable per target argument required")
        if len(set(self.primary + self.auxiliary)) != len(self.primary) + len(
            self.auxiliary
        ):
            raise ValueError("variable names must be distinct")
        if not self.constraints:
            raise ValueError("at least one constraint required")
        known = set(self.primary) | set(self.auxiliary)
        for c in self.constraints:
            if c.predicate.domain_size != self.target.domain_size:
                raise ValueError("constraint domain size differs from target")
            for v in c.scope:
                if v not in known:
                    raise ValueError(f"scope variable {v!r} is not bound")

    def formula(self) -> str:
        terms = " + ".join(c.render() for c in self.constraints)
        left = f"g({','.join(self.primary)})"
        if self.alpha > 1:
            left += f" + {self.alpha - 1}"
        if self.auxiliary:
            return f"{left} = max_{{{','.join(self.auxiliary)}}}[ {terms} ]"
        return f"{left} = {terms}"

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "target": self.target.to_json(),
            "alpha": self.alpha,
            "primary": list(self.primary),
            "auxiliary": list(self.auxiliary),
            "constraints": [
                {
                    **({"name": c.name} if c.name is not None else {}),
                    "pred": c.predicate.to_json(),
                    "scope": list(c.scope),
                }
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "StrictImplementation":
        _check_format(payload, "implementation")
        return cls(
            target=Predicate.from_json(payload["target"]),
            alpha=int(payload["alpha"]),
            primary=tuple(payload["primary"]),
            auxiliary=tuple(payload["auxiliary"]),
            constraints=tuple(
                ImplConstraint(
                    Predicate.from_json(c["pred"]), tuple(c["scope"]), c.get("name")
                )
                for c in payload["constraints"]
            ),
        )


def verify_strict_implementation(
    si: StrictImplementation,
) -> tuple[bool, dict | None]:
    """Exhaustively check the defining equality; a counterexample on failure.

    The failure detail names the first violating primary assignment (in
    lexicographic order), the achieved max, and the expected value.
    """
    d = si.target.domain_size
    for y_values in itertools.product(range(d), repeat=len(si.primary)):
        env = dict(zip(si.primary, y_values))
        best = None
        for z_values in itertools.product(range(d), repeat=len(si.auxiliary)):
            env.update(zip(si.auxiliary, z_values))
            total = sum(
                c.predicate.evaluate([env[v] for v in c.scope])
                for c in si.constraints
            )
            if best is None or total > best:
                best = total
        expected = si.target.evaluate(y_values) + si.alpha - 1
        if best != expected:
            return False, {
                "assignment": dict(zip(si.primary, y_values)),
                "achieved": best,
                "expected": expected,
            }
    return True, None


# ---------------------------------------------------------------------------
# constructions


def unary_decomposition(sub_domain: Sequence[int], domain_size: int) -> StrictImplementation:
    """u_S as the plain sum of the fixed-value predicates of its members."""
    values = sorted(set(sub_domain))
    if not values:
        raise ValueError("sub-domain must be non-empty")
    return StrictImplementation(
        target=unary_subset_predicate(domain_size, values),
        alpha=1,
        primary=("x",),
        auxiliary=(),
        constraints=tuple(
            ImplConstraint(
                unary_subset_predicate(domain_size, (v,)), ("x",), unary_name((v,))
            )
            for v in values
        ),
    )


def binarize(
    f: Predicate, positions: Sequence[int], constants: Sequence[int], name: str = "f"
) -> StrictImplementation:
    """The binary slice of f as a strict (arity-1)-implementation from f + U.

    Each fixed position gets an auxiliary variable pinned by a fixed-value
    predicate; the slack is the number of fixed positions plus one.
    """
    if f.arity < 3:
        raise ValueError("binarization applies to arity >= 3")
    positions = tuple(positions)
    constants = tuple(constants)
    if len(positions) != f.arity - 2:
        raise ValueError("exactly arity - 2 positions must be fixed")
    target = fix_predicate(f, positions, constants)
    primary = primary_names(2)
    auxiliary = aux_names(len(positions))
    free = [p for p in range(f.arity) if p not in positions]
    scope = [""] * f.arity
    for var, p in zip(primary, free):
        scope[p] = var
    aux_of = dict(zip(positions, auxiliary))
    for p, var in aux_of.items():
        scope[p] = var
    constraints = [ImplConstraint(f, tuple(scope), name)]
    for p, c in zip(positions, constants):
        constraints.append(
            ImplConstraint(
                unary_subset_predicate(f.domain_size, (c,)),
                (aux_of[p],),
                unary_name((c,)),
            )
        )
    return StrictImplementation(
        target=target,
        alpha=f.arity - 1,
        primary=primary,
        auxiliary=auxiliary,
        constraints=tuple(constraints),
    )


def lr_normalize(
    f: Predicate, name: str = "f"
) -> tuple[StrictImplementation, StrictImplementation]:
    """From an upper-left ones block to its lower-right complement and union.

    For a 0/1 table whose matrix is the block with rows 0..p, columns 0..q,
    returns two verifying implementations over the 4-element domain: the
    block with rows p+1.., columns q+1.. (slack 2, via two unary interval
    predicates), and the disjoint union of both blocks (slack 1, as the
    plain sum of f and the first result).
    """
    if f.domain_size != 4 or f.arity != 2:
        raise ValueError("normalization is defined on binary 4-element tables")
    dec = decompose_01_amonge(SquareMatrix.from_predicate(f))
    if dec.kind != "L":
        raise ValueError(f"table is not an upper-left block (got {dec.kind})")
    p, q = dec.p, dec.q
    d = 4
    row_tail = tuple(range(p + 1, d))
    col_tail = tuple(range(q + 1, d))
    lower_right = Predicate.from_function(
        d, 2, lambda x, y: x >= p + 1 and y >= q + 1
    )
    to_lower = StrictImplementation(
        target=lower_right,
        alpha=2,
        primary=("x", "y"),
        auxiliary=(),
        constraints=(
            ImplConstraint(f, ("x", "y"), name),
            ImplConstraint(
                unary_subset_predicate(d, row_tail), ("x",), unary_name(row_tail)
            ),
            ImplConstraint(
                unary_subset_predicate(d, col_tail), ("y",), unary_name(col_tail)
            ),
        ),
    )
    union = Predicate(
        d, 2, tuple(a | b for a, b in zip(f.table, lower_right.table))
    )
    to_union = StrictImplementation(
        target=union,
        alpha=1,
        primary=("x", "y"),
        auxiliary=(),
        constraints=(
            ImplConstraint(f, ("x", "y"), name),
            ImplConstraint(lower_right, ("x", "y"), f"{name}_lr"),
        ),
    )
    for si in (to_lower, to_union):
        ok, detail = verify_strict_implementation(si)
        if not ok:
            raise AssertionError(f"normalization failed to verify: {detail}")
    return to_lower, to_union


# ---------------------------------------------------------------------------
# bounded search


def search_strict_implementation(
    base: ConstraintLanguage,
    target: Predicate,
    max_aux: int = 2,
    max_constraints: int = 5,
    max_alpha: int = 8,
) -> StrictImplementation | None:
    """First implementation of the target from the base, in a fixed order.

    Enumerates auxiliary counts (ascending), then constraint counts
    (ascending), then multisets of candidate constraints in lexicographic
    order, candidates sorted by predicate name and scope.  The slack is
    determined by the candidate sum, so a multiset either yields exactly
    one implementation or none.  Exponential in the bounds; meant for
    catalog-scale rediscovery, not general synthesis.
    """
    if target.domain_size != base.domain_size:
        raise ValueError("target and base must share a domain")
    d = target.domain_size
    primary = primary_names(target.arity)
    target_vec = np.array(target.table, dtype=np.int64)

    for aux_count in range(max_aux + 1):
        auxiliary = aux_names(aux_count)
        variables = primary + auxiliary
        var_index = {v: i for i, v in enumerate(variables)}
        n_all = len(variables)
        assignments = list(itertools.product(range(d), repeat=n_all))

        candidates = []
        for pred_name in sorted(base.predicates):
            pred = base.predicates[pred_name]
            for scope in itertools.product(variables, repeat=pred.arity):
                values = np.array(
                    [
                        pred.evaluate([a[var_index[v]] for v in scope])
                        for a in assignments
                    ],
                    dtype=np.int64,
                )
                candidates.append((pred_name, pred, scope, values))

        shape = (d ** len(primary), d**aux_count)
        for size in range(1, max_constraints + 1):
            for combo in itertools.combinations_with_replacement(
                range(len(candidates)), size
            ):
                scopes = set(
                    itertools.chain.from_iterable(candidates[i][2] for i in combo)
                )
                # an unused auxiliary reduces to a smaller aux count
                if not set(auxiliary) <= scopes:
                    continue
                total = candidates[combo[0]][3].copy()
                for i in combo[1:]:
                    total += candidates[i][3]
                maxima = total.reshape(shape).max(axis=1)
                diff = maxima - target_vec
                slack = diff[0]
                if slack < 0 or slack + 1 > max_alpha or not (diff == slack).all():
                    continue
                return StrictImplementation(
                    target=target,
                    alpha=int(slack) + 1,
                    primary=primary,
                    auxiliary=auxiliary,
                    constraints=tuple(
                        ImplConstraint(
                            candidates[i][1], candidates[i][2], candidates[i][0]
                        )
                        for i in combo
                    ),
                )
    return None


# ---------------------------------------------------------------------------
# the shipped catalog


@dataclass(frozen=True)
class CatalogItem:
    """One appendix implementation with its annotated consequence."""

    source: str
    series: str
    base: tuple[str, ...]
    local: Mapping[str, Predicate]
    implementation: StrictImplementation
    formula: str
    consequence: Mapping

    def __post_init__(self) -> None:
        object.__setattr__(self, "local", dict(self.local))
        object.__setattr__(self, "consequence", dict(self.consequence))


@lru_cache(maxsize=1)
def reference_predicates() -> dict[str, Predicate]:
    """The shipped 4-element reference tables.

    sup1..sup18 all share the identity chain; hard1..hard27 are
    supermodular on no chain and pairwise inequivalent under relabeling
    and transposition.
    """
    payload = json.loads((DATA_DIR / "reference_predicates.json").read_text())
    _check_format(payload, "reference data")
    d = int(payload["domain_size"])
    out = {}
    for group in ("supermodular", "hard"):
        for name, table in payload[group].items():
            out[name] = Predicate.from_table_string(d, 2, table)
    return out


def resolve_predicate_name(
    name: str, domain_size: int, local: Mapping[str, Predicate] | None = None
) -> Predicate:
    """Reference name, u_<digits> name, or item-local name to a predicate."""
    if local and name in local:
        return local[name]
    refs = reference_predicates()
    if name in refs:
        if refs[name].domain_size != domain_size:
            raise ValueError(f"{name} has domain size {refs[name].domain_size}")
        return refs[name]
    unary = parse_unary_name(name, domain_size)
    if unary is not None:
        return unary
    raise ValueError(f"unknown predicate name: {name!r}")


def _item_from_json(payload: Mapping) -> CatalogItem:
    _check_format(payload, "catalog item")
    d = int(payload["domain_size"])
    local = {
        name: Predicate.from_table_string(d, 2, table)
        for name, table in payload.get("local", {}).items()
    }
    constraints = tuple(
        ImplConstraint(
            resolve_predicate_name(c["name"], d, local), tuple(c["scope"]), c["name"]
        )
        for c in payload["constraints"]
    )
    si = StrictImplementation(
        target=Predicate.from_table_string(d, 2, payload["target"]),
        alpha=int(payload["alpha"]),
        primary=tuple(payload["primary"]),
        auxiliary=tuple(payload["auxiliary"]),
        constraints=constraints,
    )
    return CatalogItem(
        source=payload["source"],
        series=payload["series"],
        base=tuple(payload["base"]),
        local=local,
        implementation=si,
        formula=payload["formula"],
        consequence=payload["consequence"],
    )


def _catalog_sort_key(source: str) -> tuple[str, int]:
    series, number = source.split("#")
    return series, int(number)


@lru_cache(maxsize=1)
def appendix_catalog() -> tuple[CatalogItem, ...]:
    """All 58 shipped implementations, ordered B#1..27, C#1..27, X#1..4."""
    items = []
    for path in (DATA_DIR / "catalog").glob("*.json"):
        items.append(_item_from_json(json.loads(path.read_text())))
    items.sort(key=lambda item: _catalog_sort_key(item.source))
    return tuple(items)


def catalog_by_source() -> dict[str, CatalogItem]:
    return {item.source: item for item in appendix_catalog()}


def _restriction_is_bad(g: Predicate, sub_domain: Sequence[int]) -> bool:
    restricted = restrict_predicate(g, sub_domain)
    if restricted.is_trivial:
        return False
    M = SquareMatrix.from_predicate(restricted)
    return not any(
        is_anti_monge(M.permuted(chain))[0]
        for chain in itertools.permutations(range(restricted.domain_size))
    )


def check_catalog_item(
    item: CatalogItem, catalog: Mapping[str, CatalogItem] | None = None
) -> dict:
    """Re-verify one item: the defining equality and the stated consequence.

    Pair-chaining consequences (series C) need the full catalog to look up
    the referenced item.
    """
    ok, detail = verify_strict_implementation(item.implementation)
    report = {"source": item.source, "verified": ok}
    if not ok:
        report["failure"] = detail
        report["consequence_holds"] = False
        return report

    g = item.implementation.target
    kind = item.consequence["kind"]
    if kind == "restriction_bad":
        holds = _restriction_is_bad(g, item.consequence["sub_domain"])
    elif kind == "equals":
        ref = resolve_predicate_name(item.consequence["reference"], g.domain_size)
        holds = g == ref
    elif kind == "transform_equal":
        ref = resolve_predicate_name(item.consequence["reference"], g.domain_size)
        image = transpose_predicate(g) if item.consequence["transpose"] else g
        holds = permute_predicate(image, item.consequence["pi"]) == ref
    elif kind == "pair_equal":
        if catalog is None:
            catalog = catalog_by_source()
        other = catalog[item.consequence["item"]]
        holds = g == other.local["f"] and _pair_partner(item) == _pair_partner(other)
    else:
        raise ValueError(f"unknown consequence kind: {kind!r}")
    report["consequence_holds"] = holds
    return report


def _pair_partner(item: CatalogItem) -> str | None:
    # the named (non-local) base predicate of a pair item
    named = [b for b in item.base if b not in item.local]
    return named[0] if named else None


# ---------------------------------------------------------------------------
# instance rewriting


@dataclass(frozen=True)
class RewriteResult:
    """A rewritten instance plus the exact optimum offset it introduces."""

    instance: Instance
    opt_offset: int
    detail: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "detail", dict(self.detail))


def apply_implementation_to_instance(
    instance: Instance, g_name: str, si: StrictImplementation
) -> RewriteResult:
    """Replace every g-constraint by the implementation's constraint sum.

    Weighted g-constraints are expanded to unit copies first; every copy
    gets fresh auxiliary variables.  The new optimum exceeds the old by
    (alpha - 1) times the number of replaced copies.
    """
    if g_name not in instance.predicates:
        raise ValueError(f"instance has no predicate named {g_name!r}")
    if instance.predicates[g_name] != si.target:
        raise ValueError("implementation target differs from the named predicate")
    ok, detail = verify_strict_implementation(si)
    if not ok:
        raise ValueError(f"implementation does not verify: {detail}")

    predicates = dict(instance.predicates)
    name_of_table: dict[tuple[int, tuple[int, ...]], str] = {
        (p.arity, p.table): n for n, p in predicates.items()
    }

    def intern(pred: Predicate, hint: str | None) -> str:
        key = (pred.arity, pred.table)
        if key in name_of_table:
            return name_of_table[key]
        name = hint if hint and hint not in predicates else None
        if name is None:
            i = len(predicates)
            while f"impl_{i}" in predicates:
                i += 1
            name = f"impl_{i}"
        predicates[name] = pred
        name_of_table[key] = name
        return name

    variables = list(instance.variables)
    constraints: list[Constraint] = []
    copies = 0
    for c in instance.constraints:
        if c.predicate != g_name:
            constraints.append(c)
            continue
        for _ in range(c.weight):
            copies += 1
            mapping = dict(zip(si.primary, c.scope))
            for a in si.auxiliary:
                fresh = f"{g_name}__{copies}_{a}"
                if fresh in instance.variables:
                    raise ValueError(f"auxiliary name {fresh!r} collides")
                mapping[a] = fresh
                variables.append(fresh)
            for ic in si.constraints:
                constraints.append(
                    Constraint(
                        intern(ic.predicate, ic.name),
                        tuple(mapping[v] for v in ic.scope),
                        1,
                    )
                )
    rewritten = Instance(
        instance.domain_size, predicates, tuple(variables), tuple(constraints)
    )
    return RewriteResult(
        instance=rewritten,
        opt_offset=(si.alpha - 1) * copies,
        detail={"replaced_copies": copies, "alpha": si.alpha},
    )


def restrict_domain_instance(
    instance: Instance,
    sub_domain: Sequence[int],
    lifts: Mapping[str, Predicate],
    k: int,
) -> RewriteResult:
    """Lift an instance over a sub-domain back to the full domain.

    Every predicate is replaced by its given lift (whose restriction to
    the sub-domain must reproduce it), and every variable gets a
    sub-domain membership constraint of weight k.  With k at least the
    maximum occurrence count and every variable occurring somewhere, the
    optimum grows by exactly k times the variable count.
    """
    sub_domain = tuple(sorted(set(sub_domain)))
    if len(sub_domain) != instance.domain_size:
        raise ValueError("sub-domain size must match the instance domain size")
    if not lifts:
        raise ValueError("no lifts given")
    full_size = next(iter(lifts.values())).domain_size
    if any(p.domain_size != full_size for p in lifts.values()):
        raise ValueError("lifts must share a domain size")
    if any(v >= full_size for v in sub_domain):
        raise ValueError("sub-domain outside the lifted domain")
    for name, pred in instance.predicates.items():
        if name not in lifts:
            raise ValueError(f"no lift for predicate {name!r}")
        if restrict_predicate(lifts[name], sub_domain) != pred:
            raise ValueError(f"lift of {name!r} does not restrict to it")
    counts, top = occurrence_stats(instance)
    if instance.variables and min(counts.values()) == 0:
        missing = min(v for v, c in counts.items() if c == 0)
        raise ValueError(f"variable {missing!r} occurs in no constraint")
    if k < top:
        raise ValueError(f"k={k} is below the maximum occurrence count {top}")

    membership = unary_subset_predicate(full_size, sub_domain)
    member_name = unary_name(sub_domain)
    predicates = {name: lifts[name] for name in instance.predicates}
    if member_name in predicates and predicates[member_name] != membership:
        raise ValueError(f"predicate name {member_name!r} already taken")
    predicates[member_name] = membership
    constraints = list(instance.constraints) + [
        Constraint(member_name, (v,), k) for v in instance.variables
    ]
    lifted = Instance(full_size, predicates, instance.variables, tuple(constraints))
    n = len(instance.variables)
    return RewriteResult(
        instance=lifted,
        opt_offset=k * n,
        detail={"k": k, "variables": n},
    )
