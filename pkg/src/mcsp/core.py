"""Core data model for weighted Max CSP over a finite domain.

A predicate of arity m over the domain {0, ..., d-1} is a 0/1 function on
m-tuples, stored as a flat bit table.  Tuples index the table with the
first argument most significant:

    index(a_1, ..., a_m) = sum_i a_i * d^(m - i)

so for a binary predicate the first argument selects the matrix row and the
second the column.  A constraint language is a named set of such predicates
over a common domain; an instance attaches weighted constraints (predicate,
variable scope) to a variable list, and the objective is the total weight of
satisfied constraints under an assignment.

Chains are total orders of the domain, written as permutations: position 0
holds the least element.  The module also provides the standard predicate
constructors (unary subset tests, fixed-value tests, disequality,
two-sided monotone predicates), table transforms (argument permutation by a
domain relabeling, transposition, restriction to a sub-domain, fixing
argument positions), canonical forms under relabeling and transposition,
and endomorphism / core computations for languages.

Everything serializes to versioned JSON (``"format": 1``).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

FORMAT_VERSION = 1

MAX_DOMAIN_SIZE = 16


def index_of_tuple(args: Sequence[int], domain_size: int) -> int:
    """Flat table index of an argument tuple, first argument most significant."""
    idx = 0
    for a in args:
        idx = idx * domain_size + a
    return idx


def tuple_of_index(index: int, domain_size: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        out.append(index % domain_size)
        index //= domain_size
    return tuple(reversed(out))


def _check_format(payload: Mapping, what: str) -> None:
    version = payload.get("format", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported {what} format version: {version!r}")


# ---------------------------------------------------------------------------
# chains


def identity_chain(domain_size: int) -> tuple[int, ...]:
    return tuple(range(domain_size))

def validate_chain(chain: Sequence[int], domain_size: int) -> tuple[int, ...]:
    chain = tuple(chain)
    if sorted(chain) != list(range(domain_size)):
        raise ValueError(f"not a permutation of 0..{domain_size - 1}: {chain}")
    return chain

def reverse_chain(chain: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(chain))

def chain_ranks(chain: Sequence[int]) -> tuple[int, ...]:
    """ranks[v] = position of v in the chain (0 = least)."""
    ranks = [0] * len(chain)
    for pos, v in enumerate(chain):
        ranks[v] = pos
    return tuple(ranks)

def all_chains(domain_size: int) -> list[tuple[int, ...]]:
    """All total orders of the domain, in lexicographic order."""
    return [tuple(p) for p in itertools.permutations(range(domain_size))]


# ---------------------------------------------------------------------------
# predicates


@dataclass(frozen=True)
class Predicate:
    """A 0/1 function on m-tuples over {0, ..., d-1}, stored as a bit table."""

    domain_size: int
    arity: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.domain_size <= MAX_DOMAIN_SIZE:
            raise ValueError(f"domain size out of range: {self.domain_size}")
        if self.arity < 1:
            raise ValueError(f"arity must be positive: {self.arity}")
        if len(self.table) != self.domain_size ** self.arity:
            raise ValueError(
                f"table length {len(self.table)} != {self.domain_size}^{self.arity}"
            )
        if any(bit not in (0, 1) for bit in self.table):
            raise ValueError("table entries must be 0 or 1")

    @classmethod
    def from_table_string(cls, domain_size: int, arity: int, bits: str) -> "Predicate":
        return cls(domain_size, arity, tuple(int(c) for c in bits))

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "Predicate":
        """Binary predicate from matrix rows written as bit strings."""
        d = len(rows)
        if any(len(r) != d for r in rows):
            raise ValueError("rows must form a square bit matrix")
        return cls(d, 2, tuple(int(c) for r in rows for c in r))

    @classmethod
    def from_function(
        cls, domain_size: int, arity: int, fn: Callable[..., int]
    ) -> "Predicate":
        table = tuple(
            1 if fn(*args) else 0
            for args in itertools.product(range(domain_size), repeat=arity)
        )
        return cls(domain_size, arity, table)

    def evaluate(self, args: Sequence[int]) -> int:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        for a in args:
            if not 0 <= a < self.domain_size:
                raise ValueError(f"argument {a} outside domain of size {self.domain_size}")
        return self.table[index_of_tuple(args, self.domain_size)]

    def __call__(self, *args: int) -> int:
        return self.evaluate(args)

    @property
    def table_string(self) -> str:
        return "".join(str(b) for b in self.table)

    @property
    def is_trivial(self) -> bool:
        """True when the predicate is identically zero."""
        return not any(self.table)

    def matrix_rows(self) -> tuple[tuple[int, ...], ...]:
        if self.arity != 2:
            raise ValueError("matrix form requires a binary predicate")
        d = self.domain_size
        return tuple(tuple(self.table[r * d + c] for c in range(d)) for r in range(d))

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "domain_size": self.domain_size,
            "arity": self.arity,
            "table": self.table_string,
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "Predicate":
        _check_format(payload, "predicate")
        return cls.from_table_string(
            int(payload["domain_size"]), int(payload["arity"]), payload["table"]
        )


# ---------------------------------------------------------------------------
# standard predicate constructors


def unary_subset_predicate(domain_size: int, subset: Iterable[int]) -> Predicate:
    """u_S(x) = 1 iff x is in S.  S must be non-empty."""
    members = frozenset(subset)
    if not members:
        raise ValueError("subset must be non-empty")
    if not all(0 <= v < domain_size for v in members):
        raise ValueError(f"subset {sorted(members)} outside domain")
    return Predicate(
        domain_size, 1, tuple(1 if v in members else 0 for v in range(domain_size))
    )


def fixed_value_predicate(domain_size: int, value: int) -> Predicate:
    """u_a(x) = 1 iff x = a: one of the fixed-value predicates forming C_D."""
    return unary_subset_predicate(domain_size, (value,))


def all_fixed_value_predicates(domain_size: int) -> dict[str, Predicate]:
    return {
        unary_name((v,)): fixed_value_predicate(domain_size, v)
        for v in range(domain_size)
    }


def neq_predicate(domain_size: int) -> Predicate:
    """Disequality: 1 iff the two arguments differ."""
    if domain_size < 2:
        raise ValueError("disequality needs at least two domain values")
    return Predicate.from_function(domain_size, 2, lambda x, y: x != y)


def two_monotone_predicate(
    domain_size: int,
    lower: Sequence[int] | None = None,
    upper: Sequence[int] | None = None,
    chain: Sequence[int] | None = None,
) -> Predicate:
    """1 iff (x, y) <= lower or (x, y) >= upper, componentwise in the chain order.

    Either bound may be omitted; at least one must be present.
    """
    if lower is None and upper is None:
        raise ValueError("need at least one of lower, upper")
    chain = validate_chain(chain if chain is not None else identity_chain(domain_size),
                           domain_size)
    ranks = chain_ranks(chain)

    def holds(x: int, y: int) -> int:
        if lower is not None and ranks[x] <= ranks[lower[0]] and ranks[y] <= ranks[lower[1]]:
            return 1
        if upper is not None and ranks[x] >= ranks[upper[0]] and ranks[y] >= ranks[upper[1]]:
            return 1
        return 0

    return Predicate.from_function(domain_size, 2, holds)


def unary_name(subset: Iterable[int]) -> str:
    """Canonical name for a unary subset predicate, e.g. u_03 for {0, 3}."""
    return "u_" + "".join(format(v, "x") for v in sorted(set(subset)))


def parse_unary_name(name: str, domain_size: int) -> Predicate | None:
    """Resolve names of the u_... form; None when the name does not match."""
    if not name.startswith("u_") or len(name) < 3:
        return None
    try:
        members = [int(c, 16) for c in name[2:]]
    except ValueError:
        return None
    if any(not 0 <= v < domain_size for v in members):
        return None
    return unary_subset_predicate(domain_size, members)


def build_standard_predicate(kind: str, domain_size: int, **params) -> Predicate:
    """Dispatching constructor for the standard predicates, by kind name."""
    if kind == "unary_subset":
        return unary_subset_predicate(domain_size, params["subset"])
    if kind == "fixed_value":
        return fixed_value_predicate(domain_size, params["value"])
    if kind == "neq":
        return neq_predicate(domain_size)
    if kind == "two_monotone":
        return two_monotone_predicate(
            domain_size,
            lower=params.get("lower"),
            upper=params.get("upper"),
            chain=params.get("chain"),
        )
    raise ValueError(f"unknown standard predicate kind: {kind!r}")


# ---------------------------------------------------------------------------
# transforms


def permute_predicate(f: Predicate, pi: Sequence[int]) -> Predicate:
    """Relabel the domain: g(a_1, ..., a_m) = f(pi(a_1), ..., pi(a_m))."""
    pi = validate_chain(pi, f.domain_size)
    d = f.domain_size
    table = tuple(
        f.table[index_of_tuple([pi[a] for a in args], d)]
        for args in itertools.product(range(d), repeat=f.arity)
    )
    return Predicate(d, f.arity, table)


def transpose_predicate(f: Predicate) -> Predicate:
    """Swap the arguments of a binary predicate: f^t(x, y) = f(y, x)."""
    if f.arity != 2:
        raise ValueError("transpose requires a binary predicate")
    d = f.domain_size
    table = tuple(f.table[y * d + x] for x in range(d) for y in range(d))
    return Predicate(d, 2, table)


def restrict_predicate(f: Predicate, sub_domain: Iterable[int]) -> Predicate:
    """Restrict to a sub-domain, relabeled to 0..k-1 in ascending value order.

    The result may be identically zero; callers check ``is_trivial``.
    """
    values = sorted(set(sub_domain))
    if not values:
        raise ValueError("sub-domain must be non-empty")
    if not all(0 <= v < f.domain_size for v in values):
        raise ValueError(f"sub-domain {values} outside domain")
    k = len(values)
    table = tuple(
        f.table[index_of_tuple([values[a] for a in args], f.domain_size)]
        for args in itertools.product(range(k), repeat=f.arity)
    )
    return Predicate(k, f.arity, table)


def fix_predicate(
    f: Predicate, positions: Sequence[int], constants: Sequence[int]
) -> Predicate:
    """Fix the given argument positions (0-based) to constants.

    Returns the predicate on the remaining free positions, in their original
    order.  At least one position must stay free.
    """
    if len(positions) != len(constants):
        raise ValueError("positions and constants must have equal length")
    if len(set(positions)) != len(positions):
        raise ValueError("positions must be distinct")
    for p in positions:
        if not 0 <= p < f.arity:
            raise ValueError(f"position {p} out of range for arity {f.arity}")
    for c in constants:
        if not 0 <= c < f.domain_size:
            raise ValueError(f"constant {c} outside domain")
    fixed = dict(zip(positions, constants))
    free = [p for p in range(f.arity) if p not in fixed]
    if not free:
        raise ValueError("at least one argument position must remain free")
    d = f.domain_size

    def build(args: tuple[int, ...]) -> int:
        full = [0] * f.arity
        for p, a in zip(free, args):
            full[p] = a
        for p, c in fixed.items():
            full[p] = c
        return f.table[index_of_tuple(full, d)]

    table = tuple(build(args) for args in itertools.product(range(d), repeat=len(free)))
    return Predicate(d, len(free), table)


def transform_predicate(f: Predicate, op: str, **params) -> Predicate:
    """Dispatching transform: op in {permute, transpose, restrict, fix}."""
    if op == "permute":
        return permute_predicate(f, params["pi"])
    if op == "transpose":
        return transpose_predicate(f)
    if op == "restrict":
        return restrict_predicate(f, params["sub_domain"])
    if op == "fix":
        return fix_predicate(f, params["positions"], params["constants"])
    raise ValueError(f"unknown transform: {op!r}")


# ---------------------------------------------------------------------------
# canonical forms


@dataclass(frozen=True)
class CanonicalClass:
    """Least representative of a predicate (or predicate pair) orbit.

    The orbit of a single binary predicate is generated by domain
    relabelings and transposition.  For an ordered pair it is generated by
    simultaneous relabelings of both components, transposition of either
    component, and swapping the components; that matches the pair
    equivalences used to prune the pair enumeration (a relabeled pair poses
    the same problem, a transposed component is freely interchangeable, and
    a swapped pair is the same set).
    """

    key: str
    representative: tuple[Predicate, ...]
    orbit_size: int

    @property
    def single(self) -> Predicate:
        if len(self.representative) != 1:
            raise ValueError("not a single-predicate class")
        return self.representative[0]


def _predicate_orbit(f: Predicate) -> Iterator[Predicate]:
    for pi in itertools.permutations(range(f.domain_size)):
        g = permute_predicate(f, pi)
        yield g
        if f.arity == 2:
            yield transpose_predicate(g)


def canonical_class(item: Predicate | Sequence[Predicate]) -> CanonicalClass:
    """Canonical class of a predicate, or of an ordered pair of binary predicates."""
    if isinstance(item, Predicate):
        seen = {g.table_string: g for g in _predicate_orbit(item)}
        key = min(seen)
        return CanonicalClass(key, (seen[key],), len(seen))

    pair = tuple(item)
    if len(pair) != 2 or any(p.arity != 2 for p in pair):
        raise ValueError("pair canonicalization expects two binary predicates")
    if pair[0].domain_size != pair[1].domain_size:
        raise ValueError("pair members must share a domain")
    d = pair[0].domain_size
    seen: dict[str, tuple[Predicate, Predicate]] = {}
    for pi in itertools.permutations(range(d)):
        images = [permute_predicate(p, pi) for p in pair]
        for t0, t1 in itertools.product((False, True), repeat=2):
            a = transpose_predicate(images[0]) if t0 else images[0]
            b = transpose_predicate(images[1]) if t1 else images[1]
            for first, second in ((a, b), (b, a)):
                seen[first.table_string + second.table_string] = (first, second)
    key = min(seen)
    return CanonicalClass(key, seen[key], len(seen))


# ---------------------------------------------------------------------------
# languages


@dataclass(frozen=True)
class ConstraintLanguage:
    """A named, ordered set of predicates over a common domain.

    ``include_fixed_values`` records whether the language is considered
    together with all fixed-value unary predicates; the classifier's
    verdict contract assumes that setting.
    """

    domain_size: int
    predicates: Mapping[str, Predicate]
    include_fixed_values: bool = True

    def __post_init__(self) -> None:
        # size-1 languages arise as cores (an all-ones predicate collapses
        # the whole domain), so only the upper bound is enforced here
        if not 1 <= self.domain_size <= MAX_DOMAIN_SIZE:
            raise ValueError(f"domain size out of range: {self.domain_size}")
        object.__setattr__(self, "predicates", dict(self.predicates))
        for name, pred in self.predicates.items():
            if not name:
                raise ValueError("predicate names must be non-empty")
            if pred.domain_size != self.domain_size:
                raise ValueError(f"predicate {name!r} has mismatched domain size")
            if pred.is_trivial:
                raise ValueError(f"predicate {name!r} is identically zero")

    def __iter__(self) -> Iterator[tuple[str, Predicate]]:
        return iter(self.predicates.items())

    def __len__(self) -> int:
        return len(self.predicates)

    def max_arity(self) -> int:
        return max((p.arity for p in self.predicates.values()), default=1)

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "domain_size": self.domain_size,
            "fixed_values": self.include_fixed_values,
            "predicates": {
                name: {"arity": p.arity, "table": p.table_string}
                for name, p in self.predicates.items()
            },
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "ConstraintLanguage":
        _check_format(payload, "language")
        d = int(payload["domain_size"])
        preds = {
            name: Predicate.from_table_string(d, int(spec["arity"]), spec["table"])
            for name, spec in payload["predicates"].items()
        }
        return cls(d, preds, bool(payload.get("fixed_values", True)))


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Constraint:
    predicate: str
    scope: tuple[str, ...]
    weight: int = 1


@dataclass(frozen=True)
class Instance:
    """A weighted Max CSP instance: maximize total weight of satisfied constraints."""

    domain_size: int
    predicates: Mapping[str, Predicate]
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicates", dict(self.predicates))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self,
            "constraints",
            tuple(
                c if isinstance(c, Constraint) else Constraint(*c)
                for c in self.constraints
            ),
        )
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("variable names must be distinct")
        var_set = set(self.variables)
        for name, pred in self.predicates.items():
            if pred.domain_size != self.domain_size:
                raise ValueError(f"predicate {name!r} has mismatched domain size")
        for c in self.constraints:
            if c.predicate not in self.predicates:
                raise ValueError(f"unknown predicate {c.predicate!r} in constraint")
            if len(c.scope) != self.predicates[c.predicate].arity:
                raise ValueError(
                    f"scope length {len(c.scope)} does not match arity of {c.predicate!r}"
                )
            if any(v not in var_set for v in c.scope):
                raise ValueError(f"constraint scope {c.scope} uses unknown variables")
            if not isinstance(c.weight, int) or c.weight < 1:
                raise ValueError(f"weights must be positive integers, got {c.weight!r}")

    def total_weight(self) -> int:
        return sum(c.weight for c in self.constraints)

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        """Total weight of constraints satisfied by a total assignment."""
        for v in self.variables:
            if v not in assignment:
                raise ValueError(f"assignment misses variable {v!r}")
            if not 0 <= assignment[v] < self.domain_size:
                raise ValueError(f"value for {v!r} outside domain")
        total = 0
        for c in self.constraints:
            pred = self.predicates[c.predicate]
            if pred.evaluate([assignment[v] for v in c.scope]):
                total += c.weight
        return total

    def to_json(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "domain_size": self.domain_size,
            "predicates": {
                name: {"arity": p.arity, "table": p.table_string}
                for name, p in self.predicates.items()
            },
            "variables": list(self.variables),
            "constraints": [
                {"pred": c.predicate, "scope": list(c.scope), "weight": c.weight}
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, payload: Mapping) -> "Instance":
        _check_format(payload, "instance")
        d = int(payload["domain_size"])
        preds = {
            name: Predicate.from_table_string(d, int(spec["arity"]), spec["table"])
            for name, spec in payload["predicates"].items()
        }
        constraints = tuple(
            Constraint(c["pred"], tuple(c["scope"]), int(c.get("weight", 1)))
            for c in payload["constraints"]
        )
        return cls(d, preds, tuple(payload["variables"]), constraints)


# ---------------------------------------------------------------------------
# endomorphisms and cores


def endomorphisms(language: ConstraintLanguage) -> list[tuple[int, ...]]:
    """All maps mu with f(a) = 1 implying f(mu(a)) = 1 for every predicate.

    Returned as value tuples (mu(0), ..., mu(d-1)) in lexicographic order.
    Exhaustive over the d^d candidate maps.
    """
    d = language.domain_size
    supports = [
        [tuple_of_index(i, d, p.arity) for i, bit in enumerate(p.table) if bit]
        for _, p in language
    ]
    found = []
    for mu in itertools.product(range(d), repeat=d):
        ok = True
        for (_, pred), tuples in zip(language, supports):
            for args in tuples:
                if not pred.table[index_of_tuple([mu[a] for a in args], d)]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(mu)
    return found


def core_of(language: ConstraintLanguage) -> tuple[tuple[int, ...], ConstraintLanguage]:
    """Sub-domain and restricted language under a minimal-image endomorphism.

    Among endomorphisms of minimal image size, the lexicographically least
    map is used, so the result is deterministic.  Predicates whose
    restriction to the core is identically zero are dropped.
    """
    maps = endomorphisms(language)
    best = min(maps, key=lambda mu: (len(set(mu)), mu))
    image = tuple(sorted(set(best)))
    restricted = {}
    for name, pred in language:
        r = restrict_predicate(pred, image)
        if not r.is_trivial:
            restricted[name] = r
    return image, ConstraintLanguage(
        len(image), restricted, language.include_fixed_values
    )


# ---------------------------------------------------------------------------
# file helpers


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(payload: Mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")
