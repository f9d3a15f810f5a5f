"""Report builders shared by the HTTP routes and the command line.

Each function runs one package operation and returns the plain-JSON
report that both front ends emit; the shipped schemas in data/schemas
describe exactly these shapes.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from ..casegen import (
    diff_against_reference,
    generate_case1,
    generate_case2,
    search_case3,
)
from ..core import FORMAT_VERSION, ConstraintLanguage, Instance
from ..hcolor import Digraph, build_list_hcoloring_instance, classify_digraph
from ..impls import (
    StrictImplementation,
    appendix_catalog,
    catalog_by_source,
    check_catalog_item,
    verify_strict_implementation,
)
from ..monge import SquareMatrix, find_amonge_permutation, is_anti_monge
from ..solver import approx_solve, brute_force_opt
from ..supermod import classify_with_fixed_values


def classify_language(language: ConstraintLanguage) -> dict:
    return classify_with_fixed_values(language).to_json()


def classify_hcolor(H: Digraph) -> dict:
    return classify_digraph(H).to_json()


def monge_check(M: SquareMatrix, method: str = "adjacent") -> dict:
    ok, violation = is_anti_monge(M, method)
    return {
        "format": FORMAT_VERSION,
        "anti_monge": ok,
        "method": method,
        "violation": list(violation) if violation else None,
    }


def monge_permute(M: SquareMatrix) -> dict:
    search = find_amonge_permutation(M)
    return {
        "format": FORMAT_VERSION,
        "found": search.found,
        "permutation": list(search.permutation) if search.found else None,
        "witness_indices": (
            None if search.witness_indices is None else list(search.witness_indices)
        ),
        "witness_members": (
            None if search.witness_members is None else list(search.witness_members)
        ),
    }


def verify_implementation(si: StrictImplementation) -> dict:
    ok, failure = verify_strict_implementation(si)
    return {
        "format": FORMAT_VERSION,
        "verified": ok,
        "alpha": si.alpha,
        "failure": failure,
    }


def verify_catalog() -> dict:
    catalog = catalog_by_source()
    items = [check_catalog_item(item, catalog) for item in appendix_catalog()]
    passed = sum(1 for r in items if r["verified"] and r["consequence_holds"])
    return {
        "format": FORMAT_VERSION,
        "total": len(items),
        "passed": passed,
        "verified": passed == len(items),
        "items": items,
    }


def solve(instance: Instance, method: str = "brute") -> dict:
    if method == "brute":
        assignment, cost = brute_force_opt(instance)
    elif method == "approx":
        assignment, cost = approx_solve(instance)
    else:
        raise ValueError(f"unknown solve method {method!r}")
    return {
        "format": FORMAT_VERSION,
        "method": method,
        "assignment": assignment,
        "cost": cost,
        "total_weight": instance.total_weight(),
    }


def hcolor_instance(
    G: Digraph,
    H: Digraph,
    lists: Mapping[int, Sequence[int]] | None = None,
    scores: Mapping[int, Mapping[int, int]] | None = None,
    arc_weights: Mapping[tuple[int, int], int] | None = None,
) -> dict:
    return build_list_hcoloring_instance(G, H, lists, scores, arc_weights).to_json()


def reproduce(case: str, audit: bool = False) -> dict:
    if case == "case1":
        report = generate_case1(audit=audit)
    elif case == "case2":
        report = generate_case2(audit=audit)
    elif case == "case3":
        report = search_case3()
    else:
        raise ValueError(f"unknown case {case!r}")
    return {"report": report.to_json(), "diff": diff_against_reference(report)}
