"""Service tests: routes, status codes, schema conformance."""

import json
from importlib import resources

import jsonschema
import pytest
from fastapi.testclient import TestClient

import mcsp
from mcsp.hcolor import Digraph, build_list_hcoloring_instance, classify_digraph
from mcsp.impls import appendix_catalog
from mcsp.monge import SquareMatrix, delta
from mcsp.service.app import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def schema(name):
    path = resources.files("mcsp") / "data" / "schemas" / f"{name}.schema.json"
    return json.loads(path.read_text())


def valid(name, payload):
    jsonschema.validate(payload, schema(name))
    return payload


NEQ2 = {"arity": 2, "table": "0110"}
RECT = {"arity": 2, "table": "0000000000110011"}


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    body = valid("health", r.json())
    assert body["version"] == mcsp.__version__


def test_classify_tractable(client):
    r = client.post("/classify", json={"domain_size": 4, "predicates": {"f": RECT}})
    assert r.status_code == 200
    body = valid("classification", r.json())
    assert body["verdict"] == "tractable"
    assert body["chain"] == [0, 1, 2, 3]
    assert "witness" not in body


def test_classify_hard(client):
    r = client.post("/classify", json={"domain_size": 2, "predicates": {"f": NEQ2}})
    assert r.status_code == 200
    body = valid("classification", r.json())
    assert body["verdict"] == "apx_complete"
    assert body["witness"]["sub_domain"] == [0, 1]
    assert body["witness"]["predicates"] == ["f"]
    assert "chain" not in body


def test_classify_shape_error(client):
    r = client.post("/classify", json={"domain_size": 4, "predicates": {"f": {"arity": 2}}})
    assert r.status_code == 422


def test_classify_domain_error(client):
    r = client.post(
        "/classify", json={"domain_size": 4, "predicates": {"f": {"arity": 2, "table": "0110"}}}
    )
    assert r.status_code == 400
    assert "table length" in r.json()["detail"]


def test_monge_check(client):
    r = client.post("/monge/check", json={"rows": [[1, 0], [0, 1]]})
    body = valid("monge_check", r.json())
    assert body["anti_monge"] is True and body["violation"] is None

    r = client.post("/monge/check", json={"rows": [[0, 1], [1, 0]]}, params={"method": "full"})
    body = valid("monge_check", r.json())
    assert body["anti_monge"] is False and body["method"] == "full"
    i, j, k, l = body["violation"]
    assert delta(SquareMatrix(((0, 1), (1, 0))), i, j, k, l) < 0


def test_monge_check_rejects_non_square(client):
    r = client.post("/monge/check", json={"rows": [[0, 1]]})
    assert r.status_code == 400


def test_monge_permute(client):
    r = client.post("/monge/permute", json={"rows": [[1, 0], [0, 1]]})
    body = valid("monge_permute", r.json())
    assert body["found"] is True and body["permutation"] == [0, 1]

    r = client.post("/monge/permute", json={"rows": [[0, 1], [1, 0]]})
    body = valid("monge_permute", r.json())
    assert body["found"] is False
    assert 1 <= len(body["witness_indices"]) <= 4


def test_verify_impl_single(client):
    impl = appendix_catalog()[0].implementation
    r = client.post("/verify-impl", json=impl.to_json())
    body = valid("verify_impl", r.json())
    assert body["verified"] is True and body["failure"] is None

    tampered = impl.to_json()
    tampered["alpha"] += 1
    r = client.post("/verify-impl", json=tampered)
    body = valid("verify_impl", r.json())
    assert body["verified"] is False
    assert body["failure"]["achieved"] != body["failure"]["expected"]


def test_verify_catalog(client):
    r = client.get("/verify-impl/catalog")
    body = valid("catalog_verify", r.json())
    assert body["total"] == 58 and body["passed"] == 58 and body["verified"]
    assert all(i["verified"] and i["consequence_holds"] for i in body["items"])


def test_solve(client):
    instance = {
        "domain_size": 2,
        "predicates": {"neq": NEQ2},
        "variables": ["x", "y", "z"],
        "constraints": [
            {"pred": "neq", "scope": ["x", "y"], "weight": 2},
            {"pred": "neq", "scope": ["y", "z"]},
            {"pred": "neq", "scope": ["x", "z"]},
        ],
    }
    r = client.post("/solve", json={"instance": instance, "method": "brute"})
    body = valid("solve", r.json())
    assert body["cost"] == 3 and body["total_weight"] == 4

    r = client.post("/solve", json={"instance": instance, "method": "approx"})
    body = valid("solve", r.json())
    assert body["cost"] * 4 >= body["total_weight"]


def test_solve_budget_exceeded(client):
    instance = {
        "domain_size": 4,
        "predicates": {"neq": {"arity": 2, "table": "0111101111011110"}},
        "variables": [f"x{i}" for i in range(13)],
        "constraints": [{"pred": "neq", "scope": ["x0", "x1"]}],
    }
    r = client.post("/solve", json={"instance": instance, "method": "brute"})
    assert r.status_code == 400
    assert "budget" in r.json()["detail"]


def test_hcolor_classify_matches_library(client):
    for payload in (
        {"vertices": 2, "edges": [[0, 1], [1, 0]], "directed": True},
        {"vertices": 3, "edges": [[0, 0], [1, 1], [2, 2]], "directed": True},
        {"vertices": 4, "edges": [], "directed": True},
    ):
        r = client.post("/hcolor/classify", json=payload)
        body = valid("classification", r.json())
        expected = classify_digraph(Digraph(payload["vertices"], tuple(map(tuple, payload["edges"]))))
        assert body["verdict"] == expected.verdict


def test_hcolor_classify_requires_directed(client):
    r = client.post("/hcolor/classify", json={"vertices": 2, "edges": [[0, 1]]})
    assert r.status_code == 422


def test_hcolor_instance(client):
    r = client.post(
        "/hcolor/instance",
        json={
            "g": {"vertices": 2, "edges": [[0, 1]], "directed": True},
            "h": {"vertices": 3, "edges": [[0, 1], [1, 2]], "directed": True},
            "lists": {"0": [0, 1]},
            "scores": {"1": {"2": 3}},
            "arc_weights": [[0, 1, 4]],
        },
    )
    body = valid("instance", r.json())
    expected = build_list_hcoloring_instance(
        Digraph(2, ((0, 1),)),
        Digraph(3, ((0, 1), (1, 2))),
        lists={0: (0, 1)},
        scores={1: {2: 3}},
        arc_weights={(0, 1): 4},
    )
    assert body == expected.to_json()


def test_reproduce_case1(client):
    r = client.post("/reproduce/case1", json={})
    body = valid("reproduce", r.json())
    assert body["report"]["case"] == 1
    assert len(body["report"]["items"]) == 27
    assert body["diff"]["agrees"] is True
    assert body["report"]["audit"] is None

    r = client.post("/reproduce/case1", json={"audit": True})
    assert valid("reproduce", r.json())["report"]["audit"] is not None


def test_reproduce_case3(client):
    r = client.post("/reproduce/case3")
    body = valid("reproduce", r.json())
    assert body["report"]["items"] == [] and body["diff"]["agrees"] is True


def test_reproduce_rejects_unknown_case(client):
    assert client.post("/reproduce/case9", json={}).status_code == 422
    assert client.post("/reproduce/case1", json={"jobs": 0}).status_code == 422
