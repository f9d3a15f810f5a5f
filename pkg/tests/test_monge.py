"""Anti-Monge recognition tests against a brute-force quadruple oracle."""

import itertools
import random

import pytest

from mcsp.monge import (
    ConflictWitness,
    MultipartiteOrder,
    SquareMatrix,
    amonge_permutation_family,
    decompose_01_amonge,
    delta,
    delta2,
    find_amonge_permutation,
    find_common_amonge_permutation,
    is_anti_monge,
    line_equivalent,
    merge_orders,
)

# principal 4x4 matrix with no good reordering although every proper
# principal submatrix has one
IRREDUCIBLE_4 = SquareMatrix(((1, 1, 0, 1), (1, 1, 0, 0), (0, 0, 0, 0), (1, 0, 0, 1)))

# three diagonal matrices: any two admit a common reordering, all three do not
DIAGONAL_TRIO = [
    SquareMatrix(tuple(tuple(1 if i == j == k else 0 for j in range(3)) for i in range(3)))
    for k in range(3)
]


def amonge_oracle(M, pi=None):
    # every quadruple, no adjacency shortcut
    n = M.size
    pi = pi or tuple(range(n))
    return all(
        delta(M.permuted(pi), i, j, k, l) >= 0
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(n)
        for l in range(k + 1, n)
    )


def random_matrix(rng, n=4, lo=-3, hi=3):
    return SquareMatrix(
        tuple(tuple(rng.randint(lo, hi) for _ in range(n)) for _ in range(n))
    )


def monotone_vector(rng, n, hi=3):
    v = sorted(rng.randint(0, hi) for _ in range(n))
    return v if rng.random() < 0.5 else v[::-1]


def random_amonge(rng, n=4, terms=3):
    # non-negative sums of outer products of equally-directed monotone
    # vectors, plus a row+column offset; all the pieces have delta >= 0
    u = [rng.randint(-2, 2) for _ in range(n)]
    v = [rng.randint(-2, 2) for _ in range(n)]
    rows = [[u[i] + v[j] for j in range(n)] for i in range(n)]
    for _ in range(rng.randint(0, terms)):
        a = monotone_vector(rng, n)
        b = monotone_vector(rng, n)
        if (a[0] > a[-1]) != (b[0] > b[-1]):
            b = b[::-1]
        for i in range(n):
            for j in range(n):
                rows[i][j] += a[i] * b[j]
    return SquareMatrix(tuple(tuple(r) for r in rows))


def test_matrix_validation():
    with pytest.raises(ValueError):
        SquareMatrix(((1, 2), (3,)))
    with pytest.raises(ValueError):
        SquareMatrix(())
    with pytest.raises(ValueError):
        SquareMatrix(((True, False), (0, 1)))


def test_json_round_trip_and_bounds():
    M = random_matrix(random.Random(0))
    assert SquareMatrix.from_json(M.to_json()) == M
    with pytest.raises(ValueError):
        SquareMatrix.from_json({"format": 1, "size": 1, "rows": [[2**63]]})
    with pytest.raises(ValueError):
        SquareMatrix.from_json({"format": 1, "size": 2, "rows": [[0, 0]]})


def test_delta_identities():
    rng = random.Random(1)
    for _ in range(100):
        M = random_matrix(rng)
        i, j = sorted(rng.sample(range(4), 2))
        k, l = sorted(rng.sample(range(4), 2))
        assert delta(M, i, j, k, l) == M.entry(i, k) + M.entry(j, l) - M.entry(i, l) - M.entry(j, k)
        # the quadruple sum telescopes over adjacent pairs
        assert delta(M, i, j, k, l) == sum(
            delta(M, s, s + 1, t, t + 1) for s in range(i, j) for t in range(k, l)
        )
        assert delta2(M, i, j) == delta(M, i, j, i, j)


def test_adjacent_check_agrees_with_full():
    rng = random.Random(2)
    for _ in range(300):
        M = random_matrix(rng)
        ok, violation = is_anti_monge(M, method="both")
        assert ok == amonge_oracle(M)
        if not ok:
            i, j, k, l = violation
            assert i < j and k < l and delta(M, i, j, k, l) < 0


def test_random_constructions_are_amonge():
    rng = random.Random(3)
    for _ in range(200):
        M = random_amonge(rng)
        assert is_anti_monge(M)[0]


def test_line_equivalence():
    M = SquareMatrix(((0, 1, 2), (3, 4, 5), (1, 2, 3)))
    assert line_equivalent(M, "row", 0, 1) == (True, -3)
    assert line_equivalent(M, "row", 2, 0) == (True, 1)
    assert line_equivalent(M, "col", 0, 1) == (True, -1)
    bumped = SquareMatrix(((0, 1, 2), (3, 4, 6), (1, 2, 3)))
    assert line_equivalent(bumped, "row", 0, 1) == (False, None)
    with pytest.raises(ValueError):
        line_equivalent(M, "diag", 0, 1)


def test_equivalence_iff_zero_deltas():
    # rows s,t differ by a constant exactly when delta(s,t,k,l) = 0 for all k<l
    rng = random.Random(4)
    for _ in range(200):
        M = random_matrix(rng, n=4, lo=0, hi=2)
        for s, t in itertools.combinations(range(4), 2):
            eq = line_equivalent(M, "row", s, t)[0]
            zero = all(delta(M, s, t, k, l) == 0 for k in range(4) for l in range(k + 1, 4))
            assert eq == zero


TWO_BLOCK_TABLES = {
    # rows -> (p, q, s, t) of the upper-left and lower-right ones blocks
    "1000/0000/0000/0001": (0, 0, 3, 3),
    "1100/0000/0000/0001": (0, 1, 3, 3),
    "1110/0000/0000/0001": (0, 2, 3, 3),
    "1100/1100/0000/0001": (1, 1, 3, 3),
    "1110/1110/0000/0001": (1, 2, 3, 3),
    "1110/1110/1110/0001": (2, 2, 3, 3),
    "1100/0000/0001/0001": (0, 1, 2, 3),
    "1110/0000/0001/0001": (0, 2, 2, 3),
    "1000/1000/0001/0001": (1, 0, 2, 3),
    "1100/1100/0001/0001": (1, 1, 2, 3),
    "1110/1110/0001/0001": (1, 2, 2, 3),
    "1110/0001/0001/0001": (0, 2, 1, 3),
    "1000/1001/0001/0001": (1, 0, 1, 3),
    "1100/1101/0001/0001": (1, 1, 1, 3),
    "1000/1001/1001/0001": (2, 0, 1, 3),
    "1100/1100/1101/0001": (2, 1, 2, 3),
    "1100/1101/1101/0001": (2, 1, 1, 3),
    "1100/1100/0011/0011": (1, 1, 2, 2),
}


def test_two_block_decompositions():
    for rows, (p, q, s, t) in TWO_BLOCK_TABLES.items():
        M = SquareMatrix.from_bits(rows.split("/"))
        dec = decompose_01_amonge(M)
        assert dec.kind == "LplusR"
        assert (dec.p, dec.q, dec.s, dec.t) == (p, q, s, t)
        assert dec.reconstruct(4) == M


def test_single_block_decompositions():
    L = SquareMatrix.from_bits(["1100", "1100", "0000", "0000"])
    dec = decompose_01_amonge(L)
    assert (dec.kind, dec.p, dec.q) == ("L", 1, 1)
    R = SquareMatrix.from_bits(["0000", "0011", "0011", "0011"])
    dec = decompose_01_amonge(R)
    assert (dec.kind, dec.s, dec.t) == ("R", 1, 2)
    assert decompose_01_amonge(SquareMatrix.from_bits(["00", "00"])).kind == "all_zero"
    lined = decompose_01_amonge(SquareMatrix.from_bits(["11", "01"]))
    assert (lined.kind, lined.axis, lined.index) == ("all_ones_line", "row", 0)
    bad = decompose_01_amonge(SquareMatrix.from_bits(["01", "10"]))
    assert bad.kind == "not_amonge" and bad.violation == (0, 1, 0, 1)
    with pytest.raises(ValueError):
        decompose_01_amonge(SquareMatrix(((2,),)))


def test_decomposition_exhaustive_on_3x3():
    # every 0/1 a-Monge matrix classifies, and block kinds reconstruct
    for bits in itertools.product((0, 1), repeat=9):
        M = SquareMatrix((bits[0:3], bits[3:6], bits[6:9]))
        if not is_anti_monge(M)[0]:
            continue
        dec = decompose_01_amonge(M)
        if dec.kind in ("L", "R", "LplusR", "all_zero"):
            assert dec.reconstruct(3) == M


def test_find_permutation_on_scrambled_amonge():
    rng = random.Random(5)
    for _ in range(100):
        M = random_amonge(rng)
        pi = list(range(4))
        rng.shuffle(pi)
        search = find_amonge_permutation(M.permuted(pi))
        assert search.found
        assert amonge_oracle(M.permuted(pi), search.permutation)


def test_find_permutation_prefers_lexicographic():
    M = SquareMatrix(tuple(tuple(i * j for j in range(4)) for i in range(4)))
    assert find_amonge_permutation(M).permutation == (0, 1, 2, 3)


def test_irreducible_4x4_witness():
    search = find_amonge_permutation(IRREDUCIBLE_4)
    assert not search.found
    assert search.witness_indices == (0, 1, 2, 3)
    # all proper principal submatrices do admit a reordering
    for B in itertools.combinations(range(4), 3):
        assert find_amonge_permutation(IRREDUCIBLE_4.submatrix(B)).found


def test_witnesses_verify_by_exhaustion():
    rng = random.Random(6)
    found = 0
    while found < 40:
        M = random_matrix(rng)
        search = find_amonge_permutation(M)
        if search.found:
            assert amonge_oracle(M, search.permutation)
            continue
        found += 1
        B = search.witness_indices
        assert 2 <= len(B) <= 4
        sub = M.submatrix(B)
        assert not any(
            amonge_oracle(sub, pi) for pi in itertools.permutations(range(len(B)))
        )


def test_size_bound():
    big = SquareMatrix(tuple(tuple(0 for _ in range(9)) for _ in range(9)))
    with pytest.raises(ValueError):
        find_amonge_permutation(big)
    assert find_amonge_permutation(big, max_size=9).found


def test_common_permutation_of_compatible_family():
    rng = random.Random(7)
    for _ in range(50):
        base = [random_amonge(rng) for _ in range(3)]
        pi = list(range(4))
        rng.shuffle(pi)
        family = [M.permuted(pi) for M in base]
        search = find_common_amonge_permutation(family)
        assert search.found
        assert all(amonge_oracle(M, search.permutation) for M in family)


def test_diagonal_trio_needs_all_three():
    search = find_common_amonge_permutation(DIAGONAL_TRIO)
    assert not search.found
    assert search.witness_indices == (0, 1, 2)
    assert search.witness_members == (0, 1, 2)
    for pair in itertools.combinations(DIAGONAL_TRIO, 2):
        assert find_common_amonge_permutation(list(pair)).found


def test_conflicting_pair_yields_small_witness():
    ramp = SquareMatrix(tuple(tuple(i * j for j in range(4)) for i in range(4)))
    sigma = (0, 2, 1, 3)
    family = [ramp, ramp.permuted(sigma)]
    search = find_common_amonge_permutation(family)
    assert not search.found
    assert len(search.witness_indices) <= 4 and len(search.witness_members) <= 3
    picked = [family[i] for i in search.witness_members]
    subs = [M.submatrix(search.witness_indices) for M in picked]
    k = len(search.witness_indices)
    assert not any(
        all(amonge_oracle(s, pi) for s in subs)
        for pi in itertools.permutations(range(k))
    )


def test_permutation_family_matches_brute_force():
    rng = random.Random(8)
    for _ in range(60):
        M = random_amonge(rng)
        lo, hi = amonge_permutation_family(M)
        assert lo.reverse() == hi
        extensions = set(lo.linear_extensions()) | set(hi.linear_extensions())
        actual = {
            pi for pi in itertools.permutations(range(4)) if amonge_oracle(M, pi)
        }
        assert extensions == actual


def test_degenerate_family():
    M = SquareMatrix(tuple(tuple(i + j for j in range(3)) for i in range(3)))
    lo, hi = amonge_permutation_family(M)
    assert lo.is_degenerate and lo == hi
    assert len(set(lo.linear_extensions())) == 6
    with pytest.raises(ValueError):
        amonge_permutation_family(SquareMatrix(((0, 1), (1, 0))))


def test_multipartite_relation():
    order = MultipartiteOrder(((1, 0), (2,), (3, 4)))
    rel = order.relation()
    assert (0, 2) in rel and (2, 3) in rel and (0, 4) in rel
    assert (1, 0) not in rel and (3, 4) not in rel
    assert len(rel) == 2 * 1 + 2 * 2 + 1 * 2


def random_order(rng, n):
    values = list(range(n))
    rng.shuffle(values)
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1)))
    classes, prev = [], 0
    for c in cuts + [n]:
        classes.append(tuple(values[prev:c]))
        prev = c
    return MultipartiteOrder(tuple(classes))


def test_merge_orders_random_pairs():
    rng = random.Random(9)
    merged_ok = conflicts = 0
    for _ in range(300):
        a, b = random_order(rng, 5), random_order(rng, 5)
        result = merge_orders([a, b], 5)
        if isinstance(result, ConflictWitness):
            conflicts += 1
            # a conflicting pair of these orders always has a 2-cycle
            assert len(result.cycle) == 2
            x, y = result.cycle
            assert a.relation() | b.relation() >= {(x, y), (y, x)}
        else:
            merged_ok += 1
            topo = result.topological_order()
            position = {v: i for i, v in enumerate(topo)}
            for (x, y) in result.arcs:
                assert position[x] < position[y]
    assert merged_ok > 0 and conflicts > 0


def test_merge_orders_tracks_origins():
    a = MultipartiteOrder(((0,), (1, 2)))
    b = MultipartiteOrder(((1,), (0, 2)))
    result = merge_orders([a, b], 3)
    assert isinstance(result, ConflictWitness)
    assert result.cycle == (0, 1)
    assert result.origins == (("order0",), ("order1",))
