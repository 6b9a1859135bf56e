import random

import pytest

from latticetensor import catalog
from latticetensor import freelat as fl
from latticetensor import tensor
from latticetensor.core import FiniteLattice
from latticetensor.errors import CarrierMismatch, Divergence, NotAHomomorphism

from conftest import catalog_lattices


def brute_close(A, B, pairs):
    """Definition-chasing closure oracle: grow a plain set of pairs until it
    is hereditary, frame-containing, and lateral-join closed."""
    current = set()
    for a in range(A.n):
        current.add((a, B.bottom_index))
    for b in range(B.n):
        current.add((A.bottom_index, b))
    current.update(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(current):
            for a2 in range(A.n):
                for b2 in range(B.n):
                    if A.leq(a2, a) and B.leq(b2, b) and (a2, b2) not in current:
                        current.add((a2, b2))
                        changed = True
        for (a0, b0) in list(current):
            for (a1, b1) in list(current):
                if a0 == a1 and (a0, B.join(b0, b1)) not in current:
                    current.add((a0, B.join(b0, b1)))
                    changed = True
                if b0 == b1 and (A.join(a0, a1), b0) not in current:
                    current.add((A.join(a0, a1), b0))
                    changed = True
    return current


def test_pure_tensor_degenerate_cases():
    A = catalog.chain(2)
    B = catalog.chain(2)
    bot = tensor.pure_tensor(A, B, 0, 1)
    assert set(bot.pairs()) == {(0, 0), (0, 1), (1, 0)}
    assert tensor.pure_tensor(A, B, 1, 0) == bot
    top = tensor.pure_tensor(A, B, 1, 1)
    assert set(top.pairs()) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_pure_tensor_m3_pair():
    A, B = catalog.m3(), catalog.m3()
    t = tensor.pure_tensor(A, B, 1, 2)  # a (x) b'
    expected = {(a, B.bottom_index) for a in range(A.n)}
    expected |= {(A.bottom_index, b) for b in range(B.n)}
    expected |= {(a, b) for a in range(A.n) for b in range(B.n)
                 if A.leq(a, 1) and B.leq(b, 2)}
    assert set(t.pairs()) == expected
    assert t.is_bi_ideal()


def test_closure_empty_seed_is_frame():
    A, B = catalog.m3(), catalog.chain(3)
    frame = tensor.bi_ideal_closure(A, B, [])
    assert set(frame.pairs()) == brute_close(A, B, [])


def test_closure_idempotent_and_matches_brute_force():
    rng = random.Random(23)
    lats = [lat for _, lat in catalog_lattices(max_size=6)]
    for _ in range(25):
        A = rng.choice(lats)
        B = rng.choice(lats)
        seed = [(rng.randrange(A.n), rng.randrange(B.n)) for _ in range(3)]
        closed = tensor.bi_ideal_closure(A, B, seed)
        assert set(closed.pairs()) == brute_close(A, B, seed)
        assert tensor.bi_ideal_closure(
            A, B, closed.pairs()
        ) == closed
        assert closed.is_bi_ideal()


def test_closure_m3_m3_atom_seed_adds_no_lateral_joins():
    A = B = catalog.m3()
    seed = [(1, 2), (2, 1)]  # (a, b') and (b, a')
    closed = tensor.bi_ideal_closure(A, B, seed)
    union = tensor.union_of_pure_tensors(A, B, seed)
    assert closed == union


def test_pure_tensor_meet_law_small():
    A, B = catalog.m3(), catalog.n5()
    for a0 in range(A.n):
        for b0 in range(B.n):
            for a1 in range(A.n):
                for b1 in range(B.n):
                    lhs = tensor.bi_meet(
                        tensor.pure_tensor(A, B, a0, b0),
                        tensor.pure_tensor(A, B, a1, b1),
                    )
                    rhs = tensor.pure_tensor(A, B, A.meet(a0, a1), B.meet(b0, b1))
                    assert lhs == rhs


def test_pure_tensor_join_law_small():
    A, B = catalog.n5(), catalog.boolean(2)
    for a0 in range(A.n):
        for b0 in range(B.n):
            for a1 in range(A.n):
                for b1 in range(B.n):
                    joined = tensor.bi_join(
                        tensor.pure_tensor(A, B, a0, b0),
                        tensor.pure_tensor(A, B, a1, b1),
                    )
                    four = tensor.union_of_pure_tensors(
                        A, B,
                        [(a0, b0), (a1, b1),
                         (A.join(a0, a1), B.meet(b0, b1)),
                         (A.meet(a0, a1), B.join(b0, b1))],
                    )
                    assert joined == four


def test_bi_join_bottom_neutral_and_carrier_mismatch():
    A, B = catalog.m3(), catalog.chain(2)
    frame = tensor.bi_ideal_closure(A, B, [])
    t = tensor.pure_tensor(A, B, 1, 1)
    assert tensor.bi_join(t, frame) == t
    with pytest.raises(CarrierMismatch):
        tensor.bi_join(t, tensor.pure_tensor(B, A, 0, 0))


def test_is_union_examples():
    A = catalog.chain(2)
    B = fl.FreeLatticeWithBottom(2)
    assert tensor.is_union_bi_ideal(A, B, [(1, fl.var(0))])
    C = catalog.chain(2)
    assert tensor.is_union_bi_ideal(A, C, [(1, 1), (1, 0), (0, 1)])
    m3 = catalog.m3()
    B3 = fl.FreeLatticeWithBottom(3)
    verdict = tensor.is_union_bi_ideal(
        m3, B3, [(1, fl.var(0)), (2, fl.var(1)), (3, fl.var(2))]
    )
    assert not verdict
    assert verdict.witness == (0, 1, "b-meet")


def test_is_union_matches_brute_force_for_finite_carriers():
    rng = random.Random(41)
    lats = [lat for _, lat in catalog_lattices(max_size=6)]
    for _ in range(60):
        A = rng.choice(lats)
        B = rng.choice(lats)
        pairs = [(rng.randrange(A.n), rng.randrange(B.n))
                 for _ in range(rng.randint(1, 4))]
        verdict = tensor.is_union_bi_ideal(A, B, pairs)
        union = tensor.union_of_pure_tensors(A, B, pairs)
        assert bool(verdict) == union.is_bi_ideal()


def test_tensor_enumerate_counts():
    c2 = catalog.chain(2)
    assert len(tensor.tensor_enumerate(c2, c2)) == 2
    one = FiniteLattice.from_covers(1, [])
    assert len(tensor.tensor_enumerate(one, catalog.m3())) == 1
    b2 = catalog.boolean(2)
    bis = tensor.tensor_enumerate(b2, c2)
    maps = tensor.enumerate_antitone_maps(b2, c2)
    assert len(bis) == len(maps) == 4


def test_tensor_enumerate_is_all_bi_ideals_by_exhaustion():
    # tiny instance where every subset of A x B can be tried directly
    A = B = catalog.chain(2)
    found = tensor.tensor_enumerate(A, B)
    all_sets = []
    import itertools

    cells = [(a, b) for a in range(A.n) for b in range(B.n)]
    for k in range(len(cells) + 1):
        for chosen in itertools.combinations(cells, k):
            fibers = [0] * A.n
            for a, b in chosen:
                fibers[a] |= 1 << b
            h = tensor.BiIdeal(A, B, fibers)
            if h.is_bi_ideal():
                all_sets.append(h)
    assert len(all_sets) == len(found)


def test_maps_roundtrip_and_pure_tensor_map():
    A, B = catalog.boolean(2), catalog.chain(2)
    for h in tensor.tensor_enumerate(A, B):
        assert tensor.from_map(tensor.to_map(h)) == h
    # a (x) b corresponds to x -> (b] below a, else {0}
    t = tensor.pure_tensor(A, B, 1, 1)
    phi = tensor.to_map(t)
    for x in A.nonbottom():
        assert phi.generator_at(x) == (1 if A.leq(x, 1) else B.bottom_index)
    frame = tensor.bi_ideal_closure(A, B, [])
    phi0 = tensor.to_map(frame)
    assert all(phi0.generator_at(x) == B.bottom_index for x in A.nonbottom())


def test_from_map_rejects_non_homomorphisms():
    A, B = catalog.boolean(2), catalog.chain(3)
    values = [None] * A.n
    for x in A.nonbottom():
        values[x] = 0
    values[1] = 2
    values[2] = 2
    values[3] = 0  # f(a v b) = 0 but f(a) ^ f(b) = 2
    with pytest.raises(NotAHomomorphism):
        tensor.from_map(tensor.AntitoneIdealMap(A, B, tuple(values)))


def test_enumeration_agreement_on_pairs():
    lats = [catalog.chain(2), catalog.chain(3), catalog.boolean(2), catalog.m3(),
            catalog.n5()]
    for A in lats:
        for B in lats:
            bis = tensor.tensor_enumerate(A, B)
            maps = tensor.enumerate_antitone_maps(A, B)
            assert len(bis) == len(maps)
            assert {tensor.from_map(phi) for phi in maps} == set(bis)


def test_capped_witness_single_pair():
    m3 = catalog.m3()
    verdict = tensor.capped_join_witness(m3, [(1, fl.var(0))], n_max=1)
    assert verdict.capped and verdict.n == 0


def test_capped_witness_chain3():
    c3 = catalog.chain(3)
    assignment = [(0, fl.var(0)), (1, fl.var(1)), (2, fl.var(2))]
    verdict = tensor.capped_join_witness(c3, assignment, n_max=2)
    assert verdict.capped and verdict.n <= 2


def test_capped_witness_m3_level0_fails():
    m3 = catalog.m3()
    assignment = [(1, fl.var(0)), (2, fl.var(1)), (3, fl.var(2))]
    verdict = tensor.capped_join_witness(m3, assignment, n_max=0)
    assert not verdict.capped
    assert len(verdict.level_witnesses) == 1


def test_capped_witness_union_stays_bi_ideal_at_higher_levels():
    # once one level's union is a bi-ideal it equals the join, so every later
    # level's union must still be one
    c3 = catalog.chain(3)
    assignment = [(0, fl.var(0)), (1, fl.var(1)), (2, fl.var(2))]
    verdict = tensor.capped_join_witness(c3, assignment, n_max=1)
    assert verdict.capped
    B = fl.FreeLatticeWithBottom(3)
    for n in (verdict.n, verdict.n + 1):
        level = fl.generate_sn(3, n)
        pairs = {}
        for p in level.elements:
            a = fl.evaluate(p, c3, [0, 1, 2])
            b = fl.evaluate(fl.dual(p), B, [fl.var(0), fl.var(1), fl.var(2)])
            pairs[(a, b.uid if isinstance(b, fl.Term) else -1)] = (a, b)
        assert tensor.is_union_bi_ideal(c3, B, list(pairs.values()))


def test_free_closure_divergence_on_m3():
    m3 = catalog.m3()
    B = fl.FreeLatticeWithBottom(3)
    fl.set_term_node_cap(2000)
    try:
        with pytest.raises(Divergence):
            tensor.bi_ideal_closure(
                m3, B, [(1, fl.var(0)), (2, fl.var(1)), (3, fl.var(2))]
            )
    finally:
        fl.set_term_node_cap(None)


def test_free_bi_join_of_two_pure_tensors_terminates():
    m3 = catalog.m3()
    B = fl.FreeLatticeWithBottom(3)
    t0 = tensor.pure_tensor(m3, B, 1, fl.var(0))
    t1 = tensor.pure_tensor(m3, B, 2, fl.var(1))
    joined = tensor.bi_join(t0, t1)
    four = tensor.union_of_pure_tensors(
        m3, B,
        [(1, fl.var(0)), (2, fl.var(1)),
         (m3.join(1, 2), B.meet(fl.var(0), fl.var(1))),
         (m3.meet(1, 2), B.join(fl.var(0), fl.var(1)))],
    )
    assert joined == four


def test_distributivity_check_examples():
    one = FiniteLattice.from_covers(1, [])
    assert tensor.distributivity_check(one, one, catalog.m3())
    c2, c3 = catalog.chain(2), catalog.chain(3)
    assert tensor.distributivity_check(c2, c2, c2)
    assert tensor.distributivity_check(c2, c3, catalog.boolean(2))


def test_every_bi_ideal_is_union_of_pure_tensors_of_maximal_points():
    for A, B in [(catalog.m3(), catalog.chain(2)), (catalog.n5(), catalog.boolean(2))]:
        for h in tensor.tensor_enumerate(A, B):
            pts = set(h.pairs())
            maximal = [
                (a, b) for (a, b) in pts
                if not any(
                    (a2, b2) != (a, b) and A.leq(a, a2) and B.leq(b, b2)
                    for (a2, b2) in pts
                )
            ]
            rebuilt = tensor.union_of_pure_tensors(A, B, maximal)
            assert rebuilt == h
