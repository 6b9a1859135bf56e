"""Acceptance suite: one test per criterion, exact tolerances, fixed seeds.

Run with `pytest tests/test_acceptance.py -v -s` to see one line per
criterion with its wall-clock time.
"""

import random
import time

from latticetensor import catalog, cli
from latticetensor import freelat as fl
from latticetensor import tensor
from latticetensor.adjust import adjustment_sequence, step_from_pairs
from latticetensor.bounded import (
    beta_xi_duality_check,
    leq_with_top,
    lower_limit_table,
)
from latticetensor.core import (
    congruence_generated,
    direct_product,
    induced_lattice,
    is_distributive,
    is_sd_join,
    is_simple,
    quotient,
    sublattice_generated,
)
from latticetensor.errors import CapExceeded
from latticetensor.transfer import (
    d_relation,
    is_amenable_finite,
    minimal_pairs,
    tj_witness,
)

from conftest import catalog_lattices, random_lattice, random_lattices

_START = {}


def _begin(name):
    _START[name] = time.monotonic()


def _passed(name, detail=""):
    elapsed = time.monotonic() - _START[name]
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: PASS in {elapsed:.1f}s{suffix}")


def canon(text, m=3):
    return fl.canonical_form(fl.parse_term(text, m))


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_c01_m3_verdict_chain(capsys):
    _begin("C1")
    code, out = run_cli(capsys, "analyze", "M3")
    assert code == 0
    assert "<a, {b, c}>" in out and "<b, {a, c}>" in out and "<c, {a, b}>" in out
    assert "CYCLE" in out
    assert "amenable: NO" in out
    code, out = run_cli(capsys, "capped-free", "M3", "--n-max", "4", "--mode", "both")
    assert code == 0
    assert out.count("NOT-STABILIZED") == 2
    assert "consistency: OK" in out
    # strict decrease of the beta rows, both directions checked
    m3 = catalog.m3()
    table = lower_limit_table(m3, [1, 2, 3], n_max=4)
    assert not table.stabilized
    for prev, cur in zip(table.rows, table.rows[1:]):
        for a in range(m3.n):
            assert leq_with_top(cur[a], prev[a])
        assert any(not leq_with_top(prev[a], cur[a]) for a in range(m3.n))
    _passed("C1", "M3: cycle, not amenable, both modes non-stabilizing")


def test_c02_n5_verdict_chain(capsys):
    _begin("C2")
    code, out = run_cli(capsys, "analyze", "N5")
    assert code == 0
    assert "ORDER c <= a <= b" in out
    assert "amenable: YES" in out
    n5 = catalog.n5()
    gens = [1, 2, 3]
    table = lower_limit_table(n5, gens)
    assert table.stabilized and table.stabilized_at <= 3
    assert table.rows[1][3] is canon("(x2 * ((x0*x2) + x1))")
    codomain = fl.FreeLatticeWithBottom(3)
    seed = step_from_pairs(n5, codomain, [(g, fl.var(i)) for i, g in enumerate(gens)])
    trace = adjustment_sequence(seed, n_max=5)
    assert trace.stabilized and trace.stabilized_at == table.stabilized_at
    assert beta_xi_duality_check(n5, gens)
    _passed("C2", f"N5 stabilizes at n={table.stabilized_at}")


def _acceptance_corpus_small():
    return [lat for _, lat in catalog_lattices(max_size=8)] + random_lattices(
        202, 12, max_size=8
    )


def test_c03_stabilization_bound():
    _begin("C3")
    rng = random.Random(303)
    codomain = fl.FreeLatticeWithBottom(3)
    lattices = [
        lat for lat in _acceptance_corpus_small() if tj_witness(lat).is_order
    ]
    assert lattices
    checked = 0
    for lat in lattices:
        k = len(lat.join_irreducibles())
        for _ in range(100):
            pairs = [
                (rng.randrange(lat.n), fl.var(rng.randrange(3)))
                for _ in range(rng.randint(1, 4))
            ]
            sf = step_from_pairs(lat, codomain, pairs)
            trace = adjustment_sequence(sf, n_max=max(k, 1) + 1)
            assert trace.stabilized, f"no stabilization within bound on {lat!r}"
            assert trace.stabilized_at <= k
            checked += 1
    _passed("C3", f"{checked} seeded runs over {len(lattices)} lattices")


def _pure_tensor_law_pairs():
    pool = [
        catalog.chain(2), catalog.chain(3), catalog.chain(4),
        catalog.boolean(2), catalog.m3(), catalog.m4(), catalog.n5(),
    ]
    pairs = [(a, b) for a in pool for b in pool]
    left = random_lattices(404, 50, max_size=6)
    right = random_lattices(505, 50, max_size=6)
    pairs += list(zip(left, right))
    return pairs


def test_c04_pure_tensor_laws():
    _begin("C4")
    tensors = 0
    for A, B in _pure_tensor_law_pairs():
        pures = {}
        for a in range(A.n):
            for b in range(B.n):
                pures[a, b] = tensor.pure_tensor(A, B, a, b)
        for (a0, b0), t0 in pures.items():
            for (a1, b1), t1 in pures.items():
                assert tensor.bi_meet(t0, t1) == pures[A.meet(a0, a1), B.meet(b0, b1)]
                joined = tensor.bi_join(t0, t1)
                four = tensor.union_of_pure_tensors(
                    A, B,
                    [(a0, b0), (a1, b1),
                     (A.join(a0, a1), B.meet(b0, b1)),
                     (A.meet(a0, a1), B.join(b0, b1))],
                )
                assert joined == four
                tensors += 1
    _passed("C4", f"{tensors} pure-tensor pairs")


def test_c05_epsilon_isomorphism():
    _begin("C5")
    pool = [
        catalog.chain(2), catalog.chain(3), catalog.chain(4), catalog.chain(5),
        catalog.boolean(2), catalog.m3(), catalog.n5(),
    ]
    instances = 0
    for A in pool:
        for B in pool:
            bis = tensor.tensor_enumerate(A, B)
            maps = tensor.enumerate_antitone_maps(A, B)
            assert len(bis) == len(maps)
            for h in bis:
                assert tensor.from_map(tensor.to_map(h)) == h
            instances += 1
    _passed("C5", f"{instances} carrier pairs")


def test_c06_tensor_distributes_over_product():
    _begin("C6")
    rng = random.Random(606)
    done = 0
    while done < 20:
        A = random_lattice(rng, max_size=4, universe=3)
        B = random_lattice(rng, max_size=12 // A.n, universe=3)
        C = random_lattice(rng, max_size=12, universe=4)
        try:
            assert tensor.distributivity_check(A, B, C, cap=40_000)
        except CapExceeded:
            continue  # resample; the bounds are upper bounds
        done += 1
    _passed("C6", "20 random triples")


def _big_corpus():
    return [lat for _, lat in catalog_lattices(max_size=10)] + random_lattices(
        707, 200, max_size=10
    )


def test_c07_minimal_pair_and_d_edge_agreement():
    _begin("C7")
    corpus = _big_corpus()
    for lat in corpus:
        # d_relation raises InternalInconsistency when the direct and
        # minimal-pair edge sets differ
        d_relation_edges = d_relation(lat).edges
        left = {(mp.p, frozenset(mp.members)) for mp in minimal_pairs(lat, "contains")}
        right = {
            (mp.p, frozenset(mp.members)) for mp in minimal_pairs(lat, "dominates")
        }
        assert left == right
        assert d_relation_edges == {(p, q) for p, ms in left for q in ms}
    _passed("C7", f"{len(corpus)} lattices")


def test_c08_amenability_closure_properties():
    _begin("C8")
    rng = random.Random(808)
    corpus = [lat for _, lat in catalog_lattices(max_size=8)] + random_lattices(
        809, 40, max_size=8
    )
    amenable = [lat for lat in corpus if is_amenable_finite(lat).amenable]
    for lat in amenable:
        for _ in range(3):
            seed = set(rng.sample(range(lat.n), min(lat.n, rng.randint(1, 3))))
            sub, _map = induced_lattice(lat, sublattice_generated(lat, seed))
            assert is_amenable_finite(sub).amenable
        for _ in range(3):
            x, y = rng.randrange(lat.n), rng.randrange(lat.n)
            q, _p = quotient(lat, congruence_generated(lat, [(x, y)]))
            assert is_amenable_finite(q).amenable
    products = 0
    for l1 in amenable:
        for l2 in amenable:
            if l1.n * l2.n <= 36:
                assert is_amenable_finite(direct_product(l1, l2)).amenable
                products += 1
    _passed("C8", f"{len(amenable)} amenable lattices, {products} products")


def test_c09_distributive_implies_amenable():
    _begin("C9")
    corpus = _big_corpus()
    hits = 0
    for lat in corpus:
        if is_distributive(lat):
            assert is_amenable_finite(lat).amenable
            hits += 1
    assert hits > 0
    _passed("C9", f"{hits} distributive lattices")


def test_c10_tj_implies_sd_join_and_simple_bound():
    _begin("C10")
    corpus = _big_corpus()
    for lat in corpus:
        if tj_witness(lat).is_order:
            assert is_sd_join(lat)
        if lat.n >= 3:
            assert not (is_simple(lat) and is_sd_join(lat))
    _passed("C10", f"{len(corpus)} lattices")


def test_c11_whitman_soundness_and_order_axioms():
    _begin("C11")
    rng = random.Random(1111)

    def rand_term(depth):
        if depth == 0 or rng.random() < 0.3:
            return fl.var(rng.randrange(3))
        kids = [rand_term(depth - 1) for _ in range(rng.randint(2, 3))]
        return fl.join_node(kids) if rng.random() < 0.5 else fl.meet_node(kids)

    lattices = [lat for _, lat in catalog_lattices(max_size=8)]
    pairs = [(rand_term(4), rand_term(4)) for _ in range(500)]
    below = 0
    for s, t in pairs:
        if not fl.whitman_leq(s, t):
            continue
        below += 1
        for lat in lattices:
            for _ in range(20):
                sigma = [rng.randrange(lat.n) for _ in range(3)]
                assert lat.leq(fl.evaluate(s, lat, sigma), fl.evaluate(t, lat, sigma))
    assert below > 0
    for s, t in pairs[:200]:
        assert fl.whitman_leq(s, s) and fl.whitman_leq(t, t)
        if fl.whitman_leq(s, t) and fl.whitman_leq(t, s):
            assert fl.canonical_form(s) is fl.canonical_form(t)
    for (s, t), (u, _) in zip(pairs[:300], pairs[1:301]):
        if fl.whitman_leq(s, t) and fl.whitman_leq(t, u):
            assert fl.whitman_leq(s, u)
    _passed("C11", f"{below} comparable pairs exercised")


def test_c12_bounded_union_witness():
    _begin("C12")
    c3 = catalog.chain(3)
    verdict = tensor.capped_join_witness(
        c3, [(0, fl.var(0)), (1, fl.var(1)), (2, fl.var(2))], n_max=2
    )
    assert verdict.capped and verdict.n <= 2
    m3 = catalog.m3()
    verdict = tensor.capped_join_witness(
        m3, [(1, fl.var(0)), (2, fl.var(1)), (3, fl.var(2))], n_max=1
    )
    assert not verdict.capped and verdict.n_max == 1
    _passed("C12", f"level sizes {verdict.union_sizes}")
