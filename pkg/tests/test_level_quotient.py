"""Level quotients: orders against a brute-force closure, projections, stabilizers."""

from branchlab.group_defs import ggs, grigorchuk
from branchlab.level_quotient import (Gen, SubgroupImage, build_quotient,
                                      derived_subgroup, factored_order,
                                      normal_closure, rigid_stabilizer_quotient,
                                      stabilizer_subgroup, subtree_projection, mult)
from branchlab.words import words_of_length


def closure_order(perms):
    """Orbit of the identity under right multiplication; plain BFS."""
    n = len(perms[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for q in perms:
                r = tuple(p[q[i]] for i in range(n))
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return len(seen)


def level_perm_oracle(el, n):
    """The permutation of level-n words, computed purely through act."""
    level = list(words_of_length(el.group.d, n))
    index = {w: i for i, w in enumerate(level)}
    return tuple(index[el.act(w)] for w in level)


def test_quotient_orders_match_closure_oracle():
    G = grigorchuk()
    hand = {1: 2, 2: 8}
    for n in (1, 2, 3, 4):
        q = build_quotient(G, n)
        perms = [level_perm_oracle(G.element(g), n) for g in "abcd"]
        want = closure_order(perms)
        assert q.order() == want
        if n in hand:
            assert q.order() == hand[n]


def test_quotient_orders_divide_upwards():
    G = grigorchuk()
    orders = [build_quotient(G, n).order() for n in range(1, 6)]
    for small, big in zip(orders, orders[1:]):
        assert big % small == 0
    for o in orders:
        assert o & (o - 1) == 0  # powers of two


def test_element_perm_matches_act():
    G, _ = ggs(3, (1, 2))
    q = build_quotient(G, 3)
    level = list(words_of_length(3, 3))
    for spec in ("a", "b", "a b", "b a b"):
        el = G.element(spec)
        perm = q.element_perm(el)
        for w in level:
            assert q.index_vertex(perm[q.vertex_index(w)]) == el.act(w)


def test_factored_order():
    assert factored_order(1) == "1"
    assert factored_order(8) == "2^3"
    assert factored_order(12) == "2^2 * 3"
    assert factored_order(97) == "97"


def test_subtree_projection_forgets_the_other_branch():
    G = grigorchuk()
    q3 = build_quotient(G, 3)
    q2 = build_quotient(G, 2)
    b = G.element("b")
    # b = (a, c): the projection of b at vertex 0 is the level-2 perm of a
    pb = q3.element_perm(b)
    pa = q2.element_perm(G.element("a"))
    assert subtree_projection(q3, pb, (0,), q2) == pa


def test_stabilizer_has_expected_index():
    G = grigorchuk()
    q = build_quotient(G, 3)
    stab = stabilizer_subgroup(q, [(0,)])
    assert q.order() // stab.order() == 2  # level-1 orbit has size 2


def test_rigid_stabilizer_and_normal_closure_are_subgroups():
    G = grigorchuk()
    q = build_quotient(G, 4)
    rist = rigid_stabilizer_quotient(q, (0,))
    idx0 = q.vertex_index((1, 0, 0, 0))
    for g in rist.gens:
        assert g.perm[idx0] == idx0  # fixes the opposite subtree pointwise
    der = derived_subgroup(q)
    assert q.order() % der.order() == 0
    ab = mult(q.element_perm(G.element("a")), q.element_perm(G.element("b")))
    nc = normal_closure(q, [Gen(ab, None)])
    assert q.order() % nc.order() == 0
