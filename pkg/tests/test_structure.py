"""Transitivity, invariant-partition censuses, and branch-structure checks."""

from branchlab.group_defs import ggs, grigorchuk
from branchlab.level_quotient import Gen, SubgroupImage, build_quotient
from branchlab.structure import (check_prop_4_2, check_prop_4_3,
                                 maximal_branching_candidate,
                                 regular_branch_check, spherical_transitivity,
                                 tree_primitive)


def test_spherical_transitivity():
    assert spherical_transitivity(grigorchuk(), 5) == [True] * 5
    G, _ = ggs(3, (1, 2))
    assert spherical_transitivity(G, 4) == [True] * 4


def test_transitivity_fails_for_a_proper_subgroup():
    G = grigorchuk()
    flags = spherical_transitivity(G, 3, gens=[G.element("b"), G.element("d")])
    assert flags[0] is False


def test_tree_primitive_census_counts():
    G = grigorchuk()
    v = tree_primitive(G, 4)
    assert v.is_proven
    assert v.certificate["census"] == [1, 2, 3, 4, 5]
    GG, _ = ggs(3, (1, 2))
    v2 = tree_primitive(GG, 3)
    assert v2.is_proven
    assert v2.certificate["census"] == [1, 2, 3, 4]


def test_tree_primitive_sees_exotic_partitions_in_small_actions():
    # the cyclic group generated by a alone has blocks everywhere
    G = grigorchuk()
    v = tree_primitive(G, 2, gens=[G.element("a")])
    assert v.is_refuted
    assert "level" in v.certificate


def test_prop_4_2_conditions():
    for name, v in check_prop_4_2(grigorchuk(), 3).items():
        assert v.is_proven, name
    GG, _ = ggs(3, (1, 2))
    for name, v in check_prop_4_2(GG, 3).items():
        assert v.is_proven, name


def test_prop_4_3_picks_the_documented_witness():
    v = check_prop_4_3(grigorchuk(), 3)
    assert v.is_proven
    assert v.certificate["x0"] == 1
    assert v.certificate["y0"] == 0
    assert v.certificate["element"] == "b"
    GG, _ = ggs(3, (1, 2))
    w = check_prop_4_3(GG, 3)
    assert w.is_proven
    assert w.certificate["x0"] == 2  # p - 1
    assert w.certificate["element"] == "b"


def test_regular_branch_check():
    G = grigorchuk()
    K = G.branching_elements()
    assert regular_branch_check(G, K, 5).is_proven
    GG, _ = ggs(3, (1, 2))
    assert regular_branch_check(GG, GG.branching_elements(), 4).is_proven
    # a alone generates a finite cyclic group; branching fails immediately
    assert regular_branch_check(G, [G.element("a")], 2).is_refuted


def test_branching_index_stabilizes():
    G = grigorchuk()
    K = G.branching_elements()
    indices = []
    for n in (3, 4, 5):
        q = build_quotient(G, n)
        img = SubgroupImage(q, [Gen(q.element_perm(k), k) for k in K])
        indices.append(q.order() // img.order())
    assert indices == [16, 16, 16]


def test_maximal_branching_candidate_report():
    report = maximal_branching_candidate(grigorchuk(), 4)
    assert report["deepest_level"] == 4
    assert report["stabilized_at"] is not None
    assert len(report["entries"]) == 3
