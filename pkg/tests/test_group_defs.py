"""Group presets, the definition file format, and the GGS family."""

import pytest

from branchlab.automorphism import equal, is_trivial
from branchlab.group_defs import (GroupDefinitionError, ggs, grigorchuk,
                                  parse_group, print_group)


def test_grigorchuk_preset_basics():
    G = grigorchuk()
    assert G.d == 2
    assert list(G.gen_names) == ["a", "b", "c", "d"]
    assert G.sip_assumed
    assert G.branch_kernel_trivial_assumed
    a = G.element("a")
    assert a.act((0,)) == (1,)
    assert G.element("b").act((1, 1, 1)) == (1, 1, 1)
    assert G.element("b").act((1, 0, 0)) == (1, 0, 1)


def test_element_parsing_forms():
    G = grigorchuk()
    assert is_trivial(G.element("e")).is_proven
    assert is_trivial(G.element("a a^-1")).is_proven
    assert equal(G.element("a b a"), G.element("a b a^-1")).is_proven
    with pytest.raises(GroupDefinitionError):
        G.element("z")


def test_print_parse_roundtrip():
    G = grigorchuk()
    H = parse_group(print_group(G))
    assert H.d == G.d
    assert H.gen_names == G.gen_names
    for name in G.gen_names:
        for w in [(0,), (1, 0), (0, 1, 1), (1, 1, 1, 0)]:
            assert H.element(name).act(w) == G.element(name).act(w)


def test_reduce_word_applies_declared_rewrites():
    G = grigorchuk()
    assert G.element("a a").is_identity_word()
    assert is_trivial(G.element("b c d")).is_proven
    assert is_trivial(G.element("c d b")).is_proven


def test_ggs_torsion_criterion():
    _, t1 = ggs(3, (1, 1))
    assert t1 is False
    _, t2 = ggs(3, (1, 2))
    assert t2 is True
    _, t3 = ggs(5, (1, 2, 0, 2))
    assert t3 is True
    _, t4 = ggs(4, (1, 1, 1))
    assert t4 is None


def test_ggs_action_matches_definition():
    G, _ = ggs(3, (1, 2))
    a, b = G.element("a"), G.element("b")
    assert a.act((0,)) == (1,)
    assert a.act((2,)) == (0,)
    # b = [a, a^2, b]: section at 0 is a, at 1 is a a, at 2 is b again
    assert b.act((0, 0)) == (0, 1)
    assert b.act((1, 0)) == (1, 2)
    assert b.act((2, 0, 0)) == (2, 0, 1)


def test_ggs_needs_sensible_data():
    with pytest.raises(GroupDefinitionError):
        ggs(2, (1, 2, 3))


def test_branching_elements_are_stabilizing():
    G = grigorchuk()
    K = G.branching_elements()
    assert len(K) == 3
    for g in K:
        assert g.act((0,)) == (0,)
        assert g.act((1,)) == (1,)
        assert is_trivial(g).is_refuted


def test_parse_group_rejects_bad_input():
    with pytest.raises(GroupDefinitionError):
        parse_group("alphabet 2\ngen a = (0 3)[e, e]\n")
    with pytest.raises(GroupDefinitionError):
        parse_group("gen a = (0 1)[e, e]\n")
