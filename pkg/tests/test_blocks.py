"""Block subgroups: construction, serialization, and verification."""

import random

import pytest

from branchlab.blocks import (BlockStructure, DiagonalSpec, build_block,
                              build_diagonal, diagonal_spec, minimal_incomparable,
                              parse_structure, serialize_structure, verify_block)
from branchlab.group_defs import grigorchuk
from branchlab.words import is_below


def antichain_sample(rng, count, max_depth):
    out = []
    tries = 0
    while len(out) < count and tries < 60:
        tries += 1
        v = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, max_depth)))
        if any(is_below(v, u) or is_below(u, v) for u in out):
            continue
        out.append(v)
    return out


def test_diagonal_acts_the_same_under_every_support():
    G = grigorchuk()
    K = G.branching_elements()
    V = [(0, 0), (1,)]
    gens = build_diagonal(K, V)
    assert len(gens) == len(K)
    for g, k in zip(gens, K):
        for suffix in [(0,), (1, 0), (0, 1, 1)]:
            for v in V:
                assert g.act(v + suffix) == v + k.act(suffix)
        assert g.act((0, 1)) == (0, 1)  # off-support vertices stay put


def test_build_block_collects_all_parts():
    G = grigorchuk()
    K = G.branching_elements()
    gens, structure = build_block([diagonal_spec(K, [(0,)]), diagonal_spec(K, [(1,)])])
    assert len(gens) == 2 * len(K)
    assert [list(p.support) for p in structure.parts] == [[(0,)], [(1,)]]


def test_structure_serialization_roundtrip():
    rng = random.Random(21)
    for _ in range(25):
        used = []
        parts = []
        for _ in range(rng.randint(1, 3)):
            vs = antichain_sample(rng, rng.choice([1, 1, 2]), 3)
            if not vs or any(is_below(v, u) or is_below(u, v)
                             for v in vs for u in used):
                continue
            used.extend(vs)
            parts.append(DiagonalSpec(tuple(sorted(vs))))
        if not parts:
            continue
        structure = BlockStructure(tuple(parts),
                                   regular_over="K" if rng.random() < 0.5 else None)
        text = serialize_structure(structure)
        back = parse_structure(text, 2)
        assert [p.support for p in back.parts] == [p.support for p in structure.parts]
        assert back.regular_over == structure.regular_over


def test_parse_structure_format():
    st = parse_structure("part: {000, 001}\npart: {1}\nregular-over: K\n", 2)
    assert [list(p.support) for p in st.parts] == [[(0, 0, 0), (0, 0, 1)], [(1,)]]
    assert st.regular_over == "K"


def test_minimal_incomparable_covers_the_complement():
    vs = [(0, 0), (0, 1, 0)]
    rest = minimal_incomparable(vs, 2)
    assert sorted(rest) == [(0, 1, 1), (1,)]
    # together with vs this is a transversal: every deep word has one ancestor
    from branchlab.words import validate_transversal
    assert validate_transversal(list(vs) + rest, 2)


def test_overlapping_parts_are_rejected():
    G = grigorchuk()
    K = G.branching_elements()
    with pytest.raises(ValueError):
        build_block([diagonal_spec(K, [(0,)]), diagonal_spec(K, [(0, 1)])])


def test_verify_block_accepts_a_built_block():
    G = grigorchuk()
    K = G.branching_elements()
    gens, structure = build_block([diagonal_spec(K, [(0, 0), (0, 1)]),
                                   diagonal_spec(K, [(1,)])])
    checks = verify_block(gens, structure, n=4)
    assert not any(v.is_refuted for v in checks.values())
    assert checks["support"].is_proven
    assert checks["injectivity"].is_proven


def test_verify_block_rejects_a_wrong_support_claim():
    G = grigorchuk()
    K = G.branching_elements()
    gens, _ = build_block([diagonal_spec(K, [(0,)])])
    lying = BlockStructure((DiagonalSpec(((1,),)),))
    checks = verify_block(gens, lying, n=3)
    assert any(v.is_refuted for v in checks.values())


def test_verify_block_needs_generators():
    with pytest.raises(ValueError):
        verify_block([], BlockStructure((DiagonalSpec(((0,),)),)), n=2)
