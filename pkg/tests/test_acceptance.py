"""Acceptance gate: ten criteria, one PASS/FAIL line each, with time bounds."""

import functools
import random
import time

import acceptance_log

from branchlab import (DetectBudget, Gen, SubgroupHandle, SubgroupImage,
                       block_detect, build_block, build_quotient, check_prop_4_3,
                       compose, dependence_function, diagonal_spec, equal, ggs,
                       grigorchuk, is_trivial, regular_branch_check,
                       spherical_transitivity, srist_membership, srist_search,
                       tree_primitive, verify_block)
from branchlab.automorphism import EqBudget, product
from branchlab.words import is_below, parse_word, words_of_length, words_up_to

BUDGET = DetectBudget(levels=3, depth=8)


def criterion(number, label, bound=None):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            t0 = time.perf_counter()
            try:
                fn()
            except BaseException:
                dt = time.perf_counter() - t0
                line = f"criterion {number:2d}: FAIL  {label} ({dt:.2f}s)"
                acceptance_log.lines.append(line)
                print(line)
                raise
            dt = time.perf_counter() - t0
            ok = bound is None or dt <= bound
            line = (f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  "
                    f"{label} ({dt:.2f}s"
                    + (f", bound {bound:g}s)" if bound is not None else ")"))
            acceptance_log.lines.append(line)
            print(line)
            assert ok, f"time bound exceeded: {dt:.2f}s > {bound}s"
        return wrapper
    return deco


# -- independent oracles ------------------------------------------------------

def grig_act(name, w):
    """The classical four-generator recursion, written out by hand."""
    if not w:
        return w
    x, rest = w[0], w[1:]
    if name == "a":
        return (1 - x,) + rest
    if name == "b":
        return (x,) + (grig_act("a", rest) if x == 0 else grig_act("c", rest))
    if name == "c":
        return (x,) + (grig_act("a", rest) if x == 0 else grig_act("d", rest))
    if name == "d":
        return (x,) + (rest if x == 0 else grig_act("b", rest))
    raise ValueError(name)


def grig_act_word(names, w):
    for name in reversed(names):
        w = grig_act(name, w)
    return w


def level_perm_by_act(el, n):
    level = list(words_of_length(el.group.d, n))
    index = {w: i for i, w in enumerate(level)}
    return tuple(index[el.act(w)] for w in level)


def closure_order(perms):
    """Order of the generated permutation group; plain BFS, no library calls."""
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


def moved_words(el, depth):
    return [w for w in words_up_to(el.group.d, depth) if el.act(w) != w]


# -- block battery helpers ----------------------------------------------------

def random_structure(rng):
    n_parts = rng.randint(1, 3)
    used, parts, tries = [], [], 0
    while len(parts) < n_parts and tries < 50:
        tries += 1
        size = rng.choice([1, 1, 2, 2, 4])
        depth = rng.randint(1, 3) if size <= 2 else 2
        cands, attempts = [], 0
        while len(cands) < size and attempts < 40:
            attempts += 1
            v = tuple(rng.randint(0, 1) for _ in range(depth))
            if any(is_below(v, u) or is_below(u, v) or v == u for u in used + cands):
                continue
            cands.append(v)
        if len(cands) == size:
            used += cands
            parts.append(sorted(cands))
    return parts


def compatible(orig_parts, det_parts):
    """None when the detected partition refines the built one per descendants."""
    for P in det_parts:
        homes = set()
        for w in P:
            home = None
            for qi, Q in enumerate(orig_parts):
                if any(is_below(w, u) for u in Q):
                    home = qi
                    break
            if home is None:
                return f"vertex {w} outside every original cone"
            homes.add(home)
        if len(homes) != 1:
            return f"part {P} spans several original parts"
        Q = orig_parts[homes.pop()]
        hit = {u for u in Q if any(is_below(w, u) for w in P)}
        if len(Q) > 1 and hit != set(Q):
            return f"coupled part {Q} split by {P}"
    return None


def lift_word(H, word):
    els = [H.gens[i - 1] if i > 0 else H.gens[-i - 1].inverse() for i in word]
    return product(H.group, els)


def parse_witness(text):
    out = []
    for tok in text.split():
        neg = tok.endswith("'")
        out.append(-int(tok.rstrip("'")[1:]) if neg else int(tok[1:]))
    return tuple(out)


# -- the ten criteria ----------------------------------------------------------

@criterion(1, "tree action matches the recursive oracle to depth 6", 1.0)
def test_criterion_01():
    G = grigorchuk()
    words6 = list(words_up_to(2, 6))
    for name in "abcd":
        el = G.element(name)
        for w in words6:
            assert el.act(w) == grig_act(name, w)
    rng = random.Random(101)
    for _ in range(10):
        names = [rng.choice("abcd") for _ in range(rng.randint(2, 7))]
        el = G.element(" ".join(names))
        for w in rng.sample(words6, 20):
            assert el.act(w) == grig_act_word(names, w)


@criterion(2, "section cocycle on 500 random pairs at depth 5", 5.0)
def test_criterion_02():
    rng = random.Random(202)
    budget = EqBudget(max_depth=24, max_states=4000)
    for G in (grigorchuk(), ggs(3, (1, 2))[0]):
        gens = ["a", "b", "c", "d"] if G.d == 2 else ["a", "b"]
        for _ in range(250):
            g = G.element(" ".join(rng.choice(gens) for _ in range(rng.randint(1, 5))))
            h = G.element(" ".join(rng.choice(gens) for _ in range(rng.randint(1, 5))))
            v = tuple(rng.randint(0, G.d - 1) for _ in range(rng.randint(1, 5)))
            lhs = compose(g, h).section(v)
            rhs = compose(g.section(h.act(v)), h.section(v))
            assert equal(lhs, rhs, budget).is_proven


@criterion(3, "word problem on the classical relations and non-relations", 1.0)
def test_criterion_03():
    G = grigorchuk()
    for word in ("a a", "b b", "c c", "d d", "b c d", "a d a d a d a d"):
        v = is_trivial(G.element(word))
        assert v.is_proven, (word, v.status)
    for word, depth in (("a", 1), ("b", 2), ("a b", 1)):
        v = is_trivial(G.element(word))
        assert v.is_refuted, (word, v.status)
        assert v.certificate["depth"] == depth
        w = parse_word(v.certificate["witness"], 2)
        assert G.element(word).act(w) != w


@criterion(4, "quotient orders: hand values, closure oracle, divisibility", 30.0)
def test_criterion_04():
    G = grigorchuk()
    orders = {n: build_quotient(G, n).order() for n in range(1, 7)}
    assert orders[1] == 2
    assert orders[2] == 8
    for n in (3, 4):
        perms = [level_perm_by_act(G.element(g), n) for g in "abcd"]
        assert orders[n] == closure_order(perms)
    for n in range(1, 7):
        assert orders[n] & (orders[n] - 1) == 0  # a power of two
        if n > 1:
            assert orders[n] % orders[n - 1] == 0


@criterion(5, "spherical transitivity through level 6 / level 4", 10.0)
def test_criterion_05():
    assert spherical_transitivity(grigorchuk(), 6) == [True] * 6
    GG, _ = ggs(3, (1, 2))
    assert spherical_transitivity(GG, 4) == [True] * 4


@criterion(6, "invariant-partition census and the fixed-point witness", 60.0)
def test_criterion_06():
    G = grigorchuk()
    v = tree_primitive(G, 5)
    assert v.is_proven
    assert v.certificate["census"] == [k + 1 for k in range(6)]
    GG, _ = ggs(3, (1, 2))
    w = tree_primitive(GG, 3)
    assert w.is_proven
    assert w.certificate["census"] == [k + 1 for k in range(4)]
    c = check_prop_4_3(G, 3)
    assert c.is_proven and c.certificate["x0"] == 1 and c.certificate["y0"] == 0
    assert c.certificate["element"] == "b"
    c3 = check_prop_4_3(GG, 3)
    assert c3.is_proven and c3.certificate["x0"] == 2  # p - 1
    assert c3.certificate["element"] == "b"


@criterion(7, "regular branching over K and its index chain", 60.0)
def test_criterion_07():
    G = grigorchuk()
    K = G.branching_elements()
    assert regular_branch_check(G, K, 5).is_proven
    GG, _ = ggs(3, (1, 2))
    assert regular_branch_check(GG, GG.branching_elements(), 5).is_proven
    assert regular_branch_check(G, [G.element("a")], 2).is_refuted
    for n in (3, 4, 5):
        q = build_quotient(G, n)
        img = SubgroupImage(q, [Gen(q.element_perm(k), k) for k in K])
        assert q.order() // img.order() == 16


@criterion(8, "twenty block subgroups verified and re-detected", 300.0)
def test_criterion_08():
    G = grigorchuk()
    K = G.branching_elements()
    rng = random.Random(808)
    cases = [[[(0, 0), (0, 1)], [(1,)]],          # pair over one child, free other
             [[(0, 0, 0), (0, 0, 1)], [(1,)]],    # deeper pair, free other
             [[(0, 1, 1, 0)], [(1,)]]]            # depth-4 singleton
    while len(cases) < 20:
        parts = random_structure(rng)
        if parts:
            cases.append(parts)
    for parts in cases:
        gens, structure = build_block([diagonal_spec(K, V) for V in parts])
        checks = verify_block(gens, structure, n=3)
        refuted = [k for k, vv in checks.items() if vv.is_refuted]
        assert not refuted, (parts, refuted)
        H = SubgroupHandle(G, gens)
        det, verdict = block_detect(H, BUDGET)
        assert verdict.is_proven, (parts, verdict.status, verdict.certificate)
        det_parts = [[parse_word(w, 2) for w in P]
                     for P in verdict.certificate["parts"]]
        err = compatible(parts, det_parts)
        assert err is None, (parts, err)
        assert det.regular_over == "K", parts


@criterion(9, "dependence separates the product from the diagonal", 60.0)
def test_criterion_09():
    G = grigorchuk()
    K = G.branching_elements()
    F = ((0,), (1,))
    prod_gens, _ = build_block([diagonal_spec(K, [(0,)]), diagonal_spec(K, [(1,)])])
    Hp = SubgroupHandle(G, prod_gens)
    rp = dependence_function(Hp, F, (0,), BUDGET)
    assert rp.delta == 1 and rp.dep_set == ((0,),)

    diag_gens, _ = build_block([diagonal_spec(K, [(0,), (1,)])])
    Hd = SubgroupHandle(G, diag_gens)
    for v in F:
        rd = dependence_function(Hd, F, v, BUDGET)
        assert rd.delta == 2 and rd.dep_set == F
        for u in F:
            assert is_trivial(rd.witness.el.section(u)).is_refuted
    assert srist_search(Hd, [(0,)], BUDGET) == []
    assert srist_search(Hp, [(0,)], BUDGET)


@criterion(10, "proven claims survive oracle replay; refutations replay")
def test_criterion_10():
    G = grigorchuk()
    # word-problem claims against pure act to depth 7
    for word in ("a a", "b b", "c c", "d d", "b c d", "a d a d a d a d",
                 "a", "b", "a b", "d", "b a b a b a"):
        el = G.element(word)
        v = is_trivial(el)
        assert not v.is_unknown
        if v.is_proven:
            assert moved_words(el, 7) == []
        else:
            w = parse_word(v.certificate["witness"], 2)
            assert el.act(w) != w

    # order claims against the closure built from act alone
    q3 = build_quotient(G, 3)
    assert q3.order() == closure_order(
        [level_perm_by_act(G.element(g), 3) for g in "abcd"])

    # one-sided members really live inside their cone
    K = G.branching_elements()
    prod_gens, _ = build_block([diagonal_spec(K, [(0,)]), diagonal_spec(K, [(1,)])])
    Hp = SubgroupHandle(G, prod_gens)
    members = srist_search(Hp, [(0,)], BUDGET)
    assert members
    for m in members:
        assert srist_membership(m.el, [(0,)]).is_proven
        replay = lift_word(Hp, m.word)
        for w in moved_words(replay, 5):
            assert is_below(w, (0,))

    # detected partitions: every claimed witness replays below its own part
    H = SubgroupHandle(G, prod_gens)
    det, verdict = block_detect(H, BUDGET)
    assert verdict.is_proven
    witnesses = verdict.certificate["witnesses"]
    parts = [[parse_word(w, 2) for w in P] for P in verdict.certificate["parts"]]
    for P in parts:
        key = "{" + ", ".join("".join(str(x) for x in v) for v in P) + "}"
        el = lift_word(H, parse_witness(witnesses[key]))
        moved = moved_words(el, 6)
        assert moved, key
        for w in moved:
            assert any(is_below(w, v) for v in P), (key, w)
