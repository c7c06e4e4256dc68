"""Finite level quotients: the exact action of a group on words of length <= n.

The permutation domain is the set of all vertices of length 1..n, ordered by
length then lexicographically, so stabilizers of vertices at any level are
pointwise stabilizers of domain points.  Subgroups are represented by their
generating permutations, each paired with a lift (an element of the infinite
group that maps onto it), and get deterministic stabilizer chains for order,
membership and index computations.

Schreier generators computed against the quotient action lift exactly: the
orbit of a vertex of length k <= n in the quotient equals its orbit in the
infinite group, so Schreier's lemma applied to the lifted transversal gives a
generating set of the full preimage stabilizer.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automorphism import Element, EqBudget, is_trivial, product
from .verdict import Verdict
from .words import Word, word_index, index_word, words_of_length

Perm = tuple[int, ...]

class SizeGuardError(ValueError):
    """The requested quotient exceeds the point budget."""


def mult(p: Perm, q: Perm) -> Perm:
    """Product acting q first: (p*q)[x] = p[q[x]]."""
    return tuple(p[x] for x in q)


def inv(p: Perm) -> Perm:
    r = [0] * len(p)
    for x, y in enumerate(p):
        r[y] = x
    return tuple(r)


@dataclass
class Gen:
    perm: Perm
    lift: Element | None

    def __iter__(self):
        return iter((self.perm, self.lift))


class _ChainLevel:
    __slots__ = ("base", "gens", "orbit", "processed")

    def __init__(self, base: int):
        self.base = base
        self.gens: list[Perm] = []
        self.orbit: dict[int, Perm] = {}
        self.processed: set[tuple[int, int]] = set()


class StabChain:
    """Deterministic Schreier-Sims chain over permutations.

    The chain stores permutations only.  Anything that must be lifted back to
    the infinite group is generated elsewhere (Schreier rounds against the
    quotient action, or products of seed lifts), where word growth stays
    under control.
    """

    def __init__(self, degree: int, gen_perms: Sequence[Perm], base_hint: Sequence[int] = ()):
        self.degree = degree
        self.identity = tuple(range(degree))
        self.gen_perms = [p for p in gen_perms if p != self.identity]
        self.base: list[int] = []
        self.levels: list[_ChainLevel] = []
        for b in base_hint:
            self.base.append(b)
            lvl = _ChainLevel(b)
            lvl.orbit[b] = self.identity
            self.levels.append(lvl)
        for perm in self.gen_perms:
            self._sift_in(0, perm)

    def add(self, perm: Perm) -> None:
        """Extend the chain by one more generator."""
        if perm != self.identity:
            self.gen_perms.append(perm)
            self._sift_in(0, perm)

    def _sift_in(self, level: int, perm: Perm) -> None:
        lv = level
        while lv < len(self.levels):
            if perm == self.identity:
                return
            lvl = self.levels[lv]
            x = perm[lvl.base]
            if x == lvl.base:
                lv += 1
                continue
            if x not in lvl.orbit:
                self._add_generator(lv, perm)
                return
            perm = mult(inv(lvl.orbit[x]), perm)
        if perm != self.identity:
            self._add_generator(len(self.levels), perm)

    def _add_generator(self, level: int, perm: Perm) -> None:
        if level == len(self.levels):
            b = min(x for x in range(self.degree) if perm[x] != x)
            self.base.append(b)
            lvl = _ChainLevel(b)
            lvl.orbit[b] = self.identity
            self.levels.append(lvl)
        # The generator fixes base[0..level-1], so it is a strong generator
        # for every chain level up to and including this one.
        for j in range(level + 1):
            self.levels[j].gens.append(perm)
        for j in range(level, -1, -1):
            self._close_level(j)

    def _close_level(self, level: int) -> None:
        lvl = self.levels[level]
        queue = deque(sorted(lvl.orbit.keys()))
        while queue:
            x = queue.popleft()
            px = lvl.orbit[x]
            for gi in range(len(lvl.gens)):
                if (x, gi) in lvl.processed:
                    continue
                lvl.processed.add((x, gi))
                gp = lvl.gens[gi]
                y = gp[x]
                if y not in lvl.orbit:
                    lvl.orbit[y] = mult(gp, px)
                    queue.append(y)
                else:
                    schreier = mult(inv(lvl.orbit[y]), mult(gp, px))
                    if schreier != self.identity:
                        self._sift_in(level + 1, schreier)

    def order(self) -> int:
        n = 1
        for lvl in self.levels:
            n *= len(lvl.orbit)
        return n

    def sift(self, perm: Perm) -> Perm:
        """Divide by transversal entries; identity residue means membership."""
        for lvl in self.levels:
            if perm == self.identity:
                break
            x = perm[lvl.base]
            if x == lvl.base:
                continue
            if x not in lvl.orbit:
                return perm
            perm = mult(inv(lvl.orbit[x]), perm)
        return perm

    def contains(self, perm: Perm) -> bool:
        return self.sift(perm) == self.identity

    def stabilizer_gens(self, k: int) -> list[Perm]:
        """Strong generators fixing the first k base points."""
        if k >= len(self.levels):
            return []
        return list(self.levels[k].gens)

    def strong_gens(self) -> list[Perm]:
        return self.stabilizer_gens(0)


class SubgroupImage:
    """A subgroup of a level quotient, given by generating permutations with lifts."""

    def __init__(self, quotient: "LevelQuotient", gens: Sequence[Gen],
                 exact_lift: bool = False, note: str = ""):
        self.quotient = quotient
        self.gens = [g for g in gens if g.perm != quotient.identity_perm]
        self.exact_lift = exact_lift
        self.note = note
        self._chain: StabChain | None = None

    @property
    def chain(self) -> StabChain:
        if self._chain is None:
            self._chain = StabChain(self.quotient.domain_size,
                                    [g.perm for g in self.gens])
        return self._chain

    def order(self) -> int:
        return self.chain.order()

    def contains_perm(self, perm: Perm) -> bool:
        return self.chain.contains(perm)

    def contains_element(self, el: Element) -> bool:
        return self.contains_perm(self.quotient.element_perm(el))

    def leq(self, other: "SubgroupImage") -> bool:
        return all(other.contains_perm(g.perm) for g in self.gens)

    def same_image(self, other: "SubgroupImage") -> bool:
        return self.order() == other.order() and self.leq(other)

    def index_in(self, other: "SubgroupImage") -> int:
        return other.order() // self.order()

    def orbits(self, points: Iterable[int]) -> list[list[int]]:
        return _orbits_under([g.perm for g in self.gens], list(points))

    def conjugate(self, s: Gen) -> "SubgroupImage":
        sp_inv = inv(s.perm)
        gens = [Gen(mult(s.perm, mult(g.perm, sp_inv)),
                    product(self.quotient.group, [s.lift, g.lift, s.lift.inverse()]))
                for g in self.gens]
        return SubgroupImage(self.quotient, gens, exact_lift=False)

    def __repr__(self) -> str:
        return f"<SubgroupImage order {self.order()} at level {self.quotient.n}>"


def _orbits_under(perms: Sequence[Perm], points: list[int]) -> list[list[int]]:
    point_set = set(points)
    seen: set[int] = set()
    out = []
    for p in points:
        if p in seen:
            continue
        orbit = [p]
        seen.add(p)
        queue = deque([p])
        while queue:
            x = queue.popleft()
            for perm in perms:
                y = perm[x]
                if y in point_set and y not in seen:
                    seen.add(y)
                    orbit.append(y)
                    queue.append(y)
        out.append(sorted(orbit))
    return out


class LevelQuotient:
    """The action of a group on all vertices of length 1..n."""

    def __init__(self, group, n: int):
        self.group = group
        self.n = n
        self.d = group.d
        d = group.d
        self.level_offsets = [0] * (n + 1)
        total = 0
        for k in range(1, n + 1):
            self.level_offsets[k] = total
            total += d ** k
        self.domain_size = total
        self.identity_perm: Perm = tuple(range(total))
        self._act_cache: dict[tuple, list[int]] = {}
        gens = [Gen(self.element_perm(g), g) for g in group.generators()]
        self.full_image = SubgroupImage(self, gens, exact_lift=True, note="generators")

    # -- vertex indexing ----------------------------------------------------

    def vertex_index(self, w: Word) -> int:
        if not 1 <= len(w) <= self.n:
            raise ValueError(f"vertex {w} outside domain of level-{self.n} quotient")
        return self.level_offsets[len(w)] + word_index(w, self.d)

    def index_vertex(self, idx: int) -> Word:
        for k in range(1, self.n + 1):
            size = self.d ** k
            if idx < self.level_offsets[k] + size:
                return index_word(idx - self.level_offsets[k], k, self.d)
        raise ValueError(f"index {idx} outside domain")

    def level_points(self, k: int) -> range:
        return range(self.level_offsets[k], self.level_offsets[k] + self.d ** k)

    # -- images of elements -------------------------------------------------

    def _act_table(self, el: Element, depth: int) -> list[int]:
        """Rank table of el on words of length `depth`, memoized by section."""
        if depth == 0:
            return [0]
        key = (el.key(), depth)
        cached = self._act_cache.get(key)
        if cached is not None:
            return cached
        d = self.d
        block = d ** (depth - 1)
        table = [0] * (d ** depth)
        for x in range(d):
            y = el.root_image(x)
            sub = self._act_table(el.section_letter(x), depth - 1)
            base_in = x * block
            base_out = y * block
            for r in range(block):
                table[base_in + r] = base_out + sub[r]
        self._act_cache[key] = table
        return table

    def element_perm(self, el: Element) -> Perm:
        """The permutation el induces on the whole domain."""
        out = list(range(self.domain_size))
        for k in range(1, self.n + 1):
            table = self._act_table(el, k)
            off = self.level_offsets[k]
            for r, s in enumerate(table):
                out[off + r] = off + s
        return tuple(out)

    def act_level(self, el: Element, k: int) -> list[int]:
        return self._act_table(el, k)

    def order(self) -> int:
        return self.full_image.order()

    def membership(self, perm: Perm) -> bool:
        return self.full_image.contains_perm(perm)

    def orbits_on_level(self, k: int) -> list[list[int]]:
        return self.full_image.orbits(self.level_points(k))

    def __repr__(self) -> str:
        return f"<LevelQuotient n={self.n} of {self.group!r}>"


def build_quotient(group, n: int, max_points: int = 4096, force: bool = False) -> LevelQuotient:
    """The level-n quotient, cached on the group; guarded by a point budget."""
    if n < 1:
        raise ValueError("level must be at least 1")
    cached = group._quotients.get(n)
    if cached is not None:
        return cached
    if group.d ** n > max_points and not force:
        raise SizeGuardError(
            f"level {n} has {group.d ** n} points, over the cap {max_points}; use force")
    q = LevelQuotient(group, n)
    group._quotients[n] = q
    return q


# -- stabilizers ------------------------------------------------------------

def _schreier_round(q: LevelQuotient, gens: list[Gen], point: int,
                    prune_budget: EqBudget | None, dedup: bool = False) -> list[Gen]:
    """Full Schreier generating set of the stabilizer of one domain point.

    With dedup, generators whose quotient permutations repeat are dropped;
    that preserves the image subgroup but not the abstract generating set.
    """
    group = q.group
    transversal: dict[int, Element] = {point: group.identity()}
    order = [point]
    queue = deque([point])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g.perm[x]
            if y not in transversal:
                transversal[y] = product(group, [g.lift, transversal[x]])
                order.append(y)
                queue.append(y)
    out: list[Gen] = []
    seen_keys: set = set()
    seen_perms: set = set()
    for x in order:
        tx = transversal[x]
        for g in gens:
            y = g.perm[x]
            lift = product(group, [transversal[y].inverse(), g.lift, tx])
            if lift.is_identity_word():
                continue
            key = lift.key()
            if key in seen_keys:
                continue
            seen_keys.add(key)
            perm = q.element_perm(lift)
            if perm == q.identity_perm and prune_budget is not None:
                if is_trivial(lift, prune_budget).is_proven:
                    continue
            if dedup:
                if perm in seen_perms:
                    continue
                seen_perms.add(perm)
            out.append(Gen(perm, lift))
    return out


def stabilizer_subgroup(q: LevelQuotient, vertices: Sequence[Word],
                        within: SubgroupImage | None = None,
                        prune_budget: EqBudget | None = EqBudget(max_depth=24, max_states=2000),
                        dedup: bool = False) -> SubgroupImage:
    """Pointwise stabilizer of the vertices, with exactly lifted Schreier words.

    Exactness: coset representatives read off the quotient orbit are coset
    representatives in the infinite group because every vertex has length
    <= n, so Schreier's lemma gives a true generating set of the stabilizer.
    """
    gens = list((within or q.full_image).gens)
    exact = (within or q.full_image).exact_lift
    for v in vertices:
        gens = _schreier_round(q, gens, q.vertex_index(v), prune_budget, dedup=dedup)
    img = SubgroupImage(q, gens, exact_lift=exact,
                        note=f"stabilizer of {[v for v in vertices]}")
    return img


def _pointwise_stabilizer_by_chain(q: LevelQuotient, points: list[int],
                                   within: SubgroupImage | None = None,
                                   note: str = "") -> SubgroupImage:
    """Pointwise stabilizer inside the quotient; generators carry no lifts."""
    src = within or q.full_image
    chain = StabChain(q.domain_size, [g.perm for g in src.gens], base_hint=points)
    gens = [Gen(perm, None) for perm in chain.stabilizer_gens(len(points))]
    return SubgroupImage(q, gens, exact_lift=False, note=note)


def rigid_stabilizer_quotient(q: LevelQuotient, v: Word,
                              within: SubgroupImage | None = None) -> SubgroupImage:
    """Elements of the quotient trivial outside the subtree at v.

    This is generally larger than the image of the rigid stabilizer of the
    infinite group: fixing the complement only to depth n is weaker than
    fixing it on the whole tree.
    """
    return srist_quotient(q, [v], within)


def srist_quotient(q: LevelQuotient, vs: Sequence[Word],
                   within: SubgroupImage | None = None) -> SubgroupImage:
    """Quotient elements supported below the given vertices and fixing them."""
    fix: list[int] = []
    for idx in range(q.domain_size):
        u = q.index_vertex(idx)
        strictly_below = any(len(u) > len(v) and u[: len(v)] == v for v in vs)
        if not strictly_below:
            fix.append(idx)
    for v in vs:
        idx = q.vertex_index(v)
        if idx not in fix:
            fix.append(idx)
    return _pointwise_stabilizer_by_chain(
        q, fix, within, note=f"srist of {list(vs)} (quotient bound)")


def subtree_projection(q: LevelQuotient, perm: Perm, v: Word,
                       q_sub: LevelQuotient) -> Perm:
    """Restrict a permutation supported below v to the subtree's own quotient.

    The permutation must fix v and map the subtree into itself; the result
    acts on q_sub's domain, which must not be deeper than what q can see.
    """
    k = len(v)
    if q_sub.n > q.n - k:
        raise ValueError(f"subtree depth {q_sub.n} exceeds visible depth {q.n - k}")
    out = list(range(q_sub.domain_size))
    for idx in range(q_sub.domain_size):
        u = q_sub.index_vertex(idx)
        image = q.index_vertex(perm[q.vertex_index(v + u)])
        if image[:k] != v:
            raise ValueError(f"permutation moves {v + u} out of the subtree at {v}")
        out[idx] = q_sub.vertex_index(image[k:])
    return tuple(out)


# -- normal closures and friends ---------------------------------------------

def normal_closure(q: LevelQuotient, seed: Sequence[Gen],
                   within: SubgroupImage | None = None) -> SubgroupImage:
    """Smallest subgroup containing the seed that the ambient image normalizes."""
    amb = within or q.full_image
    gens: list[Gen] = [Gen(g.perm, g.lift) for g in seed if g.perm != q.identity_perm]
    chain = StabChain(q.domain_size, [g.perm for g in gens])
    frontier = list(gens)
    while frontier:
        g = frontier.pop()
        for s in amb.gens:
            cp = mult(s.perm, mult(g.perm, inv(s.perm)))
            if not chain.contains(cp):
                lift = None
                if g.lift is not None and s.lift is not None:
                    lift = product(q.group, [s.lift, g.lift, s.lift.inverse()])
                ng = Gen(cp, lift)
                gens.append(ng)
                frontier.append(ng)
                chain.add(cp)
    return SubgroupImage(q, gens, exact_lift=False, note="normal closure")


def commutator_gen(q: LevelQuotient, x: Gen, y: Gen) -> Gen:
    perm = mult(x.perm, mult(y.perm, mult(inv(x.perm), inv(y.perm))))
    lift = product(q.group, [x.lift, y.lift, x.lift.inverse(), y.lift.inverse()])
    return Gen(perm, lift)


def derived_subgroup(q: LevelQuotient, within: SubgroupImage | None = None) -> SubgroupImage:
    """Commutator subgroup of the (image of the) group, as a normal closure."""
    amb = within or q.full_image
    seed = []
    for i in range(len(amb.gens)):
        for j in range(len(amb.gens)):
            if i != j:
                seed.append(commutator_gen(q, amb.gens[i], amb.gens[j]))
    return normal_closure(q, seed, within)


def lower_central_term(q: LevelQuotient, k: int) -> SubgroupImage:
    """The k-th lower central term of the image; k=1 is the whole image."""
    if k < 1:
        raise ValueError("lower central terms start at k=1")
    term = q.full_image
    for _ in range(k - 1):
        seed = [commutator_gen(q, x, y) for x in term.gens for y in q.full_image.gens]
        term = normal_closure(q, seed)
    return term


# -- congruences --------------------------------------------------------------

class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def minimal_congruence(q: LevelQuotient, alpha: Word, beta: Word,
                       within: SubgroupImage | None = None) -> tuple[tuple[Word, ...], ...]:
    """Finest invariant partition of the level identifying alpha with beta."""
    if len(alpha) != len(beta):
        raise ValueError("congruence endpoints must lie on one level")
    k = len(alpha)
    if not 1 <= k <= q.n:
        raise ValueError(f"congruence level {k} outside quotient depth {q.n}")
    d = q.d
    size = d ** k
    off = q.level_offsets[k]
    perms = [[g.perm[off + r] - off for r in range(size)]
             for g in (within or q.full_image).gens]
    uf = UnionFind(size)
    a, b = word_index(alpha, d), word_index(beta, d)
    uf.union(a, b)
    queue = deque([(a, b)])
    while queue:
        x, y = queue.popleft()
        for perm in perms:
            px, py = perm[x], perm[y]
            if uf.union(px, py):
                queue.append((px, py))
    blocks: dict[int, list[Word]] = {}
    for r in range(size):
        blocks.setdefault(uf.find(r), []).append(index_word(r, k, d))
    return tuple(tuple(sorted(block)) for block in
                 sorted(blocks.values(), key=lambda bl: min(bl)))


def is_level_partition(partition: Sequence[Sequence[Word]], d: int, k: int) -> int | None:
    """If the partition is {vX^(k-m)} for some m, return m, else None."""
    sizes = {len(block) for block in partition}
    if len(sizes) != 1:
        return None
    size = sizes.pop()
    rest = 0
    while d ** rest < size:
        rest += 1
    if d ** rest != size:
        return None
    m = k - rest
    for block in partition:
        prefixes = {w[:m] for w in block}
        if len(prefixes) != 1:
            return None
    return m


def factored_order(n: int) -> str:
    """Human-readable prime factorization, e.g. "2^12"."""
    if n <= 1:
        return str(n)
    parts = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            parts.append(f"{p}^{e}" if e > 1 else str(p))
        p += 1
    if m > 1:
        parts.append(str(m))
    return " * ".join(parts)
