"""Tree automorphisms given by wreath recursion.

Elements come in three shapes: reduced words over a group's generators,
grafts (an automorphism planted at a vertex, trivial elsewhere), and products
of the two.  Every element answers root_image and section_letter, which is
enough to act on words, take sections at vertices, and run the triviality
search.

Triviality is a semi-decision: starting from the element, close the set of
sections under taking sections, demanding a trivial root action of every
state.  The closure is finite for contracting presets; budgets cut it off
otherwise.  A nontrivial root action along the way yields a moved word as a
refutation witness, found at minimal depth because states are explored
breadth-first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .verdict import Verdict, proven, refuted, unknown
from .words import Word, word_str

# A letter is a signed 1-based generator index: +(i+1) for generator i,
# -(i+1) for its inverse.  A generator word is a tuple of letters.
GenWord = tuple[int, ...]


def inverse_word(word: GenWord) -> GenWord:
    return tuple(-letter for letter in reversed(word))


@dataclass(frozen=True)
class EqBudget:
    """Cutoffs for the triviality search."""

    max_depth: int = 64
    max_states: int = 100_000


class Element:
    """Common interface of all automorphism representations."""

    __slots__ = ("group",)

    def __init__(self, group):
        self.group = group

    def root_image(self, x: int) -> int:
        raise NotImplementedError

    def section_letter(self, x: int) -> "Element":
        raise NotImplementedError

    def key(self):
        raise NotImplementedError

    def inverse(self) -> "Element":
        raise NotImplementedError

    def is_identity_word(self) -> bool:
        """Syntactic identity check; False does not mean nontrivial."""
        return False

    def act(self, w: Word) -> Word:
        """Image of the word w, computed one letter at a time."""
        out = []
        cur: Element = self
        for x in w:
            out.append(cur.root_image(x))
            cur = cur.section_letter(x)
        return tuple(out)

    def section(self, v: Word) -> "Element":
        """Section at the vertex v: the action on the subtree the image of v carries."""
        cur: Element = self
        for x in v:
            cur = cur.section_letter(x)
        return cur

    def root_perm(self) -> tuple[int, ...]:
        return tuple(self.root_image(x) for x in range(self.group.d))

    def fixes(self, w: Word) -> bool:
        return self.act(w) == w

    def __mul__(self, other: "Element") -> "Element":
        return product(self.group, [self, other])

    def __invert__(self) -> "Element":
        return self.inverse()

    def __eq__(self, other) -> bool:
        return isinstance(other, Element) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"


class WordElement(Element):
    """A reduced word over the group's generators."""

    __slots__ = ("word",)

    def __init__(self, group, word: GenWord, reduced: bool = False):
        super().__init__(group)
        self.word: GenWord = word if reduced else group.reduce_word(word)

    def is_identity_word(self) -> bool:
        return not self.word

    def root_image(self, x: int) -> int:
        g = self.group
        for letter in reversed(self.word):
            if letter > 0:
                x = g.perms[letter - 1][x]
            else:
                x = g.inv_perms[-letter - 1][x]
        return x

    def section_letter(self, x: int) -> Element:
        g = self.group
        parts: list[GenWord] = []
        for letter in reversed(self.word):
            if letter > 0:
                i = letter - 1
                parts.append(g.rows[i][x])
                x = g.perms[i][x]
            else:
                i = -letter - 1
                y = g.inv_perms[i][x]
                parts.append(inverse_word(g.rows[i][y]))
                x = y
        parts.reverse()
        joined = tuple(letter for part in parts for letter in part)
        return WordElement(g, joined)

    def inverse(self) -> Element:
        return WordElement(self.group, inverse_word(self.word))

    def key(self):
        return ("w", self.word)

    def __str__(self) -> str:
        return self.group.word_name(self.word)


class GraftElement(Element):
    """Acts as `inner` on the subtree at `vertex`, trivially elsewhere."""

    __slots__ = ("vertex", "inner")

    def __init__(self, group, vertex: Word, inner: Element):
        super().__init__(group)
        self.vertex = vertex
        self.inner = inner

    def root_image(self, x: int) -> int:
        return x

    def section_letter(self, x: int) -> Element:
        if x == self.vertex[0]:
            return graft(self.vertex[1:], self.inner)
        return identity(self.group)

    def inverse(self) -> Element:
        return GraftElement(self.group, self.vertex, self.inner.inverse())

    def key(self):
        return ("g", self.vertex, self.inner.key())

    def __str__(self) -> str:
        return f"graft({word_str(self.vertex)}, {self.inner})"


class ProductElement(Element):
    """A product of factors, acting leftmost last: (g*h)(w) = g(h(w))."""

    __slots__ = ("factors",)

    def __init__(self, group, factors: tuple[Element, ...]):
        super().__init__(group)
        self.factors = factors

    def root_image(self, x: int) -> int:
        for f in reversed(self.factors):
            x = f.root_image(x)
        return x

    def section_letter(self, x: int) -> Element:
        parts: list[Element] = []
        for f in reversed(self.factors):
            parts.append(f.section_letter(x))
            x = f.root_image(x)
        parts.reverse()
        return product(self.group, parts)

    def inverse(self) -> Element:
        return product(self.group, [f.inverse() for f in reversed(self.factors)])

    def key(self):
        return ("p", tuple(f.key() for f in self.factors))

    def __str__(self) -> str:
        return " * ".join(str(f) for f in self.factors)


def identity(group) -> WordElement:
    return WordElement(group, (), reduced=True)


def graft(vertex: Word, inner: Element) -> Element:
    """The automorphism acting as `inner` below `vertex` and trivially elsewhere."""
    if isinstance(inner, GraftElement):
        vertex = vertex + inner.vertex
        inner = inner.inner
    if inner.is_identity_word() or not vertex:
        return inner
    return GraftElement(inner.group, vertex, inner)


def product(group, factors: list[Element]) -> Element:
    """Compose factors left to right, merging what can be merged syntactically."""
    flat: list[Element] = []
    for f in factors:
        if isinstance(f, ProductElement):
            flat.extend(f.factors)
        elif not f.is_identity_word():
            flat.append(f)
    merged: list[Element] = []
    for f in flat:
        if merged:
            g = _merge(group, merged[-1], f)
            if g is not None:
                merged.pop()
                if not g.is_identity_word():
                    merged.append(g)
                continue
        merged.append(f)
    if not merged:
        return identity(group)
    if len(merged) == 1:
        return merged[0]
    return ProductElement(group, tuple(merged))


def _merge(group, a: Element, b: Element) -> Element | None:
    """Combine two adjacent factors into one element, or return None."""
    if isinstance(a, WordElement) and isinstance(b, WordElement):
        return WordElement(group, a.word + b.word)
    if isinstance(a, GraftElement) and isinstance(b, GraftElement):
        if a.vertex == b.vertex:
            return graft(a.vertex, product(group, [a.inner, b.inner]))
    return None


def compose(g: Element, h: Element) -> Element:
    """The automorphism w -> g(h(w))."""
    return product(g.group, [g, h])


def invert(g: Element) -> Element:
    return g.inverse()


def is_trivial(g: Element, budget: EqBudget = EqBudget()) -> Verdict:
    """Semi-decide whether g acts trivially on the whole tree.

    Proven: every state in the section closure has a trivial root action, so
    the closure itself certifies triviality.  Refuted: a word moved by g, of
    minimal length.  Unknown: a budget ran out first.
    """
    d = g.group.d
    seen: set = set()
    queue: deque[tuple[Element, Word]] = deque([(g, ())])
    while queue:
        e, path = queue.popleft()
        if e.is_identity_word():
            continue
        key = e.key()
        if key in seen:
            continue
        if len(path) > budget.max_depth:
            return unknown(reason="depth budget exhausted", max_depth=budget.max_depth,
                           states=len(seen))
        if len(seen) >= budget.max_states:
            return unknown(reason="state budget exhausted", max_states=budget.max_states)
        for x in range(d):
            y = e.root_image(x)
            if y != x:
                witness = path + (x,)
                return refuted(witness=word_str(witness),
                               image=word_str(g.act(witness)),
                               depth=len(witness))
        seen.add(key)
        for x in range(d):
            queue.append((e.section_letter(x), path + (x,)))
    return proven(states=len(seen), max_depth_budget=budget.max_depth)


def equal(g: Element, h: Element, budget: EqBudget = EqBudget()) -> Verdict:
    """Semi-decide g = h via triviality of g * h^-1."""
    return is_trivial(compose(g, h.inverse()), budget)


def portrait_lines(g: Element, depth: int, indent: str = "") -> list[str]:
    """Readable portrait: root permutation in cycle notation, then sections."""
    from .group_defs import format_perm  # local import to avoid a cycle

    lines = [f"{indent}{format_perm(g.root_perm())}"]
    if depth > 0:
        for x in range(g.group.d):
            sec = g.section_letter(x)
            lines.append(f"{indent}{x}:")
            lines.extend(portrait_lines(sec, depth - 1, indent + "  "))
    return lines
