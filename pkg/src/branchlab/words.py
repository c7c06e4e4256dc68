"""Words over a finite alphabet, viewed as vertices of the rooted d-ary tree.

A word is a tuple of letters from {0, ..., d-1}, stored root-first.  The
empty word is the tree root and prints as "e".
"""

from __future__ import annotations

from enum import Enum
from typing import Iterable, Iterator

Word = tuple[int, ...]

EPSILON: Word = ()


class AlphabetError(ValueError):
    """A word uses letters outside the declared alphabet."""


class Comparison(Enum):
    EQUAL = "equal"
    ANCESTOR = "ancestor"
    DESCENDANT = "descendant"
    INCOMPARABLE = "incomparable"


def check_word(w: Word, d: int) -> Word:
    for x in w:
        if not 0 <= x < d:
            raise AlphabetError(f"letter {x} outside alphabet of size {d}")
    return w


def word_str(w: Word) -> str:
    if not w:
        return "e"
    if any(x > 9 for x in w):
        return ".".join(str(x) for x in w)
    return "".join(str(x) for x in w)


def parse_word(text: str, d: int) -> Word:
    """Parse a digit string ("0110", or "e" for the root) into a word."""
    text = text.strip()
    if text in ("e", ""):
        return EPSILON
    if "." in text:
        letters = tuple(int(part) for part in text.split("."))
    else:
        letters = tuple(int(ch) for ch in text)
    return check_word(letters, d)


def compare(u: Word, v: Word, d: int | None = None) -> Comparison:
    """Compare two vertices in the prefix order of the tree."""
    if d is not None:
        check_word(u, d)
        check_word(v, d)
    k = min(len(u), len(v))
    if u[:k] != v[:k]:
        return Comparison.INCOMPARABLE
    if len(u) == len(v):
        return Comparison.EQUAL
    if len(u) < len(v):
        return Comparison.ANCESTOR
    return Comparison.DESCENDANT


def is_prefix(u: Word, v: Word) -> bool:
    """True when u is an ancestor of v or equal to it."""
    return len(u) <= len(v) and v[: len(u)] == u


def is_below(u: Word, v: Word) -> bool:
    """True when u lies in the subtree rooted at v (v is a prefix of u)."""
    return is_prefix(v, u)


def incomparable(u: Word, v: Word) -> bool:
    return compare(u, v) is Comparison.INCOMPARABLE


def is_antichain(words: Iterable[Word]) -> bool:
    """True when the words are pairwise incomparable."""
    ws = list(words)
    for i in range(len(ws)):
        for j in range(i + 1, len(ws)):
            if compare(ws[i], ws[j]) is not Comparison.INCOMPARABLE:
                return False
    return True


def fully_incomparable(us: Iterable[Word], vs: Iterable[Word]) -> bool:
    """True when every word of one family is incomparable to every word of the other."""
    vs = list(vs)
    for u in us:
        for v in vs:
            if compare(u, v) is not Comparison.INCOMPARABLE:
                return False
    return True


def validate_transversal(words: Iterable[Word], d: int) -> bool:
    """Decide whether a finite set of words cuts every infinite ray exactly once.

    Transversals are exactly the sets reachable from {e} by repeatedly
    replacing a word by its d children, which gives the recursive test below.
    """
    ws = {check_word(w, d) for w in words}
    return _transversal_rec(ws, d)


def _transversal_rec(ws: set[Word], d: int) -> bool:
    if not ws:
        return False
    if EPSILON in ws:
        return len(ws) == 1
    for x in range(d):
        branch = {w[1:] for w in ws if w[0] == x}
        if not _transversal_rec(branch, d):
            return False
    return True


def children(v: Word, d: int) -> list[Word]:
    return [v + (x,) for x in range(d)]

def words_of_length(d: int, n: int) -> Iterator[Word]:
    """All words of length exactly n, in lexicographic order."""
    if n == 0:
        yield EPSILON
        return
    for w in words_of_length(d, n - 1):
        for x in range(d):
            yield w + (x,)


def words_up_to(d: int, n: int) -> Iterator[Word]:
    """All words of length at most n, shortest first, lexicographic within a length."""
    for k in range(n + 1):
        yield from words_of_length(d, k)


def word_index(w: Word, d: int) -> int:
    """Rank of w among words of its own length, in lexicographic order."""
    idx = 0
    for x in w:
        idx = idx * d + x
    return idx


def index_word(idx: int, length: int, d: int) -> Word:
    letters = []
    for _ in range(length):
        letters.append(idx % d)
        idx //= d
    return tuple(reversed(letters))
