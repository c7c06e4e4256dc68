"""Self-similar group definitions: recursion tables, rewriting rules, presets.

A group is given by an alphabet size and one wreath-recursion line per
generator: a root permutation in cycle notation plus one section word per
letter.  Optional lines declare length-non-increasing rewriting rules (used
to keep words reduced), boolean flags for assumed structural properties, and
generator words of a declared branching subgroup.
"""

from __future__ import annotations

import re
from typing import Iterable, Sequence

from .automorphism import Element, GenWord, WordElement, identity, inverse_word
from .words import Word

FLAG_NAMES = ("self_replicating", "sip", "branch_kernel_trivial")


class GroupDefinitionError(ValueError):
    pass


class UnknownGeneratorError(GroupDefinitionError):
    pass


class BadPermutationError(GroupDefinitionError):
    pass


def parse_perm(text: str, d: int) -> tuple[int, ...]:
    """Parse disjoint-cycle notation like "(0 1)(2 3)"; "()" is the identity."""
    text = text.strip()
    perm = list(range(d))
    seen: set[int] = set()
    body = text.replace(",", " ")
    if not re.fullmatch(r"(\(\s*[\d\s]*\))*", body):
        raise BadPermutationError(f"bad permutation syntax: {text!r}")
    for cycle_text in re.findall(r"\(([\d\s]*)\)", body):
        points = [int(tok) for tok in cycle_text.split()]
        if not points:
            continue
        for p in points:
            if p in seen:
                raise BadPermutationError(f"repeated point {p} in {text!r}")
            if not 0 <= p < d:
                raise BadPermutationError(f"point {p} outside alphabet of size {d}")
            seen.add(p)
        for i, p in enumerate(points):
            perm[p] = points[(i + 1) % len(points)]
    return tuple(perm)


def format_perm(perm: Sequence[int]) -> str:
    """Write a permutation in disjoint-cycle notation, smallest points first."""
    cycles = []
    done: set[int] = set()
    for start in range(len(perm)):
        if start in done or perm[start] == start:
            done.add(start)
            continue
        cycle = [start]
        done.add(start)
        nxt = perm[start]
        while nxt != start:
            cycle.append(nxt)
            done.add(nxt)
            nxt = perm[nxt]
        cycles.append(cycle)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(p) for p in c) + ")" for c in cycles)


class SelfSimilarGroup:
    """A finitely generated self-similar group acting on the d-ary tree."""

    def __init__(self, d: int, gen_names: Sequence[str], perms: Sequence[tuple[int, ...]],
                 rows: Sequence[Sequence[GenWord]], rewrites: Sequence[tuple[GenWord, GenWord]] = (),
                 flags: dict[str, bool] | None = None,
                 branching: Sequence[GenWord] | None = None, name: str = ""):
        if d < 2:
            raise GroupDefinitionError(f"alphabet size must be at least 2, got {d}")
        self.d = d
        self.gen_names = list(gen_names)
        if len(set(self.gen_names)) != len(self.gen_names):
            raise GroupDefinitionError("repeated generator name")
        self.name_to_index = {nm: i for i, nm in enumerate(self.gen_names)}
        self.perms = [tuple(p) for p in perms]
        for nm, p in zip(self.gen_names, self.perms):
            if sorted(p) != list(range(d)):
                raise BadPermutationError(f"generator {nm}: not a permutation of 0..{d - 1}")
        self.inv_perms = []
        for p in self.perms:
            inv = [0] * d
            for x, y in enumerate(p):
                inv[y] = x
            self.inv_perms.append(tuple(inv))
        self.rows = [list(r) for r in rows]
        for nm, row in zip(self.gen_names, self.rows):
            if len(row) != d:
                raise GroupDefinitionError(f"generator {nm}: expected {d} sections, got {len(row)}")
        self.rewrites = [(tuple(l), tuple(r)) for l, r in rewrites]
        for lhs, rhs in self.rewrites:
            if len(rhs) > len(lhs):
                raise GroupDefinitionError("rewriting rule increases length")
        # Orders recorded from pure power rules g^k -> e; they drive the
        # exponent canonicalization in reduce_word.
        self.orders: dict[int, int] = {}
        self._scan_rules: list[tuple[GenWord, GenWord]] = []
        for lhs, rhs in self.rewrites:
            bases = {abs(x) - 1 for x in lhs}
            if not rhs and len(bases) == 1 and all(x > 0 for x in lhs):
                base = bases.pop()
                k = len(lhs)
                self.orders[base] = min(self.orders.get(base, k), k)
            else:
                self._scan_rules.append((lhs, rhs))
        flags = dict(flags or {})
        for fl in flags:
            if fl not in FLAG_NAMES:
                raise GroupDefinitionError(f"unknown flag {fl!r}")
        self.flags = {fl: bool(flags.get(fl, False)) for fl in FLAG_NAMES}
        self._branching: tuple[GenWord, ...] | None = (
            tuple(tuple(w) for w in branching) if branching is not None else None)
        self._branching_thunk = None
        self.name = name
        self._quotients: dict[int, object] = {}
        self._reduce_cache: dict[GenWord, GenWord] = {}

    # -- flags ------------------------------------------------------------

    @property
    def self_replicating_assumed(self) -> bool:
        return self.flags["self_replicating"]

    @property
    def sip_assumed(self) -> bool:
        return self.flags["sip"]

    @property
    def branch_kernel_trivial_assumed(self) -> bool:
        return self.flags["branch_kernel_trivial"]

    @property
    def branching_words(self) -> tuple[GenWord, ...] | None:
        if self._branching is None and self._branching_thunk is not None:
            self._branching = tuple(self._branching_thunk())
            self._branching_thunk = None
        return self._branching

    def branching_elements(self) -> list[WordElement]:
        ws = self.branching_words
        if ws is None:
            raise GroupDefinitionError(f"group {self.name or '?'} declares no branching subgroup")
        return [WordElement(self, w) for w in ws]

    # -- words over the generators ----------------------------------------

    def reduce_word(self, word: Iterable[int]) -> GenWord:
        """Reduce a generator word with exponent folding plus the declared rules."""
        w = tuple(word)
        cached = self._reduce_cache.get(w)
        if cached is not None:
            return cached
        cur = list(w)
        guard = 10 * len(cur) + 64
        result: GenWord | None = None
        while guard > 0:
            guard -= 1
            cur = self._normalize_runs(cur)
            nxt = self._apply_rule_once(cur)
            if nxt is None:
                result = tuple(cur)
                break
            cur = nxt
        if result is None:
            result = tuple(self._normalize_runs(cur))
        if len(w) <= 64:
            self._reduce_cache[w] = result
        return result

    def _canonical_exponent(self, base: int, e: int) -> int:
        o = self.orders.get(base)
        if o is None:
            return e
        e %= o
        if e > o // 2:
            e -= o
        return e

    def _normalize_runs(self, letters: list[int]) -> list[int]:
        stack: list[list[int]] = []
        for letter in letters:
            base = abs(letter) - 1
            e = 1 if letter > 0 else -1
            if stack and stack[-1][0] == base:
                stack[-1][1] = self._canonical_exponent(base, stack[-1][1] + e)
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([base, self._canonical_exponent(base, e)])
        out: list[int] = []
        for base, e in stack:
            letter = base + 1 if e > 0 else -(base + 1)
            out.extend([letter] * abs(e))
        return out

    def _apply_rule_once(self, letters: list[int]) -> list[int] | None:
        for pos in range(len(letters)):
            for lhs, rhs in self._scan_rules:
                end = pos + len(lhs)
                if end <= len(letters) and tuple(letters[pos:end]) == lhs:
                    return letters[:pos] + list(rhs) + letters[end:]
        return None

    def parse_element_word(self, text: str) -> GenWord:
        """Parse "a b a^-1", or "abab" when all generator names are single letters."""
        letters: list[int] = []
        for token in text.replace("*", " ").split():
            m = re.fullmatch(r"(.+?)\^(-?\d+)", token)
            if m:
                base_text, exp = m.group(1), int(m.group(2))
            else:
                base_text, exp = token, 1
            if base_text == "e":
                continue
            if base_text in self.name_to_index:
                bases = [base_text]
            elif all(ch in self.name_to_index for ch in base_text):
                bases = list(base_text)
            else:
                raise UnknownGeneratorError(f"unknown generator in {token!r}")
            for nm in bases:
                letter = self.name_to_index[nm] + 1
                if exp < 0:
                    letters.extend([-letter] * (-exp))
                else:
                    letters.extend([letter] * exp)
        return tuple(letters)

    def word_name(self, word: GenWord) -> str:
        if not word:
            return "e"
        parts = []
        for letter in word:
            nm = self.gen_names[abs(letter) - 1]
            parts.append(nm if letter > 0 else nm + "^-1")
        return " ".join(parts)

    # -- elements ----------------------------------------------------------

    def element(self, spec: str | Iterable[int]) -> WordElement:
        if isinstance(spec, str):
            return WordElement(self, self.parse_element_word(spec))
        return WordElement(self, tuple(spec))

    def generator(self, name: str) -> WordElement:
        if name not in self.name_to_index:
            raise UnknownGeneratorError(f"unknown generator {name!r}")
        return WordElement(self, (self.name_to_index[name] + 1,), reduced=True)

    def generators(self) -> list[WordElement]:
        return [WordElement(self, (i + 1,), reduced=True) for i in range(len(self.gen_names))]

    def identity(self) -> WordElement:
        return identity(self)

    def definition_tuple(self):
        return (self.d, tuple(self.gen_names), tuple(self.perms),
                tuple(tuple(r) for r in self.rows), tuple(self.rewrites),
                tuple(sorted(self.flags.items())), self._branching)

    def __repr__(self) -> str:
        return f"<SelfSimilarGroup {self.name or '/'.join(self.gen_names)} on {self.d} letters>"


# -- the definition file format -------------------------------------------

def parse_group(text: str) -> SelfSimilarGroup:
    """Parse a group definition; see the module docstring for the line format."""
    d: int | None = None
    gen_lines: list[tuple[str, str]] = []
    rewrite_lines: list[tuple[str, str]] = []
    flag_lines: list[tuple[str, str]] = []
    branching_lines: list[str] = []
    name = ""
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "alphabet":
            d = int(rest)
        elif head == "gen":
            nm, eq, body = rest.partition("=")
            if not eq:
                raise GroupDefinitionError(f"bad gen line: {raw!r}")
            gen_lines.append((nm.strip(), body.strip()))
        elif head == "rewrite":
            lhs, arrow, rhs = rest.partition("->")
            if not arrow:
                raise GroupDefinitionError(f"bad rewrite line: {raw!r}")
            rewrite_lines.append((lhs.strip(), rhs.strip()))
        elif head == "flag":
            nm, eq, val = rest.partition("=")
            if not eq:
                raise GroupDefinitionError(f"bad flag line: {raw!r}")
            flag_lines.append((nm.strip(), val.strip()))
        elif head == "branching":
            branching_lines.append(rest)
        elif head == "name":
            name = rest
        else:
            raise GroupDefinitionError(f"unrecognized line: {raw!r}")
    if d is None:
        raise GroupDefinitionError("missing alphabet line")
    if d < 2:
        raise GroupDefinitionError(f"alphabet size must be at least 2, got {d}")

    gen_names = [nm for nm, _ in gen_lines]
    lookup = {nm: i for i, nm in enumerate(gen_names)}

    def parse_word_tokens(token_text: str) -> GenWord:
        letters: list[int] = []
        for token in token_text.split():
            m = re.fullmatch(r"(.+?)\^(-?\d+)", token)
            base_text, exp = (m.group(1), int(m.group(2))) if m else (token, 1)
            if base_text == "e":
                continue
            if base_text in lookup:
                bases = [base_text]
            elif all(ch in lookup for ch in base_text):
                bases = list(base_text)
            else:
                raise UnknownGeneratorError(f"unknown generator in {token!r}")
            for nm in bases:
                letter = lookup[nm] + 1
                letters.extend([-letter if exp < 0 else letter] * abs(exp))
        return tuple(letters)

    perms = []
    rows = []
    for nm, body in gen_lines:
        m = re.fullmatch(r"(.*?)\[(.*)\]", body)
        if not m:
            raise GroupDefinitionError(f"generator {nm}: expected <perm>[sections]")
        perms.append(parse_perm(m.group(1), d))
        section_texts = [s.strip() for s in m.group(2).split(",")] if m.group(2).strip() else []
        rows.append([parse_word_tokens(s) for s in section_texts])
    rewrites = [(parse_word_tokens(l), parse_word_tokens(r)) for l, r in rewrite_lines]
    flags = {}
    for nm, val in flag_lines:
        if val not in ("true", "false"):
            raise GroupDefinitionError(f"flag {nm}: expected true or false, got {val!r}")
        flags[nm] = val == "true"
    branching = [parse_word_tokens(b) for b in branching_lines] or None
    return SelfSimilarGroup(d, gen_names, perms, rows, rewrites, flags, branching, name=name)


def print_group(group: SelfSimilarGroup) -> str:
    """Serialize a group in the definition format; parse_group inverts this."""
    lines = []
    if group.name:
        lines.append(f"name {group.name}")
    lines.append(f"alphabet {group.d}")
    for i, nm in enumerate(group.gen_names):
        sections = ", ".join(group.word_name(w) for w in group.rows[i])
        lines.append(f"gen {nm} = {format_perm(group.perms[i])}[{sections}]")
    for lhs, rhs in group.rewrites:
        lines.append(f"rewrite {group.word_name(lhs)} -> {group.word_name(rhs)}")
    for fl, val in group.flags.items():
        lines.append(f"flag {fl} = {'true' if val else 'false'}")
    if group.branching_words is not None:
        for w in group.branching_words:
            lines.append(f"branching {group.word_name(w)}")
    return "\n".join(lines) + "\n"


# -- presets ----------------------------------------------------------------

_GRIGORCHUK_TEXT = """
name grigorchuk
alphabet 2
gen a = (0 1)[e, e]
gen b = ()[a, c]
gen c = ()[a, d]
gen d = ()[e, b]
rewrite a a -> e
rewrite b b -> e
rewrite c c -> e
rewrite d d -> e
rewrite b c -> d
rewrite c b -> d
rewrite c d -> b
rewrite d c -> b
rewrite d b -> c
rewrite b d -> c
flag self_replicating = true
flag sip = true
flag branch_kernel_trivial = true
branching a b a b
branching a d a b a d a b
branching a b a d a b a d
"""

_grigorchuk_cache: SelfSimilarGroup | None = None


def grigorchuk() -> SelfSimilarGroup:
    """The first Grigorchuk group with its standard generators a, b, c, d."""
    global _grigorchuk_cache
    if _grigorchuk_cache is None:
        _grigorchuk_cache = parse_group(_GRIGORCHUK_TEXT)
    return _grigorchuk_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


_ggs_cache: dict[tuple[int, tuple[int, ...]], tuple[SelfSimilarGroup, bool | None]] = {}


def ggs(d: int, exponents: Sequence[int]) -> tuple[SelfSimilarGroup, bool | None]:
    """Build the GGS group for the exponent vector, plus its torsion flag.

    The generator a cycles the alphabet; b fixes the top level, has section
    a^e_i at letter i < d-1 and section b at letter d-1.  The torsion flag
    (sum of exponents divisible by d) is only meaningful for prime d and is
    None otherwise.
    """
    if d < 2:
        raise GroupDefinitionError(f"alphabet size must be at least 2, got {d}")
    if len(exponents) != d - 1:
        raise GroupDefinitionError(f"expected {d - 1} exponents, got {len(exponents)}")
    e = tuple(x % d for x in exponents)
    key = (d, e)
    if key in _ggs_cache:
        return _ggs_cache[key]
    torsion = (sum(e) % d == 0) if is_prime(d) else None
    a_perm = tuple((x + 1) % d for x in range(d))
    b_rows: list[GenWord] = [(1,) * ei for ei in e] + [(2,)]
    flags = {
        "self_replicating": True,
        "sip": bool(is_prime(d) and torsion),
        "branch_kernel_trivial": bool(is_prime(d) and torsion),
    }
    group = SelfSimilarGroup(
        d, ["a", "b"], [a_perm, tuple(range(d))], [[()] * d, b_rows],
        rewrites=[((1,) * d, ()), ((2,) * d, ())], flags=flags,
        name=f"ggs-{d}-" + ",".join(str(x) for x in e))
    symmetric = all(e[i] == e[d - 2 - i] for i in range(d - 1))
    nonconstant = len(set(e)) > 1
    if nonconstant:
        group._branching_thunk = _ggs_branching_thunk(group, symmetric)
    result = (group, torsion)
    _ggs_cache[key] = result
    return result


def _ggs_branching_thunk(group: SelfSimilarGroup, symmetric: bool, level: int = 3):
    """Branching generators for a GGS preset, found in a finite quotient.

    The commutator words produced by the quotient computation lie in the
    derived subgroup (or the third lower central term) of the group itself,
    so lifting them is sound; completeness is validated per level by the
    branch checks.
    """
    def thunk():
        from .level_quotient import build_quotient, derived_subgroup, lower_central_term

        q = build_quotient(group, level)
        image = lower_central_term(q, 3) if symmetric else derived_subgroup(q)
        return [g.lift.word for g in image.gens]

    return thunk
