"""Diagonal and block subgroups: construction, serialization, verification.

A diagonal part couples copies of the same elements below each vertex of an
antichain; a block subgroup is a product of such parts over pairwise fully
incomparable supports.  Verification is budgeted: support and commutation
facts are exact, injectivity is a semi-decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .automorphism import Element, EqBudget, graft, is_trivial, product
from .level_quotient import Gen, SubgroupImage, build_quotient
from .verdict import Verdict, proven, refuted, unknown
from .words import EPSILON, Word, is_antichain, is_below, is_prefix, fully_incomparable, parse_word, word_str


@dataclass(frozen=True)
class DiagonalSpec:
    """One coupled part: identical section generators below each support vertex."""

    support: tuple[Word, ...]
    generators: tuple[Element, ...] = ()

    def __post_init__(self):
        if not self.support:
            raise ValueError("a part needs at least one support vertex")
        if not is_antichain(self.support):
            raise ValueError(f"support {[word_str(v) for v in self.support]} is not an antichain")

    def vertices(self) -> list[str]:
        return [word_str(v) for v in sorted(self.support)]


@dataclass(frozen=True)
class BlockStructure:
    """A product of diagonal parts over fully incomparable supports."""

    parts: tuple[DiagonalSpec, ...]
    regular_over: str | None = None

    def __post_init__(self):
        for i in range(len(self.parts)):
            for j in range(i + 1, len(self.parts)):
                if not fully_incomparable(self.parts[i].support, self.parts[j].support):
                    raise ValueError(
                        f"parts {self.parts[i].vertices()} and {self.parts[j].vertices()} "
                        "share comparable vertices")

    def union_support(self) -> list[Word]:
        return sorted(v for part in self.parts for v in part.support)

    def partition(self) -> list[list[str]]:
        return sorted(part.vertices() for part in self.parts)


def serialize_structure(structure: BlockStructure) -> str:
    lines = [f"part: {{{', '.join(part.vertices())}}}" for part in structure.parts]
    if structure.regular_over:
        lines.append(f"regular-over: {structure.regular_over}")
    return "\n".join(lines) + "\n"


def parse_structure(text: str, d: int) -> BlockStructure:
    """Parse the line format written by serialize_structure; parts carry no generators."""
    parts = []
    regular_over = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("part:"):
            body = line[len("part:"):].strip()
            if not (body.startswith("{") and body.endswith("}")):
                raise ValueError(f"bad part line: {raw!r}")
            vs = tuple(sorted(parse_word(tok.strip(), d) for tok in body[1:-1].split(",")))
            parts.append(DiagonalSpec(vs))
        elif line.startswith("regular-over:"):
            regular_over = line[len("regular-over:"):].strip()
        else:
            raise ValueError(f"unrecognized structure line: {raw!r}")
    return BlockStructure(tuple(parts), regular_over)


# -- construction ---------------------------------------------------------------

def build_diagonal(K_gens: Sequence[Element], V: Sequence[Word]) -> list[Element]:
    """Couple each generator across the antichain: one grafted copy below each vertex."""
    if not K_gens:
        raise ValueError("need at least one section generator")
    support = tuple(sorted(V))
    if not is_antichain(support):
        raise ValueError(f"support {[word_str(v) for v in support]} is not an antichain")
    group = K_gens[0].group
    return [product(group, [graft(v, k) for v in support]) for k in K_gens]


def build_block(parts: Sequence[DiagonalSpec]) -> tuple[list[Element], BlockStructure]:
    """Concatenate the parts' coupled generators and record the structure."""
    structure = BlockStructure(tuple(parts))
    gens: list[Element] = []
    for part in structure.parts:
        if not part.generators:
            raise ValueError(f"part {part.vertices()} carries no generators")
        gens.extend(build_diagonal(part.generators, part.support))
    return gens, structure


def diagonal_spec(K_gens: Sequence[Element], V: Sequence[Word]) -> DiagonalSpec:
    return DiagonalSpec(tuple(sorted(V)), tuple(K_gens))


# -- verification -----------------------------------------------------------------

def minimal_incomparable(V: Sequence[Word], d: int) -> list[Word]:
    """The shallowest vertices lying neither above nor below the antichain."""
    out: list[Word] = []

    def walk(prefix: Word) -> None:
        if prefix in V:
            return
        if any(is_prefix(prefix, v) for v in V):
            for x in range(d):
                walk(prefix + (x,))
        else:
            out.append(prefix)

    walk(EPSILON)
    return out


def verify_block(H_gens: Sequence[Element], structure: BlockStructure,
                 n: int = 4, budget: int = 8,
                 eq_budget: EqBudget = EqBudget()) -> dict[str, Verdict]:
    """Clause-by-clause check of a claimed block structure.

    support: generators fix the support and are trivial beside it (exact).
    index: per-vertex section-image index chains across quotients, with a
    stability report.  injectivity: budgeted search for a kernel word of the
    section map.  regular: section images match the declared branching
    subgroup per level (only when the structure claims it).
    """
    if not H_gens:
        raise ValueError("need at least one generator")
    group = H_gens[0].group
    support = structure.union_support()
    out: dict[str, Verdict] = {}
    out["support"] = _check_support(group, H_gens, support, eq_budget)
    attribution = _attribute(H_gens, structure, eq_budget)
    if out["support"].is_proven:
        out["index"] = _check_index_chain(group, structure, attribution, n)
        out["injectivity"] = _check_injectivity(group, structure, attribution, budget, eq_budget)
        if structure.regular_over is not None:
            out["regular"] = _check_regular(group, structure, attribution, n)
    else:
        reason = "support clause failed, later clauses not attempted"
        out["index"] = unknown(reason=reason)
        out["injectivity"] = unknown(reason=reason)
        if structure.regular_over is not None:
            out["regular"] = unknown(reason=reason)
    return out


def _check_support(group, H_gens, support, eq_budget) -> Verdict:
    beside = minimal_incomparable(support, group.d)
    for i, g in enumerate(H_gens):
        for v in support:
            if not g.fixes(v):
                return refuted(generator=str(g), vertex=word_str(v),
                               moved_to=word_str(g.act(v)),
                               note="a generator moves a support vertex")
        for u in beside:
            if not g.fixes(u):
                return refuted(generator=str(g), vertex=word_str(u),
                               moved_to=word_str(g.act(u)),
                               note="a generator moves a vertex beside the support")
            verdict = is_trivial(g.section(u), eq_budget)
            if verdict.is_refuted:
                w = verdict.certificate["witness"]
                return refuted(generator=str(g), vertex=word_str(u),
                               section_witness=w,
                               note="a generator acts beside the support")
            if verdict.is_unknown:
                return unknown(generator=str(g), vertex=word_str(u),
                               reason="section triviality undecided at budget")
    return proven(generators=len(H_gens),
                  support=[word_str(v) for v in support],
                  beside=[word_str(u) for u in beside])


def _attribute(H_gens, structure, eq_budget) -> list[list[Element]]:
    """Assign each generator to the single part it acts under, if it has one."""
    buckets: list[list[Element]] = [[] for _ in structure.parts]
    for g in H_gens:
        hits = []
        for i, part in enumerate(structure.parts):
            if any(not is_trivial(g.section(v), eq_budget).is_proven for v in part.support):
                hits.append(i)
        if len(hits) == 1:
            buckets[hits[0]].append(g)
    return buckets


def _section_image(q, gens: Sequence[Element], v: Word) -> SubgroupImage:
    sections = [g.section(v) for g in gens]
    return SubgroupImage(q, [Gen(q.element_perm(s), s) for s in sections])


def _check_index_chain(group, structure, attribution, n) -> Verdict:
    chains: dict[str, list[int]] = {}
    for part, gens in zip(structure.parts, attribution):
        if not gens:
            return unknown(part=part.vertices(),
                           reason="no generator is supported only under this part")
        for v in part.support:
            chain = []
            for m in range(1, n + 1):
                q = build_quotient(group, m)
                chain.append(q.order() // _section_image(q, gens, v).order())
            chains[word_str(v)] = chain
    stable = all(len(c) >= 2 and c[-1] == c[-2] for c in chains.values())
    if stable:
        return proven(chains=chains, levels=n,
                      note="per-vertex index of the section image, constant at the top")
    return unknown(chains=chains, levels=n,
                   reason="some index chain is still growing at the deepest level")


def _check_injectivity(group, structure, attribution, budget, eq_budget) -> Verdict:
    checked = 0
    for part, gens in zip(structure.parts, attribution):
        if not gens:
            return unknown(part=part.vertices(),
                           reason="no generator is supported only under this part")
        signed = [(g, 1) for g in gens] + [(g.inverse(), -1) for g in gens]
        frontier: list[Element] = [group.identity()]
        seen = {group.identity().key()}
        for _ in range(budget):
            nxt = []
            for h in frontier:
                for g, _sign in signed:
                    he = product(group, [h, g])
                    key = he.key()
                    if key in seen or len(seen) > 4000:
                        continue
                    seen.add(key)
                    nxt.append(he)
                    checked += 1
                    for v in part.support:
                        sec = is_trivial(he.section(v), eq_budget)
                        if sec.is_proven and is_trivial(he, eq_budget).is_refuted:
                            return refuted(part=part.vertices(), vertex=word_str(v),
                                           kernel_word=str(he),
                                           note="a nontrivial element has trivial section")
            frontier = nxt
    return proven(words_checked=checked, word_budget=budget,
                  note="no kernel word found; semi-decision at budget")


def _check_regular(group, structure, attribution, n) -> Verdict:
    K_words = group.branching_words
    if not K_words:
        return unknown(reason="the group declares no branching subgroup to compare with")
    K_elements = group.branching_elements()
    levels: dict[str, list[int]] = {}
    for part, gens in zip(structure.parts, attribution):
        if not gens:
            return unknown(part=part.vertices(),
                           reason="no generator is supported only under this part")
        for v in part.support:
            matched = []
            for m in range(1, n + 1):
                q = build_quotient(group, m)
                K_img = SubgroupImage(q, [Gen(q.element_perm(k), k) for k in K_elements])
                sec = _section_image(q, gens, v)
                if not sec.same_image(K_img):
                    return refuted(part=part.vertices(), vertex=word_str(v), level=m,
                                   section_order=sec.order(), expected_order=K_img.order(),
                                   note="section image differs from the branching subgroup")
                matched.append(m)
            levels[word_str(v)] = matched
    return proven(levels=levels, max_level=n, tag=structure.regular_over,
                  note="section images equal the branching subgroup in each quotient")
