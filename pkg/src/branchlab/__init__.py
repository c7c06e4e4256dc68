"""branchlab: exact computation in self-similar groups acting on rooted trees."""

from .automorphism import (EqBudget, Element, GraftElement, ProductElement, WordElement,
                           compose, equal, graft, identity, invert, is_trivial)
from .blocks import (BlockStructure, DiagonalSpec, build_block, build_diagonal,
                     diagonal_spec, minimal_incomparable, parse_structure,
                     serialize_structure, verify_block)
from .detect import (Classification, DependenceReport, DetectBudget, Member,
                     SubgroupHandle, SupportReport, block_detect, classify_section,
                     dependence_function, find_supporting_set, section_subgroup,
                     srist_membership, srist_search)
from .group_defs import SelfSimilarGroup, ggs, grigorchuk, parse_group, print_group
from .level_quotient import (Gen, LevelQuotient, SubgroupImage, build_quotient,
                             derived_subgroup, factored_order, lower_central_term,
                             minimal_congruence, normal_closure,
                             rigid_stabilizer_quotient, srist_quotient,
                             stabilizer_subgroup, subtree_projection)
from .structure import (check_prop_4_2, check_prop_4_3, maximal_branching_candidate,
                        regular_branch_check, spherical_transitivity, tree_primitive)
from .verdict import Status, Verdict
from .words import (Comparison, Word, compare, parse_word, validate_transversal, word_str)

__version__ = "0.1.0"

__all__ = [
    "BlockStructure", "Classification", "Comparison", "DependenceReport",
    "DetectBudget", "DiagonalSpec", "Element", "EqBudget", "Gen", "GraftElement",
    "LevelQuotient", "Member", "ProductElement", "SelfSimilarGroup", "Status",
    "SubgroupHandle", "SubgroupImage", "SupportReport", "Verdict", "Word",
    "WordElement",
    "block_detect", "build_block", "build_diagonal", "build_quotient",
    "check_prop_4_2", "check_prop_4_3", "classify_section", "compare", "compose",
    "dependence_function", "derived_subgroup", "diagonal_spec", "equal",
    "factored_order", "find_supporting_set", "ggs", "graft", "grigorchuk",
    "identity", "invert", "is_trivial", "lower_central_term",
    "maximal_branching_candidate", "minimal_congruence", "minimal_incomparable",
    "normal_closure", "parse_group", "parse_structure", "parse_word",
    "print_group", "regular_branch_check", "rigid_stabilizer_quotient",
    "section_subgroup", "serialize_structure", "spherical_transitivity",
    "srist_membership", "srist_quotient", "srist_search", "stabilizer_subgroup",
    "subtree_projection", "tree_primitive", "validate_transversal",
    "verify_block", "word_str",
]
