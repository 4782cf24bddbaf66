"""Admissible clauses of finitely generated quasivarieties, decided through natural dualities."""

from .admissibility import (AdmissibilityVerdict, MembershipVerdict, admissible_clause,
                            admissible_quasi_exact, classify_completeness, member_IS_free,
                            member_ISP_free, verify_lemma_suite)
from .algebra import (SIGNATURES, FiniteAlgebra, Homomorphism, Signature, add_bounds, direct_power,
                      direct_product, eval_term, homomorphisms, is_isomorphic, subalgebra_generated,
                      validate_variety)
from .clauses import REGISTRY, satisfies, valid_in_class
from .duality import (dual_algebra, dual_space, embeds_into_free, embeds_into_free_power,
                      evaluation_map, free_algebra, identity_valid)
from .errors import (BudgetExceeded, ClauseSyntaxError, DualityError, EvaluationError, FormatError,
                     SignatureError, VarietyError, WorkbenchError)
from .io import dump_algebra, dump_space, load_algebra, load_space
from .members import enumerate_members
from .profiles import PROFILE_NAMES, PROFILES, VarietyProfile, get_profile
from .spaces import (StructuredSpace, SpaceMorphism, check_space_axioms, emit_dot, morphisms,
                     space_coproduct, space_power, surjective_morphism_exists)
from .syntax import Clause, Identity, parse_clause, parse_term, print_clause
