"""Exact lifts of degree-8 order-2 algebras over truncated local rings.

The pipeline: present the algebra by slots (a1; x2, x3; a2, a3; d), find
the common-slot witnesses, raise every slot to T = K[eps]/(eps^N) so the
witness relations hold exactly, build the quadratic crossed product, and
carve out the degree-8 Azumaya lift with an explicit idempotent. Every
product is exact and every claim is re-checked by an independent verifier.
"""

from .algebra import (
    AlgebraMap,
    AlgElem,
    Idempotent,
    StructAlgebra,
    centralizer,
    corner,
    crossed_embed,
    crossed_product_quadratic,
    double_layer,
    express_in_basis,
    find_semilinear_iso,
    galois_split_idempotent,
    galois_twist,
    generating_indices,
    hensel_lift_idempotent,
    is_azumaya,
    layer_algebra,
    opposite,
    quaternion_algebra,
    rank_one_idempotent,
    residue_algebra,
    same_structure,
    skolem_noether_c,
    tensor,
    witness_residue_idempotent,
)
from .errors import (
    AssociativityFailure,
    AzuliftError,
    BaseMismatch,
    CheckFailed,
    Degenerate,
    FormatError,
    NoUnitSolution,
    NotBrauerEquivalent,
    NotFree,
    NotIdempotentResidue,
    NotSplit,
    NotUnit,
    PreconditionViolated,
    SearchExhausted,
    SlotNotInBase,
    WitnessSearchFailed,
)
from .formats import (
    certificate_from_obj,
    certificate_to_json,
    certificate_to_obj,
    load_certificate,
    load_scenario,
    save_certificate,
    save_scenario,
    scenario_from_obj,
    scenario_to_json,
    scenario_to_obj,
)
from .lift import (
    SEED_SLOTS,
    CheckEntry,
    LiftCertificate,
    LiftScenario,
    ValidationReport,
    Witnesses,
    check_witnesses,
    construct_lift,
    derive_witnesses,
    lemma3_reduce,
    random_scenario,
    scenario_w,
    validate_scenario,
    verify_certificate,
)
from .rings import (
    MultiQuadExt,
    RingElement,
    TruncatedLocalRing,
    hilbert90,
    tower_invert_matrix,
    tower_matrix_is_invertible,
    tower_solve_columns,
)
from .scalars import ModP, PrimeField, QQ, Rationals
from .seeding import derive_rng, derive_seed
from .symbols import (
    TRIVIAL_CLASS,
    Place,
    SymbolClass,
    SymbolPair,
    class_of,
    cor_rewrite,
    find_common_slot,
    find_slot_value,
    hilbert_symbol,
    is_split,
    local_is_square,
    ramification_set,
    solve_norm,
    square_class,
    symbols_isomorphic,
)

__version__ = "0.1.0"
