"""Structure-constant algebras: construction, idempotents, descent."""

from .crossed import (
    crossed_embed,
    crossed_product_quadratic,
    find_semilinear_iso,
    skolem_noether_c,
    witness_residue_idempotent,
)
from .idempotents import hensel_lift_idempotent, rank_one_idempotent
from .structure import (
    AlgebraMap,
    AlgElem,
    Idempotent,
    StructAlgebra,
    centralizer,
    corner,
    double_layer,
    express_in_basis,
    galois_split_idempotent,
    galois_twist,
    generating_indices,
    is_azumaya,
    layer_algebra,
    opposite,
    quaternion_algebra,
    residue_algebra,
    same_structure,
    tensor,
)

__all__ = [
    "crossed_embed",
    "crossed_product_quadratic",
    "find_semilinear_iso",
    "skolem_noether_c",
    "witness_residue_idempotent",
    "hensel_lift_idempotent",
    "rank_one_idempotent",
    "StructAlgebra",
    "AlgElem",
    "AlgebraMap",
    "Idempotent",
    "quaternion_algebra",
    "layer_algebra",
    "tensor",
    "opposite",
    "galois_twist",
    "residue_algebra",
    "same_structure",
    "generating_indices",
    "express_in_basis",
    "is_azumaya",
    "centralizer",
    "corner",
    "double_layer",
    "galois_split_idempotent",
]
