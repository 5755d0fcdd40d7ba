"""Finite universal algebra: free algebras, congruence filters, and
certified pseudovariety membership."""

from .algebra import (
    App,
    FiniteAlgebra,
    Homomorphism,
    Signature,
    Term,
    Var,
    are_isomorphic,
    direct_product,
    eval_term,
    find_surjective_homomorphism,
    minimal_generating_set,
    subuniverse_generated,
    term_from_prefix,
    term_to_prefix,
)
from .congruences import (
    Congruence,
    all_congruences,
    congruence_generated,
    is_congruence,
    join,
    meet,
    quotient_algebra,
)
from .freealg import (
    EvaluationKernel,
    FreeAlgebra,
    IllDefinedWitness,
    TermOperation,
    clone_compose,
    free_algebra,
    inverse_substitution,
    kernel_of_evaluation,
)
from .partitions import Partition, meet_partitions, refines
from .variety import (
    ClassOfAlgebras,
    CongruenceFilter,
    Entourage,
    FilterSpec,
    Generators,
    NegativeCertificate,
    NegativeUniformCertificate,
    PositiveCertificate,
    class_from_filter,
    close_class,
    close_filter,
    filter_from_class,
    member,
    pointwise_entourage,
    verify_correspondence,
    verify_pointwise_uniformity,
    verify_uniformity_axioms,
)

__all__ = [name for name in dir() if not name.startswith("_")]
