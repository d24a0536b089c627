"""Builders for the example families used throughout the package."""

from ..groups import (
    FreeGroupDescriptor,
    GroupTable,
    ZWindow,
    cyclic_group,
    direct_product,
    group_from_permutations,
    group_from_table,
    trivial_group,
)
from .families import (
    brandt,
    brandt_z_window,
    chain,
    clifford,
    clifford_chain,
    from_partial_bijections,
    group_with_zero,
    qdnotr_family,
    semilattice,
    semilattice_from_sets,
    symmetric_inverse_monoid,
)
from .tower import (
    FreeBall,
    QuotientTower,
    ball_size,
    default_tower_generators,
    free_ball,
    injectivity_radius,
    quotient_tower,
    search_injective_pair,
    verify_ball_injectivity,
)

__all__ = [
    "FreeBall", "FreeGroupDescriptor", "GroupTable", "QuotientTower", "ZWindow", "ball_size", "brandt",
    "brandt_z_window", "chain", "clifford", "clifford_chain", "cyclic_group", "default_tower_generators",
    "direct_product", "free_ball", "from_partial_bijections", "group_from_permutations", "group_from_table",
    "group_with_zero", "injectivity_radius", "qdnotr_family", "quotient_tower", "search_injective_pair",
    "semilattice", "semilattice_from_sets", "symmetric_inverse_monoid", "trivial_group",
    "verify_ball_injectivity",
]
