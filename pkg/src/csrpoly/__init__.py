"""Polynomial and interaction feature expansion of CSR matrices without densification."""
from .csr import (
    CsrMatrix,
    canonicalize,
    from_dense,
    new_csr,
    random_csr,
    read_matrix_market,
    to_dense,
    write_matrix_market,
)
from .errors import (
    ArgumentError,
    CsrPolyError,
    DomainError,
    NonCanonicalError,
    OutOfRangeError,
    ParseError,
    StructureError,
    UnsupportedError,
)
from .expansion import ExpansionSpec, ExpansionStats, expand, expand_dense, feature_names
from .index_maps import (
    INTER2,
    INTER3,
    POLY2,
    POLY3,
    MappingKind,
    Mode,
    expanded_dim,
    forward_map,
    invert_map,
    map2_interaction,
    map2_polynomial,
    map3_interaction,
    map3_polynomial,
    row_output_nnz,
    tetrahedral,
    triangle,
)

__version__ = "0.1.0"

__all__ = [
    "CsrMatrix",
    "canonicalize",
    "from_dense",
    "new_csr",
    "random_csr",
    "read_matrix_market",
    "to_dense",
    "write_matrix_market",
    "ArgumentError",
    "CsrPolyError",
    "DomainError",
    "NonCanonicalError",
    "OutOfRangeError",
    "ParseError",
    "StructureError",
    "UnsupportedError",
    "ExpansionSpec",
    "ExpansionStats",
    "expand",
    "expand_dense",
    "feature_names",
    "INTER2",
    "INTER3",
    "POLY2",
    "POLY3",
    "MappingKind",
    "Mode",
    "expanded_dim",
    "forward_map",
    "invert_map",
    "map2_interaction",
    "map2_polynomial",
    "map3_interaction",
    "map3_polynomial",
    "row_output_nnz",
    "tetrahedral",
    "triangle",
]
