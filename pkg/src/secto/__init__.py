"""Sectional operators on so(g): construction, spectra, Euler flows,
holonomy realization and projective-equivalence checks."""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    BilinearForm,
    JordanBlock,
    JordanSpec,
    MatrixPolynomial,
    SoBasis,
    g_adjoint,
    minimal_polynomial,
    realize_jordan,
    so_basis,
    trace_pairing,
    wedge,
)
from .sectional import (  # noqa: E402
    SectionalRep,
    apply_r0,
    bianchi_residual,
    build_rep,
    centralizer,
    express_polynomial,
    sectional_residual,
    solution_space,
    spectrum_predict,
    spectrum_verify,
    uniqueness_test,
)

__all__ = [
    "BilinearForm",
    "JordanBlock",
    "JordanSpec",
    "MatrixPolynomial",
    "SectionalRep",
    "SoBasis",
    "apply_r0",
    "bianchi_residual",
    "build_rep",
    "centralizer",
    "express_polynomial",
    "g_adjoint",
    "minimal_polynomial",
    "realize_jordan",
    "sectional_residual",
    "so_basis",
    "solution_space",
    "spectrum_predict",
    "spectrum_verify",
    "trace_pairing",
    "uniqueness_test",
    "wedge",
    "__version__",
]
