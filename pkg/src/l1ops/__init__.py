"""Operator space structures on l1(n): MIN norms, dilations, ampliations
and embedding certificates at finite dimension."""

__version__ = "0.1.0"

from .linalg import (
    HermitianEig,
    UnitarySpectrum,
    direct_sum,
    herm_eig,
    kron,
    matmul,
    op_norm,
    psd_sqrt,
    unitary_spectrum,
)
from .opspace import (
    GeneratorTuple,
    LevelElement,
    MinNormResult,
    Witness,
    ell1_norm,
    eval_at,
    isometry_defect,
    min_norm,
    os_norm,
)
from .constructions import (
    AmpliationFamily,
    ampliation,
    ampliation_exactness,
    halmos_dilation,
    parrott_generators,
    parrott_triple,
    roots_of_unity_diag,
)
from .certify import Certificate, certify_tuple, lemma_witness, no_embedding_certificate
