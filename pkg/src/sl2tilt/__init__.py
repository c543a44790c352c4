"""Tensor power growth of the natural SL2 representation in characteristic 2."""

from .charring import SymmetricCharacter, TiltingDecomposition, chi, decompose
from .fusion import b_sequence, path_counts, scaled_b_sequence
from .limitfn import DELTA, PsiModel, build_psi, omega, psi
from .theta import phi

__all__ = [
    "DELTA", "PsiModel", "SymmetricCharacter", "TiltingDecomposition", "b_sequence",
    "build_psi", "chi", "decompose", "omega", "path_counts", "phi", "psi",
    "scaled_b_sequence",
]
__version__ = "0.1.0"
