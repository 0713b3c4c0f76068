"""Kernels package"""

from .alignment import (
    AlignmentSpectrum,
    AlignmentSummary,
    alignment_spectrum,
    summarize_alignment,
)
from .kernel import CrossKernel, KernelMatrix, cross_kernel, kernel_matrix
from .krr import KrrModel, fit_krr, predict_krr
from .landmark import (
    LandmarkDesign,
    landmark_alignment,
    landmark_cross_design,
    landmark_design,
    landmark_fit,
    landmark_predict,
    select_landmarks,
)
from .linalg import EigenDecomposition, ThinSVD, solve_spd, sym_eig, thin_svd

__all__ = [
    "AlignmentSpectrum",
    "AlignmentSummary",
    "CrossKernel",
    "EigenDecomposition",
    "KernelMatrix",
    "KrrModel",
    "LandmarkDesign",
    "ThinSVD",
    "alignment_spectrum",
    "cross_kernel",
    "fit_krr",
    "kernel_matrix",
    "landmark_alignment",
    "landmark_cross_design",
    "landmark_design",
    "landmark_fit",
    "landmark_predict",
    "predict_krr",
    "select_landmarks",
    "solve_spd",
    "summarize_alignment",
    "sym_eig",
    "thin_svd",
]
