"""Hamiltonian parameter estimation from the spectral shifts of local markers."""
from .errors import *  # noqa: F401,F403
from .model import (
    ChainSpec,
    HermitianMatrix,
    NetworkSpec,
    Perturbation,
    SpinChainSpec,
    apply_perturbation,
    build_chain_matrix,
    build_spin_single_excitation,
    gauge_reduce,
    tridiagonal_matrix,
)
from .spectral import EigenBasis, NoiseModel, Spectrum, eigen_decompose, perturb_spectrum, spectrum
from .inversion import SpectralMeasure, check_interlacing, infer_field_strength, recover_weights
from .reconstruction import (
    CrossTermData,
    assemble_network,
    estimate_chain,
    moment,
    network_measurements,
    reconstruct_chain,
    recover_cross_terms,
)

__version__ = "0.1.0"
