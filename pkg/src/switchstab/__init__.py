"""Almost-sure stability certificates, feedback synthesis, and deterministic
Monte Carlo validation for regime-switching diffusions."""

from .certify import (
    BirthDeathChain,
    CountableGroup,
    CountablePartition,
    FiniteChain,
    PartitionSpec,
    Refusal,
    StabilityCertificate,
    averaging_value,
    build_partition,
    m1_certificate,
    partition_certificate,
    pf_certificate,
    principal_eigenvalue,
    reduced_generator,
    self_check,
    singleton_partition,
)
from .lmi import (
    FeedbackSynthesis,
    LmiCandidate,
    LmiRefusal,
    assemble_block,
    schur_reduce,
    synthesize,
    verify,
)
from .markov import (
    ChainPath,
    Generator,
    StationaryDist,
    reversibility,
    sample_path,
    stationary,
    validate,
)
from .model import (
    BetaVector,
    GammaDescriptor,
    LinearMode,
    NonlinearMode,
    SwitchingModel,
    beta_quadratic,
    beta_vector,
)
from .numerics import (
    DenseMatrix,
    EigenPair,
    definiteness,
    perron_pair,
    solve_linear,
    sym_eig_extreme,
)
from .simulate import PathEnsemble, PathRecord, SimConfig, run_ensemble, simulate_path

__version__ = "0.1.0"

__all__ = [
    "BetaVector",
    "BirthDeathChain",
    "ChainPath",
    "CountableGroup",
    "CountablePartition",
    "DenseMatrix",
    "EigenPair",
    "FeedbackSynthesis",
    "FiniteChain",
    "GammaDescriptor",
    "Generator",
    "LinearMode",
    "LmiCandidate",
    "LmiRefusal",
    "NonlinearMode",
    "PartitionSpec",
    "PathEnsemble",
    "PathRecord",
    "Refusal",
    "SimConfig",
    "StabilityCertificate",
    "StationaryDist",
    "SwitchingModel",
    "assemble_block",
    "averaging_value",
    "beta_quadratic",
    "beta_vector",
    "build_partition",
    "definiteness",
    "m1_certificate",
    "partition_certificate",
    "perron_pair",
    "pf_certificate",
    "principal_eigenvalue",
    "reduced_generator",
    "reversibility",
    "run_ensemble",
    "sample_path",
    "schur_reduce",
    "self_check",
    "simulate_path",
    "singleton_partition",
    "solve_linear",
    "stationary",
    "sym_eig_extreme",
    "synthesize",
    "validate",
    "verify",
]
