"""Speckle-illuminated photoacoustic tomography toolkit.

Simulates transducer recordings of an absorbing object under random
speckle illumination and recovers the object from first- and second-order
statistics of those recordings.
"""

import os as _os

# Map the toolkit thread override onto the BLAS/FFT pools before numpy is
# imported anywhere below. Explicit user settings win (setdefault).
if "SPECKLEPAT_THREADS" in _os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["SPECKLEPAT_THREADS"])

from .geometry import (
    ObjectField,
    ObjectGrid,
    Timebase,
    TransducerArray,
    circular_array,
    make_grid,
    square_array,
    star_phantom,
)
from .forward import (
    EirModel,
    ForwardOperator,
    MediumParams,
    SparseSignalOperator,
    WATER,
    apply_forward,
    build_eir,
    build_microscopy_operator,
    build_sparse_signal_operator,
    materialize_dense,
    pat_operator,
)
from .speckle import (
    NoiseModel,
    SpeckleModel,
    build_speckle_model,
    calibrate_noise_sigma,
    sample_noise,
    sample_speckle,
)
from .stats import MomentAccumulator, model_covariance
from .solver import (
    RidgeFactorization,
    project_psd,
    projected_sqrt,
    psd_sqrt,
    ridge_factorize,
    ridge_solve_left,
    ridge_solve_right,
    symmetrize,
)
from .recon import (
    Alg1Trace,
    ReconConfig,
    SecondOrderKernel,
    default_lambdas,
    prepare_second_order,
    reconstruct_first_order,
    reconstruct_second_order,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    compute_metrics,
    export_image,
    run_experiment,
)

__all__ = [
    "ObjectField",
    "ObjectGrid",
    "Timebase",
    "TransducerArray",
    "circular_array",
    "make_grid",
    "square_array",
    "star_phantom",
    "EirModel",
    "ForwardOperator",
    "MediumParams",
    "SparseSignalOperator",
    "WATER",
    "apply_forward",
    "build_eir",
    "build_microscopy_operator",
    "build_sparse_signal_operator",
    "materialize_dense",
    "pat_operator",
    "NoiseModel",
    "SpeckleModel",
    "build_speckle_model",
    "calibrate_noise_sigma",
    "sample_noise",
    "sample_speckle",
    "MomentAccumulator",
    "model_covariance",
    "RidgeFactorization",
    "project_psd",
    "projected_sqrt",
    "psd_sqrt",
    "ridge_factorize",
    "ridge_solve_left",
    "ridge_solve_right",
    "symmetrize",
    "Alg1Trace",
    "ReconConfig",
    "SecondOrderKernel",
    "default_lambdas",
    "prepare_second_order",
    "reconstruct_first_order",
    "reconstruct_second_order",
    "ExperimentConfig",
    "ExperimentResult",
    "compute_metrics",
    "export_image",
    "run_experiment",
]
