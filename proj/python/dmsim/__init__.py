# Copyright 2026 The dmsim Authors
# SPDX-License-Identifier: Apache-2.0

"""Direct density-matrix measurement simulator.

Thin python surface over the C++ core: polarization states, the exact
finite-strength pointer simulation, the direct reconstruction formulas, the
tomography baseline and the sweep campaigns.
"""

from dmsim._core import (  # noqa: F401
    DensityMatrix,
    ExpectationSet,
    PointerConfig,
    Projector,
    PureState,
    TomographyData,
    basis_projector,
    bias_curve,
    density_from_pure,
    direct_element,
    direct_matrix,
    direct_matrix_camera,
    expectation_set,
    operator_weak_average,
    polarization_ket,
    project_to_physical,
    purity,
    pure_path_state,
    qst_probabilities,
    qst_reconstruct,
    spun_mixed_analytic,
    spun_mixed_numeric,
    sweep_csv,
    trace_distance,
    waveplate_unitary,
)

__all__ = [
    "DensityMatrix",
    "ExpectationSet",
    "PointerConfig",
    "Projector",
    "PureState",
    "TomographyData",
    "basis_projector",
    "bias_curve",
    "density_from_pure",
    "direct_element",
    "direct_matrix",
    "direct_matrix_camera",
    "expectation_set",
    "operator_weak_average",
    "polarization_ket",
    "project_to_physical",
    "purity",
    "pure_path_state",
    "qst_probabilities",
    "qst_reconstruct",
    "spun_mixed_analytic",
    "spun_mixed_numeric",
    "sweep_csv",
    "trace_distance",
    "waveplate_unitary",
]

__version__ = "0.1.0"
