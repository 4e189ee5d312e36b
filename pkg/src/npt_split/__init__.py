"""NPT entanglement from nonclassical photon statistics at a 50:50 beam splitter."""
from .beamsplitter import output_closed_form, output_numeric, split_amplitudes
from .fock_core import (
    PhotonNumberDistribution,
    TwoModeState,
    box_index_map,
    index_map,
    marginal_pnd_a,
    validate_pnd,
)
from .moments import classicality_check, hankel_scaled, mandel_statistics, moment_sequence
from .npt import (
    npt_certificate,
    partial_transpose,
    principal_submatrix,
    pt_closed_form,
    pt_spectrum,
    witness_2x2,
)
from .states import (
    FamilySpec,
    build_pnd,
    make_binomial,
    make_fock,
    make_mixture,
    make_poisson,
    make_thermal,
    make_vacuum_two_mixture,
)

__version__ = "0.1.0"
