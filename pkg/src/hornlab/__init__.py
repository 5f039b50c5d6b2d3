"""Numerical toolkit for holomorphic germs with a simple parabolic fixed point.

Computes normalized Fatou coordinates, horn maps, and the iterative residue,
and verifies numerically that local semi-conjugacies between immediate basins
correspond to horn maps that agree up to translations.
"""

from .conjugacy import (
    BuiltPhi,
    EquivalenceReport,
    PairContext,
    SemiConjugacySpec,
    VerificationError,
    build_phi,
    extract_psi,
    lifted_phase_shift,
    verify_equivalence,
)
from .fatou import (
    AbelSeries,
    ConvergenceError,
    FatouConfig,
    OrbitError,
    PetalSpec,
    attracting_fatou,
    petal_membership,
    repelling_fatou,
    repelling_parametrization,
    sample_petal,
    series_pair,
    solve_abel_series,
)
from .horn import (
    BasinVerdict,
    CylinderPoint,
    DecayReport,
    HornDomainGrid,
    basin_membership,
    cylinder_distance,
    domain_probe,
    expansion_check,
    horn_map,
    lifted_horn_map,
)
from .maps import (
    BlaschkeFinite,
    BlaschkeInfinite,
    Catalog,
    Composed,
    Conjugated,
    DomainError,
    GermData,
    Iterated,
    MapSpec,
    Moebius,
    NewtonError,
    Polynomial,
    evaluate,
    germ_data,
    iterative_residue_contour,
    load_catalog,
    local_inverse,
    map_from_json,
    normalize_germ,
    taylor_coefficients,
)
from .render import (
    RasterImage,
    Viewport,
    basin_layers,
    canonical_hash,
    checkerboard_parity,
    export,
    render_basin,
    render_horn_domain,
)

__version__ = "0.1.0"
