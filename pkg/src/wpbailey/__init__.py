"""Exact and numeric verification of WP-Bailey pair identities in q-series."""
from .errors import (
    NonConvergent,
    PoleDetected,
    PoleProximity,
    SingularSeries,
    UnknownIdentity,
    UnknownPair,
    UnknownSeries,
    WindowExceedsOrder,
)
from .identities import (
    REGISTRY,
    IdentityEntry,
    VerificationReport,
    f1_series,
    f2_series,
    f_series,
    identity_ids,
    identity_sides,
    theta_a,
    theta_psi,
    verify,
)
from .qnumeric import NumericConfig, eval_series_at, num_poch, num_sum
from .qseries import (
    Coefficient,
    QMonomial,
    QSeries,
    adaptive_sum,
    coeff_window,
    poch_finite,
    poch_infinite,
    qm,
    series_invert,
    substitute_power,
)
from .wppairs import (
    DerivedPairSpec,
    PairSpec,
    catalog_derived,
    catalog_pair,
    chain_step,
    derived_limit_probe,
    wp_check,
)

__version__ = "0.1.0"
