"""caeigen: executable analyses of D-dimensional cellular automata.

Blocking-word certification, exact trace periodicity on tori, Monte-Carlo
estimation of bounded-period trace events, twisted-average spectral probing,
and explicit rotation factors.
"""

__version__ = "0.1.0"

from .errors import (
    AlphabetMismatch,
    BudgetExceeded,
    CaeigenError,
    ClassCollision,
    DimensionUnsupported,
    HypothesisFailed,
    MalformedSpec,
    NotCertified,
    NotFullyBlocking,
    OrbitBudgetExceeded,
    StateSpaceBudgetExceeded,
    TableLengthMismatch,
    TorusTooSmall,
    TrivialPeriod,
    WindowExhausted,
)
from .lattice import (
    Alphabet,
    CylinderSpec,
    DistanceResult,
    Pattern,
    RandomSource,
    TorusConfig,
    cylinder_contains,
    distance,
    pack_bits,
    parse_pattern,
    parse_torus,
    read_window,
    sample_uniform_pattern,
    sample_uniform_torus,
    shift,
    unfold,
)
from .rules import (
    CellularAutomaton,
    LocalRule,
    apply_cone,
    apply_global,
    automaton,
    commutation_selftest,
    cone_step_array,
    parse_rule,
    step,
    torus_step_array,
)
from .surjectivity import (
    SurjectivityVerdict,
    balance_check,
    decide_surjective,
    decide_surjective_1d,
)
from .blocking import (
    BlockingBudget,
    BlockingCertificate,
    BlockingQuery,
    BlockingSearchReport,
    BlockingVerdict,
    KurkaReport,
    RefutationWitness,
    certify_blocking,
    classify_kurka,
    fully_blocking_order,
    fully_blocking_query,
    refute_blocking,
    search_blocking_words,
    stress_test_certified,
)
from .traces import (
    GilmanReport,
    QnEstimate,
    TauSampler,
    TraceRecord,
    classify_gilman,
    cone_sample_dims,
    cone_sample_from_torus,
    detect_eventual_period,
    estimate_mu_qn,
    mu_equicontinuity_score,
    qn_membership,
    tau_sampler,
    trace,
    wilson_interval,
)
from .spectral import (
    EigenvalueReport,
    FrequencyPoint,
    IdentityPowerResult,
    Observable,
    WeylSpectrum,
    character_observable,
    default_observable,
    evaluate_observable,
    frequency_grid,
    identity_power_search,
    indicator_observable,
    rational_eigenvalue_check,
    scan_spectrum,
    weyl_sum,
)
from .factor import (
    FactorMap,
    RotationSystem,
    SemiconjugacyReport,
    build_periodic_factor,
    verify_semiconjugacy,
)
