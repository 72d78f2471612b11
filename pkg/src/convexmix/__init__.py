"""Online convex mixture of two experts, with a verifiable regret guarantee.

The combiner mixes two expert predictions through a sigmoid-parameterized
weight updated along the gradient of the squared error.  The package also
ships the hindsight oracle the guarantee compares against, the full
constant set of the guarantee, per-step progress audits, worst-case
stress tests, benchmark sequences, and CSV/SVG tooling.
"""

from .audit import (
    AuditInstance,
    AuditReport,
    LemmaBounds,
    construction_instances,
    evaluate_instance,
    lemma_bounds,
    search_violations,
)
from .bounds import (
    RegretBound,
    SufficiencyRoots,
    TheoremConstants,
    constant_identity_errors,
    constants_from_eps,
    constants_from_mu,
    eps_from_mu,
    kl,
    loss_factor,
    mu_supremum,
    per_step_margin,
    per_step_margins,
    regret_and_bound,
    sufficiency_roots,
    z_of,
)
from .cli import RunSummary, run_experiment, run_verification
from .mixture import (
    MixtureParams,
    MixtureState,
    NumericError,
    SignalSample,
    StepRecord,
    Trajectory,
    logistic,
    logit,
    multiplicative_lambda,
    predict,
    run,
    state_from_lambda,
    step,
    step_multiplicative,
)
from .oracle import (
    BestBeta,
    GridBest,
    OracleStats,
    accumulate,
    best_beta,
    grid_best_beta,
    loss_at_beta,
    merge,
    stats_from,
    subtract,
)
from .signals import (
    KINDS,
    TRAJECTORY_COLUMNS,
    ParseError,
    SequenceSpec,
    TrajectoryFrame,
    clip_samples,
    generate,
    load_csv,
    read_trajectory,
    resolve,
    samples_from_frame,
    write_trajectory,
)

__version__ = "0.1.0"
