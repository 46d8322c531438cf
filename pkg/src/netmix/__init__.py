"""Competitive on-line regression: exponential-weights mixtures over
epsilon-nets of benchmark function classes, with regret certificates,
ground-truth oracles, and an experiment harness."""

from .aggregator import (
    AggregatorState,
    aa_init,
    aa_predict,
    aa_regret_bound,
    aa_update,
    eta_cap,
    verify_concavity,
)
from .nets import (
    LinearBall,
    LipschitzBall,
    NetTooLargeError,
    TrigAnalytic,
    build_net,
    dyadic_net_family,
    entropy_bits,
    net_size,
)
from .oracles import (
    TradeoffProblem,
    best_in_net_loss,
    best_linear_loss,
    empirical_approachability,
    fit_exponent,
    solve_tradeoff,
)
from .protocol import ProtocolViolation, RoundRecord, run_protocol
from .strategies import (
    AAR,
    BanachStrategy,
    CompactStrategy,
    UniversalStrategy,
    aar_bound,
    make_banach_strategy,
    make_compact_strategy,
    make_universal_strategy,
    min_certificate,
)

__version__ = "0.1.0"
