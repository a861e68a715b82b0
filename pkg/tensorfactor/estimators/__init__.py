"""Moment-based loading estimators for tensorfactor.

Classes:
    Flavor: Enum of moment operators (TOPUP, TIPUP, UP).
    MomentConfig: Flavor and lag count of a single estimate.
    LoadingOperator: Abstract operator mapping a series to one mode's loading space.
    TopupOperator, TipupOperator, UpOperator: The concrete operators.
    Normalization: Enum of signal-strength normalizations.
    SignalDiagnostics: Per-mode empirical signal strengths.
"""

from .diagnostics import ModeSignal, Normalization, SignalDiagnostics, mode_signal, signal_strength
from .moments import (
    Flavor,
    MomentConfig,
    autocov_tipup_matrix,
    autocov_topup_unfolding,
    check_lag,
    lag0_tipup,
    lagged_autocovariance,
    tipup_matrix,
    topup_gram,
    topup_unfolding,
    up_unfolding,
)
from .operators import (
    LoadingOperator,
    TipupOperator,
    TopupOperator,
    UpOperator,
    estimate_loading,
    make_operator,
)
