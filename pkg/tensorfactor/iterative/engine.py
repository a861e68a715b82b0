"""The generic iterative projection estimator.

A run starts from UINIT applied to every mode of the raw series. Each sweep then visits the modes in ascending order,
projects the series onto the current bases of all the other modes, and re-estimates the mode with UITER on that much
smaller projected series. Modes updated earlier in a sweep are used with their new bases.

Tip:
    With uiter = TOPUP this is a higher-order orthogonal iteration on the lagged auto-cross-moment tensors, and with
    uiter = TIPUP on their contractions.
"""

import logging

import numpy as np
from beartype.typing import List, Optional, Sequence, Union
from pydantic import BaseModel, ConfigDict, Field

from ..errors import TensorShapeError
from ..estimators.diagnostics import ModeSignal, SignalDiagnostics, mode_signal
from ..estimators.moments import Flavor
from ..estimators.operators import make_operator
from ..spectral.basis import LoadingSet, OrthoBasis
from ..spectral.decompositions import subspace_distance
from ..tensor.core import TensorSeries, check_mode
from .config import IterConfig

logger = logging.getLogger(__name__)


class RunReport(BaseModel):
    """A JSON-friendly summary of an EstimationResult, without the arrays.

    Attributes:
        method: The preset name, if any.
        ranks: The ranks (r_1, ..., r_K).
        iterations_used: The number of sweeps performed.
        converged: Whether the tolerance was reached.
        trajectory: Per sweep, the per-mode change of the bases, if recorded.
        diagnostics: Signal strengths at the final bases.
    """

    model_config = ConfigDict(frozen=True)

    method: Optional[str] = Field(None)
    ranks: List[int] = Field(...)
    iterations_used: int = Field(..., ge=0)
    converged: bool = Field(...)
    trajectory: Optional[List[List[float]]] = Field(None)
    diagnostics: SignalDiagnostics = Field(...)


class EstimationResult(BaseModel):
    """The output of one estimation run.

    Attributes:
        method: The preset name, if the config came from one.
        loadings: The final bases U_1, ..., U_K.
        projectors: The projectors U_k U_k^T, in mode order.
        factors: The estimated core factor series F_t = X_t ×_1 U_1^T ... ×_K U_K^T.
        residuals: The residual series E_t = X_t - X_t ×_1 P_1 ... ×_K P_K.
        iterations_used: The number of sweeps performed.
        converged: Whether the tolerance was reached within the sweep cap.
        trajectory: Per sweep, the per-mode subspace distance to the previous iterate (record_trajectory only).
        history: The bases after init and after every sweep (record_trajectory only).
        diagnostics: Signal strengths of each mode, measured on the series projected onto the other final bases.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    method: Optional[str] = Field(None, description="The preset name, if the config came from one")
    loadings: LoadingSet = Field(..., description="The final loading bases")
    projectors: List[np.ndarray] = Field(..., description="The projectors U_k U_k^T, in mode order")
    factors: TensorSeries = Field(..., description="The estimated core factor series")
    residuals: TensorSeries = Field(..., description="The residual series")
    iterations_used: int = Field(..., ge=0, description="The number of sweeps performed")
    converged: bool = Field(..., description="Whether the tolerance was reached within the sweep cap")
    trajectory: Optional[List[List[float]]] = Field(None, description="Per sweep, per-mode change of the bases")
    history: Optional[List[LoadingSet]] = Field(None, description="The bases after init and after every sweep")
    diagnostics: SignalDiagnostics = Field(..., description="Signal strengths at the final bases")

    def fitted(self) -> TensorSeries:
        """The low-rank refit F_t ×_1 U_1 ... ×_K U_K, so that X_t = fitted_t + residuals_t.

        Returns:
            TensorSeries: The refit series, of the original shape.
        """
        values = self.factors.values
        for axis, basis in enumerate(self.loadings.bases):
            values = np.moveaxis(np.tensordot(basis.cols, values, axes=(1, axis + 1)), 0, axis + 1)
        return TensorSeries(values=values)

    def report(self) -> RunReport:
        """Summarize the run without its arrays.

        Returns:
            RunReport: The summary.
        """
        return RunReport(
            method=self.method,
            ranks=list(self.loadings.ranks),
            iterations_used=self.iterations_used,
            converged=self.converged,
            trajectory=self.trajectory,
            diagnostics=self.diagnostics,
        )

    def stage(self, name: str) -> LoadingSet:
        """The bases at a named stage of the run.

        Args:
            name (str): "init", "sweep1" or "final". The first two need record_trajectory, except "init" of a run
                with no sweeps, whose final bases are the initial ones.

        Raises:
            KeyError: If the stage was not recorded.

        Returns:
            LoadingSet: The bases at that stage.
        """
        if name == "final" or (name == "init" and self.iterations_used == 0):
            return self.loadings
        index = {"init": 0, "sweep1": 1}.get(name)
        if index is None or self.history is None or index >= len(self.history):
            raise KeyError(f"Stage {name!r} was not recorded for this run")
        return self.history[index]


def project_series(
    series: TensorSeries,
    loadings: Union[LoadingSet, Sequence[Optional[OrthoBasis]]],
    skip: Optional[int] = None,
) -> TensorSeries:
    """Project a series onto the loading bases of every mode except one: Z_t = X_t ×_{j != k} U_j^T.

    Args:
        series (TensorSeries): The series X_1, ..., X_T.
        loadings (Union[LoadingSet, Sequence[Optional[OrthoBasis]]]): One basis per mode; the skipped mode's entry
            may be None.
        skip (Optional[int], optional): The 1-based mode left untouched; None projects every mode. Defaults to None.

    Raises:
        TensorShapeError: If a basis is missing or does not match its mode's dimension.

    Returns:
        TensorSeries: The projected series, with d_j replaced by r_j for j != skip.
    """
    bases = loadings.bases if isinstance(loadings, LoadingSet) else list(loadings)
    if len(bases) != series.order:
        raise TensorShapeError(f"Got {len(bases)} bases for an order-{series.order} series")
    skip_axis = None if skip is None else check_mode(skip, series.order)

    values = series.values
    for axis, basis in enumerate(bases):
        if axis == skip_axis:
            continue
        if basis is None:
            raise TensorShapeError(f"Missing loading basis for mode {axis + 1}")
        if basis.dim != values.shape[axis + 1]:
            raise TensorShapeError(
                f"Basis of R^{basis.dim} cannot project mode {axis + 1} of dimension {values.shape[axis + 1]}"
            )
        values = np.moveaxis(np.tensordot(basis.cols.T, values, axes=(1, axis + 1)), 0, axis + 1)
    return TensorSeries(values=values)


def _diagnostics(series: TensorSeries, bases: List[OrthoBasis], cfg: IterConfig) -> SignalDiagnostics:
    h0 = cfg.h0_iter
    if cfg.uiter == Flavor.UP and h0 >= len(series):
        # UP never used the lag, so measure the strengths at the longest lag the series has
        h0 = len(series) - 1
    modes: List[ModeSignal] = []
    for k, basis in enumerate(bases, start=1):
        projected = project_series(series, bases, skip=k)
        modes.append(mode_signal(projected, k, basis.rank, h0, cfg.normalization))
    return SignalDiagnostics.from_modes(modes, h0, cfg.normalization)


def run(series: TensorSeries, cfg: IterConfig) -> EstimationResult:
    """Estimate the loading spaces, factors and residuals of a tensor time series.

    Args:
        series (TensorSeries): The observed series X_1, ..., X_T.
        cfg (IterConfig): The estimator configuration.

    Raises:
        RankError: If the ranks do not fit the series.
        LagError: If a TOPUP or TIPUP lag count is not below T.
        DegenerateMomentError: If a moment matrix is numerically zero.

    Returns:
        EstimationResult: The estimate. Hitting the sweep cap is logged, not raised.
    """
    cfg.check_shape(series.shape)
    max_iter = cfg.resolved_max_iter(series.shape)
    init = make_operator(cfg.uinit, cfg.h0_init)
    step = make_operator(cfg.uiter, cfg.h0_iter)

    bases: List[OrthoBasis] = [init.estimate(series, k, r) for k, r in enumerate(cfg.ranks, start=1)]
    history: List[LoadingSet] = [LoadingSet(bases=list(bases))]
    trajectory: List[List[float]] = []

    converged = False
    sweeps = 0
    for sweep in range(1, max_iter + 1):
        changes: List[float] = []
        for k, r in enumerate(cfg.ranks, start=1):
            updated = step.estimate(project_series(series, bases, skip=k), k, r)
            changes.append(subspace_distance(bases[k - 1], updated))
            bases[k - 1] = updated

        sweeps = sweep
        trajectory.append(changes)
        history.append(LoadingSet(bases=list(bases)))
        logger.debug(f"Sweep {sweep}/{max_iter}: max basis change {max(changes):.3e}")

        if cfg.epsilon > 0 and max(changes) <= cfg.epsilon:
            converged = True
            break

    if max_iter > 0 and cfg.epsilon > 0 and not converged:
        logger.warning(f"Stopped at the sweep cap J={max_iter} before the basis change fell below {cfg.epsilon}")

    loadings = LoadingSet(bases=bases)
    factors = project_series(series, loadings)
    projectors = loadings.projectors()
    reconstruction = series.values
    for axis, p in enumerate(projectors):
        reconstruction = np.moveaxis(np.tensordot(p, reconstruction, axes=(1, axis + 1)), 0, axis + 1)

    return EstimationResult(
        method=cfg.method,
        loadings=loadings,
        projectors=projectors,
        factors=factors,
        residuals=TensorSeries(values=series.values - reconstruction),
        iterations_used=sweeps,
        converged=converged,
        trajectory=trajectory if cfg.record_trajectory else None,
        history=history if cfg.record_trajectory else None,
        diagnostics=_diagnostics(series, bases, cfg),
    )


def estimate(
    series: TensorSeries, method: str, ranks: Sequence[int], h0: int = 1, **overrides: object
) -> EstimationResult:
    """Run a named method preset on a series.

    Args:
        series (TensorSeries): The observed series.
        method (str): A preset name such as "iTOPUP" or "TIPUP-1TOPUP".
        ranks (Sequence[int]): The ranks (r_1, ..., r_K).
        h0 (int, optional): The lag count. Defaults to 1.
        **overrides (object): Further IterConfig fields.

    Returns:
        EstimationResult: The estimate.
    """
    return run(series, IterConfig.from_preset(method, ranks, h0=h0, **overrides))
