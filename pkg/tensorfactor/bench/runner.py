"""Monte Carlo experiment runner.

Each replication of a setting point generates one data set, and every lag count and method runs on that very data set.
Replications run on a thread pool, driven from asyncio so progress can be reported with `tqdm.asyncio`.
"""

import asyncio
import logging
import time
from concurrent.futures import ThreadPoolExecutor

from beartype.typing import List, Tuple
from tqdm.asyncio import tqdm

from ..iterative.config import IterConfig, method_preset
from ..iterative.engine import EstimationResult, run
from ..simulation.generator import generate
from ..simulation.models import GroundTruth
from ..spectral.decompositions import subspace_distance
from .config import ExperimentConfig
from .records import RunRecord, Stage

logger = logging.getLogger(__name__)


def _stages(result: EstimationResult, iterative: bool, trajectory: bool) -> List[Tuple[Stage, int]]:
    if not iterative:
        return [(Stage.INIT, 0)]
    if not trajectory:
        return [(Stage.FINAL, result.iterations_used)]
    stages = [(Stage.INIT, 0)]
    if result.iterations_used >= 1:
        stages.append((Stage.SWEEP1, 1))
    stages.append((Stage.FINAL, result.iterations_used))
    return stages


def run_method(
    truth: GroundTruth, cfg: ExperimentConfig, method: str, h0: int, label: str, rep: int
) -> List[RunRecord]:
    """Run one method on one data set and record the per-mode losses at every stage.

    Args:
        truth (GroundTruth): The data set.
        cfg (ExperimentConfig): The experiment.
        method (str): The method preset.
        h0 (int): The lag count.
        label (str): The setting label.
        rep (int): The replication index.

    Returns:
        List[RunRecord]: One record per (mode, stage).
    """
    preset = method_preset(method)
    iter_cfg = IterConfig.from_preset(
        method,
        truth.spec.ranks,
        h0=h0,
        epsilon=cfg.epsilon,
        max_iter=cfg.max_iter,
        record_trajectory=cfg.record_trajectory,
    )

    start = time.perf_counter()
    result = run(truth.observed_series, iter_cfg)
    elapsed_ms = (time.perf_counter() - start) * 1000 if cfg.timing else 0.0

    records: List[RunRecord] = []
    for stage, iters in _stages(result, preset.iterative, cfg.record_trajectory):
        bases = result.stage(stage.value)
        for k, (estimate, true) in enumerate(zip(bases.bases, truth.loadings.bases), start=1):
            records.append(
                RunRecord(
                    rep=rep,
                    setting=label,
                    T=truth.spec.T,
                    lambda_=truth.spec.lambda_,
                    h0=h0,
                    method=preset.name,
                    mode=k,
                    stage=stage,
                    loss=subspace_distance(estimate, true),
                    iters=iters,
                    lambda_hat_sq=result.diagnostics.lambda_sq[k - 1],
                    lambda_star_hat_sq=result.diagnostics.lambda_star_sq[k - 1],
                    wall_time_ms=elapsed_ms,
                )
            )
    return records


def run_replication(cfg: ExperimentConfig, T: int, lambda_: float, rep: int) -> List[RunRecord]:
    """Generate the data set of one replication and run every (h0, method) pair on it.

    Args:
        cfg (ExperimentConfig): The experiment.
        T (int): The series length.
        lambda_ (float): The signal scale.
        rep (int): The replication index.

    Returns:
        List[RunRecord]: The records of every method.
    """
    truth = generate(cfg.spec_for(T, lambda_), replication=rep)
    records: List[RunRecord] = []
    for h0 in cfg.h0_list:
        for method in cfg.methods:
            records.extend(run_method(truth, cfg, method, h0, cfg.label, rep))
    logger.debug(f"Finished replication {rep} at T={T}, lambda={lambda_}")
    return records


def sort_records(records: List[RunRecord], cfg: ExperimentConfig) -> List[RunRecord]:
    """Order records independently of the order in which replications finished.

    Args:
        records (List[RunRecord]): The records.
        cfg (ExperimentConfig): The experiment, whose method list fixes the method order.

    Returns:
        List[RunRecord]: Sorted by (T, lambda, rep, h0, method, mode, stage).
    """
    method_order = {m: i for i, m in enumerate(cfg.methods)}
    return sorted(
        records,
        key=lambda r: (r.T, r.lambda_, r.rep, r.h0, method_order[r.method], r.mode, r.stage.rank),
    )


async def run_experiment_async(cfg: ExperimentConfig, show_progress: bool = False) -> List[RunRecord]:
    """Run every replication of every setting point on a thread pool.

    Args:
        cfg (ExperimentConfig): The experiment.
        show_progress (bool, optional): Whether to display a progress bar. Defaults to False.

    Returns:
        List[RunRecord]: The sorted records.
    """
    loop = asyncio.get_running_loop()
    points = [(T, lam, rep) for T in cfg.T_list for lam in cfg.lambda_list for rep in range(cfg.nrep)]
    logger.info(f"Running {len(points)} replications of {len(cfg.methods)} methods")

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        batches = await tqdm.gather(
            *[loop.run_in_executor(pool, run_replication, cfg, T, lam, rep) for T, lam, rep in points],
            desc="replications",
            disable=not show_progress,
        )

    return sort_records([record for batch in batches for record in batch], cfg)


def run_experiment(cfg: ExperimentConfig, show_progress: bool = False) -> List[RunRecord]:
    """Run a Monte Carlo experiment.

    Args:
        cfg (ExperimentConfig): The experiment.
        show_progress (bool, optional): Whether to display a progress bar. Defaults to False.

    Returns:
        List[RunRecord]: The records, sorted so the output does not depend on scheduling.
    """
    return asyncio.run(run_experiment_async(cfg, show_progress))
