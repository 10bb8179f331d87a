import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.config import resolve_workers, settings
from src.engines.constants import is_sampler
from src.engines.dependencies import get_engine_service
from src.engines.schemas import ModelSpec
from src.engines.service import EngineService
from src.exceptions import AppException
from src.harness.exceptions import CalibrationException, ReplicateFailedException, ScenarioMismatchException
from src.harness.schemas import CalibrationResult, OCResult, Scenario, SimPlan, SweepCell, SweepResult
from src.numcore.sampling import sample_binomial, sample_multinomial
from src.numcore.streams import RngStream
from src.uip.schemas import TrialData

# Replicate r of an OC run uses stream OC_STREAM_OFFSET + r, calibration
# replicates CALIBRATION_STREAM_OFFSET + r; the ranges never overlap.
OC_STREAM_OFFSET = 0
CALIBRATION_STREAM_OFFSET = 1 << 40

# Inside a replicate stream: 0 draws the trial, 1 drives the sampler
DATA_SUBSTREAM = 0
FIT_SUBSTREAM = 1

MAX_CALIBRATION_ALPHA = 0.5


def simulate_trial(scenario: Scenario, plan: SimPlan, rng: RngStream) -> TrialData:
    """Multinomial allocation of plan.total_n patients over equally likely types, then binomial responses."""
    if scenario.size != plan.n_types:
        raise ScenarioMismatchException(scenario.name, plan.n_types, scenario.size)
    probabilities = np.full(plan.n_types, 1.0 / plan.n_types)
    n = sample_multinomial(rng, plan.total_n, probabilities)
    x = sample_binomial(rng, n, scenario.rates)
    return TrialData(n=n.tolist(), x=x.tolist())


def _replicate(task: Tuple[Scenario, ModelSpec, SimPlan, int, int]) -> dict:
    """
    Simulate and fit one replicate.

    Runs in worker processes, so failures come back as data instead of
    exceptions.
    """
    scenario, model, plan, offset, index = task
    stream = RngStream(plan.seed, offset + index)
    try:
        data = simulate_trial(scenario, plan, stream.spawn(DATA_SUBSTREAM))
        summary = get_engine_service().fit(data, model, plan.mcmc, stream.spawn(FIT_SUBSTREAM))
    except AppException as exc:
        return {"index": index, "error": exc.detail, "exit_code": exc.exit_code}
    except (ArithmeticError, ValueError) as exc:
        return {"index": index, "error": f"{type(exc).__name__}: {exc}", "exit_code": None}
    return {
        "index": index,
        "pp": summary.pp,
        "mean": summary.mean,
        "width": summary.width.tolist(),
        "prior_ess": summary.prior_ess,
        "m": summary.m_mean,
        "s": summary.s_mean,
        "mw": summary.mw,
    }


def _mean_of(rows: List[dict], key: str):
    values = [row[key] for row in rows]
    if any(v is None for v in values):
        return None
    return np.mean(np.asarray(values, dtype=float), axis=0)


def _masked_mean(values: np.ndarray, mask: np.ndarray) -> Optional[float]:
    return float(values[mask].mean()) if mask.any() else None


def pp_distribution_summary(pps: np.ndarray) -> Dict[str, float]:
    quantiles = np.quantile(pps, [0.05, 0.25, 0.5, 0.75, 0.95])
    return {
        "mean": float(pps.mean()),
        "min": float(pps.min()),
        "q05": float(quantiles[0]),
        "q25": float(quantiles[1]),
        "median": float(quantiles[2]),
        "q75": float(quantiles[3]),
        "q95": float(quantiles[4]),
        "max": float(pps.max()),
    }


class HarnessService:
    """Runs replicated trial simulations for calibration and operating characteristics."""

    def __init__(self, engine_service: Optional[EngineService] = None):
        self.logger = logging.getLogger(__name__)
        self.engines = engine_service or get_engine_service()

    def simulate_trial(self, scenario: Scenario, plan: SimPlan, rng: RngStream) -> TrialData:
        return simulate_trial(scenario, plan, rng)

    def _run_replicates(self, scenario: Scenario, model: ModelSpec, plan: SimPlan, offset: int) -> List[dict]:
        """
        Run plan.replicate_count replicates, in parallel when more than one worker is allowed.

        Results are returned in replicate order whatever the degree of
        parallelism, and the first failure is raised with its index.
        """
        count = plan.replicate_count
        tasks = [(scenario, model, plan, offset, r) for r in range(count)]
        workers = min(resolve_workers(plan.workers), count)

        start = time.perf_counter()
        if workers <= 1:
            rows = [_replicate(task) for task in tasks]
        else:
            chunksize = max(1, count // (workers * 4))
            with ProcessPoolExecutor(max_workers=workers) as executor:
                rows = list(executor.map(_replicate, tasks, chunksize=chunksize))
        self.logger.debug(
            "%s / %s: %d replicates on %d worker(s) in %.1fs",
            model.display_name, scenario.name, count, max(workers, 1), time.perf_counter() - start,
        )

        for row in rows:
            if "error" in row:
                raise ReplicateFailedException(model.display_name, row["index"], row["error"], row["exit_code"])
        return rows

    def calibrate(
        self,
        model: ModelSpec,
        plan: SimPlan,
        target_alpha: float = 0.05,
        verify: bool = True,
    ) -> CalibrationResult:
        """
        Cutoff c controlling the per-type type-1 error at target_alpha under the all-null scenario.

        PPs from every type of every null replicate are pooled and c is their
        empirical (1 - target_alpha) quantile, taken at an observed value so
        that Pr(PP > c) never exceeds the target. With `verify`, a fresh OC run
        under the null reports the achieved per-type error.
        """
        replicates = plan.replicate_count
        if replicates < settings.MIN_CALIBRATION_REPLICATES:
            raise CalibrationException(
                f"calibration needs at least {settings.MIN_CALIBRATION_REPLICATES} replicates, got {replicates}"
            )
        if not 0.0 < target_alpha <= MAX_CALIBRATION_ALPHA:
            raise CalibrationException(f"target_alpha must lie in (0, {MAX_CALIBRATION_ALPHA}], got {target_alpha}")

        model = plan.aligned(model)
        null = Scenario.null(plan.n_types, plan.pi_h0)
        self.logger.info("Calibrating %s on %d null replicates", model.display_name, replicates)
        rows = self._run_replicates(null, model, plan, CALIBRATION_STREAM_OFFSET)
        pps = np.concatenate([np.asarray(row["pp"], dtype=float) for row in rows])
        cutoff = float(np.quantile(pps, 1.0 - target_alpha, method="higher"))
        exceedance = float(np.mean(pps > cutoff))
        if exceedance < 0.8 * target_alpha:
            self.logger.warning(
                "%s: tied null PPs at cutoff %.6f; pooled exceedance %.4f is below alpha %.4f",
                model.display_name, cutoff, exceedance, target_alpha,
            )

        achieved = None
        if verify:
            achieved = self.run_oc(null, model, plan, cutoff).rejection_rate
        self.logger.info("%s cutoff %.6f (achieved type-1 error %s)", model.display_name, cutoff, achieved)

        return CalibrationResult(
            model=model.display_name,
            cutoff=cutoff,
            target_alpha=target_alpha,
            replicates=replicates,
            seed=plan.seed,
            null_pp_summary=pp_distribution_summary(pps),
            achieved_type1_error=achieved,
        )

    def calibrate_cutoff(self, model: ModelSpec, plan: SimPlan, target_alpha: float = 0.05) -> float:
        return self.calibrate(model, plan, target_alpha, verify=False).cutoff

    def run_oc(self, scenario: Scenario, model: ModelSpec, plan: SimPlan, c: float) -> OCResult:
        """Rejection rates, bias, interval width and borrowing summaries over plan.replicate_count trials."""
        if not 0.0 <= c <= 1.0:
            raise CalibrationException(f"cutoff must lie in [0, 1], got {c}")
        model = plan.aligned(model)
        rows = self._run_replicates(scenario, model, plan, OC_STREAM_OFFSET)
        replicates = len(rows)

        rates = np.asarray(scenario.rates, dtype=float)
        effective = np.asarray(scenario.effective_flags(plan.pi_h1), dtype=bool)
        pp = np.asarray([row["pp"] for row in rows], dtype=float)
        rejection = (pp > c).mean(axis=0)
        bias = np.asarray([row["mean"] for row in rows], dtype=float).mean(axis=0) - rates
        width = np.asarray([row["width"] for row in rows], dtype=float).mean(axis=0)
        prior_ess = _mean_of(rows, "prior_ess")
        m_mean = _mean_of(rows, "m")
        s_mean = _mean_of(rows, "s")
        mw = _mean_of(rows, "mw")

        return OCResult(
            scenario=scenario.name,
            model=model.display_name,
            rates=rates.tolist(),
            effective=effective.tolist(),
            replicates=replicates,
            cutoff=c,
            rejection_rate=rejection.tolist(),
            rejection_se=np.sqrt(rejection * (1.0 - rejection) / replicates).tolist(),
            bias=bias.tolist(),
            eti_width=width.tolist(),
            prior_ess=None if prior_ess is None else prior_ess.tolist(),
            m_mean=None if m_mean is None else float(m_mean),
            s_mean=None if s_mean is None else float(s_mean),
            mw=None if mw is None else mw.tolist(),
            mean_type1_error=_masked_mean(rejection, ~effective),
            mean_power=_masked_mean(rejection, effective),
            mean_bias_effective=_masked_mean(bias, effective),
            mean_bias_ineffective=_masked_mean(bias, ~effective),
            mean_width_effective=_masked_mean(width, effective),
            mean_width_ineffective=_masked_mean(width, ~effective),
        )

    def sweep(
        self,
        cells: Sequence[Tuple[Scenario, ModelSpec]],
        plan: SimPlan,
        cutoffs: Optional[Dict[str, float]] = None,
        target_alpha: float = 0.05,
    ) -> SweepResult:
        """
        Operating characteristics over a grid of (scenario, model) cells.

        A model without a supplied cutoff is calibrated once and the cutoff is
        reused for all of its cells. A failing cell is recorded and the sweep
        continues.
        """
        cutoffs = dict(cutoffs or {})
        result = SweepResult()
        calibration_errors: Dict[str, AppException] = {}

        for scenario, model in cells:
            name = model.display_name
            if name not in cutoffs and name not in calibration_errors:
                try:
                    calibration = self.calibrate(model, plan, target_alpha, verify=False)
                    cutoffs[name] = calibration.cutoff
                    result.calibrations.append(calibration)
                except AppException as exc:
                    self.logger.error("Calibration of %s failed: %s", name, exc.detail)
                    calibration_errors[name] = exc

            if name in calibration_errors:
                exc = calibration_errors[name]
                result.cells.append(SweepCell(
                    scenario=scenario.name, model=name,
                    error=f"calibration failed: {exc.detail}", exit_code=exc.exit_code,
                ))
                continue

            self.logger.info(
                "Running %s under %s (%d replicates%s)",
                name, scenario.name, plan.replicate_count, ", MCMC" if is_sampler(model.kind) else "",
            )
            try:
                oc = self.run_oc(scenario, model, plan, cutoffs[name])
                result.cells.append(SweepCell(scenario=scenario.name, model=name, result=oc))
            except AppException as exc:
                self.logger.error("%s under %s failed: %s", name, scenario.name, exc.detail)
                result.cells.append(SweepCell(
                    scenario=scenario.name, model=name, error=exc.detail, exit_code=exc.exit_code,
                ))

        result.cutoffs = cutoffs
        return result
