import json
import logging
import platform
import time
from importlib import metadata
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from src.cli import writers
from src.cli.exceptions import ConfigException, ManifestException, ModelFitException
from src.cli.schemas import AnalyzeConfig, CalibrateConfig, Command, ResultBundle, RunManifest, SimulateConfig
from src.config import settings
from src.engines.constants import is_valid_model_kind, reports_weights
from src.engines.dependencies import get_engine_service
from src.exceptions import EXIT_OK, EXIT_PARTIAL_FAILURE, AppException
from src.harness.dependencies import get_harness_service
from src.numcore.streams import RngStream

ConfigT = TypeVar("ConfigT", bound=BaseModel)

VERSIONED_PACKAGES = ("numpy", "scipy", "pydantic", "click")


def read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigException(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigException(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def parse_config(raw: Any, model: Type[ConfigT], source: str) -> ConfigT:
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        raise ConfigException.from_validation_error(source, exc) from exc


def read_cutoffs(path: Path) -> Dict[str, float]:
    """
    Cutoffs from a JSON file.

    Accepted shapes: {"cutoffs": {name: c}}, a calibrate result
    {"calibrations": [{"model": name, "cutoff": c}, ...]}, or a single
    {"model": name, "cutoff": c}.
    """
    raw = read_json(path)
    try:
        if isinstance(raw, dict) and isinstance(raw.get("cutoffs"), dict):
            return {str(k): float(v) for k, v in raw["cutoffs"].items()}
        if isinstance(raw, dict) and isinstance(raw.get("calibrations"), list):
            return {str(c["model"]): float(c["cutoff"]) for c in raw["calibrations"]}
        if isinstance(raw, dict) and "model" in raw and "cutoff" in raw:
            return {str(raw["model"]): float(raw["cutoff"])}
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigException(f"{path}: malformed cutoffs entry: {exc}") from exc
    raise ConfigException(f"{path}: expected 'cutoffs', 'calibrations' or a single model/cutoff pair")


def select_models(models: List[Dict[str, Any]], names: Sequence[str]) -> List[Dict[str, Any]]:
    """
    Keep the configured models named on the command line, in command-line order.

    A name that is not configured but is a model kind adds that model with
    default hyperparameters.
    """
    if not names:
        return models
    selected = []
    for name in names:
        match = [m for m in models if (m.get("label") or m.get("kind")) == name]
        if match:
            selected.append(match[0])
        elif is_valid_model_kind(name):
            selected.append({"kind": name})
        else:
            raise ConfigException(f"model '{name}' is neither configured nor a known model kind")
    return selected


def package_versions() -> Dict[str, str]:
    versions = {settings.PROJECT_NAME: settings.VERSION, "python": platform.python_version()}
    for package in VERSIONED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions


class CliService:
    """Runs the analyze / calibrate / simulate workflows and writes result bundles."""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.engines = get_engine_service()
        self.harness = get_harness_service()

    # configuration

    def load_analyze(self, path: Path, models: Sequence[str] = (), seed: Optional[int] = None) -> AnalyzeConfig:
        raw = read_json(path)
        if isinstance(raw, dict):
            if models:
                raw["models"] = select_models(raw.get("models", []), models)
            if seed is not None:
                raw["seed"] = seed
        return parse_config(raw, AnalyzeConfig, str(path))

    def load_calibrate(
        self,
        path: Path,
        models: Sequence[str] = (),
        alpha: Optional[float] = None,
        reps: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> CalibrateConfig:
        raw = read_json(path)
        if isinstance(raw, dict):
            if models:
                raw["models"] = select_models(raw.get("models", []), models)
            if alpha is not None:
                raw["target_alpha"] = alpha
            self._override_plan(raw, reps, seed)
        return parse_config(raw, CalibrateConfig, str(path))

    def load_simulate(
        self,
        path: Path,
        cutoffs: Optional[Path] = None,
        reps: Optional[int] = None,
        seed: Optional[int] = None,
    ) -> SimulateConfig:
        raw = read_json(path)
        if isinstance(raw, dict):
            if cutoffs is not None:
                raw["cutoffs"] = {**raw.get("cutoffs", {}), **read_cutoffs(cutoffs)}
            self._override_plan(raw, reps, seed)
        return parse_config(raw, SimulateConfig, str(path))

    @staticmethod
    def _override_plan(raw: Dict[str, Any], reps: Optional[int], seed: Optional[int]) -> None:
        plan = dict(raw.get("plan") or {})
        if reps is not None:
            plan["replicates"] = reps
        if seed is not None:
            plan["seed"] = seed
        raw["plan"] = plan

    # commands

    def cmd_analyze(self, config: AnalyzeConfig, out_dir: Path) -> ResultBundle:
        start = time.perf_counter()
        out_dir = self._prepare(out_dir)
        data = config.data
        base = RngStream(config.seed)

        summaries = []
        for k, model in enumerate(config.models):
            self.logger.info("Fitting %s", model.display_name)
            try:
                summaries.append(self.engines.fit(data, model, config.mcmc, base.spawn(k)))
            except AppException as exc:
                raise ModelFitException(model.display_name, exc) from exc

        files = [
            writers.write_json(out_dir / "results.json", {
                "command": "analyze",
                "summaries": [s.serializable_dict(mode="json") for s in summaries],
            }),
            writers.write_posterior_table(out_dir / "posterior.csv", data.labels, data.n, data.x, summaries),
            writers.write_ess_table(out_dir / "ess.csv", summaries),
        ]
        for s in summaries:
            if reports_weights(s.kind) and s.mw is not None:
                files.append(writers.write_mw_table(out_dir / f"mw_{writers.safe_name(s.model)}.csv", s))

        return self._finish("analyze", config, config.seed, out_dir, files, start)

    def cmd_calibrate(self, config: CalibrateConfig, out_dir: Path) -> ResultBundle:
        start = time.perf_counter()
        out_dir = self._prepare(out_dir)
        calibrations = [
            self.harness.calibrate(model, config.plan, config.target_alpha, verify=config.verify)
            for model in config.models
        ]
        files = [
            writers.write_json(out_dir / "calibration.json", {
                "command": "calibrate",
                "calibrations": [c.serializable_dict(mode="json") for c in calibrations],
            }),
            writers.write_json(out_dir / "cutoffs.json", {"cutoffs": {c.model: c.cutoff for c in calibrations}}),
            writers.write_calibration_table(out_dir / "calibration.csv", calibrations),
        ]
        return self._finish("calibrate", config, config.plan.seed, out_dir, files, start)

    def cmd_simulate(self, config: SimulateConfig, out_dir: Path) -> ResultBundle:
        start = time.perf_counter()
        out_dir = self._prepare(out_dir)
        cells = [(scenario, model) for scenario in config.resolved_scenarios() for model in config.models]
        sweep = self.harness.sweep(cells, config.plan, config.cutoffs, config.target_alpha)

        files = [
            writers.write_json(out_dir / "results.json", {
                "command": "simulate",
                **sweep.serializable_dict(mode="json"),
            }),
            writers.write_oc_table(out_dir / "oc.csv", sweep),
            writers.write_cell_summary_table(out_dir / "summary.csv", sweep),
            writers.write_borrowing_table(out_dir / "borrowing.csv", sweep),
        ]
        failures = [
            {"scenario": c.scenario, "model": c.model, "error": c.error, "exit_code": c.exit_code}
            for c in sweep.failures
        ]
        for failure in failures:
            self.logger.error("Cell %s / %s failed: %s", failure["scenario"], failure["model"], failure["error"])
        return self._finish("simulate", config, config.plan.seed, out_dir, files, start, failures)

    def run(self, command: Command, config: BaseModel, out_dir: Path) -> ResultBundle:
        handlers = {
            "analyze": self.cmd_analyze,
            "calibrate": self.cmd_calibrate,
            "simulate": self.cmd_simulate,
        }
        return handlers[command](config, out_dir)

    def rerun(self, manifest_path: Path, out_dir: Path) -> ResultBundle:
        """Re-execute the command recorded in a run manifest."""
        raw = read_json(manifest_path)
        try:
            manifest = RunManifest.model_validate(raw)
        except ValidationError as exc:
            raise ManifestException(str(ConfigException.from_validation_error(str(manifest_path), exc))) from exc
        config_types = {"analyze": AnalyzeConfig, "calibrate": CalibrateConfig, "simulate": SimulateConfig}
        config = parse_config(manifest.config, config_types[manifest.command], f"{manifest_path} (config)")
        self.logger.info("Re-running %s from %s", manifest.command, manifest_path)
        return self.run(manifest.command, config, out_dir)

    # helpers

    @staticmethod
    def _prepare(out_dir: Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return out_dir

    def _finish(
        self,
        command: Command,
        config: BaseModel,
        seed: int,
        out_dir: Path,
        files: List[Path],
        start: float,
        failures: Optional[List[Dict[str, Any]]] = None,
    ) -> ResultBundle:
        failures = failures or []
        manifest = RunManifest(
            command=command,
            config=config.model_dump(mode="json"),
            seed=seed,
            versions=package_versions(),
            wall_time_s=round(time.perf_counter() - start, 3),
            outputs=[p.name for p in files],
            failures=failures,
            exit_code=EXIT_PARTIAL_FAILURE if failures else EXIT_OK,
        )
        manifest_path = writers.write_json(out_dir / "manifest.json", manifest.model_dump(mode="json"))
        return ResultBundle(
            out_dir=str(out_dir),
            files=[p.name for p in files] + [manifest_path.name],
            manifest=manifest,
        )
