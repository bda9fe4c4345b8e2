import asyncio
import datetime
import logging
import time
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pytz
from pydantic import ValidationError

from . import __version__, alerts, storage
from .averaging import cesaro_twisted, frobenius_kernel_form, scalar_sequence, tauberian_probe
from .config import Config, config_hash, load_config
from .drift import displacement_curve, drift_estimate, drift_independence_check, theorem_B_pipeline
from .dynamics.base import BasePoint, SampleGrid, make_grid
from .dynamics.cocycle import CocycleSpec, attractor_trace
from .dynamics.fields import ConstantRotationField, FourierField
from .dynamics.registry import build_cocycle
from .logging_config import ProgressLogger, get_logger
from .oracles import cyclic_solve, fourier_solve, random_cyclic_spec
from .solver import build_sweep, residual, series_u_lambda
from .solver.hyperbolized import residual_values, section_from_values, series_terms, u_lambda_sequence
from .solver.sections import Section
from .storage.manifest import RunManifest

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_ANOMALY = 3

# Series tolerance and acceptance bound for the cyclic oracle comparison
ORACLE_SERIES_EPS = 1e-14
ORACLE_TOLERANCE = 1e-12
ATTRACTOR_REL_TOLERANCE = 1e-9

# Schedules echoed at the start of each experiment
EXPERIMENT_SCHEDULES = {
    "solve": (("λ", "lambdas"),),
    "sweep": (("λ", "lambdas"),),
    "drift": (("n", "n_schedule"),),
    "displacement": (("λ", "lambdas"),),
    "theoremB": (("λ", "lambdas"), ("n", "n_schedule"), ("N", "frobenius_schedule")),
    "averaging": (("N", "frobenius_schedule"),),
    "oracle-check": (("λ", "oracle_lambdas"),),
    "attractor": (("λ", "attractor_lambdas"),),
}


class UnsupportedExperiment(ValueError):
    """The configured experiment cannot run on the configured cocycle."""


Table = Tuple[List[str], List[List[Any]]]


class ExperimentResult:
    """Tables, JSON reports, summary rows and anomaly messages of one experiment."""

    def __init__(self, kind: str):
        self.kind = kind
        self.tables: Dict[str, Table] = {}
        self.reports: Dict[str, Dict[str, Any]] = {}
        self.summary: List[Dict[str, Any]] = []
        self.anomalies: List[str] = []


def today_local(timezone: str) -> str:
    """Today's date in the configured timezone, YYYY-MM-DD."""
    return datetime.datetime.now(pytz.timezone(timezone)).strftime("%Y-%m-%d")


def coord_columns(grid: SampleGrid) -> List[str]:
    if grid.coords.ndim == 2:
        return [f"x{i}" for i in range(grid.coords.shape[1])]
    return ["x"]


def coord_cells(coords: np.ndarray) -> List[List[Any]]:
    if coords.ndim == 2:
        return [[float(c) for c in row] for row in coords]
    return [[c.item() if hasattr(c, "item") else c] for c in coords]


def base_point(cfg: Config, grid: SampleGrid) -> BasePoint:
    if cfg.experiment.x is None:
        return grid.system.point(grid.coords[0])
    return grid.system.point(cfg.experiment.x)


async def map_grid(func: Callable[[np.ndarray], np.ndarray], grid: SampleGrid, threads: int,
                   progress_logger: Optional[ProgressLogger] = None, label: str = "grid") -> np.ndarray:
    """
    Evaluate func on the contiguous chunks of grid.chunks(threads) in worker threads.

    Every grid point is computed independently, so the result does not
    depend on the number of chunks.
    """
    chunks = grid.chunks(threads)
    semaphore = asyncio.Semaphore(len(chunks))
    if progress_logger:
        progress_logger.start_operation(label, len(chunks), f"{len(grid)} points")

    async def one(chunk: np.ndarray) -> np.ndarray:
        async with semaphore:
            values = await asyncio.to_thread(func, chunk)
        if progress_logger:
            progress_logger.update_operation_progress(label)
        return values

    results = await asyncio.gather(*[one(c) for c in chunks])
    if progress_logger:
        progress_logger.finish_operation(label, True)
    return np.concatenate(results, axis=0)


async def solve_sections(spec: CocycleSpec, grid: SampleGrid, lambdas: Sequence[float], eps: float,
                         threads: int, progress_logger: Optional[ProgressLogger] = None) -> List[Section]:
    """u_λ on the grid and at T(grid) for each λ, chunked across threads."""
    size = len(grid)
    extended = grid.with_image(1)
    sections = []
    for lam in lambdas:
        values = await map_grid(lambda c, lam=lam: series_u_lambda(spec, lam, c, eps), extended, threads,
                                progress_logger, f"u_lambda[{lam:g}]")
        sections.append(section_from_values(spec, lam, grid, eps, values[:size], values[size:]))
    return sections


def vortex_oracle_inputs(spec: CocycleSpec) -> Optional[Tuple[float, float, Dict[int, complex]]]:
    """(α, β, ρ̂) when the cocycle is a planar vortex over a circle rotation."""
    if spec.system.kind != "circle" or spec.dim != 2:
        return None
    if not isinstance(spec.psi, ConstantRotationField) or not isinstance(spec.rho, FourierField):
        return None
    return spec.system.alpha, spec.psi.beta, spec.rho.coefficients


def check_experiment(cfg: Config, spec: CocycleSpec) -> None:
    """
    Raises:
        UnsupportedExperiment: If the experiment needs a kind of cocycle the config does not build.
    """
    if cfg.experiment.kind == "oracle-check" and spec.system.kind != "cyclic" and vortex_oracle_inputs(spec) is None:
        raise UnsupportedExperiment("oracle-check needs a cyclic base or a constant-rotation vortex with Fourier ρ")


async def experiment_solve(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                           progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    eps = cfg.experiment.eps
    result = ExperimentResult("solve")
    header = ["lam"] + coord_columns(grid) + [f"u{i}" for i in range(spec.dim)] + ["residual"]
    rows = []
    cells = coord_cells(grid.coords)
    for section in await solve_sections(spec, grid, cfg.experiment.lambdas, eps, threads, progress_logger):
        res = residual_values(spec, section.lam, section)
        for i, row in enumerate(section.values):
            rows.append([section.lam] + cells[i] + [float(v) for v in row] + [float(res[i])])
        worst = residual(spec, section.lam, section)
        result.summary.append({"lam": section.lam, "n_terms": series_terms(spec, section.lam, eps),
                               "sup_u": section.sup_norm, "max_residual": worst})
        if worst > 2.0 * eps + 1e-10:
            result.anomalies.append(f"Residual {worst:.3e} at λ={section.lam} exceeds 2ε+1e-10")
        if progress_logger:
            progress_logger.log_schedule_point("λ", section.lam, residual=worst, sup_u=section.sup_norm)
    result.tables["solve"] = (header, rows)
    return result


async def experiment_sweep(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                           progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    eps = cfg.experiment.eps
    result = ExperimentResult("sweep")
    oracle_field = None
    inputs = vortex_oracle_inputs(spec)
    if inputs is not None:
        oracle = fourier_solve(*inputs, denom_threshold=cfg.experiment.denom_threshold)
        result.reports["fourier_oracle"] = oracle.model_dump(mode="json")
        if oracle.complete:
            oracle_field = oracle.as_field()
        else:
            result.anomalies.append(f"Fourier oracle rejected harmonics {oracle.rejected}")

    sections = await solve_sections(spec, grid, cfg.experiment.lambdas, eps, threads, progress_logger)
    sweep = build_sweep(spec, sections, eps, oracle_field)
    header = ["lam", "n_terms", "sup_u", "residual_lambda", "residual_one", "sup_dist", "l1_dist", "l2_dist"]
    rows = [[e.lam, e.n_terms, e.sup_u, e.residual_lambda, e.residual_one, e.sup_dist, e.l1_dist, e.l2_dist]
            for e in sweep.entries]
    result.tables["sweep"] = (header, rows)
    result.reports["sweep"] = sweep.model_dump(mode="json")
    result.summary = [e.model_dump() for e in sweep.entries]
    if sweep.possible_discontinuous_limit:
        result.anomalies.append("Sup-distance to the Fourier oracle is not decreasing in λ")
    return result


async def experiment_drift(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                           progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    result = ExperimentResult("drift")
    schedule = cfg.experiment.n_schedule
    if progress_logger:
        progress_logger.substep("Drift D_n", f"{len(grid)} points")
    estimate = await asyncio.to_thread(drift_estimate, spec, grid, schedule)
    if progress_logger:
        progress_logger.substep("v₀-independence check")
    check = await asyncio.to_thread(drift_independence_check, spec, grid, schedule,
                                    np.random.default_rng(cfg.seed))
    result.tables["drift"] = (["n", "D_n", "n_D_n"],
                              [[n, d, s] for n, d, s in zip(estimate.n_schedule, estimate.values, estimate.scaled)])
    result.reports["drift"] = estimate.model_dump(mode="json")
    result.reports["independence"] = check.model_dump(mode="json")
    result.summary = [{"c_fit": estimate.c_fit, "fit_r2": estimate.fit_r2, "decay_exponent": estimate.decay_exponent,
                       "zero_drift": estimate.zero_drift, "independence_passed": check.passed}]
    if not check.passed:
        result.anomalies.append(f"D_n moved by {check.max_excess:.3e} beyond 2|v0|/n under a change of v0")
    return result


async def experiment_displacement(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                                  progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    result = ExperimentResult("displacement")
    sections = await solve_sections(spec, grid, cfg.experiment.lambdas, cfg.experiment.eps, threads,
                                    progress_logger)
    curve = displacement_curve(spec, sections)
    result.tables["displacement"] = (
        ["lam", "displacement", "identity_value", "identity_error"],
        [list(r) for r in zip(curve.lambdas, curve.values, curve.bounds, curve.identity_errors)])
    result.reports["displacement"] = curve.model_dump(mode="json")
    result.summary = [{"decreasing": curve.decreasing, "reduction": curve.reduction}]
    tolerance = 2.0 * cfg.experiment.eps
    for lam, err in zip(curve.lambdas, curve.identity_errors):
        if err > tolerance:
            result.anomalies.append(f"Displacement identity off by {err:.3e} at λ={lam}")
    return result


async def experiment_theorem_b(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                               progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    exp = cfg.experiment
    result = ExperimentResult("theoremB")
    sections = await solve_sections(spec, grid, exp.lambdas, exp.eps, threads, progress_logger)
    report = await asyncio.to_thread(theorem_B_pipeline, spec, grid, exp.lambdas, exp.n_schedule, exp.eps,
                                     exp.frobenius_schedule, 0, sections)
    curve = report.displacement
    result.tables["theoremB_displacement"] = (["lam", "displacement"], [list(r) for r in zip(curve.lambdas, curve.values)])
    result.tables["theoremB_drift"] = (["n", "D_n"], [list(r) for r in zip(report.drift.n_schedule, report.drift.values)])
    result.reports["theoremB"] = report.model_dump(mode="json")
    result.summary = [{"zero_drift": report.drift.zero_drift, "displacement_decreasing": curve.decreasing,
                       "anomalies": len(report.anomalies)}]
    result.anomalies.extend(report.anomalies)
    return result


async def experiment_averaging(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                               progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    exp = cfg.experiment
    result = ExperimentResult("averaging")
    if exp.sequence == "u_lambda":
        seq, point = u_lambda_sequence(spec), base_point(cfg, grid)
    else:
        seq, point = scalar_sequence(exp.sequence, exp.sequence_value)

    report = await asyncio.to_thread(tauberian_probe, seq, point, exp.frobenius_schedule)
    header = (["n", "lam"] + [f"cesaro{i}" for i in range(seq.dim)] + [f"abel{i}" for i in range(seq.dim)]
              + [f"kernel{i}" for i in range(seq.dim)] + ["discrepancy"])
    rows = []
    for (n, cesaro), (lam, abel), disc in zip(report.cesaro, report.abel, report.discrepancies):
        kernel = frobenius_kernel_form(seq, point, lam)
        rows.append([n, lam] + list(cesaro) + list(abel) + [float(v) for v in kernel.coords] + [disc])
    result.tables["averaging"] = (header, rows)
    result.reports["averaging"] = report.model_dump(mode="json")
    final = await asyncio.to_thread(cesaro_twisted, seq, point, exp.cesaro_n)
    result.summary = [{"sequence": seq.name, "tracking": report.tracking, "bounded": report.bounded,
                       "discrepancy": report.discrepancy, "cesaro_n": exp.cesaro_n, "cesaro_norm": final.norm()}]
    return result


def _cyclic_rows(label: str, spec: CocycleSpec, lambdas: Sequence[float]) -> Tuple[List[List[Any]], float]:
    states = np.arange(spec.system.period, dtype=np.int64)
    rows, worst = [], 0.0
    for lam in lambdas:
        oracle = cyclic_solve(spec, lam)
        series = series_u_lambda(spec, lam, states, ORACLE_SERIES_EPS)
        diff = float(np.max(np.abs(series - oracle.values())))
        worst = max(worst, diff)
        rows.append([label, spec.system.period, spec.dim, lam, diff, oracle.residual, oracle.condition_number])
    return rows, worst


async def experiment_oracle_check(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                                  progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    exp = cfg.experiment
    result = ExperimentResult("oracle-check")

    if spec.system.kind == "cyclic":
        rows, worst = _cyclic_rows("config", spec, exp.oracle_lambdas)
        if progress_logger:
            progress_logger.start_operation("oracle_check", exp.instances, "random cyclic instances")
        for i in range(exp.instances):
            rng = np.random.default_rng([cfg.seed, i])
            period = int(rng.integers(1, exp.max_period + 1))
            dim = int(rng.integers(1, exp.max_dim + 1))
            instance_rows, instance_worst = _cyclic_rows(f"random_{i}", random_cyclic_spec(period, dim, rng),
                                                         exp.oracle_lambdas)
            rows.extend(instance_rows)
            worst = max(worst, instance_worst)
            if progress_logger:
                progress_logger.update_operation_progress("oracle_check")
        if progress_logger:
            progress_logger.finish_operation("oracle_check", worst <= ORACLE_TOLERANCE)
        result.tables["oracle_check"] = (["instance", "period", "dim", "lam", "max_diff", "system_residual",
                                          "condition_number"], rows)
        result.summary = [{"instances": exp.instances + 1, "max_diff": worst}]
        if exp.lambda_one:
            genuine = cyclic_solve(spec, 1.0)
            result.reports["cyclic_lambda_one"] = genuine.model_dump(mode="json")
            result.summary.append({"lam": 1.0, "solvable": genuine.solvable, "kernel_dim": genuine.kernel_dim,
                                   "method": genuine.method})
        if worst > ORACLE_TOLERANCE:
            result.anomalies.append(f"Series and cyclic oracle differ by {worst:.3e}")
        return result

    check_experiment(cfg, spec)
    inputs = vortex_oracle_inputs(spec)
    rows = []
    sections = await solve_sections(spec, grid, exp.oracle_lambdas, ORACLE_SERIES_EPS, threads, progress_logger)
    for section in sections:
        oracle = fourier_solve(*inputs, denom_threshold=exp.denom_threshold, lam=section.lam)
        exact = oracle.as_field().evaluate(grid.system, grid.coords)
        diff = float(np.max(np.linalg.norm(section.values - exact, axis=-1)))
        rows.append([section.lam, diff, oracle.min_denominator, len(oracle.rejected)])
        result.reports[f"fourier_oracle_{section.lam:g}"] = oracle.model_dump(mode="json")
        if diff > ORACLE_TOLERANCE * max(1.0, section.sup_norm):
            result.anomalies.append(f"Series and Fourier oracle differ by {diff:.3e} at λ={section.lam}")
    result.tables["oracle_check"] = (["lam", "max_diff", "min_denominator", "rejected"], rows)
    result.summary = [{"lam": r[0], "max_diff": r[1]} for r in rows]
    return result


async def experiment_attractor(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int,
                               progress_logger: Optional[ProgressLogger]) -> ExperimentResult:
    exp = cfg.experiment
    result = ExperimentResult("attractor")
    x = base_point(cfg, grid)
    rows = []
    for lam in exp.attractor_lambdas:
        if progress_logger:
            progress_logger.substep("G_λ orbit", f"λ={lam:g}, {exp.attractor_steps} steps")
        start = series_u_lambda(spec, lam, x.as_array(), ORACLE_SERIES_EPS)[0]
        start[0] += 1.0
        trace = await asyncio.to_thread(attractor_trace, spec, lam, x, start, exp.attractor_steps,
                                        relative_floor=exp.attractor_relative_floor)
        rows.extend([lam, n, d, p] for n, d, p in zip(trace.steps, trace.distances, trace.predicted))
        result.summary.append({"lam": lam, "max_abs_error": trace.max_abs_error,
                               "max_rel_error": trace.max_rel_error})
        if trace.max_rel_error is not None and trace.max_rel_error > ATTRACTOR_REL_TOLERANCE:
            result.anomalies.append(f"Attractor decay off by {trace.max_rel_error:.3e} relative at λ={lam}")
    result.tables["attractor"] = (["lam", "n", "distance", "predicted"], rows)
    return result


EXPERIMENTS = {
    "solve": experiment_solve,
    "sweep": experiment_sweep,
    "drift": experiment_drift,
    "displacement": experiment_displacement,
    "theoremB": experiment_theorem_b,
    "averaging": experiment_averaging,
    "oracle-check": experiment_oracle_check,
    "attractor": experiment_attractor,
}


async def run_experiment(cfg: Config, spec: CocycleSpec, grid: SampleGrid, threads: int = 1,
                         progress_logger: Optional[ProgressLogger] = None) -> ExperimentResult:
    """
    Raises:
        ValueError: If the experiment kind is not supported.
    """
    kind = cfg.experiment.kind
    if kind not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment: {kind}")
    return await EXPERIMENTS[kind](cfg, spec, grid, threads, progress_logger)


def write_outputs(result: ExperimentResult, cfg: Config, out_dir: str, digest: str) -> List[str]:
    files = []
    for name, (header, rows) in result.tables.items():
        files.append(storage.fs.write_csv(f"{out_dir}/{name}.csv", header, rows, digest, cfg.seed,
                                          cfg.output.float_format))
    for name, payload in result.reports.items():
        files.append(storage.fs.save_report(out_dir, name, payload))
    return files


async def run(config_path: str = "config.yaml", out_root: Optional[str] = None, threads: Optional[int] = None,
              logger: Optional[logging.Logger] = None, progress_logger: Optional[ProgressLogger] = None,
              cfg: Optional[Config] = None) -> int:
    """
    Load the configuration, run the configured experiment and write its outputs.

    Args:
        config_path: YAML configuration file.
        out_root: Output root overriding output.dir.
        threads: Worker threads overriding the config and environment.
        logger: Optional logger instance for detailed logging.
        progress_logger: Optional progress logger for pipeline tracking.
        cfg: Already loaded configuration; config_path is ignored when given.

    Returns:
        int: 0 on success, 2 on a configuration error (nothing is written),
        3 when anomalies were flagged, 1 on any other failure.
    """
    if logger is None:
        logger = get_logger('run')
    if progress_logger is None:
        from .logging_config import setup_logging
        _, progress_logger = setup_logging()

    started = time.perf_counter()
    try:
        cfg = cfg if cfg is not None else load_config(config_path)
        if threads is not None:
            cfg = cfg.model_copy(update={"threads": int(threads)})
        spec = build_cocycle(cfg)
        grid = make_grid(spec.system, cfg.grid.size, cfg.grid.offset, cfg.grid.golden_offset)
        check_experiment(cfg, spec)
    except (FileNotFoundError, ValidationError, ValueError) as e:
        logger.error(f"Invalid configuration: {e}")
        progress_logger.error("Invalid configuration", str(e))
        return EXIT_CONFIG

    digest = config_hash(cfg)
    kind = cfg.experiment.kind
    root = out_root or cfg.output.dir
    try:
        progress_logger.start_pipeline(kind, 3, digest)
        progress_logger.step("Building cocycle", repr(spec))
        progress_logger.success("Grid ready", f"{len(grid)} points, {cfg.threads} threads")

        progress_logger.step(f"Running {kind}")
        for label, field in EXPERIMENT_SCHEDULES.get(kind, ()):
            progress_logger.log_schedule(f"{label} schedule", getattr(cfg.experiment, field))
        result = await run_experiment(cfg, spec, grid, cfg.threads, progress_logger)
        result.reports.setdefault("grid", grid.descriptor)
        progress_logger.success(f"{kind} finished", f"{len(result.anomalies)} anomalies")

        progress_logger.step("Writing outputs")
        slug = storage.paths.make_slug(kind, spec.name)
        out_dir = storage.paths.output_dir(root, today_local(cfg.timezone), slug, digest)
        files = write_outputs(result, cfg, out_dir, digest)
        storage.manifest.append(root, RunManifest(
            config_hash=digest, version=__version__, kind=kind, seed=cfg.seed,
            started_at=storage.manifest.now_iso(cfg.timezone),
            wall_clock_seconds=time.perf_counter() - started,
            exit_code=EXIT_ANOMALY if result.anomalies else EXIT_OK,
            output_dir=out_dir, files=files, summary=result.summary, anomalies=result.anomalies))
        progress_logger.success("Outputs written", out_dir)
    except UnsupportedExperiment as e:
        logger.error(f"Invalid configuration: {e}")
        progress_logger.error("Invalid configuration", str(e))
        progress_logger.finish_pipeline(success=False)
        return EXIT_CONFIG
    except Exception as e:
        logger.error(f"Run failed with error: {e}", exc_info=True)
        progress_logger.error("Run failed", str(e))
        progress_logger.finish_pipeline(success=False)
        try:
            alerts.webhook.send_failure(f"{kind} failed", cfg, str(e))
        except Exception as alert_error:
            logger.debug(f"Failed to send alert: {alert_error}")
        return EXIT_FAILURE

    for message in result.anomalies:
        progress_logger.warning(message)
    progress_logger.finish_pipeline(success=True, anomalies=len(result.anomalies))
    if result.anomalies:
        alerts.webhook.send_anomaly(kind, result.anomalies, cfg, digest)
        return EXIT_ANOMALY
    return EXIT_OK
