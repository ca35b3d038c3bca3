"""
Experiment harness
Size sweeps over a generator family, median/IQR surplus tables written with pandas,
least-squares scaling fits, and JSON (de)serialization of quasirandom reports
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Literal, NamedTuple, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ValidationError

from .config import get_settings
from .constructions import FAMILIES, generate
from .errors import HarnessError
from .exact_oracle import ExactBudget, pi_exact, require_budget
from .graph_core import VertexOrdering
from .greedy_fas import derive_seed, restricted_greedy
from .quasirandom import QuasirandomReport

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["n", "m", "surplus_median", "surplus_iqr"]


class ExperimentSpec(BaseModel):
    """One size sweep: `size_param` of the family takes each value in `sizes`"""

    family: str
    params: Dict[str, int] = Field(default_factory=dict)
    size_param: str = "n"
    sizes: List[int]
    trials: int = 50
    seed: int = 0
    algorithm: Literal["greedy", "exact"] = "greedy"
    output: Optional[str] = None
    workers: int = Field(default_factory=lambda: get_settings().workers)


class ScalingFit(BaseModel):
    points: List[Tuple[float, float]]
    slope: float
    intercept: float
    residual: float


class ExperimentResult(NamedTuple):
    table: pd.DataFrame
    fit: Optional[ScalingFit]


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise HarnessError(f"invalid experiment spec {path}: {exc}") from exc


def _validate(spec: ExperimentSpec) -> None:
    if not spec.sizes:
        raise HarnessError("experiment needs a non-empty size sweep")
    if spec.family not in FAMILIES:
        raise HarnessError(f"unknown family {spec.family!r}")
    if spec.size_param not in FAMILIES[spec.family].params:
        raise HarnessError(f"family {spec.family!r} has no parameter {spec.size_param!r}")
    if spec.trials < 1:
        raise HarnessError(f"trials must be at least 1, got {spec.trials}")
    if spec.workers < 1:
        raise HarnessError(f"workers must be at least 1, got {spec.workers}")
    family = FAMILIES[spec.family]
    missing = [p for p in family.params if p != spec.size_param and p not in spec.params]
    if missing:
        raise HarnessError(f"family {spec.family!r} needs parameters {missing}")
    if spec.algorithm == "exact":
        # every size is checked before the first trial runs
        limit = ExactBudget.from_settings().max_n_beta
        for size in spec.sizes:
            sized = {**spec.params, spec.size_param: size}
            n = family.vertices(**{p: sized[p] for p in family.params})
            require_budget(f"exact sweep at {spec.size_param}={size}", n, limit)


def _run_trial(job: Tuple[str, Dict[str, int], str, int]) -> Tuple[int, int, float]:
    """One trial: (n, m, surplus). Seeded families get a fresh instance from the trial seed."""
    family, params, algorithm, trial_seed = job
    G = generate(family, params, seed=trial_seed)
    if algorithm == "exact":
        value = pi_exact(G)
    else:
        order = np.random.default_rng(trial_seed).permutation(G.n).tolist()
        value = restricted_greedy(G, VertexOrdering(order)).surplus
    return G.n, G.m, float(value)


def _jobs(spec: ExperimentSpec, size_index: int, size: int) -> List[Tuple[str, Dict[str, int], str, int]]:
    params = {**spec.params, spec.size_param: size}
    size_seed = derive_seed(spec.seed, size_index)
    return [(spec.family, params, spec.algorithm, derive_seed(size_seed, t)) for t in range(spec.trials)]


def _flush(rows: List[Dict[str, float]], output: Optional[str]) -> pd.DataFrame:
    table = pd.DataFrame(rows, columns=CSV_COLUMNS)
    if output:
        table.to_csv(output, index=False, lineterminator="\n")
    return table


def scaling_fit(table: pd.DataFrame) -> Optional[ScalingFit]:
    """Least-squares line through (log m, log median surplus) over rows with positive values"""
    usable = table[(table["m"] > 0) & (table["surplus_median"] > 0)]
    if len(usable) < 3:
        logger.warning(f"scaling fit skipped: {len(usable)} usable points, need at least 3")
        return None
    x = np.log(usable["m"].to_numpy(dtype=float))
    y = np.log(usable["surplus_median"].to_numpy(dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return ScalingFit(
        points=[(float(a), float(b)) for a, b in zip(x, y)],
        slope=float(slope),
        intercept=float(intercept),
        residual=residual,
    )


def experiment_scaling(spec: ExperimentSpec, output: Optional[str] = None) -> ExperimentResult:
    """Run the sweep, write the CSV table and fit log surplus against log m"""
    _validate(spec)
    output = output or spec.output
    rows: List[Dict[str, float]] = []
    executor = ProcessPoolExecutor(max_workers=spec.workers) if spec.workers > 1 else None
    try:
        for size_index, size in enumerate(spec.sizes):
            jobs = _jobs(spec, size_index, size)
            try:
                if executor is not None:
                    results = list(executor.map(_run_trial, jobs))
                else:
                    results = [_run_trial(job) for job in jobs]
            except Exception:
                logger.error(f"experiment aborted at {spec.size_param}={size}; flushing {len(rows)} rows")
                _flush(rows, output)
                raise
            surpluses = np.array([r[2] for r in results])
            q1, median, q3 = np.percentile(surpluses, [25, 50, 75])
            rows.append({
                "n": results[0][0],
                "m": int(np.median([r[1] for r in results])),
                "surplus_median": float(median),
                "surplus_iqr": float(q3 - q1),
            })
            logger.info(f"experiment {spec.family}: {spec.size_param}={size} median surplus {median:.3f}")
    finally:
        if executor is not None:
            executor.shutdown()

    table = _flush(rows, output)
    return ExperimentResult(table, scaling_fit(table))


def report_serialize(report: QuasirandomReport) -> str:
    """JSON text with the report's fixed key order; undefined ratios become null"""
    return report.model_dump_json()


def report_parse(text: str) -> QuasirandomReport:
    try:
        return QuasirandomReport.model_validate_json(text)
    except ValidationError as exc:
        raise HarnessError(f"invalid report JSON: {exc}") from exc
