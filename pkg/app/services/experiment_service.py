"""Experiment execution, metric files and persistence."""

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from sqlalchemy.orm import Session

from app.algorithms.congested_clique import symmetric_matrix_batch
from app.core.config import settings
from app.core.errors import BatchDynamicError, ConfigError, GraphInputError
from app.engine.simulator import EngineConfig, Simulator
from app.graph.comm_graph import CommGraph
from app.graph.io import IdMap, parse_matrix_batches, read_batches, read_graph, read_labelling
from app.graph.labelling import BatchUpdate
from app.models.experiment import BatchMetric, ExperimentRun, RunStatus
from app.oracles.report import OracleReport
from app.schemas.experiment import BatchKind, ExperimentConfig, ExperimentSummary, Scenario
from app.services.generators import (
    generate_batches,
    generate_graph,
    generate_labelling,
    generate_matrix_batches,
    generate_matrix_pair,
)
from app.services.scenarios import ScenarioRunner, make_runner

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["batch_index", "alpha", "rounds", "messages", "words", "max_aux_bits", "oracle_ok"]


@dataclass
class MetricRow:
    batch_index: int
    alpha: int
    rounds: int
    messages: int
    words: int
    max_aux_bits: int
    oracle_ok: Optional[bool]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    graph: CommGraph
    rows: List[MetricRow] = field(default_factory=list)
    report: OracleReport = field(default_factory=OracleReport)
    transcript: List[str] = field(default_factory=list)
    summary: Optional[ExperimentSummary] = None

    @property
    def oracle_checked(self) -> bool:
        return any(row.oracle_ok is not None for row in self.rows)

    @property
    def ok(self) -> bool:
        return self.report.ok


def load_graph(config: ExperimentConfig) -> Tuple[CommGraph, IdMap]:
    source = config.graph
    if source.path is not None:
        return read_graph(source.path)
    graph = generate_graph(source.kind, source.n, source.seed, source.m)
    return graph, IdMap(list(range(graph.n)))


def load_input(config: ExperimentConfig, runner: ScenarioRunner, graph: CommGraph, id_map: IdMap) -> Any:
    if runner.batch_kind is BatchKind.MATRIX:
        return generate_matrix_pair(graph.n, config.graph.seed)
    if config.graph.labelling_path is not None:
        return read_labelling(config.graph.labelling_path, graph, runner.label_kind, id_map)
    return generate_labelling(graph, runner.label_kind, config.graph.seed)


def load_batches(config: ExperimentConfig, runner: ScenarioRunner, initial: Any, id_map: IdMap) -> Sequence[Any]:
    source = config.batches
    if source.kind is not None and source.kind is not runner.batch_kind:
        raise ConfigError(f"scenario {runner.scenario.value} takes {runner.batch_kind.value} batches, not {source.kind.value}")
    if source.path is not None:
        text = Path(source.path).read_text()
        if runner.batch_kind is BatchKind.MATRIX:
            return parse_matrix_batches(text)
        if runner.scenario is Scenario.CC_TRIANGLES and text.lstrip().upper().startswith(("S ", "T ")):
            return [_adjacency_batch(s) for s, _ in parse_matrix_batches(text)]
        return read_batches(source.path, id_map)
    if runner.batch_kind is BatchKind.MATRIX:
        return generate_matrix_batches(initial, source.alpha, source.count, source.seed)
    return generate_batches(runner.batch_kind, initial, source.alpha, source.count, source.seed)


def _adjacency_batch(changes) -> BatchUpdate:
    return BatchUpdate.from_triples((e.u, e.v, label) for e, label in sorted(symmetric_matrix_batch(changes).items()))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every batch of the trace in sequence, checking each against its oracle."""
    runner = make_runner(config)
    graph, id_map = load_graph(config)
    runner.check_graph(graph)
    current = load_input(config, runner, graph, id_map)
    batches = load_batches(config, runner, current, id_map)

    use_oracle = config.oracle and settings.oracle_enabled
    if use_oracle and graph.n > settings.oracle_max_n:
        logger.warning("n=%d exceeds oracle_max_n=%d; oracle checks disabled", graph.n, settings.oracle_max_n)
        use_oracle = False

    engine_config = EngineConfig(
        bandwidth=config.bandwidth,
        bandwidth_mode=config.bandwidth_mode,
        transcript=config.transcript_path is not None,
    )
    simulator = Simulator(graph, engine_config)
    result = ExperimentResult(config=config, graph=graph, report=OracleReport(scenario=runner.scenario.value))
    aux = runner.bootstrap(graph, current)
    logger.info("%s on %r: %d batches", runner.scenario.value, graph, len(batches))

    for index, batch in enumerate(batches):
        new, alpha = runner.apply(current, batch)
        run = simulator.execute(runner.program(), current, new, aux)
        ok = None
        if use_oracle:
            ok = result.report.add(index, runner.expected(graph, new), runner.observed(graph, run.aux_out))
        m = run.metrics
        row = MetricRow(index, alpha, m.rounds, m.messages_sent, m.words_sent, m.max_aux_bits, ok)
        result.rows.append(row)
        if config.transcript_path is not None:
            result.transcript.append(f"# batch {index}")
            result.transcript.extend(run.transcript)
        logger.info("batch %d: alpha=%d rounds=%d words=%d oracle_ok=%s", index, alpha, m.rounds, m.words_sent, ok)
        current, aux = new, run.aux_out

    if config.summary:
        result.summary = fit_summary(result.rows, graph.diameter)
    write_outputs(result)
    return result


def fit_summary(rows: Sequence[MetricRow], diameter: int) -> ExperimentSummary:
    """Least squares of rounds against alpha and D; plus the log-log slope in alpha."""
    if not rows:
        return ExperimentSummary(batches=0, c_alpha=0.0, c_diameter=0.0, residual=0.0)
    alphas = np.array([row.alpha for row in rows], dtype=float)
    rounds = np.array([row.rounds for row in rows], dtype=float)
    design = np.column_stack([alphas, np.full_like(alphas, max(diameter, 1))])
    coef, residuals, _, _ = np.linalg.lstsq(design, rounds, rcond=None)
    residual = float(residuals[0]) if residuals.size else 0.0
    return ExperimentSummary(
        batches=len(rows),
        c_alpha=float(coef[0]),
        c_diameter=float(coef[1]),
        residual=residual,
        alpha_exponent=alpha_exponent(alphas, rounds),
    )


def alpha_exponent(alphas, rounds) -> Optional[float]:
    """Slope of log(rounds) against log(alpha), None without two distinct positive alphas."""
    alphas = np.asarray(alphas, dtype=float)
    rounds = np.asarray(rounds, dtype=float)
    mask = (alphas > 0) & (rounds > 0)
    if len(np.unique(alphas[mask])) < 2:
        return None
    slope, _ = np.polyfit(np.log(alphas[mask]), np.log(rounds[mask]), 1)
    return float(slope)


def _csv_flag(value: Optional[bool]) -> str:
    return "" if value is None else str(value).lower()


def metrics_csv(result: ExperimentResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow([row.batch_index, row.alpha, row.rounds, row.messages, row.words, row.max_aux_bits, _csv_flag(row.oracle_ok)])
    if result.summary is not None:
        s = result.summary
        buffer.write(f"# summary c_alpha={s.c_alpha:.4f} c_diameter={s.c_diameter:.4f} residual={s.residual:.4f}")
        if s.alpha_exponent is not None:
            buffer.write(f" alpha_exponent={s.alpha_exponent:.4f}")
        buffer.write("\n")
    return buffer.getvalue()


def write_outputs(result: ExperimentResult) -> None:
    config = result.config
    if config.metrics_path:
        Path(config.metrics_path).write_text(metrics_csv(result))
    if config.json_path:
        payload = {
            "scenario": config.scenario.value,
            "n": result.graph.n,
            "m": result.graph.m,
            "diameter": result.graph.diameter,
            "oracle_ok": result.ok if result.oracle_checked else None,
            "rows": [asdict(row) for row in result.rows],
            "summary": result.summary.model_dump() if result.summary else None,
        }
        Path(config.json_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if config.transcript_path:
        Path(config.transcript_path).write_text("\n".join(result.transcript) + "\n")


class ExperimentService:
    """Service for running and storing experiments."""

    @staticmethod
    def create_run(db: Session, config: ExperimentConfig) -> ExperimentRun:
        """Run an experiment and persist it; input errors propagate, algorithm failures are stored."""
        run = ExperimentRun(scenario=config.scenario.value, config=config.model_dump(mode="json"))
        try:
            result = run_experiment(config)
        except GraphInputError:
            raise
        except BatchDynamicError as exc:
            logger.error("experiment failed: %s", exc)
            run.status = RunStatus.FAILED
            run.error = f"{type(exc).__name__}: {exc}"
        else:
            run.status = RunStatus.COMPLETED
            run.n, run.m, run.diameter = result.graph.n, result.graph.m, result.graph.diameter
            run.oracle_ok = result.ok if result.oracle_checked else None
            run.metrics = [BatchMetric(**asdict(row)) for row in result.rows]
        db.add(run)
        db.commit()
        db.refresh(run)
        return run

    @staticmethod
    def get_run(db: Session, run_id: int) -> Optional[ExperimentRun]:
        """Get run by ID."""
        return db.query(ExperimentRun).filter(ExperimentRun.id == run_id).first()

    @staticmethod
    def get_runs(db: Session, scenario: Optional[str] = None, skip: int = 0, limit: int = 100) -> List[ExperimentRun]:
        """Get runs, newest first, with optional scenario filter."""
        query = db.query(ExperimentRun)
        if scenario:
            query = query.filter(ExperimentRun.scenario == scenario)
        return query.order_by(ExperimentRun.id.desc()).offset(skip).limit(limit).all()

    @staticmethod
    def get_metrics(db: Session, run_id: int) -> List[BatchMetric]:
        return db.query(BatchMetric).filter(BatchMetric.run_id == run_id).order_by(BatchMetric.batch_index).all()

    @staticmethod
    def summarize(db: Session, run_id: int) -> Optional[ExperimentSummary]:
        run = ExperimentService.get_run(db, run_id)
        if run is None:
            return None
        rows = [
            MetricRow(r.batch_index, r.alpha, r.rounds, r.messages, r.words, r.max_aux_bits, r.oracle_ok)
            for r in run.metrics
        ]
        return fit_summary(rows, run.diameter or 1)
