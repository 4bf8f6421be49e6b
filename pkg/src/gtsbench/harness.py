"""Experiment harness: configuration, run execution, and result files.

A run drives one optimizer through ``environments`` successive landscapes of
one problem instance.  The generation counter advances ``tau_t`` generations
per environment; at every boundary the harness (in order) extracts the true
and estimated knees of the environment just finished, advances the linkage
state, and lets the optimizer react.  Metrics are snapshotted at each
environment's final generation against the analytical front of that
environment at linkage factor 1, so time-linked runs are scored on the same
fronts as unlinked ones.

Evaluation budgets are accounted in four disjoint buckets: ``init`` (first
evaluation of the fresh population, exactly N), ``warmup`` (N per warmup
generation, before the clock starts), ``optimization`` (N per counted
generation, N * tau_t * environments total) and ``change`` (N per boundary,
N * (environments - 1) total).  Budget violations are errors, not warnings.

``run_experiment`` executes the full cross-product of problems, matrix
groups, schedules, change frequencies, severities, algorithms and repeats,
optionally across processes, and writes deterministic CSV/JSON outputs: with
a fixed master seed two executions produce byte-identical ``results.csv``
(wall-clock times go to a separate ``timings.csv``).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import tomli

from .dynamics import PI_FRACTIONAL_DIGITS, Schedule, time_value
from .matrices import MatrixGroup
from .metrics import (
    MetricRecord,
    aggregate,
    friedman,
    igd,
    ms2,
    normalized_hypervolume,
    run_means,
)
from .optimizer import DynamicNsga2, PsOracle, RandomSearch
from .problems import (
    LinkageState,
    PhiMode,
    ProblemInstance,
    evaluate_batch,
    knee_point,
    make_instance,
    parse_selection,
    phi_update,
    reference_front,
    sample_ps,
)

__all__ = [
    "ExperimentConfig",
    "RunSpec",
    "RunRecord",
    "ExperimentResult",
    "load_config",
    "config_from_mapping",
    "make_algorithm",
    "cell_id",
    "derive_seed",
    "run_single",
    "run_experiment",
    "export_plot_data",
    "ALGORITHM_NAMES",
]

_SCHEDULE_NAMES = tuple(s.value for s in Schedule)
ALGORITHM_NAMES = ("dnsga2", "random", "ps_oracle")
_PLOT_KINDS = (
    "pf_cloud",
    "ps_cloud",
    "bar_dmigd",
    "bar_dmhv",
    "bar_dmms",
    "bar_runtime",
    "rank_chart",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Cross-product experiment description.

    ``problems`` are selection strings; a group pinned inside a selection
    string overrides the ``groups`` axis for that problem.
    """

    problems: tuple[str, ...]
    groups: tuple[int, ...] = (1, 2, 3)
    schedules: tuple[str, ...] = ("regular",)
    n_t_values: tuple[int, ...] = (5, 10)
    tau_t_values: tuple[int, ...] = (5, 10)
    environments: int = 50
    warmup_generations: int = 50
    repeats: int = 20
    dimension: int = 10
    population_size: int = 100
    power: float = 1.0
    master_seed: int = 0
    algorithms: tuple[str, ...] = ("dnsga2",)
    restart_fraction: float = 0.3
    output_dir: str = "results"
    front_size_2obj: int = 1500
    front_size_3obj: int = 2500
    parallel: int = 1

    def __post_init__(self) -> None:
        if not self.problems:
            raise ValueError("at least one problem is required")
        for sel in self.problems:
            parse_selection(sel)
        if not self.groups or any(g not in (1, 2, 3) for g in self.groups):
            raise ValueError(f"groups must be drawn from 1..3, got {self.groups}")
        for s in self.schedules:
            if s not in _SCHEDULE_NAMES:
                raise ValueError(
                    f"unknown schedule {s!r}; expected one of {_SCHEDULE_NAMES}"
                )
        for name, vals in (("n_t_values", self.n_t_values),
                           ("tau_t_values", self.tau_t_values)):
            if not vals or any(v < 1 for v in vals):
                raise ValueError(f"{name} must be positive, got {vals}")
        if self.environments < 1:
            raise ValueError(f"environments must be positive, got {self.environments}")
        if self.warmup_generations < 0:
            raise ValueError(
                f"warmup_generations must be nonnegative, got {self.warmup_generations}"
            )
        if self.repeats < 1:
            raise ValueError(f"repeats must be positive, got {self.repeats}")
        if self.dimension < 4:
            raise ValueError(f"dimension must be at least 4, got {self.dimension}")
        if self.population_size < 2:
            raise ValueError(
                f"population_size must be at least 2, got {self.population_size}"
            )
        if self.power <= 0:
            raise ValueError(f"power must be positive, got {self.power}")
        if not 0.0 <= self.restart_fraction <= 1.0:
            raise ValueError(
                f"restart_fraction must lie in [0, 1], got {self.restart_fraction}"
            )
        for a in self.algorithms:
            if a not in ALGORITHM_NAMES:
                raise ValueError(
                    f"unknown algorithm {a!r}; expected one of {ALGORITHM_NAMES}"
                )
        if self.front_size_2obj < 2 or self.front_size_3obj < 3:
            raise ValueError("reference front sizes are too small")
        if self.parallel < 1:
            raise ValueError(f"parallel must be positive, got {self.parallel}")
        if "irregular_pi" in self.schedules and (
            self.environments + 10 > len(PI_FRACTIONAL_DIGITS)
        ):
            raise ValueError(
                f"{self.environments} environments need more pi digits than the "
                f"embedded table holds ({len(PI_FRACTIONAL_DIGITS)})"
            )


_LIST_KEYS = {
    "problems": str,
    "groups": int,
    "schedules": str,
    "n_t_values": int,
    "tau_t_values": int,
    "algorithms": str,
}
_SCALAR_KEYS = {
    "environments": int,
    "warmup_generations": int,
    "repeats": int,
    "dimension": int,
    "population_size": int,
    "power": float,
    "master_seed": int,
    "restart_fraction": float,
    "output_dir": str,
    "front_size_2obj": int,
    "front_size_3obj": int,
    "parallel": int,
}


def config_from_mapping(data: dict) -> ExperimentConfig:
    """Build a config from parsed key/value data; unknown keys are errors."""
    known = set(_LIST_KEYS) | set(_SCALAR_KEYS)
    unknown = sorted(set(data) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    kwargs: dict = {}
    for key, elem_type in _LIST_KEYS.items():
        if key in data:
            raw = data[key]
            if not isinstance(raw, (list, tuple)):
                raise ValueError(f"config key {key!r} must be a list")
            kwargs[key] = tuple(elem_type(v) for v in raw)
    for key, typ in _SCALAR_KEYS.items():
        if key in data:
            raw = data[key]
            if isinstance(raw, bool) or (typ is not str and isinstance(raw, str)):
                raise ValueError(f"config key {key!r} has the wrong type")
            kwargs[key] = typ(raw)
    if "problems" not in kwargs:
        raise ValueError("config key 'problems' is required")
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        data = tomli.load(fh)
    return config_from_mapping(data)


@dataclass(frozen=True)
class RunSpec:
    """One cell of the experiment cross-product."""

    problem: str
    group: int
    schedule: str
    n_t: int
    tau_t: int
    algorithm: str
    repeat: int


def cell_id(spec: RunSpec) -> str:
    return (
        f"{spec.problem}|group{spec.group}|{spec.schedule}"
        f"|nt{spec.n_t}|tt{spec.tau_t}|{spec.algorithm}|r{spec.repeat}"
    )


def derive_seed(master_seed: int, cell: str) -> int:
    digest = hashlib.sha256(f"{master_seed}|{cell}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_algorithm(name: str, config: ExperimentConfig):
    if name == "dnsga2":
        return DynamicNsga2(restart_fraction=config.restart_fraction)
    if name == "random":
        return RandomSearch()
    if name == "ps_oracle":
        return PsOracle()
    raise ValueError(f"unknown algorithm {name!r}; expected one of {ALGORITHM_NAMES}")


@dataclass
class RunRecord:
    spec: RunSpec
    seed: int
    metrics: MetricRecord
    igd_series: list[float]
    hv_series: list[float]
    ms_series: list[float]
    phi_series: list[float]
    hv_contributing: list[int]
    counters: dict[str, int]
    fronts: list[np.ndarray]
    runtime_seconds: float


class _EvalContext:
    """Counting evaluation closure handed to optimizers."""

    def __init__(self, inst: ProblemInstance, counters: dict[str, int], front_size: int):
        self.inst = inst
        self.counters = counters
        self.front_size = front_size
        self.t = 0.0
        self.state: LinkageState | None = None
        self.bucket = "init"
        self.front_memo: dict[float, object] = {}

    def __call__(self, X: np.ndarray) -> np.ndarray:
        F = evaluate_batch(self.inst, X, self.t, self.state)
        self.counters[self.bucket] += len(X)
        return F

    def reference_front(self):
        if self.t not in self.front_memo:
            self.front_memo[self.t] = reference_front(
                self.inst, self.t, self.front_size
            )
        return self.front_memo[self.t]


def _check_population(alg, expected: int) -> None:
    pop = alg.population
    if len(pop.X) != expected or len(pop.F) != expected:
        raise RuntimeError(
            f"optimizer contract violation: population size {len(pop.X)} "
            f"(objectives {len(pop.F)}), expected {expected}"
        )


def run_single(spec: RunSpec, config: ExperimentConfig) -> RunRecord:
    """Execute one run; deterministic given (spec, config)."""
    start = time.perf_counter()
    inst = make_instance(
        spec.problem,
        dimension=config.dimension,
        group=MatrixGroup(f"group{spec.group}"),
        schedule=Schedule(spec.schedule),
        power=config.power,
    )
    front_size = (
        config.front_size_2obj if inst.n_objectives == 2 else config.front_size_3obj
    )
    seed = derive_seed(config.master_seed, cell_id(spec))
    rng = np.random.default_rng(seed)
    alg = make_algorithm(spec.algorithm, config)

    T = config.environments
    tau_t = spec.tau_t
    n_pop = config.population_size
    env_times = [
        time_value(k * tau_t, tau_t, spec.n_t, inst.schedule) for k in range(T)
    ]
    counters = {"init": 0, "warmup": 0, "optimization": 0, "change": 0}
    ev = _EvalContext(inst, counters, front_size)
    state: LinkageState | None = LinkageState() if inst.time_linked else None

    def ref(k: int):
        t = env_times[k]
        if t not in ev.front_memo:
            ev.front_memo[t] = reference_front(inst, t, front_size)
        return ev.front_memo[t]

    lower, upper = inst.bounds
    ev.t = env_times[0]
    ev.state = state
    ev.bucket = "init"
    alg.initialize(lower, upper, n_pop, rng)
    alg.on_change(ev, rng)
    _check_population(alg, n_pop)

    ev.bucket = "warmup"
    for _ in range(config.warmup_generations):
        alg.step(ev, rng)
    _check_population(alg, n_pop)

    igd_series = [0.0] * T
    hv_series = [0.0] * T
    ms_series = [0.0] * T
    phi_series = [1.0] * T
    hv_contributing = [0] * T
    fronts: list[np.ndarray] = [np.empty((0, inst.n_objectives))] * T

    for tau in range(tau_t * T):
        k = tau // tau_t
        if tau > 0 and tau % tau_t == 0:
            # Boundary into environment k: knees first, then the linkage
            # update, then the optimizer's reaction.
            if inst.time_linked:
                true_knee = knee_point(ref(k - 1).points)
                est_knee = knee_point(fronts[k - 1])
                aux: float | None = None
                if inst.phi_mode is PhiMode.HV_BASED:
                    aux = hv_series[k - 1] / (1.1**inst.n_objectives)
                elif inst.phi_mode is PhiMode.IGD_BASED:
                    aux = igd_series[k - 1]
                state = phi_update(state, true_knee, est_knee, inst.phi_mode, aux)
                phi_series[k] = state.phi
                ev.state = state
            ev.t = env_times[k]
            ev.bucket = "change"
            alg.on_change(ev, rng)
            _check_population(alg, n_pop)
        ev.bucket = "optimization"
        alg.step(ev, rng)
        if tau % tau_t == tau_t - 1:
            front = alg.final_front()
            r = ref(k)
            igd_series[k] = igd(r.points, front)
            hv_series[k], hv_contributing[k] = normalized_hypervolume(
                front, r.lower, r.upper
            )
            ms_series[k] = ms2(r, front)
            fronts[k] = front
    _check_population(alg, n_pop)

    expected = {
        "init": n_pop,
        "warmup": n_pop * config.warmup_generations,
        "optimization": n_pop * tau_t * T,
        "change": n_pop * (T - 1),
    }
    if counters != expected:
        raise RuntimeError(
            f"evaluation budget violation: counted {counters}, expected {expected}"
        )

    return RunRecord(
        spec=spec,
        seed=seed,
        metrics=run_means(igd_series, hv_series, ms_series),
        igd_series=igd_series,
        hv_series=hv_series,
        ms_series=ms_series,
        phi_series=phi_series,
        hv_contributing=hv_contributing,
        counters=counters,
        fronts=fronts,
        runtime_seconds=time.perf_counter() - start,
    )


@dataclass
class ExperimentResult:
    records: list[RunRecord]
    failures: list[tuple[str, str]]
    output_dir: Path


def _build_cells(config: ExperimentConfig, only: str | None) -> list[RunSpec]:
    cells = []
    for problem in config.problems:
        _, pinned_group, _ = parse_selection(problem)
        groups = (
            [int(pinned_group.value[-1])] if pinned_group is not None else config.groups
        )
        for group in groups:
            for schedule in config.schedules:
                for n_t in config.n_t_values:
                    for tau_t in config.tau_t_values:
                        for algorithm in config.algorithms:
                            for repeat in range(config.repeats):
                                cells.append(
                                    RunSpec(
                                        problem=problem,
                                        group=group,
                                        schedule=schedule,
                                        n_t=n_t,
                                        tau_t=tau_t,
                                        algorithm=algorithm,
                                        repeat=repeat,
                                    )
                                )
    if only is not None:
        cells = [c for c in cells if only in cell_id(c)]
        if not cells:
            raise ValueError(f"cell filter {only!r} matches nothing")
    return cells


def _run_cell(args: tuple[RunSpec, ExperimentConfig]):
    spec, config = args
    try:
        return "ok", cell_id(spec), run_single(spec, config)
    except Exception:
        return "error", cell_id(spec), traceback.format_exc()


def _float_repr(x: float) -> str:
    return repr(float(x))


def _safe_name(cell: str) -> str:
    return cell.replace("|", "__").replace(":", "-").replace("=", "-")


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _spec_columns(spec: RunSpec) -> list[str]:
    return [
        spec.problem,
        str(spec.group),
        spec.schedule,
        str(spec.n_t),
        str(spec.tau_t),
        spec.algorithm,
        str(spec.repeat),
    ]


_SPEC_HEADER = ["problem", "group", "schedule", "n_t", "tau_t", "algorithm", "repeat"]


def _write_outputs(
    config: ExperimentConfig,
    records: list[RunRecord],
    failures: list[tuple[str, str]],
    out_dir: Path,
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    records = sorted(records, key=lambda r: cell_id(r.spec))

    rows = []
    timing_rows = []
    for rec in records:
        base = _spec_columns(rec.spec)
        rows.append(
            base
            + [
                str(rec.seed),
                _float_repr(rec.metrics.migd),
                _float_repr(rec.metrics.mhv),
                _float_repr(rec.metrics.mms),
                str(rec.counters["init"]),
                str(rec.counters["warmup"]),
                str(rec.counters["optimization"]),
                str(rec.counters["change"]),
            ]
        )
        timing_rows.append(base + [_float_repr(rec.runtime_seconds)])
    _write_csv(
        out_dir / "results.csv",
        _SPEC_HEADER
        + [
            "seed",
            "migd",
            "mhv",
            "mms",
            "evals_init",
            "evals_warmup",
            "evals_optimization",
            "evals_change",
        ],
        rows,
    )
    _write_csv(out_dir / "timings.csv", _SPEC_HEADER + ["runtime_seconds"], timing_rows)

    runs_dir = out_dir / "runs"
    runs_dir.mkdir(exist_ok=True)
    for rec in records:
        payload = {
            "cell_id": cell_id(rec.spec),
            "spec": asdict(rec.spec),
            "seed": rec.seed,
            "migd": rec.metrics.migd,
            "mhv": rec.metrics.mhv,
            "mms": rec.metrics.mms,
            "igd_series": rec.igd_series,
            "hv_series": rec.hv_series,
            "ms_series": rec.ms_series,
            "phi_series": rec.phi_series,
            "hv_contributing": rec.hv_contributing,
            "counters": rec.counters,
            "runtime_seconds": rec.runtime_seconds,
            "fronts": [f.tolist() for f in rec.fronts],
        }
        with open(runs_dir / f"{_safe_name(cell_id(rec.spec))}.json", "w") as fh:
            json.dump(payload, fh, sort_keys=True)

    _write_aggregates(records, out_dir)
    _write_friedman(records, out_dir)

    echo = asdict(config)
    echo["failures"] = [cell for cell, _ in failures]
    with open(out_dir / "config_echo.json", "w") as fh:
        json.dump(echo, fh, sort_keys=True, indent=2)

    if failures:
        with open(out_dir / "failures.txt", "w") as fh:
            for cell, err in failures:
                fh.write(f"=== {cell}\n{err}\n")


def _nested_values(records: list[RunRecord], metric: str):
    """{algorithm: {problem: {config tuple: [repeat values]}}}"""
    out: dict[str, dict[str, dict[tuple, list[float]]]] = {}
    for rec in records:
        cfg_key = (rec.spec.group, rec.spec.schedule, rec.spec.n_t, rec.spec.tau_t)
        out.setdefault(rec.spec.algorithm, {}).setdefault(
            rec.spec.problem, {}
        ).setdefault(cfg_key, []).append(getattr(rec.metrics, metric))
    return out


def _write_aggregates(records: list[RunRecord], out_dir: Path) -> None:
    rows = []
    tree: dict[str, dict[str, float]] = {}
    for metric, label in (("migd", "dmigd"), ("mhv", "dmhv"), ("mms", "dmms")):
        nested = _nested_values(records, metric)
        for algorithm in sorted(nested):
            value = aggregate(nested[algorithm])
            rows.append([algorithm, label, _float_repr(value)])
            tree.setdefault(algorithm, {})[label] = value
    rows.sort(key=lambda r: (r[0], r[1]))
    _write_csv(out_dir / "aggregates.csv", ["algorithm", "metric", "value"], rows)
    with open(out_dir / "aggregates.json", "w") as fh:
        json.dump(tree, fh, sort_keys=True, indent=2)


def _score_table(records: list[RunRecord], metric: str):
    """Mean-over-repeats score per (instance, algorithm); None if ragged."""
    cells: dict[tuple, dict[str, list[float]]] = {}
    for rec in records:
        inst_key = (
            rec.spec.problem,
            rec.spec.group,
            rec.spec.schedule,
            rec.spec.n_t,
            rec.spec.tau_t,
        )
        cells.setdefault(inst_key, {}).setdefault(rec.spec.algorithm, []).append(
            getattr(rec.metrics, metric)
        )
    instances = sorted(cells)
    algorithms = sorted({a for by_alg in cells.values() for a in by_alg})
    table = np.empty((len(instances), len(algorithms)))
    for i, inst_key in enumerate(instances):
        for j, alg in enumerate(algorithms):
            vals = cells[inst_key].get(alg)
            if not vals:
                return None, instances, algorithms
            table[i, j] = float(np.mean(vals))
    return table, instances, algorithms


def _write_friedman(records: list[RunRecord], out_dir: Path) -> None:
    header = ["metric", "algorithm", "mean_rank", "chi2", "p_value"]
    rows: list[list[str]] = []
    for metric, label, higher in (
        ("migd", "dmigd", False),
        ("mhv", "dmhv", True),
        ("mms", "dmms", True),
    ):
        table, _, algorithms = _score_table(records, metric)
        if table is None or len(algorithms) < 2:
            continue
        result = friedman(table, higher_better=higher)
        for j, alg in enumerate(algorithms):
            rows.append(
                [
                    label,
                    alg,
                    _float_repr(result.mean_ranks[j]),
                    _float_repr(result.chi2),
                    _float_repr(result.p_value),
                ]
            )
    _write_csv(out_dir / "friedman.csv", header, rows)


def run_experiment(
    config: ExperimentConfig,
    only: str | None = None,
    parallel: int | None = None,
    output_dir: str | Path | None = None,
) -> ExperimentResult:
    """Run every cell, write outputs, and return records plus failures.

    Failed cells are reported (and land in ``failures.txt``) without
    aborting the rest; callers map a nonempty failure list to exit code 2.
    """
    cells = _build_cells(config, only)
    workers = parallel if parallel is not None else config.parallel
    results: list[RunRecord] = []
    failures: list[tuple[str, str]] = []
    if workers <= 1:
        outcomes = map(_run_cell, ((c, config) for c in cells))
        for status, cell, payload in outcomes:
            if status == "ok":
                results.append(payload)
            else:
                failures.append((cell, payload))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for status, cell, payload in pool.map(
                _run_cell, ((c, config) for c in cells)
            ):
                if status == "ok":
                    results.append(payload)
                else:
                    failures.append((cell, payload))
    failures.sort(key=lambda f: f[0])
    out_dir = Path(output_dir) if output_dir is not None else Path(config.output_dir)
    _write_outputs(config, results, failures, out_dir)
    return ExperimentResult(records=results, failures=failures, output_dir=out_dir)


# ---------------------------------------------------------------------------
# Plot-ready data exports


def _read_results_csv(path: Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _records_from_csv(rows: list[dict[str, str]]):
    """Minimal RunRecord stand-ins for aggregate/rank exports."""
    out = []
    for row in rows:
        spec = RunSpec(
            problem=row["problem"],
            group=int(row["group"]),
            schedule=row["schedule"],
            n_t=int(row["n_t"]),
            tau_t=int(row["tau_t"]),
            algorithm=row["algorithm"],
            repeat=int(row["repeat"]),
        )
        metrics = MetricRecord(
            migd=float(row["migd"]), mhv=float(row["mhv"]), mms=float(row["mms"])
        )
        out.append(
            RunRecord(
                spec=spec,
                seed=int(row.get("seed", 0)),
                metrics=metrics,
                igd_series=[],
                hv_series=[],
                ms_series=[],
                phi_series=[],
                hv_contributing=[],
                counters={},
                fronts=[],
                runtime_seconds=0.0,
            )
        )
    return out


def _write_commented_csv(
    path: Path, comment: str, header: list[str], rows: list[list[str]]
) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def export_plot_data(
    kind: str,
    out_path: str | Path,
    results_dir: str | Path | None = None,
    selection: str | None = None,
    t_values: tuple[float, ...] = (),
    dimension: int = 10,
    group: int = 1,
    schedule: str = "regular",
    count: int | None = None,
) -> Path:
    """Write one plot-ready CSV; returns the path written.

    Front/set clouds (``pf_cloud``, ``ps_cloud``) need ``selection`` and
    ``t_values``; the bar and rank kinds need ``results_dir`` with the files
    ``run_experiment`` wrote.
    """
    out_path = Path(out_path)
    if kind not in _PLOT_KINDS:
        raise ValueError(f"unknown plot kind {kind!r}; expected one of {_PLOT_KINDS}")

    if kind in ("pf_cloud", "ps_cloud"):
        if selection is None or not t_values:
            raise ValueError(f"{kind} needs a problem selection and time values")
        inst = make_instance(
            selection,
            dimension=dimension,
            group=MatrixGroup(f"group{group}"),
            schedule=Schedule(schedule),
        )
        rows = []
        if kind == "pf_cloud":
            for t in t_values:
                front = reference_front(inst, float(t), count)
                for p in front.points:
                    rows.append([_float_repr(t)] + [_float_repr(v) for v in p])
            header = ["t"] + [f"f{j + 1}" for j in range(inst.n_objectives)]
            comment = f"analytical front samples for {selection} (D={inst.dimension})"
        else:
            n = count if count is not None else 500
            for t in t_values:
                for x in sample_ps(inst, float(t), n):
                    rows.append([_float_repr(t)] + [_float_repr(v) for v in x])
            header = ["t"] + [f"x{j + 1}" for j in range(inst.dimension)]
            comment = f"analytical set samples for {selection} (D={inst.dimension})"
        _write_commented_csv(out_path, comment, header, rows)
        return out_path

    if results_dir is None:
        raise ValueError(f"{kind} needs the directory written by a run")
    results_dir = Path(results_dir)

    if kind == "bar_runtime":
        rows_in = _read_results_csv(results_dir / "timings.csv")
        by_alg: dict[str, list[float]] = {}
        for row in rows_in:
            by_alg.setdefault(row["algorithm"], []).append(
                float(row["runtime_seconds"])
            )
        rows = [
            [alg, _float_repr(float(np.mean(vals)))]
            for alg, vals in sorted(by_alg.items())
        ]
        _write_commented_csv(
            out_path, "mean wall seconds per run", ["algorithm", "mean_runtime_seconds"], rows
        )
        return out_path

    records = _records_from_csv(_read_results_csv(results_dir / "results.csv"))
    if kind.startswith("bar_"):
        metric = {"bar_dmigd": "migd", "bar_dmhv": "mhv", "bar_dmms": "mms"}[kind]
        label = kind[len("bar_"):]
        nested = _nested_values(records, metric)
        rows = [
            [alg, _float_repr(aggregate(nested[alg]))] for alg in sorted(nested)
        ]
        _write_commented_csv(
            out_path, f"{label} per algorithm", ["algorithm", label], rows
        )
        return out_path

    # rank_chart
    rows = []
    for metric, label, higher in (
        ("migd", "dmigd", False),
        ("mhv", "dmhv", True),
        ("mms", "dmms", True),
    ):
        table, _, algorithms = _score_table(records, metric)
        if table is None or len(algorithms) < 2:
            continue
        result = friedman(table, higher_better=higher)
        for j, alg in enumerate(algorithms):
            rows.append([label, alg, _float_repr(result.mean_ranks[j])])
    _write_commented_csv(
        out_path,
        "mean Friedman rank per algorithm and metric",
        ["metric", "algorithm", "mean_rank"],
        rows,
    )
    return out_path
