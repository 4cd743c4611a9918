"""Experiment driver: configuration, the end-to-end pipeline, and the
table/benchmark runners behind the CLI subcommands.

Seed discipline: the master seed is never used directly.  Lane 0 keys the
chaos sampler, lane 1 the baseline sampler (so validation comparisons are
uncoupled), and repetition r of a ladder search uses lanes derived from
1000 + r.  Within a lane, path i consumes the (lane seed, i) Philox stream.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .baselines import (
    BASELINE_NAMES,
    baseline_supports,
    bladt_sorensen_bridge_batch,
    doob_h_bridge_batch,
    exact_ou_bridge_batch,
)
from .basis import SineBasis
from .bridge import (
    BRIDGE_MODES,
    BridgeCoefficients,
    BridgeSpec,
    bridge_coefficients,
    sample_bridge,
    sample_bridge_batch,
)
from .chaos import lane_seed
from .indices import IndexSet, enumerate_full, enumerate_table_a
from .io import write_json, write_paths_bin, write_paths_csv, write_table_csv
from .models import MODEL_NAMES, SdeModel, make_model
from .propagator import PropagatorSolution, TimeGrid, solve_propagator
from .stats import SampleSet, ks_two_sample, marginal_at, qq_pairs

WCE_LANE = 0
BASELINE_LANE = 1
_REP_LANE_BASE = 1000


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    model: str = "ou"
    params: dict = field(default_factory=dict)
    eta: float = 0.0
    theta: float = 1.0
    T: float = 1.0
    x0: Optional[float] = None  # defaults to eta
    p: int = 12
    L: int = 100
    grid: int = 1000
    n_paths: int = 1000
    seed: int = 0
    scheme: str = "table-a"
    eval_time: Optional[float] = None  # defaults to T/2
    baseline: Optional[str] = None
    solver: str = "rk4"
    bridge_mode: str = "guided"
    threads: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.model not in MODEL_NAMES:
            raise ConfigError("model", f"unknown model {self.model!r}")
        if self.T <= 0:
            raise ConfigError("T", "horizon must be positive")
        if self.p < 0:
            raise ConfigError("p", "order bound must be >= 0")
        if self.L < 0:
            raise ConfigError("L", "truncation must be >= 0")
        if self.grid < 2:
            raise ConfigError("grid", "need at least 2 steps")
        if self.n_paths < 1:
            raise ConfigError("paths", "need at least one path")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed", "seed must fit in 64 bits")
        if self.scheme not in ("table-a", "full"):
            raise ConfigError("scheme", f"unknown scheme {self.scheme!r}")
        if self.eval_time is not None and not 0 <= self.eval_time <= self.T:
            raise ConfigError("eval_time", f"must lie in [0, {self.T}]")
        if self.baseline is not None:
            if self.baseline not in BASELINE_NAMES:
                raise ConfigError("baseline", f"unknown baseline {self.baseline!r}")
            if not baseline_supports(self.baseline, self.model):
                raise ConfigError(
                    "baseline", f"{self.baseline!r} is not applicable to model {self.model!r}"
                )
        if self.solver not in ("rk4", "rk45", "exact-ou"):
            raise ConfigError("solver", f"unknown solver {self.solver!r}")
        if self.solver == "exact-ou" and self.model != "ou":
            raise ConfigError("solver", "exact-ou solver applies to the OU model only")
        if self.bridge_mode not in BRIDGE_MODES:
            raise ConfigError("bridge_mode", f"unknown bridge mode {self.bridge_mode!r}")
        if self.threads < 1:
            raise ConfigError("threads", "need at least one worker")
        try:
            self.build_model()
        except (TypeError, ValueError) as exc:
            raise ConfigError("params", str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path, **overrides) -> "ExperimentConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        raw.update({k: v for k, v in overrides.items() if v is not None})
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration field")
        return cls(**raw)

    @property
    def resolved_eval_time(self) -> float:
        return self.T / 2.0 if self.eval_time is None else self.eval_time

    @property
    def resolved_x0(self) -> float:
        return self.eta if self.x0 is None else self.x0

    def build_model(self) -> SdeModel:
        return make_model(self.model, self.resolved_x0, **self.params)

    def build_index_set(self) -> IndexSet:
        if self.scheme == "table-a":
            return enumerate_table_a(self.p, self.L)
        return enumerate_full(self.p, self.L)

    def build_basis(self) -> SineBasis:
        return SineBasis(self.T, max(self.L, 1))

    def build_grid(self) -> TimeGrid:
        return TimeGrid(self.T, self.grid)

    def build_spec(self) -> BridgeSpec:
        return BridgeSpec(self.eta, self.theta, self.T)

    def config_hash(self) -> str:
        payload = asdict(self)
        payload.pop("out", None)
        payload.pop("threads", None)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def meta(self) -> dict:
        return {"config_hash": self.config_hash(), "seed": self.seed, "version": __version__}


def build_bridge_coefficients(cfg: ExperimentConfig) -> BridgeCoefficients:
    model = cfg.build_model()
    index_set = cfg.build_index_set()
    basis = cfg.build_basis()
    grid = cfg.build_grid()
    spec = cfg.build_spec()
    propagator = None
    if cfg.bridge_mode == "integral":
        propagator = solve_propagator(model, index_set, basis, grid, method=cfg.solver)
    return bridge_coefficients(
        model, index_set, basis, grid, spec, mode=cfg.bridge_mode, propagator=propagator
    )


def sample_baseline_batch(cfg: ExperimentConfig, seed: int, n_paths: int) -> np.ndarray:
    model = cfg.build_model()
    spec = cfg.build_spec()
    grid = cfg.build_grid()
    if cfg.baseline == "exact-ou":
        return exact_ou_bridge_batch(model.a, model.sigma, spec, grid, seed, n_paths)
    if cfg.baseline == "doob-h":
        return doob_h_bridge_batch(model, spec, grid, seed, n_paths).paths
    if cfg.baseline == "bladt-sorensen":
        return bladt_sorensen_bridge_batch(model, spec, grid, seed, n_paths).paths
    raise ConfigError("baseline", "validate requires a baseline")


@dataclass
class SimulateResult:
    paths: np.ndarray
    coefficients: BridgeCoefficients
    summary: dict


def run_simulate(cfg: ExperimentConfig, write_binary: bool = False) -> SimulateResult:
    t0 = time.perf_counter()
    coeffs = build_bridge_coefficients(cfg)
    build_seconds = time.perf_counter() - t0
    t0 = time.perf_counter()
    paths = sample_bridge_batch(coeffs, lane_seed(cfg.seed, WCE_LANE), cfg.n_paths, threads=cfg.threads)
    sampling_seconds = time.perf_counter() - t0
    marginal = marginal_at(paths, coeffs.grid, cfg.resolved_eval_time)
    summary = {
        "config": {k: v for k, v in asdict(cfg).items() if k != "out"},
        "eval_time": cfg.resolved_eval_time,
        "marginal_mean": float(np.mean(marginal.values)),
        "marginal_variance": float(np.var(marginal.values, ddof=1)) if cfg.n_paths > 1 else 0.0,
        "endpoints_pinned": bool(
            np.all(paths[:, 0] == cfg.eta) and np.all(paths[:, -1] == cfg.theta)
        ),
        "meta": cfg.meta(),
        "timing": {
            "coefficient_build_seconds": build_seconds,
            "sampling_seconds": sampling_seconds,
            "per_bridge_seconds": sampling_seconds / cfg.n_paths,
        },
    }
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        meta = cfg.meta() | {"L": cfg.L, "model": cfg.model, "eta": cfg.eta, "theta": cfg.theta}
        write_paths_csv(outdir / "paths.csv", coeffs.grid, paths, meta)
        if write_binary:
            write_paths_bin(outdir / "paths.bin", coeffs.grid, paths)
        write_json(outdir / "summary.json", summary)
    return SimulateResult(paths=paths, coefficients=coeffs, summary=summary)


@dataclass
class ValidateResult:
    ks: dict
    qq: dict
    wce_marginal: SampleSet
    baseline_marginal: SampleSet


def run_validate(cfg: ExperimentConfig, qq_points: int = 100) -> ValidateResult:
    if cfg.baseline is None:
        raise ConfigError("baseline", "validate requires a baseline")
    coeffs = build_bridge_coefficients(cfg)
    wce_paths = sample_bridge_batch(coeffs, lane_seed(cfg.seed, WCE_LANE), cfg.n_paths, threads=cfg.threads)
    base_paths = sample_baseline_batch(cfg, lane_seed(cfg.seed, BASELINE_LANE), cfg.n_paths)
    t_eval = cfg.resolved_eval_time
    wce = marginal_at(wce_paths, coeffs.grid, t_eval, label="wce")
    base = marginal_at(base_paths, coeffs.grid, t_eval, label=cfg.baseline)
    ks = ks_two_sample(wce, base)
    pairs = qq_pairs(wce, base, qq_points)
    comparison = f"wce-vs-{cfg.baseline}"
    ks_record = {
        "comparison": comparison,
        "endpoint_pair": [cfg.eta, cfg.theta],
        "L": cfg.L,
        "d": ks.d,
        "p_value": ks.p_value,
        "n": ks.n,
        "m": ks.m,
        "seed": cfg.seed,
        "eval_time": t_eval,
        "meta": cfg.meta(),
    }
    levels = ((np.arange(1, qq_points + 1) - 0.5) / qq_points).tolist()
    qq_record = {
        "comparison": comparison,
        "endpoint_pair": [cfg.eta, cfg.theta],
        "L": cfg.L,
        "eval_time": t_eval,
        "levels": levels,
        "q_wce": pairs[:, 0].tolist(),
        "q_baseline": pairs[:, 1].tolist(),
        "label_a": "wce",
        "label_b": cfg.baseline,
        "meta": cfg.meta(),
    }
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_json(outdir / "ks.json", ks_record)
        write_json(outdir / "qq.json", qq_record)
        rows = [["wce", i, float(v)] for i, v in enumerate(wce.values)]
        rows += [[cfg.baseline, i, float(v)] for i, v in enumerate(base.values)]
        write_table_csv(outdir / "marginals.csv", ["sampler", "path_id", "value"], rows, cfg.meta())
    return ValidateResult(ks=ks_record, qq=qq_record, wce_marginal=wce, baseline_marginal=base)


def run_min_l(
    cfg: ExperimentConfig,
    ladder: list[int],
    threshold: float = 0.05,
    repetitions: int = 5,
) -> dict:
    """Smallest truncation in the ladder whose median validation p-value
    over independently seeded repetitions exceeds the threshold."""
    if sorted(ladder) != list(ladder):
        raise ConfigError("ladder", "ladder must be increasing")
    results = []
    found = None
    for L in ladder:
        p_values = []
        for rep in range(repetitions):
            rep_cfg = replace_config(cfg, L=L, seed=lane_seed(cfg.seed, _REP_LANE_BASE + rep), out=None)
            p_values.append(run_validate(rep_cfg).ks["p_value"])
        median_p = float(np.median(p_values))
        results.append({"L": L, "p_values": p_values, "median_p": median_p})
        if found is None and median_p > threshold:
            found = L
    report = {
        "comparison": f"wce-vs-{cfg.baseline}",
        "endpoint_pair": [cfg.eta, cfg.theta],
        "ladder": list(ladder),
        "threshold": threshold,
        "repetitions": repetitions,
        "results": results,
        "min_l": found,
        "meta": cfg.meta(),
    }
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_json(outdir / "min_l.json", report)
        rows = [[r["L"], r["median_p"]] + [float(p) for p in r["p_values"]] for r in results]
        header = ["L", "median_p"] + [f"p_rep{i}" for i in range(repetitions)]
        write_table_csv(outdir / "min_l.csv", header, rows, cfg.meta())
    return report


def run_benchmark(cfg: ExperimentConfig, l_values: list[int], paths_timed: Optional[int] = None) -> dict:
    """Wall-clock timing: one-off coefficient construction per truncation,
    then the mean per-bridge sampling time over individually sampled paths.
    Monotonic timer; file I/O excluded."""
    n_timed = cfg.n_paths if paths_timed is None else paths_timed
    rows = []
    for L in l_values:
        run_cfg = replace_config(cfg, L=L, out=None)
        t0 = time.perf_counter()
        coeffs = build_bridge_coefficients(run_cfg)
        solve_seconds = time.perf_counter() - t0
        seed = lane_seed(cfg.seed, WCE_LANE)
        t0 = time.perf_counter()
        for i in range(n_timed):
            sample_bridge(coeffs, seed, i)
        per_bridge = (time.perf_counter() - t0) / n_timed
        rows.append(
            {
                "L": L,
                "n_indices": len(coeffs.index_set),
                "solve_seconds": solve_seconds,
                "per_bridge_seconds": per_bridge,
                "paths_timed": n_timed,
            }
        )
    report = {"rows": rows, "meta": cfg.meta()}
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        header = ["L", "n_indices", "solve_seconds", "per_bridge_seconds", "paths_timed"]
        write_table_csv(
            outdir / "benchmark.csv",
            header,
            [[r[h] for h in header] for r in rows],
            cfg.meta(),
        )
    return report


def table_a_rows(p: int, L: int) -> tuple[list[str], list[list]]:
    """CSV dump of the published enumeration: index, m_1..m_min(L,16), order."""
    index_set = enumerate_table_a(p, L)
    width = min(max(L, 1), 16)
    header = ["index"] + [f"m_{k}" for k in range(1, width + 1)] + ["order"]
    rows = []
    for i, m in enumerate(index_set):
        rows.append([i] + list(m.dense(width)) + [m.order])
    return header, rows


def run_table_a(cfg: ExperimentConfig) -> dict:
    header, rows = table_a_rows(cfg.p, cfg.L)
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        write_table_csv(outdir / "table_a.csv", header, rows, cfg.meta())
    return {"header": header, "rows": rows}


def run_dump_propagator(cfg: ExperimentConfig) -> PropagatorSolution:
    model = cfg.build_model()
    sol = solve_propagator(
        model, cfg.build_index_set(), cfg.build_basis(), cfg.build_grid(), method=cfg.solver
    )
    if cfg.out:
        outdir = Path(cfg.out)
        outdir.mkdir(parents=True, exist_ok=True)
        header = ["t"] + [str(m) for m in sol.index_set]
        t = sol.grid.nodes
        rows = [[float(t[j])] + [float(v) for v in sol.values[:, j]] for j in range(t.size)]
        write_table_csv(outdir / "propagator.csv", header, rows, cfg.meta())
    return sol


def replace_config(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    payload = asdict(cfg)
    payload.update(changes)
    return ExperimentConfig(**payload)
