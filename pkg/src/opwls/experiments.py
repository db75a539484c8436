r"""Experiment configurations, runners, and tabular result emission.

Each experiment reproduces one of the studies at desk scale:

* ``poisson2d`` -- linear rank-one fits of the 2-D Poisson solution operator
  over an ``N_eff`` sweep, optimal vs. Monte Carlo sampling;
* ``poisson1d_kernel`` -- Green's-kernel learning for the 1-D problem;
* ``burgers`` -- polynomial operator fits of the viscous Burgers flow map
  over a hyperbolic-cross radius sweep;
* ``discrete_demo`` -- leverage-score sampling on a synthetic correlated
  point cloud, with Sobolev-weighted error reporting;
* ``complexity_sweep`` -- assemble vs. solve wall-time table.

Runs are deterministic: every random draw is seeded by a hash of the master
seed and the draw's role, so outputs are byte-identical across repeats and
independent of execution order.  Trials execute sequentially; because each
trial owns an independent substream, a worker pool would produce the same
artifacts.  Timestamps appear only in the manifest.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import (
    SobolevWeighting,
    empirical_bochner_error,
    energy_fraction_lost,
    reconstruct_kernel,
    scale_outputs,
    unscale_outputs,
)
from .index_sets import IndexSetSpec, generate
from .measures import ProductMeasure
from .operator_basis import LinearRankOneBasis, PolyOperatorBasis
from .pde import (
    BurgersConfig,
    DataSet,
    build_dataset,
    greens_kernel,
    sine_modes_2d,
)
from .sampling import (
    DiscreteFeatureBasis,
    RngSeed,
    build_discrete_plan,
    build_induced_tables,
    mixture_plan,
    sample_discrete,
    sample_monte_carlo,
    sample_optimal,
)
from .wls import (
    assemble,
    gram_diagnostics,
    min_samples,
    solve,
)

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "RunResult",
    "PRESETS",
    "run",
    "complexity_sweep",
    "discrete_demo",
]

EXPERIMENTS = (
    "poisson2d",
    "poisson1d_kernel",
    "burgers",
    "discrete_demo",
    "complexity_sweep",
)
SAMPLERS = ("optimal", "monte_carlo")
FLOAT_FMT = "%.15g"


class ConfigError(ValueError):
    """Invalid experiment configuration; nothing is written."""


@dataclass
class ExperimentConfig:
    """Single JSON-document configuration of one experiment run."""

    experiment: str
    seed: int = 0
    sampling: str = "both"
    delta: float = 0.5
    epsilon: float = 0.5
    trials: int = 3
    n_test: int = 200
    out_dir: str = "runs/out"
    measure: dict = field(default_factory=dict)
    index_set: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    sweep: list = field(default_factory=list)
    d_out: int | None = None
    mode_order: str = "row"
    energy_target: float = 0.95
    sobolev_alphas: list = field(default_factory=lambda: [0.0])
    cloud_size: int = 2000
    write_datasets: bool = True

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def content_hash(self) -> str:
        # identifies the computation; artifact destination and emission
        # switches do not change result rows
        payload = {
            k: v
            for k, v in asdict(self).items()
            if k not in ("out_dir", "write_datasets")
        }
        text = json.dumps(payload, sort_keys=True).encode()
        return hashlib.sha256(text).hexdigest()[:16]

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.sampling not in ("optimal", "monte_carlo", "both"):
            raise ConfigError(f"unknown sampling mode {self.sampling!r}")
        if not (0.0 < self.delta < 1.0 and 0.0 < self.epsilon < 1.0):
            raise ConfigError("delta and epsilon must lie in (0, 1)")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.n_test < 1:
            raise ConfigError("n_test must be >= 1")
        if not self.sweep:
            raise ConfigError("sweep must be a non-empty list")
        if self.mode_order not in ("row", "column"):
            raise ConfigError("mode_order must be 'row' or 'column'")

    def samplers(self) -> tuple[str, ...]:
        return SAMPLERS if self.sampling == "both" else (self.sampling,)


PRESETS: dict[str, dict] = {
    "poisson2d-paper": {
        "experiment": "poisson2d",
        "seed": 20,
        "sampling": "both",
        "trials": 3,
        "n_test": 300,
        "measure": {"alpha_rule": "l1_cubed", "max_mode": 10},
        "sweep": [25, 50, 100],
        "out_dir": "runs/poisson2d",
    },
    "poisson1d-kernel": {
        "experiment": "poisson1d_kernel",
        "seed": 21,
        "sampling": "optimal",
        "trials": 1,
        "n_test": 200,
        "measure": {"alpha_rule": "squared_index", "d_in": 64},
        "sweep": [8, 16, 32, 64],
        "out_dir": "runs/poisson1d_kernel",
    },
    "burgers-nu01": {
        "experiment": "burgers",
        "seed": 22,
        "sampling": "both",
        "trials": 1,
        "n_test": 200,
        "measure": {"alpha_rule": "squared_index", "d_in": 8},
        "index_set": {"gamma_rule": "linear_decay", "degree_cap": 10},
        "solver": {"viscosity": 0.1, "final_time": 0.2},
        "sweep": [2, 4, 6],
        "d_out": 48,
        "out_dir": "runs/burgers_nu01",
    },
    "burgers-nu001": {
        "experiment": "burgers",
        "seed": 22,
        "sampling": "optimal",
        "trials": 1,
        "n_test": 200,
        "measure": {"alpha_rule": "squared_index", "d_in": 8},
        "index_set": {"gamma_rule": "linear_decay", "degree_cap": 10},
        "solver": {"viscosity": 0.01, "final_time": 0.2},
        "sweep": [2, 4, 6],
        "d_out": 48,
        "out_dir": "runs/burgers_nu001",
    },
    "discrete-demo": {
        "experiment": "discrete_demo",
        "seed": 23,
        "sampling": "both",
        "trials": 1,
        "n_test": 200,
        "measure": {"alpha_rule": "squared_index", "d_in": 6},
        "index_set": {"gamma_rule": "uniform", "degree_cap": 10},
        "sweep": [4],
        "d_out": 12,
        "cloud_size": 2000,
        "sobolev_alphas": [-1.0, 0.0, 1.0],
        "out_dir": "runs/discrete_demo",
    },
    "complexity-sweep": {
        "experiment": "complexity_sweep",
        "seed": 24,
        "sampling": "optimal",
        "trials": 1,
        "measure": {"alpha_rule": "squared_index", "d_in": 4},
        "sweep": [16, 32, 64, 128],
        "d_out": 32,
        "out_dir": "runs/complexity",
    },
}


# --------------------------------------------------------------------------
# deterministic sub-seeding and measure construction


def derive_seed(master: int, *tags) -> int:
    text = json.dumps([master, *tags], sort_keys=True, default=str)
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big") >> 1


def select_d_in(variances: np.ndarray, fraction: float) -> int:
    """Smallest prefix of the variance sequence capturing ``fraction`` of it."""
    variances = np.asarray(variances, dtype=float)
    total = variances.sum()
    if total <= 0.0:
        raise ConfigError("variance sequence has no energy")
    cumulative = np.cumsum(variances) / total
    return int(np.searchsorted(cumulative, fraction) + 1)


def build_measure(config: ExperimentConfig) -> tuple[ProductMeasure, np.ndarray | None]:
    """Measure over input modes plus the 2-D mode list when applicable."""
    spec = config.measure
    rule = spec.get("alpha_rule", "squared_index")
    if rule == "l1_cubed":
        max_mode = int(spec.get("max_mode", 10))
        modes = sine_modes_2d(max_mode, config.mode_order)
        alphas = np.sum(modes, axis=1).astype(float) ** 3
        return ProductMeasure.from_alphas(alphas), modes
    if rule == "squared_index":
        if "d_in" in spec and spec["d_in"]:
            d_in = int(spec["d_in"])
        else:
            universe = np.arange(1, 4097)
            d_in = select_d_in(1.0 / (2.0 * universe**2 + 3.0), config.energy_target)
        alphas = np.arange(1, d_in + 1, dtype=float) ** 2
        return ProductMeasure.from_alphas(alphas), None
    if rule == "explicit":
        alphas = np.asarray(spec["alphas"], dtype=float)
        return ProductMeasure.from_alphas(alphas), None
    raise ConfigError(f"unknown alpha rule {rule!r}")


def build_gamma(config: ExperimentConfig, d_in: int) -> np.ndarray:
    rule = config.index_set.get("gamma_rule", "uniform")
    if rule == "uniform":
        return np.ones(d_in)
    if rule == "linear_decay":
        step = config.index_set.get("gamma_step", 0.99 / 20.0)
        gamma = 1.0 - (np.arange(d_in)) * step
        if np.any(gamma <= 0.0):
            raise ConfigError("linear_decay gamma reached zero; reduce d_in or step")
        return gamma
    raise ConfigError(f"unknown gamma rule {rule!r}")


# --------------------------------------------------------------------------
# artifact writing


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return FLOAT_FMT % value
    return str(value)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(format_cell(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def coefficient_header(basis) -> list[str]:
    if isinstance(basis, PolyOperatorBasis):
        return [".".join(str(int(v)) for v in row) for row in basis.scalar_indices]
    if isinstance(basis, LinearRankOneBasis):
        return [str(int(m)) for m in basis.input_modes]
    return [str(j) for j in range(basis.n_eff)]


def write_coefficients(path: Path, estimate, basis) -> None:
    # one column per scalar index (named in the header), one row per output mode
    header = coefficient_header(basis)
    rows = [list(col) for col in estimate.coefficients.T]
    write_csv(path, header, rows)


def dataset_key(operator: str, measure_tag, sampler: str, seed: int, m: int) -> str:
    text = json.dumps([operator, measure_tag, sampler, seed, m], sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:20]


def save_dataset(ds: DataSet, directory: Path, key: str) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    inputs = np.column_stack([ds.inputs, ds.weights])
    header_in = [f"f_{j}" for j in range(ds.inputs.shape[1])] + ["weight"]
    write_csv(directory / f"{key}.inputs.csv", header_in, [list(r) for r in inputs])
    header_out = [f"g_{j}" for j in range(ds.outputs.shape[1])]
    write_csv(
        directory / f"{key}.outputs.csv", header_out, [list(r) for r in ds.outputs]
    )
    (directory / f"{key}.json").write_text(
        json.dumps(ds.provenance, indent=2, sort_keys=True, default=str) + "\n",
        encoding="utf-8",
    )


def load_dataset(directory: Path, key: str) -> DataSet | None:
    paths = [directory / f"{key}{suffix}" for suffix in (".inputs.csv", ".outputs.csv", ".json")]
    if not all(p.exists() for p in paths):
        return None
    raw_in = np.loadtxt(paths[0], delimiter=",", skiprows=1, ndmin=2)
    raw_out = np.loadtxt(paths[1], delimiter=",", skiprows=1, ndmin=2)
    provenance = json.loads(paths[2].read_text(encoding="utf-8"))
    return DataSet(
        inputs=raw_in[:, :-1],
        outputs=raw_out,
        weights=raw_in[:, -1],
        provenance=provenance,
    )


@dataclass
class RunResult:
    status: int
    out_dir: Path
    results_rows: int
    manifest: dict


# --------------------------------------------------------------------------
# shared fitting loop


def draw_training(
    sampler: str, measure, basis, tables, plan, seed: int, m: int
):
    if sampler == "optimal":
        return sample_optimal(plan, tables, RngSeed(seed), m, basis)
    return sample_monte_carlo(measure, RngSeed(seed), m, tables=tables)


def fit_once(basis, samples, weights, outputs):
    system = assemble(basis, samples, weights, outputs)
    summary = gram_diagnostics(system)
    estimate = solve(system, basis)
    return estimate, summary


def error_record(report, summary, cfg_hash: str, **ids) -> dict:
    full = report.with_context(gram=summary, config_hash=cfg_hash).as_dict()
    return {**ids, **full}


def write_error_reports(out: Path, records: list[dict]) -> None:
    (out / "errors.json").write_text(
        json.dumps(records, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


# --------------------------------------------------------------------------
# experiments


def _run_poisson2d(config: ExperimentConfig, out: Path) -> list[list]:
    measure, modes = build_measure(config)
    if modes is None:
        raise ConfigError("poisson2d needs the l1_cubed measure rule")
    d_in = len(measure)
    d_out = config.d_out or d_in
    cfg_hash = config.content_hash()
    rows = []
    gram_rows = []
    coeffs_dir = out / "coeffs"
    coeffs_dir.mkdir(parents=True, exist_ok=True)
    for n_eff in config.sweep:
        n_eff = int(n_eff)
        if n_eff > d_in:
            raise ConfigError(f"N_eff={n_eff} exceeds the {d_in} available modes")
        basis = LinearRankOneBasis.from_measure(measure, np.arange(n_eff), d_out)
        tables = build_induced_tables(measure, basis)
        plan = mixture_plan(basis)
        m = min_samples(n_eff, config.delta, config.epsilon)
        for sampler in config.samplers():
            for trial in range(config.trials):
                seed = derive_seed(config.seed, "train", n_eff, sampler, trial)
                samples, weights = draw_training(
                    sampler, measure, basis, tables, plan, seed, m
                )
                ds = build_dataset(
                    samples, weights, "poisson2d", modes_2d=modes, d_out=d_out,
                    seed=seed, sampler=sampler,
                )
                estimate, summary = fit_once(basis, ds.inputs, ds.weights, ds.outputs)
                test_seed = derive_seed(config.seed, "test", n_eff, trial)
                test_x, _ = sample_monte_carlo(
                    measure, RngSeed(test_seed), config.n_test, tables=tables
                )
                truth = build_dataset(
                    test_x, np.ones(config.n_test), "poisson2d",
                    modes_2d=modes, d_out=d_out, seed=test_seed, sampler="monte_carlo",
                ).outputs
                report = empirical_bochner_error(truth, estimate.predict(test_x))
                rows.append(
                    [n_eff, sampler, trial, m, summary.condition,
                     summary.spectral_gap, report.absolute,
                     report.relative if report.relative is not None else math.nan,
                     cfg_hash]
                )
                gram_rows.append(
                    [n_eff, sampler, trial, summary.spectral_gap,
                     summary.condition, summary.block_size,
                     summary.stable(config.delta), cfg_hash]
                )
                if trial == 0 and sampler == "optimal":
                    write_coefficients(
                        coeffs_dir / f"poisson2d_neff{n_eff}.csv", estimate, basis
                    )
                if config.write_datasets:
                    key = dataset_key("poisson2d", cfg_hash, sampler, seed, m)
                    if load_dataset(out / "dataset", key) is None:
                        save_dataset(ds, out / "dataset", key)
    write_csv(
        out / "results.csv",
        ["N_eff", "sampling", "trial", "M", "cond_G", "gap", "test_error",
         "rel_test_error", "config_hash"],
        rows,
    )
    write_csv(
        out / "gram.csv",
        ["N_eff", "sampling", "trial", "gap", "cond", "block_size", "stable",
         "config_hash"],
        gram_rows,
    )
    return rows


def _run_poisson1d_kernel(config: ExperimentConfig, out: Path) -> list[list]:
    measure, _ = build_measure(config)
    d_in = len(measure)
    d_out = config.d_out or d_in
    cfg_hash = config.content_hash()
    grid = np.linspace(0.0, 1.0, 101)
    exact = greens_kernel(grid[:, None], grid[None, :])
    rows = []
    gram_rows = []
    coeffs_dir = out / "coeffs"
    coeffs_dir.mkdir(parents=True, exist_ok=True)
    for n_eff in config.sweep:
        n_eff = int(n_eff)
        basis = LinearRankOneBasis.from_measure(measure, np.arange(n_eff), d_out)
        tables = build_induced_tables(measure, basis)
        plan = mixture_plan(basis)
        m = min_samples(n_eff, config.delta, config.epsilon)
        for sampler in config.samplers():
            for trial in range(config.trials):
                seed = derive_seed(config.seed, "train", n_eff, sampler, trial)
                samples, weights = draw_training(
                    sampler, measure, basis, tables, plan, seed, m
                )
                ds = build_dataset(
                    samples, weights, "poisson1d", d_out=d_out,
                    seed=seed, sampler=sampler,
                )
                estimate, summary = fit_once(basis, ds.inputs, ds.weights, ds.outputs)
                kernel = reconstruct_kernel(estimate, grid, grid)
                sup_err = float(np.max(np.abs(kernel - exact)))
                test_seed = derive_seed(config.seed, "test", n_eff, trial)
                test_x, _ = sample_monte_carlo(
                    measure, RngSeed(test_seed), config.n_test, tables=tables
                )
                truth = build_dataset(
                    test_x, np.ones(config.n_test), "poisson1d", d_out=d_out,
                    seed=test_seed, sampler="monte_carlo",
                ).outputs
                report = empirical_bochner_error(truth, estimate.predict(test_x))
                rows.append(
                    [n_eff, sampler, trial, m, summary.condition,
                     summary.spectral_gap, report.absolute, sup_err, cfg_hash]
                )
                gram_rows.append(
                    [n_eff, sampler, trial, summary.spectral_gap, summary.condition,
                     summary.block_size, summary.stable(config.delta), cfg_hash]
                )
                if trial == 0:
                    write_coefficients(
                        coeffs_dir / f"kernel_neff{n_eff}.csv", estimate, basis
                    )
    write_csv(
        out / "results.csv",
        ["N_eff", "sampling", "trial", "M", "cond_G", "gap", "test_error",
         "kernel_sup_error", "config_hash"],
        rows,
    )
    write_csv(
        out / "gram.csv",
        ["N_eff", "sampling", "trial", "gap", "cond", "block_size", "stable",
         "config_hash"],
        gram_rows,
    )
    return rows


def _run_burgers(config: ExperimentConfig, out: Path) -> list[list]:
    measure, _ = build_measure(config)
    d_in = len(measure)
    d_out = config.d_out or 48
    solver = BurgersConfig.create(
        viscosity=float(config.solver.get("viscosity", 0.1)),
        final_time=float(config.solver.get("final_time", 0.2)),
        d_in=d_in,
        d_out=d_out,
        dt=config.solver.get("dt"),
        d_solve=config.solver.get("d_solve"),
        grid_size=config.solver.get("grid_size"),
    )
    gamma = build_gamma(config, d_in)
    cap = int(config.index_set.get("degree_cap", 10))
    cfg_hash = config.content_hash()
    rows = []
    gram_rows = []
    coeffs_dir = out / "coeffs"
    coeffs_dir.mkdir(parents=True, exist_ok=True)
    for k in config.sweep:
        spec = IndexSetSpec(
            kind="hyperbolic_cross", radius=float(k), gamma=gamma, degree_cap=cap
        )
        indices = generate(spec)
        basis = PolyOperatorBasis.build(measure, indices, d_out)
        n_eff = basis.n_eff
        tables = build_induced_tables(measure, basis)
        plan = mixture_plan(basis)
        m = int(math.ceil(n_eff * math.log(max(n_eff, 2))))
        test_seed = derive_seed(config.seed, "test", k)
        test_x, _ = sample_monte_carlo(
            measure, RngSeed(test_seed), config.n_test, tables=tables
        )
        test_key = dataset_key("burgers", [cfg_hash, k], "test", test_seed, config.n_test)
        test_ds = load_dataset(out / "dataset", test_key)
        if test_ds is None:
            test_ds = build_dataset(
                test_x, np.ones(config.n_test), "burgers",
                burgers_config=solver, d_out=d_out, seed=test_seed,
                sampler="monte_carlo",
            )
            if config.write_datasets:
                save_dataset(test_ds, out / "dataset", test_key)
        for sampler in config.samplers():
            for trial in range(config.trials):
                seed = derive_seed(config.seed, "train", k, sampler, trial)
                key = dataset_key("burgers", [cfg_hash, k], sampler, seed, m)
                ds = load_dataset(out / "dataset", key)
                if ds is None:
                    samples, weights = draw_training(
                        sampler, measure, basis, tables, plan, seed, m
                    )
                    ds = build_dataset(
                        samples, weights, "burgers", burgers_config=solver,
                        d_out=d_out, seed=seed, sampler=sampler,
                    )
                    if config.write_datasets:
                        save_dataset(ds, out / "dataset", key)
                estimate, summary = fit_once(basis, ds.inputs, ds.weights, ds.outputs)
                report = empirical_bochner_error(
                    test_ds.outputs, estimate.predict(test_x)
                )
                lost = energy_fraction_lost(test_ds.outputs, d_out)
                rows.append(
                    [k, n_eff, sampler, trial, m, summary.condition,
                     summary.spectral_gap, report.absolute,
                     report.relative if report.relative is not None else math.nan,
                     lost, cfg_hash]
                )
                gram_rows.append(
                    [n_eff, sampler, trial, summary.spectral_gap, summary.condition,
                     summary.block_size, summary.stable(config.delta), cfg_hash]
                )
                if trial == 0 and sampler == "optimal":
                    write_coefficients(
                        coeffs_dir / f"burgers_k{k}.csv", estimate, basis
                    )
    write_csv(
        out / "results.csv",
        ["k", "N_eff", "sampling", "trial", "M", "cond_G", "gap", "test_error",
         "rel_test_error", "energy_fraction_lost", "config_hash"],
        rows,
    )
    write_csv(
        out / "gram.csv",
        ["N_eff", "sampling", "trial", "gap", "cond", "block_size", "stable",
         "config_hash"],
        gram_rows,
    )
    return rows


def synthetic_cloud(measure: ProductMeasure, size: int, seed: int) -> np.ndarray:
    """Correlated (non-product) cloud: a unit-lower-bidiagonal mix of draws."""
    z, _ = sample_monte_carlo(measure, RngSeed(seed), size)
    mix = np.eye(len(measure)) + 0.4 * np.eye(len(measure), k=-1)
    return z @ mix.T


def demo_target(points: np.ndarray, d_out: int) -> np.ndarray:
    """Smooth synthetic map used by the discrete demonstration."""
    d_in = points.shape[1]
    cols = [
        np.sin(points[:, o % d_in] + 0.5 * points[:, 0]) / (1.0 + o)
        for o in range(d_out)
    ]
    return np.column_stack(cols)


def discrete_demo(config: ExperimentConfig, out: Path | None = None) -> list[list]:
    """Leverage-score fitting on a synthetic correlated cloud.

    Builds reference polynomial features, orthonormalizes them on the cloud,
    and compares leverage-score draws with uniform draws, reporting
    conditioning and Sobolev-weighted cloud errors for each configured alpha.
    """
    out = Path(out or config.out_dir)
    measure, _ = build_measure(config)
    d_in = len(measure)
    d_out = config.d_out or 12
    cap = int(config.index_set.get("degree_cap", 10))
    gamma = build_gamma(config, d_in)
    cfg_hash = config.content_hash()
    cloud = synthetic_cloud(measure, config.cloud_size, derive_seed(config.seed, "cloud"))
    targets = demo_target(cloud, d_out)
    output_modes = np.arange(1, d_out + 1)
    rows = []
    for k in config.sweep:
        spec = IndexSetSpec(
            kind="hyperbolic_cross", radius=float(k), gamma=gamma, degree_cap=cap
        )
        indices = generate(spec)
        ref_basis = PolyOperatorBasis.build(measure, indices, d_out)

        def raw_features(x, _b=ref_basis):
            return _b.scalar_features(x, warn_extrapolation=False)

        plan = build_discrete_plan(cloud, raw_features)
        basis = DiscreteFeatureBasis(plan=plan, raw_features=raw_features, d_out=d_out)
        n_eff = plan.n_eff
        m = min_samples(n_eff, config.delta, config.epsilon)
        for sampler in config.samplers():
            for trial in range(config.trials):
                seed = derive_seed(config.seed, "train", k, sampler, trial)
                if sampler == "optimal":
                    idx, weights = sample_discrete(plan, RngSeed(seed), m)
                else:
                    u = RngSeed(seed).uniform_block(m, 1)[:, 0]
                    idx = np.minimum(
                        (u * plan.n_points).astype(int), plan.n_points - 1
                    )
                    weights = np.ones(m)
                for alpha in config.sobolev_alphas:
                    weighting = SobolevWeighting.for_modes(float(alpha), output_modes)
                    train_out = scale_outputs(targets[idx], weighting)
                    estimate, summary = fit_once(
                        basis, cloud[idx], weights, train_out
                    )
                    predicted = unscale_outputs(estimate.predict(cloud), weighting)
                    report = empirical_bochner_error(targets, predicted, weighting)
                    rows.append(
                        [k, n_eff, sampler, trial, float(alpha), m,
                         summary.condition, summary.spectral_gap, report.absolute,
                         report.relative if report.relative is not None else math.nan,
                         report.mean_of_ratios
                         if report.mean_of_ratios is not None else math.nan,
                         cfg_hash]
                    )
    out.mkdir(parents=True, exist_ok=True)
    write_csv(
        out / "results.csv",
        ["k", "N_eff", "sampling", "trial", "alpha", "M", "cond_G", "gap",
         "test_error", "rel_test_error", "mean_of_ratios", "config_hash"],
        rows,
    )
    return rows


def total_degree_prefix(d_in: int, n_eff: int) -> np.ndarray:
    """First ``n_eff`` indices (canonical order) of a total-degree ball.

    Prefixes of the canonical enumeration are monotone lower sets.
    """
    radius = 0
    while math.comb(radius + d_in, d_in) < n_eff:
        radius += 1
    spec = IndexSetSpec(
        kind="lp_ball", p=1.0, radius=float(radius), gamma=np.ones(d_in),
        degree_cap=radius,
    )
    return generate(spec)[:n_eff]


def complexity_sweep(config: ExperimentConfig, out: Path | None = None) -> list[list]:
    """Wall-time table of system assembly vs. solve across ``N_eff``.

    At ``M > 4 N_eff`` assembly is expected to dominate the solve; the
    comparison is recorded per row, never hard-asserted (timing noise).
    """
    out = Path(out or config.out_dir)
    measure, _ = build_measure(config)
    d_out = config.d_out or 32
    cfg_hash = config.content_hash()
    rows = []
    for n_eff in config.sweep:
        n_eff = int(n_eff)
        indices = total_degree_prefix(len(measure), n_eff)
        basis = PolyOperatorBasis.build(measure, indices, d_out)
        tables = build_induced_tables(measure, basis)
        plan = mixture_plan(basis)
        m = 5 * n_eff
        seed = derive_seed(config.seed, "complexity", n_eff)
        samples, weights = sample_optimal(plan, tables, RngSeed(seed), m, basis)
        outputs = demo_target(samples, d_out)
        t0 = time.perf_counter()
        system = assemble(basis, samples, weights, outputs)
        t1 = time.perf_counter()
        solve(system, basis)
        t2 = time.perf_counter()
        t_assemble, t_solve = t1 - t0, t2 - t1
        rows.append(
            [n_eff, m, d_out, t_assemble, t_solve, t_assemble >= t_solve, cfg_hash]
        )
    out.mkdir(parents=True, exist_ok=True)
    write_csv(
        out / "results.csv",
        ["N_eff", "M", "d_out", "t_assemble", "t_solve", "assemble_ge_solve",
         "config_hash"],
        rows,
    )
    return rows


# --------------------------------------------------------------------------
# entry point


def run(config: ExperimentConfig) -> RunResult:
    """Validate, execute, and write all artifacts of one experiment run."""
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.experiment == "poisson2d":
        rows = _run_poisson2d(config, out)
    elif config.experiment == "poisson1d_kernel":
        rows = _run_poisson1d_kernel(config, out)
    elif config.experiment == "burgers":
        rows = _run_burgers(config, out)
    elif config.experiment == "discrete_demo":
        rows = discrete_demo(config, out)
    else:
        rows = complexity_sweep(config, out)
    manifest = {
        "config": asdict(config),
        "config_hash": config.content_hash(),
        "package_version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "results_rows": len(rows),
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return RunResult(status=0, out_dir=out, results_rows=len(rows), manifest=manifest)
