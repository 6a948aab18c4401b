"""Monte Carlo experiment driver and verification suites."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameters
from .estimator import StreamingEstimator
from .model import NoiseSpec, SpdeCoefficients, basis_1d
from .sampling import ThinnedDesign, build_design
from .simulate import ModeState, evolve, iter_field_slices
from .theory import (
    PsiQuery,
    ThetaVector,
    bessel_combination_identity_check,
    bessel_combination_integral,
    expected_quadratic_variation,
    g_limit,
    psi_reference,
    psi_with_error,
    weight_integral,
)

log = logging.getLogger(__name__)

WORKERS_ENV = "SPDE_DAMPING_WORKERS"

TABLE_B = [0.02, 0.04, 0.06, 0.08, 0.1]
TABLE_M1 = [20, 30, 40, 50, 60, 70, 80, 90]


@dataclass
class ExperimentConfig:
    coeffs: SpdeCoefficients = field(
        default_factory=lambda: SpdeCoefficients(theta0=0.0, theta1=0.2, eta1=0.2, theta2=0.2, sigma=1.0)
    )
    noise: NoiseSpec = field(default_factory=lambda: NoiseSpec(alpha=0.5, mu0=-19.5, trunc_k=1000, trunc_l=1000))
    N: int = 1000
    b_values: list = field(default_factory=lambda: list(TABLE_B))
    m1_values: list = field(default_factory=lambda: list(TABLE_M1))
    replications: int = 50
    seed: int = 20240607
    workers: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise InvalidParameters("replications must be positive")
        if self.workers < 1:
            raise InvalidParameters("workers must be positive")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            self.designs()

    def designs(self) -> list[ThinnedDesign]:
        """Cells in table order: m1-major, then b."""
        return [build_design(b, m1, self.N) for m1 in self.m1_values for b in self.b_values]

    @classmethod
    def full_scale(cls, **overrides) -> "ExperimentConfig":
        warnings.warn(
            "full-scale setting (K = L = 10^4, 200 replications) takes days on a desktop", RuntimeWarning
        )
        cfg = dict(noise=NoiseSpec(alpha=0.5, mu0=-19.5, trunc_k=10_000, trunc_l=10_000), replications=200)
        cfg.update(overrides)
        return cls(**cfg)

    def to_dict(self) -> dict:
        return {
            "coeffs": self.coeffs.as_dict(),
            "noise": self.noise.as_dict(),
            "N": self.N,
            "b_values": list(self.b_values),
            "m1_values": list(self.m1_values),
            "replications": self.replications,
            "seed": self.seed,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - {"coeffs", "noise", "N", "b_values", "m1_values", "replications", "seed", "workers"}
        if unknown:
            raise InvalidParameters(f"unknown config keys: {sorted(unknown)}")
        base = cls()
        if "coeffs" in d:
            d["coeffs"] = SpdeCoefficients(**{**base.coeffs.as_dict(), **d["coeffs"]})
        if "noise" in d:
            d["noise"] = NoiseSpec(**{**base.noise.as_dict(), **d["noise"]})
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class CellResult:
    b: float
    m1: int
    mean_alpha_hat: float
    sd_alpha_hat: float
    replications: int
    elapsed_seconds: float
    alpha_hats: list = field(default_factory=list, repr=False)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    cells: list
    seed: int
    interrupted: bool = False

    def cell(self, b: float, m1: int) -> CellResult:
        for c in self.cells:
            if c.m1 == m1 and math.isclose(c.b, b):
                return c
        raise KeyError((b, m1))


def _index_map(union: np.ndarray, coords: np.ndarray) -> np.ndarray:
    return np.searchsorted(union, coords)


def run_replication(config: ExperimentConfig, replication: int) -> tuple[list[float], list[float]]:
    """alpha_hat for every cell of one replication, sharing one set of mode paths.

    Returns ``(alpha_hats, cell_seconds)`` in table order.
    """
    designs = config.designs()
    # coordinates are built as b + (1-2b)*(j/m1), so shared points are bitwise equal
    union = np.unique(np.concatenate([d.fine_coords for d in designs]))
    idx = [_index_map(union, d.fine_coords) for d in designs]
    ests = [StreamingEstimator(d) for d in designs]
    k, l = config.noise.trunc_k, config.noise.trunc_l

    e1t = np.ascontiguousarray(basis_1d(k, union, config.coeffs.kappa).T)
    e2 = [np.ascontiguousarray(basis_1d(l, d.fine_coords, config.coeffs.eta)) for d in designs]
    spent = [0.0] * len(designs)
    t_sim = 0.0

    # the y-contraction is shared by all cells; the z-contraction is per cell
    state = ModeState.zeros(k, l)
    dt = 1.0 / config.N
    for i in range(config.N + 1):
        t0 = time.perf_counter()
        if i:
            state = evolve(state, config.coeffs, config.noise, dt, config.seed, replication)
        partial = e1t @ state.coefficients
        t_sim += time.perf_counter() - t0
        for c, (est, ix, e2c) in enumerate(zip(ests, idx, e2)):
            t1 = time.perf_counter()
            est.push(partial[ix] @ e2c)
            spent[c] += time.perf_counter() - t1
    share = t_sim / len(designs)
    return [e.estimate().alpha_hat for e in ests], [s + share for s in spent]


def _replication_task(args):
    cfg_dict, rep = args
    return rep, run_replication(ExperimentConfig.from_dict(cfg_dict), rep)


def _sample_sd(xs: list[float]) -> float:
    if len(xs) < 2:
        return 0.0
    mean = math.fsum(xs) / len(xs)
    return math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1))


def _aggregate(config: ExperimentConfig, per_rep: dict, interrupted: bool) -> ExperimentResult:
    designs = config.designs()
    reps = sorted(per_rep)
    cells = []
    for c, d in enumerate(designs):
        xs = [per_rep[r][0][c] for r in reps]
        secs = math.fsum(per_rep[r][1][c] for r in reps)
        mean = math.fsum(xs) / len(xs) if xs else math.nan
        cells.append(CellResult(d.b, d.m1, mean, _sample_sd(xs), len(xs), secs, xs))
    return ExperimentResult(config, cells, config.seed, interrupted)


def effective_workers(config: ExperimentConfig) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise InvalidParameters(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
        if n < 1:
            raise InvalidParameters(f"{WORKERS_ENV} must be positive")
        return n
    return config.workers


def run_experiment(config: ExperimentConfig, raw_path=None, progress: bool = False) -> ExperimentResult:
    """Run every replication and aggregate per-cell mean and SD of alpha_hat.

    Replication ``r`` draws all of its randomness from streams keyed by
    ``(seed, r)``, and aggregation runs in replication order, so results do
    not depend on the worker count.  Per-replication estimates are appended to
    ``raw_path`` as they finish; on KeyboardInterrupt the completed
    replications are aggregated and returned with ``interrupted=True``.
    """
    workers = effective_workers(config)
    per_rep: dict = {}
    designs = config.designs()
    raw_fh = open(raw_path, "w", newline="") if raw_path else None
    raw_writer = None
    if raw_fh:
        raw_writer = csv.writer(raw_fh)
        raw_writer.writerow(["replication", "b", "m1", "alpha_hat"])

    def record(rep, result):
        per_rep[rep] = result
        if raw_writer:
            for d, a in zip(designs, result[0]):
                raw_writer.writerow([rep, repr(d.b), d.m1, repr(a)])
            raw_fh.flush()
        if progress:
            log.info("replication %d done (%d/%d)", rep, len(per_rep), config.replications)

    interrupted = False
    try:
        if workers == 1:
            for rep in range(config.replications):
                record(rep, run_replication(config, rep))
        else:
            tasks = [(config.to_dict(), rep) for rep in range(config.replications)]
            with ProcessPoolExecutor(workers) as pool:
                for rep, result in pool.map(_replication_task, tasks):
                    record(rep, result)
    except KeyboardInterrupt:
        interrupted = True
        log.warning("interrupted after %d replications; aggregating partial results", len(per_rep))
    finally:
        if raw_fh:
            raw_fh.close()
    return _aggregate(config, per_rep, interrupted)


TABLE_COLUMNS = ["b", "m1", "mean_alpha_hat", "sd_alpha_hat", "replications", "seed"]


def emit_table(result: ExperimentResult | None, path) -> None:
    """CSV with one row per cell, m1-major then b."""
    cells = [] if result is None else sorted(result.cells, key=lambda c: (c.m1, c.b))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TABLE_COLUMNS)
        for c in cells:
            w.writerow([repr(c.b), c.m1, repr(c.mean_alpha_hat), repr(c.sd_alpha_hat), c.replications, result.seed])


# ---------------------------------------------------------------- verification

@dataclass
class Check:
    name: str
    passed: bool
    detail: dict


@dataclass
class VerifyReport:
    suite: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> str:
        return json.dumps(
            {
                "suite": self.suite,
                "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, **c.detail} for c in self.checks],
            },
            indent=2,
        )


PSI_GRID = [(r, a, t2) for r in (0.5, 1.0, 2.0) for a in (0.3, 0.5, 1.0, 1.5) for t2 in (0.2, 1.0)]


def check_psi_grid(rel: float = 1e-8) -> list[Check]:
    """Positivity and dual-quadrature agreement of psi on the 3 x 4 x 2 grid."""
    out = []
    worst = 0.0
    all_pos = True
    for r, a, t2 in PSI_GRID:
        v = psi_with_error(PsiQuery(r, a, t2, rel)).value
        ref = psi_reference(r, a, t2, panels=64)
        ref2 = psi_reference(r, a, t2, panels=128)
        all_pos &= v > 0
        worst = max(worst, abs(v - ref) / abs(ref), abs(ref2 - ref) / abs(ref))
    out.append(Check("psi_positive", bool(all_pos), {"grid_points": len(PSI_GRID)}))
    out.append(Check("psi_dual_quadrature", worst <= rel, {"max_rel_diff": worst, "tol": rel}))
    return out


def check_psi_scaling(rel: float = 1e-8) -> Check:
    worst = 0.0
    for r, a, t2 in PSI_GRID:
        lhs = psi_with_error(PsiQuery(r, a, t2, 1e-10)).value
        rhs = t2 ** (a - 1) * psi_with_error(PsiQuery(r / math.sqrt(t2), a, 1.0, 1e-10)).value
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return Check("psi_scaling_identity", worst <= rel, {"max_rel_diff": worst, "tol": rel})


def check_bessel_identity(xs=(0.1, 1.0, 5.0, 20.0)) -> list[Check]:
    values = [bessel_combination_identity_check(x) for x in xs]
    diffs = [abs(v - bessel_combination_integral(x)) for x, v in zip(xs, values)]
    return [
        Check("bessel_combination_nonnegative", min(values) >= -1e-12, {"min_value": min(values)}),
        Check("bessel_combination_integral_form", max(diffs) <= 1e-8, {"max_abs_diff": max(diffs)}),
    ]


def weight_integral_2d_quadrature(kappa: float, eta: float, b: float, n: int = 400) -> float:
    """Tensor Gauss-Legendre approximation of ``int int exp(-kappa y - eta z)``."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 - b
    y = 0.5 + half * x
    wy = half * w
    return float((wy * np.exp(-kappa * y)) @ np.ones(n)) * float((wy * np.exp(-eta * y)) @ np.ones(n))


def check_g_closed_form() -> Check:
    worst = 0.0
    for kappa, eta in [(0.0, 0.0), (1.0, 1.0), (1.0, -0.5), (3.0, 0.2), (1e-8, 2.0)]:
        for b in (0.02, 0.1, 0.3):
            closed = weight_integral(kappa, b) * weight_integral(eta, b)
            quad = weight_integral_2d_quadrature(kappa, eta, b)
            worst = max(worst, abs(closed - quad) / quad)
    return Check("g_weight_closed_form", worst <= 1e-10, {"max_rel_diff": worst, "tol": 1e-10})


def check_oracle_mc(
    replications: int = 500, trunc: int = 64, N: int = 100, m1: int = 10, b: float = 0.1, seed: int = 7
) -> Check:
    """Monte Carlo mean of the normalized fine-level variation vs its series value."""
    coeffs = SpdeCoefficients(0.0, 0.2, 0.2, 0.2, 1.0)
    noise = NoiseSpec(0.5, -19.5, trunc, trunc)
    design = build_design(b, m1, N)
    target = expected_quadratic_variation(design, coeffs, noise)
    zs = []
    for rep in range(replications):
        est = StreamingEstimator(design)
        for _, sl in iter_field_slices(coeffs, noise, N, design.fine_coords, design.fine_coords, seed, rep):
            est.push(sl)
        zs.append(est.pair().v_fine / design.dt**noise.alpha)
    mean = math.fsum(zs) / len(zs)
    se = _sample_sd(zs) / math.sqrt(len(zs))
    return Check(
        "oracle_monte_carlo",
        abs(mean - target) <= 3 * se,
        {"mc_mean": mean, "series": target, "std_error": se, "z": (mean - target) / se},
    )


def step1_gaps(trunc: int = 2000, b: float = 0.1, pairs=((100, 20), (400, 40)), coeffs=None, alpha=0.5, mu0=-19.5):
    """|EQV - g| / g for designs with equal r = delta / sqrt(Delta)."""
    coeffs = coeffs or SpdeCoefficients(0.0, 0.2, 0.2, 0.2, 1.0)
    noise = NoiseSpec(alpha, mu0, trunc, trunc)
    theta = ThetaVector.from_coefficients(coeffs)
    gaps = []
    for N, m1 in pairs:
        d = build_design(b, m1, N)
        g = g_limit(d.r, alpha, theta, b, rel_tol=1e-10)
        e = expected_quadratic_variation(d, coeffs, noise)
        gaps.append({"N": N, "m1": m1, "r": d.r, "eqv": e, "g": g, "rel_gap": abs(e - g) / g})
    return gaps


def check_step1_convergence(trunc: int = 2000) -> Check:
    gaps = step1_gaps(trunc)
    factor = gaps[0]["rel_gap"] / gaps[1]["rel_gap"]
    return Check("step1_convergence", 2.5 <= factor <= 6.0, {"factor": factor, "window": [2.5, 6.0], "gaps": gaps})


def verify(suite: str) -> VerifyReport:
    if suite == "identities":
        checks = [*check_psi_grid(), check_psi_scaling(), *check_bessel_identity(), check_g_closed_form()]
    elif suite == "oracle":
        checks = [check_oracle_mc()]
    elif suite == "convergence":
        checks = [check_step1_convergence()]
    else:
        raise InvalidParameters(f"unknown suite {suite!r}; choose identities, oracle or convergence")
    return VerifyReport(suite, checks)
