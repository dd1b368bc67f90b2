"""Reproducible simulation of the test statistic under the null.

Replicates are generated in fixed-size blocks. Block ``b`` draws from a
Philox generator keyed by ``SeedSequence(seed, spawn_key=(b,))``, so the
statistics, and everything aggregated from them, depend only on
``(seed, reps)`` and not on how many worker threads process the blocks.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import smallest_eigenvalue
from .exceptions import DomainError
from .specfun import chi2_quantile

__all__ = [
    "BLOCK_SIZE",
    "SIZE_GRID_P",
    "SIZE_GRID_KAPPA",
    "SIZE_GRID_ALPHA",
    "PUBLISHED_SIZE_PERCENT",
    "SimulationConfig",
    "SizeRow",
    "SizeTable",
    "EmpiricalCdf",
    "sample_statistic",
    "simulate_statistics",
    "simulate_sizes",
    "simulate_cdf",
    "reproduce_size_table",
    "dkw_epsilon",
]

#: Replicates per random stream. Part of the reproducibility contract.
BLOCK_SIZE = 8192

SIZE_GRID_P = (2, 5, 10, 20)
SIZE_GRID_KAPPA = (0.0, 5.0, 20.0)
SIZE_GRID_ALPHA = (0.01, 0.05, 0.10)

#: Published simulated sizes in percent, keyed by ``(p, kappa, alpha)``.
PUBLISHED_SIZE_PERCENT = {
    (p, k, a): v
    for p, row in {
        2: (0, 0.2, 0.7, 0.3, 2.2, 4.3, 1.3, 5.8, 9),
        5: (0, 0.1, 0.6, 0.2, 1.3, 3.8, 0.8, 3.7, 8.1),
        10: (0, 0.1, 0.4, 0.1, 0.8, 3.2, 0.7, 2.5, 7.2),
        20: (0, 0, 0.3, 0.1, 0.5, 2.5, 0.5, 1.7, 6),
    }.items()
    for (a, k), v in zip([(a, k) for a in SIZE_GRID_ALPHA for k in SIZE_GRID_KAPPA], row)
}


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one simulation study.

    ``parameterization`` picks the member of the null orbit that is
    sampled: ``"canonical"`` uses ``beta = 0``, ``mu_1 = sqrt(kappa) e_1``;
    ``"diagonal"`` uses ``beta = 1``, ``mu_1 = mu_2 = sqrt(kappa/2) e_1``.
    Both have the same noncentrality.
    """

    p: int
    kappa: float = 0.0
    reps: int = 100_000
    seed: int = 0
    alphas: tuple = SIZE_GRID_ALPHA
    parameterization: str = "canonical"

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 2:
            raise DomainError(f"p must be an integer >= 2, got {self.p}")
        if not (self.kappa >= 0.0) or not math.isfinite(self.kappa):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa}")
        if int(self.reps) != self.reps or self.reps < 1:
            raise DomainError(f"reps must be a positive integer, got {self.reps}")
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        alphas = tuple(float(a) for a in self.alphas)
        if any(not (0.0 < a < 1.0) for a in alphas):
            raise DomainError(f"alphas must lie in (0, 1), got {alphas}")
        if list(alphas) != sorted(alphas):
            raise DomainError("alphas must be sorted ascending")
        if self.parameterization not in ("canonical", "diagonal"):
            raise DomainError(f"unknown parameterization {self.parameterization!r}")
        object.__setattr__(self, "alphas", alphas)


@dataclass(frozen=True)
class SizeRow:
    p: int
    kappa: float
    alpha: float
    reps: int
    rejections: int

    @property
    def size(self) -> float:
        return self.rejections / self.reps

    @property
    def stderr(self) -> float:
        s = self.size
        return math.sqrt(s * (1.0 - s) / self.reps)


@dataclass
class SizeTable:
    """Rejection counts indexed by ``(p, kappa, alpha)``."""

    rows: list = field(default_factory=list)

    def __getitem__(self, key) -> SizeRow:
        p, kappa, alpha = key
        for row in self.rows:
            if row.p == p and row.kappa == kappa and math.isclose(row.alpha, alpha):
                return row
        raise KeyError(key)

    def extend(self, other: "SizeTable"):
        self.rows.extend(other.rows)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Sorted simulated statistics and their CDF evaluated on a grid."""

    values: np.ndarray
    grid: np.ndarray
    cdf: np.ndarray

    def __call__(self, x):
        """Empirical CDF at arbitrary points (right-continuous)."""
        return np.searchsorted(self.values, np.asarray(x, dtype=float), side="right") / self.values.size


def _means(p, kappa, parameterization):
    mu_x = np.zeros(p)
    mu_y = np.zeros(p)
    if parameterization == "canonical":
        mu_x[0] = math.sqrt(kappa)
    else:
        mu_x[0] = mu_y[0] = math.sqrt(0.5 * kappa)
    return mu_x, mu_y


def sample_statistic(p, kappa, rng, parameterization="canonical"):
    """Draw one ``(X, Y)`` pair from the null model and return ``lambda2(S)``.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    mu_x, mu_y = _means(p, kappa, parameterization)
    x = rng.standard_normal(p) + mu_x
    y = rng.standard_normal(p) + mu_y
    return float(smallest_eigenvalue(x @ x, x @ y, y @ y))


def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def _simulate_block(p, kappa, parameterization, seed, block, n):
    rng = _block_rng(seed, block)
    mu_x, mu_y = _means(p, kappa, parameterization)
    # replicate-major layout: the first k rows do not depend on n
    z = rng.standard_normal((n, 2, p))
    x = z[:, 0] + mu_x
    y = z[:, 1] + mu_y
    sxx = np.einsum("ij,ij->i", x, x)
    sxy = np.einsum("ij,ij->i", x, y)
    syy = np.einsum("ij,ij->i", y, y)
    return smallest_eigenvalue(sxx, sxy, syy)


def simulate_statistics(config: SimulationConfig, workers: int = 1) -> np.ndarray:
    """``config.reps`` independent null statistics, in replicate order.

    The result is bit-identical for any ``workers``.
    """
    n_blocks = -(-config.reps // BLOCK_SIZE)
    sizes = [min(BLOCK_SIZE, config.reps - b * BLOCK_SIZE) for b in range(n_blocks)]

    def run(b):
        return _simulate_block(config.p, config.kappa, config.parameterization, config.seed, b, sizes[b])

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(b) for b in range(n_blocks)]
    return np.concatenate(parts)


def simulate_sizes(config: SimulationConfig, workers: int = 1) -> SizeTable:
    """Fraction of replicates rejected by the chi-square(p-1) test at each alpha."""
    stats = simulate_statistics(config, workers)
    rows = []
    for alpha in config.alphas:
        critical = chi2_quantile(config.p - 1, 1.0 - alpha)
        rows.append(SizeRow(config.p, config.kappa, alpha, config.reps, int(np.count_nonzero(stats > critical))))
    return SizeTable(rows)


def simulate_cdf(config: SimulationConfig, grid, workers: int = 1) -> EmpiricalCdf:
    """Empirical distribution function of the statistic on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) < 0):
        raise DomainError("grid must be a sorted one-dimensional sequence")
    values = np.sort(simulate_statistics(config, workers))
    cdf = np.searchsorted(values, grid, side="right") / values.size
    return EmpiricalCdf(values, grid, cdf)


def reproduce_size_table(reps=100_000, seed=20200101, workers=1) -> SizeTable:
    """Simulated sizes for all 36 published cells.

    Cell ``(p, kappa)`` uses seed ``seed + 100 p + kappa``, so the cells
    are independent of each other.
    """
    table = SizeTable()
    for p in SIZE_GRID_P:
        for kappa in SIZE_GRID_KAPPA:
            cfg = SimulationConfig(p, kappa, reps, seed + 100 * p + int(kappa), SIZE_GRID_ALPHA)
            table.extend(simulate_sizes(cfg, workers))
    return table


def dkw_epsilon(n, confidence=0.999):
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band for ``n`` samples."""
    return math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * n))
