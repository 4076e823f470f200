"""Bayesian search over (beta, tau) to match a ground-truth adopter count.

A Gaussian process with a fixed RBF kernel models the discrepancy
|target - predicted| over a discrete (beta, tau) grid; expected improvement
picks the next point, the booster is retrained there, and the loop stops
once the discrepancy falls within 15% of the target or the round budget
runs out.  Training depends on beta only, so models and predicted
probabilities are memoized per beta column of the grid.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import ndtr

from .boosting import GbtParams, LossParams, predict_proba, train_gbt
from .preprocess import LabeledDataset
from .records import AdopterTarget, HouseholdTable
from .seeds import rng_for

BETA_STEP = 0.01
BETA_COUNT = 201  # 0.00 .. 2.00, upper bound 2.01 open
TAU_START = 0.05
TAU_STEP = 0.01
TAU_COUNT = 91  # 0.05 .. 0.95
STOP_BAND = 0.15
EI_CHUNK = 4096


def parameter_grid() -> np.ndarray:
    """The (18291, 2) search grid, beta-major then tau ascending."""
    betas = np.arange(BETA_COUNT) * BETA_STEP
    taus = TAU_START + np.arange(TAU_COUNT) * TAU_STEP
    bb, tt = np.meshgrid(betas, taus, indexing="ij")
    return np.column_stack([bb.ravel(), tt.ravel()])


@dataclass(frozen=True)
class RbfKernel:
    """Isotropic-per-axis squared-exponential kernel with additive noise."""

    signal_var: float
    length_beta: float
    length_tau: float
    noise_var: float

    def __post_init__(self):
        if self.signal_var <= 0 or self.length_beta <= 0 or self.length_tau <= 0:
            raise ValueError("kernel hyperparameters must be positive")
        if self.noise_var < 0:
            raise ValueError("noise variance must be >= 0")

    def cross(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        db = (a[:, 0:1] - b[None, :, 0]) / self.length_beta
        dt = (a[:, 1:2] - b[None, :, 1]) / self.length_tau
        return self.signal_var * np.exp(-0.5 * (db**2 + dt**2))


@dataclass
class GpModel:
    points: np.ndarray
    values: np.ndarray
    kernel: RbfKernel
    mean: float
    chol: np.ndarray
    alpha: np.ndarray


def default_kernel(values) -> RbfKernel:
    """Fixed-scale kernel: signal = observed variance, lengths = a quarter
    of each grid range, noise = 1e-6 of the signal."""
    var = float(np.var(np.asarray(values, dtype=float)))
    if var <= 0.0:
        var = 1.0
    beta_range = (BETA_COUNT - 1) * BETA_STEP
    tau_range = (TAU_COUNT - 1) * TAU_STEP
    return RbfKernel(
        signal_var=var,
        length_beta=0.25 * beta_range,
        length_tau=0.25 * tau_range,
        noise_var=1e-6 * var,
    )


def gp_fit(points, values, kernel: RbfKernel | None = None) -> GpModel:
    """Cholesky-factorized GP posterior over observed (beta, tau) points.

    The prior mean is the mean of the observations.  If the noisy kernel
    matrix is not positive definite, jitter grows by decades up to 1e-4 of
    the signal variance before giving up.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.asarray(values, dtype=float).ravel()
    if pts.shape[0] != vals.size or pts.shape[0] == 0:
        raise ValueError("points and values must be non-empty and equal length")
    kernel = kernel or default_kernel(vals)
    base = kernel.cross(pts, pts) + kernel.noise_var * np.eye(pts.shape[0])
    jitter = 0.0
    while True:
        try:
            chol = np.linalg.cholesky(base + jitter * np.eye(pts.shape[0]))
            break
        except np.linalg.LinAlgError:
            jitter = max(jitter * 10.0, 1e-12 * kernel.signal_var)
            if jitter > 1e-4 * kernel.signal_var:
                raise np.linalg.LinAlgError(
                    "kernel matrix not positive definite after max jitter"
                )
    mean = float(vals.mean())
    centered = vals - mean
    alpha = solve_triangular(
        chol.T, solve_triangular(chol, centered, lower=True), lower=False
    )
    return GpModel(
        points=pts, values=vals, kernel=kernel, mean=mean, chol=chol, alpha=alpha
    )


def gp_predict(gp: GpModel, x):
    """Posterior (mu, sigma) at one (beta, tau) point or a batch of them."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    X = arr[None, :] if single else arr
    k_star = gp.kernel.cross(X, gp.points)
    mu = gp.mean + k_star @ gp.alpha
    v = solve_triangular(gp.chol, k_star.T, lower=True)
    var = np.maximum(gp.kernel.signal_var - np.sum(v * v, axis=0), 0.0)
    sigma = np.sqrt(var)
    if single:
        return float(mu[0]), float(sigma[0])
    return mu, sigma


def expected_improvement(mu, sigma, f_min: float):
    """EI = (f_min - mu) * Phi(z) + sigma * phi(z); sigma = 0 degenerates to
    max(f_min - mu, 0)."""
    mu_arr = np.asarray(mu, dtype=float)
    sigma_arr = np.asarray(sigma, dtype=float)
    improve = f_min - mu_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma_arr > 0, improve / np.where(sigma_arr > 0, sigma_arr, 1.0), 0.0)
    phi = np.exp(-0.5 * z**2) / math.sqrt(2.0 * math.pi)
    ei = np.where(
        sigma_arr > 0,
        improve * ndtr(z) + sigma_arr * phi,
        np.maximum(improve, 0.0),
    )
    ei = np.maximum(ei, 0.0)
    if ei.ndim == 0:
        return float(ei)
    return ei


@dataclass(frozen=True)
class TraceEntry:
    round: int
    beta: float
    tau: float
    predicted: int
    discrepancy: int


@dataclass
class CalibrationResult:
    beta_star: float
    tau_star: float
    discrepancy: int
    trace: list
    rounds_used: int
    target_count: int
    model: object = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.discrepancy <= STOP_BAND * self.target_count


def calibrate(
    train: LabeledDataset,
    apply: HouseholdTable,
    target: AdopterTarget,
    budget: int = 2000,
    init: int = 10,
    seed: int = 0,
    gbt_params: GbtParams | None = None,
) -> CalibrationResult:
    """Search (beta, tau) so the booster's adopter count matches the target.

    Evaluates ``init`` random grid points, then repeatedly fits the GP on
    all observations and evaluates the grid point of maximum expected
    improvement (ties to the lowest beta, then lowest tau).  Each
    evaluation trains with that beta, thresholds the predicted
    probabilities at that tau over ``apply``, and records
    |target - predicted|.  Stops as soon as the discrepancy is within 15%
    of the target count, or after ``budget`` evaluations.
    """
    if init < 1 or budget < init:
        raise ValueError("need budget >= init >= 1")
    if target.count > len(apply):
        raise ValueError(
            f"target count {target.count} exceeds population size {len(apply)}"
        )
    grid = parameter_grid()
    n_grid = grid.shape[0]
    stop_at = STOP_BAND * target.count
    apply_X = apply.feature_matrix()
    gbt_params = gbt_params or GbtParams()

    prob_cache = {}

    def probs_for(beta_index: int) -> np.ndarray:
        if beta_index not in prob_cache:
            beta = grid[beta_index * TAU_COUNT, 0]
            model = train_gbt(train, gbt_params, LossParams(beta=beta, tau=0.5), seed)
            prob_cache[beta_index] = (model, predict_proba(model, apply_X))
        return prob_cache[beta_index][1]

    trace = []
    evaluated = np.zeros(n_grid, dtype=bool)

    def evaluate(grid_index: int) -> TraceEntry:
        beta, tau = grid[grid_index]
        probs = probs_for(grid_index // TAU_COUNT)
        predicted = int(np.count_nonzero(probs >= tau))
        entry = TraceEntry(
            round=len(trace) + 1,
            beta=float(beta),
            tau=float(tau),
            predicted=predicted,
            discrepancy=abs(predicted - target.count),
        )
        trace.append(entry)
        evaluated[grid_index] = True
        return entry

    rng = rng_for(seed, "calibrate")
    best = None
    best_index = None
    for grid_index in rng.choice(n_grid, size=min(init, n_grid), replace=False):
        entry = evaluate(int(grid_index))
        if best is None or entry.discrepancy < best.discrepancy:
            best, best_index = entry, int(grid_index)
        if entry.discrepancy <= stop_at:
            break

    while best.discrepancy > stop_at and len(trace) < budget and not evaluated.all():
        points = np.array([(e.beta, e.tau) for e in trace])
        values = np.array([float(e.discrepancy) for e in trace])
        gp = gp_fit(points, values, default_kernel(values))
        f_min = float(values.min())
        best_ei = -1.0
        pick = -1
        for start in range(0, n_grid, EI_CHUNK):
            chunk = slice(start, min(start + EI_CHUNK, n_grid))
            mu, sigma = gp_predict(gp, grid[chunk])
            ei = expected_improvement(mu, sigma, f_min)
            ei = np.where(evaluated[chunk], -np.inf, ei)
            local = int(np.argmax(ei))
            if ei[local] > best_ei:
                best_ei = float(ei[local])
                pick = start + local
        entry = evaluate(pick)
        if entry.discrepancy < best.discrepancy:
            best, best_index = entry, pick
    return CalibrationResult(
        beta_star=best.beta,
        tau_star=best.tau,
        discrepancy=best.discrepancy,
        trace=trace,
        rounds_used=len(trace),
        target_count=target.count,
        model=prob_cache[best_index // TAU_COUNT][0],
    )


def save_trace(result: CalibrationResult, path):
    """Write the audit trace: round,beta,tau,predicted,target,diff."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["round", "beta", "tau", "predicted", "target", "diff"])
        for e in result.trace:
            writer.writerow(
                [e.round, f"{e.beta:.2f}", f"{e.tau:.2f}", e.predicted,
                 result.target_count, e.discrepancy]
            )
