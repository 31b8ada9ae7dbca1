"""Randomized torus/annuli construction of progression-free subsets.

Each trial draws a rotation ``theta`` and shift ``alpha`` on the torus,
keeps the elements ``a`` whose image ``a*theta + alpha mod 1`` lands in
the annuli (set A), and deletes the first term of every k-term
D-progression left in A (set T). A \\ T is progression-free by
construction; the best trial is returned with a certificate.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .base_sets import EXACT_CAP, base_set
from .geometry import (
    DEFAULT_Z_CANDIDATES,
    AnnuliSpec,
    VolumeEstimate,
    annuli_mask,
    box_halfwidth,
    choose_z,
    estimate_volume,
    f_constant,
    log_ball_volume,
    moments,
    normalized_sq_norm,
)
from .intset import IntSet
from .progression import Certificate, count_types, find_starters, verify_free
from .validation import (
    DomainError,
    InvariantViolation,
    check_construction_k_D,
    check_intset,
    check_positive_int,
)

DEFAULT_SEED = 20240601
DEFAULT_TRIALS = 32
DEFAULT_MC_SAMPLES = 200_000
DEFAULT_D_MIN = 1
BOUNDARY_TOL = 1e-9

_TWO64 = 1 << 64
_SEED_MASK = _TWO64 - 1
# entropy tags separating the Monte-Carlo streams from per-trial streams
_Z_TAG = 1 << 40
_VOLUME_TAG = (1 << 40) + 1


def derive_n(k: int, D: int) -> int:
    """ceil(log2(k/D)), the smallest n with k <= 2^n D; it satisfies k > 2^(n-1) D."""
    k, D = check_construction_k_D(k, D)
    n = 1
    while D << n < k:
        n += 1
    return n


def derive_d(psi: float, D: int, n: int, d_min: int = DEFAULT_D_MIN) -> int:
    if psi < 2:
        raise DomainError(f"psi must be at least 2, got {psi}")
    raw = 2.0 ** (n / 2) * (math.log2(psi) / D) ** (1.0 / (n + 1))
    return max(1, d_min, math.floor(raw + 1e-9))


def log_derive_delta(d: int, D: int, ratio: float) -> float:
    F = f_constant(D)
    _, sigma = moments(d, D)
    return (
        -math.log(math.pi * F * sigma)
        + (2.0 / d) * (math.log(d / (d + 2.0)) + math.lgamma(d / 2.0) - math.log(ratio))
    )


def derive_delta(d: int, D: int, type_count: float, N: float) -> float:
    """Shell half-width making (type/N) * vol B(sqrt(F sigma delta)) equal 2/(d+2)."""
    d = check_positive_int(d, "d")
    if type_count <= 0 or N <= 0:
        raise DomainError("derive_delta needs type_count >= 1 and N >= 1")
    return math.exp(log_derive_delta(d, D, type_count / N))


def derive_N0(delta: float, D: int) -> int:
    """Largest N0 (at least 1) with 2 delta N0 <= 2^(-2D)."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    return max(1, math.floor(2.0 ** (-2 * D) / (2.0 * delta) * (1 + 1e-12)))


@dataclass(frozen=True)
class ConstructionParams:
    k: int
    D: int
    n: int
    d: int
    delta: float
    N0: int
    psi: float
    type_count: int
    trials: int = DEFAULT_TRIALS
    master_seed: int = DEFAULT_SEED
    mc_samples: int = DEFAULT_MC_SAMPLES
    z_candidates: int = DEFAULT_Z_CANDIDATES
    d_min: int = DEFAULT_D_MIN
    delta_clamped: bool = False

    def __post_init__(self):
        if not self.k > 2 ** (self.n - 1) * self.D:
            raise DomainError(f"need k > 2^(n-1) D, got k={self.k}, n={self.n}, D={self.D}")
        if self.psi < 2:
            raise DomainError(f"psi must be at least 2, got {self.psi}")
        if not 2 * self.delta * self.N0 <= 2.0 ** (-2 * self.D) * (1 + 1e-12):
            raise DomainError(
                f"need 2 delta N0 <= 2^(-2D), got delta={self.delta}, N0={self.N0}, D={self.D}"
            )
        if self.d < max(1, self.d_min):
            raise DomainError(f"d={self.d} is below d_min={self.d_min}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    size_A: int
    size_T: int
    size_result: int
    near_boundary: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ConstructionResult:
    params: ConstructionParams
    annuli: AnnuliSpec
    volume: VolumeEstimate
    trials: tuple[TrialResult, ...]
    best_subset: IntSet
    certificate: Certificate
    predicted_EA: float
    predicted_ET_bound: float
    N: int = 0
    notes: tuple[str, ...] = field(default=())

    @property
    def best_trial(self) -> int:
        return max(self.trials, key=lambda t: (t.size_result, -t.trial_index)).trial_index

    @property
    def mean_A(self) -> float:
        return float(np.mean([t.size_A for t in self.trials]))

    @property
    def mean_T(self) -> float:
        return float(np.mean([t.size_T for t in self.trials]))

    @property
    def stderr_A(self) -> float:
        return _stderr([t.size_A for t in self.trials])

    @property
    def stderr_T(self) -> float:
        return _stderr([t.size_T for t in self.trials])

    @property
    def density(self) -> float:
        return len(self.best_subset) / self.N if self.N else 0.0

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "params": self.params.to_dict(),
            "annuli": self.annuli.to_dict(),
            "volume": self.volume.to_dict(),
            "predicted_EA": self.predicted_EA,
            "predicted_ET_bound": self.predicted_ET_bound,
            "empirical_mean_A": self.mean_A,
            "empirical_mean_T": self.mean_T,
            "stderr_mean_A": self.stderr_A,
            "stderr_mean_T": self.stderr_T,
            "best_trial": self.best_trial,
            "best_size": len(self.best_subset),
            "density": self.density,
            "certificate": self.certificate.to_dict(),
            "trials": [t.to_dict() for t in self.trials],
            "notes": list(self.notes),
        }


def _stderr(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return float(np.std(values, ddof=1) / math.sqrt(len(values)))


def to_fixed(x) -> np.ndarray:
    """Torus coordinates as uint64 multiples of 2^-64 (rounded).

    uint64 arrays pass through unchanged.
    """
    arr = np.asarray(x)
    if arr.dtype == np.uint64:
        return arr
    return np.array(
        [round(float(v) * _TWO64) % _TWO64 for v in np.ravel(arr)], dtype=np.uint64
    ).reshape(arr.shape)


def from_fixed(u) -> np.ndarray:
    """Map uint64 fixed-point coordinates to floats in [-1/2, 1/2)."""
    return np.asarray(u, dtype=np.uint64).view(np.int64).astype(float) * 2.0 ** -64


def torus_images(values: Sequence[int], theta, alpha) -> np.ndarray:
    """``a * theta + alpha mod 1`` for each value, as an (N, d) float array.

    The reduction is exact in 64-bit fixed point; the only error is the final
    conversion to double (below 2^-54 per coordinate).
    """
    theta_u, alpha_u = to_fixed(theta), to_fixed(alpha)
    if theta_u.shape != alpha_u.shape or theta_u.ndim != 1:
        raise DomainError("theta and alpha must be vectors of equal dimension")
    a = np.array([int(v) % _TWO64 for v in values], dtype=np.uint64)
    with np.errstate(over="ignore"):
        prod = a[:, None] * theta_u[None, :] + alpha_u[None, :]
    return from_fixed(prod)


def _near_boundary(points: np.ndarray, spec: AnnuliSpec) -> int:
    if not len(points):
        return 0
    h = box_halfwidth(spec.D)
    edge = np.any(np.abs(np.abs(points) - h) < BOUNDARY_TOL, axis=1)
    t = normalized_sq_norm(points, spec)
    gap = np.min(np.abs(np.abs(t[:, None] - spec.centers[None, :]) - spec.delta), axis=1)
    return int(np.count_nonzero(edge | (gap < BOUNDARY_TOL)))


def _trial_sets(values: IntSet, spec: AnnuliSpec, theta, alpha, k: int, D: int):
    if not values:
        return IntSet(), IntSet(), 0
    points = torus_images(values, theta, alpha)
    if points.shape[1] != spec.d:
        raise DomainError(f"theta has dimension {points.shape[1]}, annuli have d={spec.d}")
    mask = annuli_mask(points, spec)
    A = IntSet(v for v, keep in zip(values, mask) if keep)
    T = find_starters(A, k, D)
    return A, T, _near_boundary(points, spec)


def sample_trial(values, spec: AnnuliSpec, theta, alpha, k: int, D: int) -> tuple[IntSet, IntSet]:
    """Trial set A (elements mapped into the annuli) and its starter set T."""
    A, T, _ = _trial_sets(check_intset(values, allow_duplicates=True), spec, theta, alpha, k, D)
    return A, T


def trial_rotation(master_seed: int, trial_index: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform (theta, alpha) on the 2^-64 torus lattice for one trial."""
    rng = np.random.default_rng(np.random.SeedSequence([master_seed & _SEED_MASK, trial_index]))
    top = np.iinfo(np.uint64).max
    theta = rng.integers(0, top, size=d, dtype=np.uint64, endpoint=True)
    alpha = rng.integers(0, top, size=d, dtype=np.uint64, endpoint=True)
    return theta, alpha


def _sub_seed(master_seed: int, tag: int) -> int:
    ss = np.random.SeedSequence([master_seed & _SEED_MASK, tag])
    return int(ss.generate_state(1, np.uint64)[0])


def expected_counts(spec: AnnuliSpec, volume: VolumeEstimate, type_count: float, N: int, D: int) -> tuple[float, float]:
    """Predicted E|A| = N vol and the bound E|T| <= type * vol * vol B(sqrt(F sigma delta))."""
    EA = N * volume.absolute_volume
    if volume.absolute_volume == 0 or type_count == 0:
        return EA, 0.0
    radius = math.sqrt(f_constant(D) * spec.sigma * spec.delta)
    ball = math.exp(log_ball_volume(spec.d, radius)) if radius > 0 else 0.0
    return EA, type_count * volume.absolute_volume * ball


def derive_params(
    values: IntSet,
    k: int,
    D: int,
    *,
    type_count: int | None = None,
    psi: float | None = None,
    n: int | None = None,
    d: int | None = None,
    delta: float | None = None,
    N0: int | None = None,
    d_min: int = DEFAULT_D_MIN,
    trials: int = DEFAULT_TRIALS,
    master_seed: int = DEFAULT_SEED,
    mc_samples: int = DEFAULT_MC_SAMPLES,
    z_candidates: int = DEFAULT_Z_CANDIDATES,
) -> ConstructionParams:
    """Fill in every construction parameter not supplied by the caller."""
    k, D = check_construction_k_D(k, D)
    N = len(values)
    if N == 0:
        raise DomainError("the input set is empty")
    if type_count is None:
        type_count = count_types(values, k, D)
    if psi is None:
        psi = max(2.0, type_count / N)
    if psi < 2:
        raise DomainError(f"psi must be at least 2, got {psi}")
    n = derive_n(k, D) if n is None else check_positive_int(n, "n", minimum=2)
    if d is None:
        d = derive_d(psi, D, n, d_min)
    else:
        d = check_positive_int(d, "d")
        d_min = min(d_min, d)
    cap = 2.0 ** (-2 * D) / 2.0
    clamped = False
    if delta is None:
        delta = derive_delta(d, D, max(type_count, 1), N)
        limit = cap / (N0 if N0 is not None else 1)
        if delta > limit:
            delta, clamped = limit, True
    elif delta <= 0:
        raise DomainError("delta must be positive")
    if N0 is None:
        N0 = derive_N0(delta, D)
    return ConstructionParams(
        k=k, D=D, n=n, d=d, delta=float(delta), N0=check_positive_int(N0, "N0"),
        psi=float(psi), type_count=int(type_count),
        trials=check_positive_int(trials, "trials"), master_seed=int(master_seed),
        mc_samples=check_positive_int(mc_samples, "mc_samples"),
        z_candidates=check_positive_int(z_candidates, "z_candidates"),
        d_min=check_positive_int(d_min, "d_min"), delta_clamped=clamped,
    )


def run_construction(
    values: Iterable[int],
    k: int,
    D: int,
    *,
    trials: int = DEFAULT_TRIALS,
    master_seed: int = DEFAULT_SEED,
    n_jobs: int = 1,
    base_strategy: str = "auto",
    exact_cap: int = EXACT_CAP,
    **overrides,
) -> ConstructionResult:
    """Run the full pipeline on ``values`` and return the best verified subset.

    ``overrides`` may set any of type_count, psi, n, d, delta, N0, d_min,
    mc_samples, z_candidates.
    """
    values = check_intset(values, allow_duplicates=True)
    params = derive_params(values, k, D, trials=trials, master_seed=master_seed, **overrides)
    A0 = base_set(params.N0, params.k, params.D, strategy=base_strategy, cap=exact_cap)
    spec = AnnuliSpec(d=params.d, D=params.D, A0=A0, N0=params.N0, delta=params.delta)
    z = choose_z(spec, params.z_candidates, params.mc_samples, _sub_seed(params.master_seed, _Z_TAG))
    spec = spec.with_z(z)
    volume = estimate_volume(spec, params.mc_samples, _sub_seed(params.master_seed, _VOLUME_TAG))
    EA, ET = expected_counts(spec, volume, params.type_count, len(values), params.D)

    def one(i: int):
        theta, alpha = trial_rotation(params.master_seed, i, params.d)
        A, T, near = _trial_sets(values, spec, theta, alpha, params.k, params.D)
        return TrialResult(i, len(A), len(T), len(A) - len(T), near), A.difference(T)

    if n_jobs == 1:
        outcomes = [one(i) for i in range(params.trials)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(one, range(params.trials)))

    stats = tuple(r for r, _ in outcomes)
    best_index = max(range(len(stats)), key=lambda i: (stats[i].size_result, -i))
    best = outcomes[best_index][1]
    certificate = verify_free(best, params.k, params.D)
    if not certificate.is_free:
        raise InvariantViolation(f"trial {best_index} returned a set containing {certificate.witness}")
    notes = []
    if params.delta_clamped:
        notes.append("delta clamped to satisfy 2*delta*N0 <= 2^(-2D)")
    return ConstructionResult(
        params=params, annuli=spec, volume=volume, trials=stats, best_subset=best,
        certificate=certificate, predicted_EA=EA, predicted_ET_bound=ET,
        N=len(values), notes=tuple(notes),
    )
