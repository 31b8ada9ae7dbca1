"""Geometry on the torus: the box, thin annuli and their volumes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .intset import IntSet
from .validation import DomainError, check_positive_int

# Samples drawn per RNG stream; stream i uses SeedSequence([seed, i]).
STREAM_SAMPLES = 1 << 16
DEFAULT_Z_CANDIDATES = 65


def mod1(x) -> np.ndarray:
    """Reduce each coordinate into [-1/2, 1/2)."""
    x = np.asarray(x, dtype=float)
    y = x - np.floor(x + 0.5)
    # x + 0.5 may round across an integer for x next to a half-integer
    y = np.where(y >= 0.5, y - 1.0, y)
    return np.where(y < -0.5, y + 1.0, y)


def box_halfwidth(D: int) -> float:
    return 2.0 ** (-D - 1)


def in_box(x, D: int) -> bool:
    return bool(np.all(np.abs(np.asarray(x, dtype=float)) < box_halfwidth(D)))


def moments(d: int, D: int) -> tuple[float, float]:
    """Mean and standard deviation of the squared norm of a uniform point in BOX_D."""
    scale = 2.0 ** (-2 * D)
    return scale * d / 12.0, scale * math.sqrt(d / 180.0)


@dataclass(frozen=True)
class AnnuliSpec:
    """Union of thin shells ``(|x|^2 - mu)/sigma in z - (a-1)/N0 +- delta`` inside BOX_D.

    ``z`` is the normalized center in [-1, 1]; ``mu`` and ``sigma`` are
    derived from (d, D).
    """

    d: int
    D: int
    A0: IntSet
    N0: int
    delta: float
    z: float = 0.0
    mu: float = field(init=False)
    sigma: float = field(init=False)

    def __post_init__(self):
        check_positive_int(self.d, "d")
        check_positive_int(self.D, "D", minimum=0)
        check_positive_int(self.N0, "N0")
        A0 = IntSet.from_iterable(self.A0)
        if not A0 or A0[0] < 1 or A0[-1] > self.N0:
            raise DomainError(f"A0 must be a nonempty subset of [1, {self.N0}]")
        if self.delta < 0:
            raise DomainError("delta must be nonnegative")
        if not -1.0 <= self.z <= 1.0:
            raise DomainError(f"normalized z must lie in [-1, 1], got {self.z}")
        mu, sigma = moments(self.d, self.D)
        object.__setattr__(self, "A0", A0)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def centers(self) -> np.ndarray:
        """Interval centers in normalized units, one per element of A0."""
        return self.z - (np.asarray(self.A0, dtype=float) - 1.0) / self.N0

    @property
    def satisfies_width_constraint(self) -> bool:
        return 2.0 * self.delta * self.N0 <= 2.0 ** (-2 * self.D) * (1 + 1e-12)

    def with_z(self, z: float) -> "AnnuliSpec":
        return replace(self, z=float(z))

    def to_dict(self) -> dict:
        return {
            "d": self.d, "D": self.D, "A0": list(self.A0), "N0": self.N0,
            "delta": self.delta, "z": self.z, "mu": self.mu, "sigma": self.sigma,
        }


def normalized_sq_norm(points: np.ndarray, spec: AnnuliSpec) -> np.ndarray:
    points = np.atleast_2d(points)
    return (np.einsum("ij,ij->i", points, points) - spec.mu) / spec.sigma


def _in_union(t: np.ndarray, centers: np.ndarray, delta: float) -> np.ndarray:
    hit = np.zeros(t.shape, dtype=bool)
    for c in centers:
        hit |= np.abs(t - c) < delta
    return hit


def annuli_mask(points, spec: AnnuliSpec) -> np.ndarray:
    """Vectorized membership for an (n, d) array of torus points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != spec.d:
        raise DomainError(f"points have dimension {points.shape[1]}, annuli have d={spec.d}")
    inside = np.all(np.abs(points) < box_halfwidth(spec.D), axis=1)
    t = normalized_sq_norm(points, spec)
    return inside & _in_union(t, spec.centers, spec.delta)


def annuli_member(x: Sequence[float], spec: AnnuliSpec) -> bool:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != spec.d:
        raise DomainError(f"expected a vector of dimension {spec.d}, got shape {x.shape}")
    return bool(annuli_mask(x[None, :], spec)[0])


@dataclass(frozen=True)
class VolumeEstimate:
    relative_volume: float
    absolute_volume: float
    stderr: float
    samples: int

    @property
    def absolute_stderr(self) -> float:
        return self.stderr * self.absolute_volume / self.relative_volume if self.relative_volume else 0.0

    def to_dict(self) -> dict:
        return {
            "relative_volume": self.relative_volume, "absolute_volume": self.absolute_volume,
            "stderr": self.stderr, "samples": self.samples,
        }


def _box_streams(d: int, D: int, samples: int, seed: int):
    """Yield uniform BOX_D sample blocks from independent per-block streams."""
    h = box_halfwidth(D)
    for stream, start in enumerate(range(0, samples, STREAM_SAMPLES)):
        size = min(STREAM_SAMPLES, samples - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, stream]))
        yield rng.uniform(-h, h, size=(size, d))


def sample_normalized_norms(d: int, D: int, samples: int, seed: int) -> np.ndarray:
    """Normalized squared norms ``(|x|^2 - mu)/sigma`` of uniform BOX_D samples."""
    mu, sigma = moments(d, D)
    out = np.empty(samples)
    pos = 0
    for block in _box_streams(d, D, samples, seed):
        out[pos:pos + len(block)] = (np.einsum("ij,ij->i", block, block) - mu) / sigma
        pos += len(block)
    return out


def _estimate_from_norms(t: np.ndarray, spec: AnnuliSpec) -> VolumeEstimate:
    n = len(t)
    p = float(np.count_nonzero(_in_union(t, spec.centers, spec.delta))) / n
    return VolumeEstimate(
        relative_volume=p,
        absolute_volume=p * 2.0 ** (-spec.d * spec.D),
        stderr=math.sqrt(p * (1.0 - p) / n),
        samples=n,
    )


def estimate_volume(spec: AnnuliSpec, samples: int = 200_000, seed: int = 0) -> VolumeEstimate:
    """Monte-Carlo volume of the annuli as a fraction of BOX_D.

    Samples are uniform in the open box, so the box test always passes and
    only the shell test is evaluated.
    """
    samples = check_positive_int(samples, "samples")
    if spec.delta == 0:
        return VolumeEstimate(0.0, 0.0, 0.0, samples)
    return _estimate_from_norms(sample_normalized_norms(spec.d, spec.D, samples, seed), spec)


def z_grid(candidates: int) -> np.ndarray:
    candidates = check_positive_int(candidates, "candidates")
    if candidates == 1:
        return np.zeros(1)
    return np.linspace(-1.0, 1.0, candidates)


def choose_z(
    spec: AnnuliSpec,
    candidates: int = DEFAULT_Z_CANDIDATES,
    samples: int = 200_000,
    seed: int = 0,
) -> float:
    """Grid z in [-1, 1] maximizing the estimated annuli volume.

    All candidates share one sample of normalized norms. Ties go to the
    smallest z. ``spec.z`` is ignored.
    """
    t = np.sort(sample_normalized_norms(spec.d, spec.D, samples, seed))
    offsets = (np.asarray(spec.A0, dtype=float) - 1.0) / spec.N0
    best_z, best_hits = 0.0, -1
    for z in z_grid(candidates):
        hits = _count_in_union_sorted(t, z - offsets, spec.delta)
        if hits > best_hits:
            best_z, best_hits = float(z), hits
    return best_z


def _count_in_union_sorted(t_sorted: np.ndarray, centers: np.ndarray, delta: float) -> int:
    # merge overlapping open intervals, then count by binary search
    if delta <= 0:
        return 0
    lo = np.sort(centers) - delta
    hi = lo + 2 * delta
    total = 0
    cur_lo, cur_hi = lo[0], hi[0]
    for a, b in zip(lo[1:], hi[1:]):
        if a < cur_hi:
            cur_hi = max(cur_hi, b)
            continue
        total += _count_open(t_sorted, cur_lo, cur_hi)
        cur_lo, cur_hi = a, b
    return total + _count_open(t_sorted, cur_lo, cur_hi)


def _count_open(t_sorted: np.ndarray, lo: float, hi: float) -> int:
    return int(np.searchsorted(t_sorted, hi, "left") - np.searchsorted(t_sorted, lo, "right"))


def log_ball_volume(d: int, radius: float) -> float:
    if radius == 0:
        return -math.inf
    return (math.log(2.0) + 0.5 * d * math.log(math.pi) + d * math.log(radius)
            - math.lgamma(d / 2.0) - math.log(d))


def ball_volume(d: int, radius: float) -> float:
    """Volume of the d-dimensional Euclidean ball of the given radius."""
    d = check_positive_int(d, "d")
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    return math.exp(log_ball_volume(d, radius))


def f_constant(D: int) -> float:
    """max over 1 <= D' <= D of (D'! 2^D')^2 / (2D')!."""
    D = check_positive_int(D, "D")
    return max(
        (math.factorial(m) * 2 ** m) ** 2 / math.factorial(2 * m) for m in range(1, D + 1)
    )
