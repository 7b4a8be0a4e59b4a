"""Dimension gauges and covering sums for the two families.

The image family is sized so that its natural covers have bounded,
eventually stationary covering sums under the doubly logarithmic
gauge h(t) = t^2 (log log(1/t))^beta, with beta the construction's
own exponent.  Perturbing the gauge exponent tips the sums to 0 or
infinity, which locates the generalized dimension of the image set;
power gauges do the same for the pre-image family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .construction import (
    LOG2,
    MIN_LEVEL,
    CellAddress,
    ConstructionParams,
    log_image_side,
)
from .logspace import LogQuantity

SQRT2 = math.sqrt(2.0)

_GAUGE_DOMAIN_EDGE = -1.0  # log t < -1 keeps log(1/t) > 1, so loglog(1/t) > 0


@dataclass(frozen=True)
class Gauge:
    """h(t) = t^n (log log(1/t))^beta on 0 < t < e^-1.

    n is the volume power (2 for planar sets), beta >= 0 the doubly
    logarithmic correction; beta = 0 degenerates to the power gauge
    t^n used for ordinary box and Hausdorff dimension checks.
    """

    n: int
    beta: float

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.beta < 0.0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")


def gauge_eval(gauge: Gauge, t: float) -> float:
    """h(t) directly; only for moderate t, see gauge_log_eval."""
    if not 0.0 < t < math.exp(-1.0):
        raise ValueError(f"gauge defined on (0, e^-1), got t = {t}")
    if gauge.beta == 0.0:
        return t**gauge.n
    return t**gauge.n * math.log(math.log(1.0 / t)) ** gauge.beta


def gauge_log_eval(gauge: Gauge, log_t: float) -> LogQuantity:
    """h at t = exp(log_t), carried in log space for tiny scales."""
    if not log_t < _GAUGE_DOMAIN_EDGE:
        raise ValueError(
            f"gauge defined for log t < {_GAUGE_DOMAIN_EDGE}, got log t = {log_t}"
        )
    if gauge.beta == 0.0:
        return LogQuantity(gauge.n * log_t)
    return LogQuantity(gauge.n * log_t + gauge.beta * math.log(math.log(-log_t)))


def monotone_threshold(gauge: Gauge) -> float:
    """Largest scale below which the gauge is increasing.

    h'(t) changes sign where n log log(1/t) log(1/t) = beta; solved by
    bisection on x = log(1/t) to relative 1e-12.  beta = 0 degenerates
    to the domain edge e^-1.
    """
    if gauge.beta == 0.0:
        return math.exp(-1.0)

    def phi(x: float) -> float:
        return gauge.n * math.log(x) * x

    lo, hi = 1.0, 2.0
    while phi(hi) < gauge.beta:
        hi *= 2.0
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        if phi(mid) < gauge.beta:
            lo = mid
        else:
            hi = mid
    return math.exp(-0.5 * (lo + hi))


def _diam_factor(side: str, diam_convention: str) -> float:
    if diam_convention not in ("side", "diam"):
        raise ValueError(f"diam_convention must be 'side' or 'diam', got {diam_convention!r}")
    # pre-side covers are axis intervals whose diameter is their length
    if side == "image" and diam_convention == "diam":
        return SQRT2
    return 1.0


def _gauge_log_value(gauge_or_alpha: Union[Gauge, float], log_t: float, where: str) -> float:
    if isinstance(gauge_or_alpha, Gauge):
        if not log_t < _GAUGE_DOMAIN_EDGE:
            raise ValueError(
                f"gauge undefined at the {where} scale exp({log_t:.3f}); use a larger level"
            )
        return gauge_log_eval(gauge_or_alpha, log_t).log
    alpha = float(gauge_or_alpha)
    if alpha <= 0.0:
        raise ValueError(f"power-gauge exponent must be positive, got {alpha}")
    return alpha * log_t


def natural_cover_sum(
    side: str,
    gauge_or_alpha: Union[Gauge, float],
    k: int,
    params: ConstructionParams,
    diam_convention: str = "side",
) -> LogQuantity:
    """The canonical level-k covering sum, in log space.

    side "image": the 2^(2k) level-k image squares cover the planar
    image set.  side "pre": the 2^k level-k intervals of length
    sigma^k cover one axis factor of the pre-image set; the per-axis
    count is the relevant one for the axis dimension.  The gauge is a
    Gauge, or a bare float alpha meaning the power gauge t^alpha.
    diam_convention "diam" feeds sqrt(2) times the side to the gauge
    for image squares; intervals have diameter equal to their length,
    so the convention does not move the pre side.
    """
    if side not in ("pre", "image"):
        raise ValueError(f"side must be 'pre' or 'image', got {side!r}")
    if k < MIN_LEVEL:
        raise ValueError(f"levels start at {MIN_LEVEL}, got {k}")
    c = _diam_factor(side, diam_convention)
    if side == "pre":
        log_t = k * math.log(params.sigma)
        log_count = k * LOG2
    else:
        log_t = log_image_side(k, params) + math.log(c)
        log_count = 2 * k * LOG2
    return LogQuantity(log_count + _gauge_log_value(gauge_or_alpha, log_t, f"level-{k}"))


@dataclass(frozen=True)
class ScanRow:
    beta_prime: float
    level: int
    log_sum: float


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]
    verdicts: dict


_STATIONARY_BAND = (0.5, 1.1)


def threshold_scan(
    beta_primes: Sequence[float],
    levels: Sequence[int],
    params: ConstructionParams,
    diam_convention: str = "side",
) -> ScanTable:
    """Covering-sum trends of the image family under gauges h_{2, beta'}.

    Verdict per beta': "stationary" when every sampled sum stays inside
    [0.5, 1.1] (the regime beta' = beta, where the sums admit a mass
    distribution), "decreasing" or "growing" for strictly monotone log
    sums (beta' below or above the construction beta; the sums move
    like (log k)^(beta' - beta)), "mixed" otherwise.  Levels should be
    a geometric grid reaching 10^6 or beyond: against a loglog-speed
    trend a linear grid resolves nothing.
    """
    lvls = sorted(set(int(k) for k in levels))
    if len(lvls) < 2:
        raise ValueError("need at least two levels to read a trend")
    rows = []
    verdicts: dict = {}
    for bp in beta_primes:
        g = Gauge(2, float(bp))
        sums = [
            natural_cover_sum("image", g, k, params, diam_convention).log for k in lvls
        ]
        rows.extend(ScanRow(float(bp), k, s) for k, s in zip(lvls, sums))
        lo, hi = (math.log(_STATIONARY_BAND[0]), math.log(_STATIONARY_BAND[1]))
        if all(lo <= s <= hi for s in sums):
            verdicts[float(bp)] = "stationary"
        elif all(b < a for a, b in zip(sums, sums[1:])):
            verdicts[float(bp)] = "decreasing"
        elif all(b > a for a, b in zip(sums, sums[1:])):
            verdicts[float(bp)] = "growing"
        else:
            verdicts[float(bp)] = "mixed"
    return ScanTable(tuple(rows), verdicts)


@dataclass(frozen=True)
class MassDistributionReport:
    """Infimum of the stationary covering sums and the induced bound.

    Any measure spreading mass evenly over the image cells gives every
    small set U mass at most gauge(diam U) * 4 / m; equivalently the
    generalized measure of the image set is at least lower_bound = m/4.
    tail_limit records the analytic limit 1 of the sums for context.
    """

    m: float
    at_k: int
    lower_bound: float
    first_admissible_k: int
    tail_limit: float


def mass_distribution_bound(
    params: ConstructionParams,
    k_max: int = 10**6,
    gauge: Union[Gauge, None] = None,
    diam_convention: str = "side",
) -> MassDistributionReport:
    """Minimize the stationary covering sum over levels up to k_max.

    The gauge must be h_{2, beta} with the construction's own beta
    (the default); other exponents have no stationary sums to
    minimize.  The sums increase toward 1 after an initial dip, so m
    sits at a small level and is stable under any larger k_max.
    """
    if gauge is None:
        gauge = Gauge(2, params.beta)
    if gauge.n != 2 or gauge.beta != params.beta:
        raise ValueError(
            "mass distribution needs the stationary gauge h(t) = "
            f"t^2 (loglog 1/t)^{params.beta}; got n={gauge.n}, beta={gauge.beta}"
        )
    if k_max < MIN_LEVEL:
        raise ValueError(f"k_max must be at least {MIN_LEVEL}, got {k_max}")
    log_c = math.log(_diam_factor("image", diam_convention))

    def log_t_of(ks: np.ndarray) -> np.ndarray:
        return -ks * LOG2 - 0.5 * params.beta * np.log(np.log(ks)) + log_c

    first = MIN_LEVEL
    while not log_t_of(np.array([float(first)]))[0] < _GAUGE_DOMAIN_EDGE:
        first += 1
    best = math.inf
    best_k = first
    chunk = 1 << 20
    for start in range(first, k_max + 1, chunk):
        ks = np.arange(start, min(start + chunk, k_max + 1), dtype=np.float64)
        log_t = log_t_of(ks)
        ln_sum = 2.0 * ks * LOG2 + gauge.n * log_t
        if gauge.beta != 0.0:
            ln_sum = ln_sum + gauge.beta * np.log(np.log(-log_t))
        i = int(np.argmin(ln_sum))
        if ln_sum[i] < best:
            best = float(ln_sum[i])
            best_k = int(ks[i])
    m = math.exp(best)
    return MassDistributionReport(m, best_k, m / 4.0, first, 1.0)


def box_dimension_pre(k: int, params: ConstructionParams) -> float:
    """Box-counting slope of the planar pre-image family at level k:
    log(2^(2k)) / log(1 / sigma^k) = 2 log 2 / log(1/sigma).

    Constant in k (the covers are exactly self-similar), and below 2
    for every sigma < 1/2.  The k argument is kept so call sites can
    assert the independence.
    """
    if k < MIN_LEVEL:
        raise ValueError(f"levels start at {MIN_LEVEL}, got {k}")
    return 2.0 * LOG2 / math.log(1.0 / params.sigma)


def covering_sum_of_image(
    addresses: Iterable[CellAddress],
    gauge_or_alpha: Union[Gauge, float],
    params: ConstructionParams,
    diam_convention: str = "side",
) -> LogQuantity:
    """Covering sum of the image squares of the given same-level cells.

    The full level-k collection reproduces natural_cover_sum("image",
    gauge, k, params).  Mixing levels raises: a cover drawn from
    several levels has no single canonical scale.
    """
    addrs = list(addresses)
    if not addrs:
        raise ValueError("need at least one address")
    k = addrs[0].level
    if any(a.level != k for a in addrs):
        raise ValueError("addresses must all sit at one level")
    c = _diam_factor("image", diam_convention)
    log_t = log_image_side(k, params) + math.log(c)
    g = _gauge_log_value(gauge_or_alpha, log_t, f"level-{k}")
    return LogQuantity(math.log(len(addrs)) + g)
