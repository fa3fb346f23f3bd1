"""Closed-form security and overhead metrics, and the reference tables.

All distances are in hop units (the communication radius normalized to
1) unless a function takes an explicit ``r`` scale. The phantom-distance
integral printed for the sector-phantom scheme is dimensionally broken
in its source; the Monte-Carlo estimate over the annulus geometry is the
authoritative value and the printed form is evaluated only for
side-by-side display.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, InvalidParameter, QuadratureFailure

# Directed-routing hop counts paired with their annulus radii, as used by
# every reference table row.
RMIN_RMAX_PRESETS: dict[int, tuple[int, int]] = {
    5: (4, 6),
    10: (8, 12),
    15: (12, 18),
    20: (16, 24),
    25: (22, 28),
    30: (26, 32),
}

TABLE_H_VALUES = (5, 10, 15, 20, 25, 30)


@dataclass(frozen=True)
class AnalysisInput:
    """Parameter bundle for the distance and overhead formulas."""

    r_min: int
    r_max: int
    h: int
    H: int
    r0_hops: float = 3.0
    omega: int = 6

    def __post_init__(self):
        if self.h < self.r_min or self.h > self.r_max:
            raise InvalidParameter(
                f"h must lie in [r_min, r_max], got h={self.h} "
                f"range=[{self.r_min},{self.r_max}]")
        if self.H < 1 or self.r_min < 1 or self.r_min >= self.r_max:
            raise InvalidParameter("radii and H must be positive with r_min < r_max")

    @property
    def hx(self) -> int:
        return self.h - self.r_min


def rmin_rmax_for(h: int) -> tuple[int, int]:
    """Annulus radii for a directed hop count: table presets, else +-20%."""
    if h in RMIN_RMAX_PRESETS:
        return RMIN_RMAX_PRESETS[h]
    r_min = max(1, round(0.8 * h))
    r_max = max(r_min + 1, round(1.2 * h))
    return r_min, r_max


def ratio_hbdrw_over_pusbrf(h: int) -> float:
    """Directed-path count of HBDRW as a percentage of PUSBRF's."""
    if h < 2:
        raise InvalidParameter(f"h must be >= 2, got {h}")
    return 100.0 * (2.0 / math.pi) * math.acos((h - 1) / h)


def ratio_pusbrf_over_psspr(h: int, r_min: int, r_max: int) -> float:
    """Directed-path count of PUSBRF as a percentage of the sector scheme's."""
    if not r_min <= h <= r_max:
        raise InvalidParameter(
            f"need r_min <= h <= r_max, got {r_min}, {h}, {r_max}")
    return 100.0 * h / sum(range(r_min, r_max + 1))


def failure_path_probability(r0_hops: float, H: int, h: int) -> float:
    """Probability that a phantom-to-sink path crosses the visible area."""
    if r0_hops < 0:
        raise DomainError(f"r0 must be nonnegative, got {r0_hops}")
    if r0_hops > H or r0_hops > h:
        raise DomainError(
            f"visible radius {r0_hops} exceeds a path leg (H={H}, h={h})")
    return (math.asin(r0_hops / H) + math.asin(r0_hops / h)) / math.pi


def phantom_count_hbdrw(h: int) -> float:
    """Phantom positions on the 4*gamma arc of radius h."""
    if h < 2:
        raise InvalidParameter(f"h must be >= 2, got {h}")
    return 4.0 * math.acos((h - 1) / h) * h


def phantom_count_pusbrf(h: int) -> float:
    """Phantom positions on the full circle of radius h."""
    if h < 2:
        raise InvalidParameter(f"h must be >= 2, got {h}")
    return 2.0 * math.pi * h


def phantom_count_psspr(r_min: int, r_max: int, hx: int) -> float:
    """Phantom positions across the whole annulus, h = r_min + hx."""
    if hx < 1:
        raise InvalidParameter(f"hx must be >= 1, got {hx}")
    h = r_min + hx
    return 2.0 * math.pi * h * sum(range(hx, r_max - r_min + 1)) / hx


def annulus_mean_radius(r_min: float, r_max: float) -> float:
    """Area-weighted mean radius of an annulus: (2/3)(R^3-r^3)/(R^2-r^2)."""
    return (2.0 / 3.0) * (r_max ** 3 - r_min ** 3) / (r_max ** 2 - r_min ** 2)


def psspr_distance_mc(r_min: float, r_max: float, n_samples: int = 200_000,
                      rng: np.random.Generator | None = None,
                      n_batches: int = 100) -> tuple[float, float]:
    """Monte-Carlo mean source-to-phantom distance over the annulus.

    Samples points area-uniformly between the two radii and returns
    (mean, batch-means standard error) in hop units.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    radii = np.sqrt(rng.uniform(r_min ** 2, r_max ** 2, size=n_samples))
    mean = float(radii.mean())
    usable = (n_samples // n_batches) * n_batches
    batch_means = radii[:usable].reshape(n_batches, -1).mean(axis=1)
    se = float(batch_means.std(ddof=1) / math.sqrt(n_batches))
    return mean, se


def psspr_distance_printed(r_min: int, r_max: int, H: int,
                           tol: float = 1e-6) -> float:
    """The phantom-distance integral exactly as printed, for display only.

    Reads the missing differential as d(alpha) and the pi/4 factor as a
    divisor of the integral; no reading of this form reproduces the
    published distance column, hence the Monte-Carlo estimate is the
    value to trust.
    """
    c = r_min + r_max

    def integrand(alpha: float) -> float:
        return math.sqrt(H * H + c * c - 2.0 * c * H * math.cos(alpha)) / (math.pi / 4.0)

    val, err = integrate.quad(integrand, 0.0, math.pi / 2.0,
                              epsabs=tol / 10.0, epsrel=1e-12, limit=200)
    if err > max(tol, 1e-9 * abs(val)):
        raise QuadratureFailure(f"estimated error {err} above tolerance {tol}")
    return c / 4.0 + val


def avg_phantom_distance(protocol: str, params: AnalysisInput,
                         r: float = 1.0,
                         n_samples: int = 200_000,
                         rng: np.random.Generator | None = None) -> float:
    """Average source-to-phantom distance, scaled by the radius ``r``.

    Both baselines place phantoms at radius h, so their closed form is
    r*(r_min+hx). The sector scheme's value is the Monte-Carlo annulus
    mean; see psspr_distance_printed for the broken printed form.
    """
    if protocol in ("hbdrw", "pusbrf"):
        return r * (params.r_min + params.hx)
    if protocol == "psspr":
        mean, _ = psspr_distance_mc(params.r_min, params.r_max,
                                    n_samples=n_samples, rng=rng)
        return r * mean
    raise InvalidParameter(f"unknown protocol {protocol!r}")


def comm_overhead(protocol: str, params: AnalysisInput,
                  tol: float = 1e-6) -> float:
    """Average hops to move one packet source-to-sink, per protocol.

    The two baselines integrate the law-of-cosines distance from the
    phantom ring to the sink over their respective angular supports; the
    sector scheme's cost is r_max directed hops, an expected same-hop
    walk of r_max/2, and the sector-boundary average of the straight
    exit-to-sink chords.
    """
    R = params.r_min + params.hx
    H = params.H

    def chord(alpha: float) -> float:
        return math.sqrt(H * H + R * R - 2.0 * R * H * math.cos(alpha))

    if protocol == "pusbrf":
        val, err = integrate.quad(chord, 0.0, math.pi, epsabs=tol / 10.0,
                                  epsrel=1e-12, limit=200)
        _check_quad(err, tol, val)
        return R + val / math.pi

    if protocol == "hbdrw":
        gamma = math.acos((R - 1) / R)
        v1, e1 = integrate.quad(chord, 0.0, gamma, epsabs=tol / 10.0, epsrel=1e-12, limit=200)
        v2, e2 = integrate.quad(chord, math.pi, math.pi + gamma,
                                epsabs=tol / 10.0, epsrel=1e-12, limit=200)
        _check_quad(max(e1, e2), tol, v1 + v2)
        return R + (v1 + v2) / (2.0 * gamma)

    if protocol == "psspr":
        mu = params.omega
        theta = math.pi / mu
        r_max = params.r_max
        tail = H - r_max
        for i in range(1, mu // 2):
            tail += math.sqrt(H * H + r_max * r_max
                              - 2.0 * r_max * H * math.cos(i * theta))
        mean_same_hop = r_max / 2.0  # E[beta]/180 * r_max over uniform beta
        return r_max + mean_same_hop + 2.0 * tail / mu

    raise InvalidParameter(f"unknown protocol {protocol!r}")


def _check_quad(err: float, tol: float, val: float) -> None:
    if err > tol:
        raise QuadratureFailure(f"estimated error {err} above tolerance {tol} "
                                f"(integral value {val})")


@dataclass(frozen=True)
class Table2Row:
    h: int
    r_min: int
    r_max: int
    hbdrw_over_pusbrf: float
    pusbrf_over_psspr: float


@dataclass(frozen=True)
class Table3Row:
    h: int
    r_min: int
    r_max: int
    distance_mc: float       # authoritative annulus mean, hop units
    distance_printed: float  # broken printed integral, shown for contrast


@dataclass(frozen=True)
class Table4Row:
    h: int
    r_min: int
    r_max: int
    n_hbdrw: float
    n_pusbrf: float
    n_psspr: float


@dataclass(frozen=True)
class Tables:
    table2: list[Table2Row]
    table3: list[Table3Row]
    table4: list[Table4Row]


def make_tables(mc_samples: int = 200_000, H_printed: int = 60) -> Tables:
    """Regenerate the three reference tables over h in {5,...,30}."""
    t2, t3, t4 = [], [], []
    for h in TABLE_H_VALUES:
        r_min, r_max = RMIN_RMAX_PRESETS[h]
        t2.append(Table2Row(h, r_min, r_max,
                            ratio_hbdrw_over_pusbrf(h),
                            ratio_pusbrf_over_psspr(h, r_min, r_max)))
        mc, _ = psspr_distance_mc(r_min, r_max, n_samples=mc_samples,
                                  rng=np.random.default_rng(h))
        t3.append(Table3Row(h, r_min, r_max, mc,
                            psspr_distance_printed(r_min, r_max, H_printed)))
        t4.append(Table4Row(h, r_min, r_max,
                            phantom_count_hbdrw(h),
                            phantom_count_pusbrf(h),
                            phantom_count_psspr(r_min, r_max, h - r_min)))
    return Tables(table2=t2, table3=t3, table4=t4)
