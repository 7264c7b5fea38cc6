"""Magnetostatics of the on-chip flux bias line.

The bias line is modeled as three thin straight conductors in the chip
plane: a semi-infinite feed running along the negative y axis up to the
origin, and two grounded return arms of length x_a along the x axis,
each carrying half the current.  The out-of-plane field of each segment
has a closed form obtained from the Biot-Savart line integral:

    feed:      B = mu0 I / (4 pi x) (1 - y / r)          r = sqrt(x^2+y^2)
    right arm: B = mu0 I / (8 pi y) (x/r - (x-x_a)/r_-)  r_- over (x-x_a, y)
    left arm:  B = mu0 I / (8 pi y) ((x+x_a)/r_+ - x/r)  r_+ over (x+x_a, y)

Mutual inductances follow from integrating the summed field over the
receiving loop areas: the two rectangles making up the SQUID loop for
M, and the oriented gap strips flanking the qubit arm for the parasitic
M'.  The published loop coordinates are not known exactly; the defaults
below are tuned so the quadrature reproduces the design values
M = 2.08 pH (about 1 mA per flux quantum) and M' = 0.22 pH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .qubit import CONSTANTS


class FieldSingularityError(ValueError):
    """Field evaluation requested on one of the conductors."""


@dataclass(frozen=True)
class FluxPatch:
    """Axis-aligned rectangle receiving flux, with traversal orientation.

    Coordinates in meters.  ``orientation`` is +1 or -1 and sets the
    sign with which the patch flux enters a loop sum (opposite sides of
    the qubit arm are traversed in opposite directions).
    """

    x1: float
    x2: float
    y1: float
    y2: float
    orientation: float = 1.0

    def __post_init__(self) -> None:
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError("rectangle needs x1 < x2 and y1 < y2")
        if self.orientation not in (-1.0, 1.0):
            raise ValueError("orientation must be +1 or -1")

    @property
    def area(self) -> float:
        return (self.x2 - self.x1) * (self.y2 - self.y1)


# Default receiving geometry (meters).  SQUID loop: two stacked
# rectangles of 125 and 241.5 um^2 centered above the feed; gap region:
# two strips flanking the qubit arm, whose center is offset 23 um from
# the feed axis (the asymmetry is what makes the parasitic flux
# nonzero).
_DEFAULT_SQUID = (
    FluxPatch(-12.5e-6, 12.5e-6, 8.4e-6, 13.4e-6),
    FluxPatch(-11.5e-6, 11.5e-6, 13.4e-6, 23.9e-6),
)
_DEFAULT_GAP = (
    FluxPatch(35e-6, 59e-6, 23.9e-6, 153.9e-6, orientation=1.0),
    FluxPatch(-13e-6, 11e-6, 23.9e-6, 153.9e-6, orientation=-1.0),
)


@dataclass(frozen=True)
class BiasLineGeometry:
    """Bias line layout and the loop areas that receive its flux.

    ``feed_width`` and ``arm_width`` document the physical conductor
    widths (5 and 2 um); the field model itself uses the thin-wire
    limit.
    """

    x_a: float = 24e-6
    feed_width: float = 5e-6
    arm_width: float = 2e-6
    squid_patches: tuple[FluxPatch, ...] = _DEFAULT_SQUID
    gap_patches: tuple[FluxPatch, ...] = _DEFAULT_GAP

    def __post_init__(self) -> None:
        if self.x_a <= 0:
            raise ValueError("arm length x_a must be positive")
        if not self.squid_patches:
            raise ValueError("at least one SQUID patch is required")


class FieldComponents(NamedTuple):
    feed: float
    right_arm: float
    left_arm: float


_SINGULARITY_PAD = 1e-12


def _on_conductor(geometry: BiasLineGeometry, x: float, y: float) -> bool:
    if abs(x) < _SINGULARITY_PAD and y <= 0:
        return True  # on the feed
    if abs(y) < _SINGULARITY_PAD and -geometry.x_a <= x <= geometry.x_a:
        return True  # on one of the arms
    return False


def field_components(geometry: BiasLineGeometry, x: float, y: float,
                     current: float = 1.0) -> FieldComponents:
    """Out-of-plane field of each segment at (x, y), tesla.

    Raises FieldSingularityError on the conductors themselves.
    """
    if _on_conductor(geometry, x, y):
        raise FieldSingularityError(f"({x}, {y}) lies on the bias line")
    mu0 = CONSTANTS.mu_0
    x_a = geometry.x_a
    r = math.hypot(x, y)
    # (1 - y/r)/x rewritten as x/(r (r + y)): regular on the x = 0 axis
    # above the feed, singular alongside it (y < 0) as it should be.
    feed = mu0 * current / (4 * math.pi) * x / (r * (r + y))
    if y == 0:
        # Collinear with the arms beyond their ends: they contribute nothing.
        return FieldComponents(feed, 0.0, 0.0)
    r_minus = math.hypot(x - x_a, y)
    r_plus = math.hypot(x + x_a, y)
    right = mu0 * current / (8 * math.pi * y) * (x / r - (x - x_a) / r_minus)
    left = mu0 * current / (8 * math.pi * y) * ((x + x_a) / r_plus - x / r)
    return FieldComponents(feed, right, left)


def field_at(geometry: BiasLineGeometry, x: float, y: float, current: float = 1.0) -> float:
    """Total out-of-plane field at (x, y) for the given current, tesla."""
    return float(sum(field_components(geometry, x, y, current)))


_QUAD_LIMIT = 200


def flux_through_rectangle(geometry: BiasLineGeometry, patch: FluxPatch,
                           current: float = 1.0, rel_tol: float = 1e-4) -> tuple[float, float]:
    """Flux through one patch by nested adaptive 1-D quadrature.

    Returns (flux, error_estimate); the orientation sign is applied.
    The quadrature is driven to a relative tolerance of ``rel_tol`` on
    the result.  The inner (y) integrals run three decades tighter than
    the outer so their residuals stay below the outer error estimate.
    """
    # Clamp the quadpack tolerances to their legal double-precision range;
    # a rel_tol below the floor is still honored by the error gate below,
    # which then reports the tolerance as unattainable.
    eps_outer = min(max(rel_tol, 2e-11), 1e-6)
    eps_inner = eps_outer * 1e-3

    def strip(x: float) -> float:
        value, _ = quad(lambda y: field_at(geometry, x, y, current),
                        patch.y1, patch.y2, epsabs=0.0, epsrel=eps_inner,
                        limit=_QUAD_LIMIT)
        return value

    value, err = quad(strip, patch.x1, patch.x2, epsabs=0.0, epsrel=eps_outer,
                      limit=_QUAD_LIMIT)
    if value != 0 and err > rel_tol * abs(value):
        raise ArithmeticError(
            f"quadrature error {err:.3e} exceeds {rel_tol:.0e} of flux {value:.3e}"
        )
    return patch.orientation * value, err


class InductanceReport(NamedTuple):
    m_squid: float           # H
    m_parasitic: float       # H
    periodicity_current: float  # A per flux quantum
    quadrature_error: float  # H, summed error estimates


def mutual_inductances(geometry: BiasLineGeometry) -> InductanceReport:
    """Mutual inductances of the bias line into SQUID loop and gap.

    M is the orientation-weighted flux sum over the SQUID patches at
    unit current; M' likewise over the gap patches (reported as a
    magnitude).  The bias-current periodicity is Phi_0 / M.
    """
    m = 0.0
    err = 0.0
    for patch in geometry.squid_patches:
        f, e = flux_through_rectangle(geometry, patch)
        m += f
        err += e
    mp = 0.0
    for patch in geometry.gap_patches:
        f, e = flux_through_rectangle(geometry, patch)
        mp += f
        err += e
    if m <= 0:
        raise ArithmeticError("SQUID coupling came out non-positive; check geometry")
    return InductanceReport(m, abs(mp), CONSTANTS.Phi_0 / m, err)
