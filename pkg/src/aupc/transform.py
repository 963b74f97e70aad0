"""Core plane deformation for angle-uniform parallel coordinates.

A Cartesian line c1*x1 + c2*x2 + c3 = 0 has a dual point in parallel
coordinates. This module maps that dual point into a bounded plane where
the horizontal coordinate u is a linear function of the line's orientation
angle, and the vertical coordinate v preserves the intercept-proportional
structure of the undeformed plot relative to the pair center.

Parallel-coordinate lines (the duals of 2D data points) become smooth
curves sampled at equal angle intervals over u in [-0.5, 1.5].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

TWIN_ANGLE_TOL = 1e-12  # |theta - pi/4| below this takes the twin branch
_QUARTER_PI = math.pi / 4
_HALF_PI = math.pi / 2


class InvalidLineError(ValueError):
    """Line coordinates violate their invariants (e.g. c1 = c2 = 0)."""


class LimitCaseError(ValueError):
    """The direct v formula is undefined here; use limit_v_at instead."""


class NumericalLimitError(ArithmeticError):
    """One-sided limit evaluations failed to agree."""


@dataclass(frozen=True)
class LineCoords:
    """Homogeneous coordinates [c1, c2, c3] of c1*x1 + c2*x2 + c3 = 0."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.c1, self.c2, self.c3)):
            raise InvalidLineError(f"non-finite line coordinates {self}")
        if self.c1 == 0.0 and self.c2 == 0.0:
            raise InvalidLineError("c1 and c2 must not both be zero")

    def scaled(self, lam: float) -> "LineCoords":
        if lam == 0.0:
            raise InvalidLineError("scale factor must be nonzero")
        return LineCoords(lam * self.c1, lam * self.c2, lam * self.c3)


@dataclass(frozen=True)
class TraditionalIndexedPoint:
    """Homogeneous dual point of a Cartesian line in the undeformed plot."""

    hx: float
    hy: float
    hw: float

    @property
    def at_infinity(self) -> bool:
        return self.hw == 0.0

    def affine(self) -> tuple[float, float]:
        if self.at_infinity:
            raise ZeroDivisionError("point at infinity has no affine coordinates")
        return self.hx / self.hw, self.hy / self.hw


@dataclass(frozen=True)
class TransformedPoint:
    u: float
    v: float


@dataclass(frozen=True)
class Single:
    point: TransformedPoint


@dataclass(frozen=True)
class Twin:
    """Pair of locations jointly representing a slope-one line."""

    left: TransformedPoint   # at u = -0.5
    right: TransformedPoint  # at u = +1.5


TransformResult = Single | Twin


@dataclass(frozen=True)
class TransformConfig:
    """Numerical knobs for the deformation.

    epsilon is the offset used when evaluating v at the three singular u
    values by the limit method; delta_theta is the angular sampling step
    for whole curves.
    """

    epsilon: float = 1e-6
    delta_theta: float = math.pi / 360
    scaling_enabled: bool = False

    def __post_init__(self):
        if not (self.epsilon > 0.0):
            raise ValueError("epsilon must be > 0")
        if not (self.delta_theta > 0.0):
            raise ValueError("delta_theta must be > 0")
        if not (self.epsilon < self.delta_theta):
            raise ValueError("epsilon must be smaller than delta_theta")
        # each sampled theta range spans pi/4; require at least 8 steps
        if self.delta_theta > _QUARTER_PI / 8:
            raise ValueError("delta_theta too coarse: fewer than 8 steps per range")


@dataclass
class TransformedCurve:
    """Deformed parallel-coordinate line, sampled with u strictly increasing."""

    u: np.ndarray
    v: np.ndarray
    record: int | None = None
    pair: int | None = None

    def v_at(self, u: float) -> float:
        """Linear interpolation of the sampled curve."""
        return float(np.interp(u, self.u, self.v))


def line_from_slope_intercept(a: float, b: float) -> LineCoords:
    """Line coordinates of x2 = a*x1 + b, as the representative [a, -1, b]."""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise InvalidLineError(f"slope/intercept must be finite, got ({a}, {b})")
    return LineCoords(a, -1.0, b)


def dual_point_traditional(l: LineCoords) -> TraditionalIndexedPoint:
    """Dual point of a Cartesian line in undeformed parallel coordinates.

    Vertical lines (c2 = 0) map onto the left axis; lines of slope one
    (c1 + c2 = 0) map to a point at infinity.
    """
    if l.c2 == 0.0:
        return TraditionalIndexedPoint(0.0, -l.c3 / l.c1, 1.0)
    return TraditionalIndexedPoint(l.c2, -l.c3, l.c1 + l.c2)


def orientation(l: LineCoords) -> float:
    """Orientation angle of the line, in [-pi/2, pi/2].

    Vertical lines are canonicalized to +pi/2.
    """
    if l.c2 == 0.0:
        return _HALF_PI
    return math.atan(-l.c1 / l.c2)


def horizontal_u(theta: float) -> float | tuple[float, float]:
    """Angle-linear horizontal coordinate.

    Returns a single u for theta != pi/4, or the pair (-0.5, 1.5) when the
    orientation is pi/4 within TWIN_ANGLE_TOL (slope-one lines live at both
    horizontal bounds at once).
    """
    if not -_HALF_PI <= theta <= _HALF_PI:
        raise ValueError(f"theta {theta} outside [-pi/2, pi/2]")
    if abs(theta - _QUARTER_PI) <= TWIN_ANGLE_TOL:
        return (-0.5, 1.5)
    if theta > _QUARTER_PI:
        return 2.0 * theta / math.pi - 1.0
    return 2.0 * theta / math.pi + 1.0


def theta_of_u(u: float) -> float:
    """Inverse of the horizontal map; u = 0 canonically yields +pi/2."""
    if not -0.5 <= u <= 1.5:
        raise ValueError(f"u {u} outside [-0.5, 1.5]")
    if u <= 0.0:
        return (u + 1.0) * _HALF_PI
    return (u - 1.0) * _HALF_PI


def vertical_v(l: LineCoords, u: float) -> float:
    """Structure-preserving vertical coordinate 2*c3*(u - 0.5)/(c1 - c2).

    Undefined for slope-one-diagonal degeneracy c1 = c2 and at the three
    singular u values; those cases go through the limit method.
    """
    if l.c1 == l.c2:
        raise LimitCaseError("c1 = c2 (slope -1): v must be taken as a limit")
    if min(abs(u + 0.5), abs(u - 0.5), abs(u - 1.5)) <= TWIN_ANGLE_TOL:
        raise LimitCaseError(f"u = {u} is a limit point; use limit_v_at")
    return 2.0 * l.c3 * (u - 0.5) / (l.c1 - l.c2)


def _v_point_family(p1: float, p2: float, u: float) -> float:
    """v of the transformed curve of data point (p1, p2) at a regular u."""
    theta = theta_of_u(u)
    if abs(abs(theta) - _HALF_PI) <= 1e-15:
        return p1
    a = math.tan(theta)
    b = p2 - a * p1
    return 2.0 * b * (u - 0.5) / (a + 1.0)


def limit_v_at(p: tuple[float, float], target: float, cfg: TransformConfig) -> float:
    """v at the singular u values of a data point's transformed curve.

    u = 0.5 averages the two one-sided values at 0.5 -/+ epsilon (error
    O(eps^2)); the bounds -0.5 and 1.5 are one-sided and use Richardson
    extrapolation of the eps and 2*eps evaluations to the same accuracy.
    """
    p1, p2 = p
    eps = cfg.epsilon

    def one_sided(u0: float, step: float) -> float:
        # Richardson extrapolation removes the O(eps) term of the offset
        # evaluation, leaving an O(eps^2) estimate of the limit.
        return (2.0 * _v_point_family(p1, p2, u0 + step)
                - _v_point_family(p1, p2, u0 + 2.0 * step))

    if target == 0.5:
        lo = one_sided(0.5, -eps)
        hi = one_sided(0.5, eps)
        if abs(hi - lo) > 1e-6:
            raise NumericalLimitError(
                f"one-sided limits at u=0.5 disagree: {lo} vs {hi}"
            )
        return 0.5 * (lo + hi)
    if target == -0.5:
        return one_sided(-0.5, eps)
    if target == 1.5:
        return one_sided(1.5, -eps)
    raise ValueError(f"target {target} is not one of -0.5, 0.5, 1.5")


def scaling_spline_build() -> "ScalingSpline":
    return ScalingSpline()


_SCALING_KNOTS = (-0.5, -0.25, 0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0, 1.25, 1.5)
_SCALING_VALUES = (1.306, 1.153, 1.0, 0.9312, 0.8555, 0.812, 0.8555, 0.9312,
                   1.0, 1.153, 1.306)


@dataclass(frozen=True)
class ScalingSpline:
    """Optional C2 vertical scaling factor s(u) over [-0.5, 1.5].

    A natural cubic spline through eleven fixed control points; it flattens
    curves inside the attribute pair (s < 1 for 0 < u < 1) and leaves the
    axes untouched (s(0) = s(1) = 1).
    """

    knots: tuple[float, ...] = _SCALING_KNOTS
    values: tuple[float, ...] = _SCALING_VALUES
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        cs = CubicSpline(self.knots, self.values, bc_type="natural")
        object.__setattr__(self, "_spline", cs)

    def __call__(self, u):
        return self._spline(u)

    def derivative(self, u, order: int = 1):
        return self._spline(u, order)


_DEFAULT_SPLINE = ScalingSpline()


def transform_indexed_point(l: LineCoords, cfg: TransformConfig) -> TransformResult:
    """Deformed location(s) of a Cartesian line's dual point.

    Slope-one lines come out as a Twin at the two horizontal bounds;
    everything else is a Single. The result is invariant under homogeneous
    rescaling of the line coordinates.
    """
    theta = orientation(l)
    scale = _DEFAULT_SPLINE if cfg.scaling_enabled else None

    def _pt(u: float, v: float) -> TransformedPoint:
        if scale is not None:
            v = float(v * scale(u))
        return TransformedPoint(u, v)

    if abs(theta - _QUARTER_PI) <= TWIN_ANGLE_TOL:
        # slope +1: c1 - c2 is nonzero, the v formula is continuous at the bounds
        v_left = 2.0 * l.c3 * (-1.0) / (l.c1 - l.c2)
        v_right = 2.0 * l.c3 * 1.0 / (l.c1 - l.c2)
        return Twin(_pt(-0.5, v_left), _pt(1.5, v_right))

    u = horizontal_u(theta)
    assert isinstance(u, float)
    if abs(theta + _QUARTER_PI) <= TWIN_ANGLE_TOL:
        # slope -1, u = 0.5: limit along the fixed-intercept family, which is
        # the pencil of lines through the intercept point (0, b)
        b = -l.c3 / l.c2
        return Single(_pt(0.5, limit_v_at((0.0, b), 0.5, cfg)))
    return Single(_pt(u, vertical_v(l, u)))


def curve_u_grid(cfg: TransformConfig) -> np.ndarray:
    """Strictly increasing u samples over [-0.5, 1.5] for curve rendering.

    Derived from an equal-angle sampling at cfg.delta_theta of the two
    orientation ranges, with the axes (u = 0, 1), the pair center
    (u = 0.5) and both bounds injected exactly.
    """
    du = cfg.delta_theta * 2.0 / math.pi
    left = np.arange(-0.5 + du, 0.0, du)         # theta in (pi/4, pi/2)
    right = np.arange(0.0 + du, 1.5, du)         # theta in (-pi/2, pi/4)
    grid = np.concatenate([left, right, [-0.5, 0.0, 0.5, 1.0, 1.5]])
    grid.sort()
    # drop near-duplicates of the injected exact values
    keep = np.ones(len(grid), dtype=bool)
    keep[1:] = np.diff(grid) > 1e-9
    return grid[keep]


def curve_v_batch(p1: np.ndarray, p2: np.ndarray, u_grid: np.ndarray,
                  cfg: TransformConfig) -> np.ndarray:
    """v samples of many records' curves on a shared u grid.

    Returns an (R, M) array for R records. Singular u values use the
    limit-method closed forms (p1 - p2, 2*(p1 + p2)/pi, p2 - p1), which the
    test suite pins against the epsilon-sweep oracle.
    """
    p1 = np.asarray(p1, dtype=float)[:, None]
    p2 = np.asarray(p2, dtype=float)[:, None]
    u = np.asarray(u_grid, dtype=float)[None, :]
    theta = np.where(u <= 0.0, (u + 1.0) * _HALF_PI, (u - 1.0) * _HALF_PI)
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.tan(theta)
        b = p2 - a * p1
        v = 2.0 * b * (u - 0.5) / (a + 1.0)
    at = np.isclose
    v = np.where(at(u, 0.0, atol=1e-12), p1, v)
    v = np.where(at(u, 1.0, atol=1e-12), p2, v)
    v = np.where(at(u, 0.5, atol=1e-12), 2.0 * (p1 + p2) / math.pi, v)
    v = np.where(at(u, -0.5, atol=1e-12), p1 - p2, v)
    v = np.where(at(u, 1.5, atol=1e-12), p2 - p1, v)
    if cfg.scaling_enabled:
        v = v * _DEFAULT_SPLINE(u_grid)[None, :]
    return v


def transform_pc_line(p: tuple[float, float], cfg: TransformConfig,
                      record: int | None = None,
                      pair: int | None = None) -> TransformedCurve:
    """Full transformed curve of the data point p = (p1, p2).

    Samples the pencil of Cartesian lines through p at equal angle steps;
    the singular u values are filled in by the limit method. The curve
    passes exactly through (0, p1) and (1, p2) in unscaled mode.
    """
    p1, p2 = float(p[0]), float(p[1])
    if not (math.isfinite(p1) and math.isfinite(p2)):
        raise ValueError(f"point must be finite, got {p}")
    u_grid = curve_u_grid(cfg)
    v = np.empty_like(u_grid)
    for i, u in enumerate(u_grid):
        if abs(u + 0.5) <= 1e-12 or abs(u - 0.5) <= 1e-12 or abs(u - 1.5) <= 1e-12:
            v[i] = limit_v_at((p1, p2), round(u * 2) / 2, cfg)
        elif abs(u) <= 1e-12:
            v[i] = p1
        elif abs(u - 1.0) <= 1e-12:
            v[i] = p2
        else:
            v[i] = _v_point_family(p1, p2, u)
    if cfg.scaling_enabled:
        v = v * _DEFAULT_SPLINE(u_grid)
    return TransformedCurve(u=u_grid, v=v, record=record, pair=pair)
