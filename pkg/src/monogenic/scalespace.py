"""Frequency-domain construction of the monogenic scale-space.

Conventions, fixed once for the whole package:

* Images are sampled on a unit grid.  ``data[row, col]`` stores the value
  at x1 = col (horizontal) and x2 = row (vertical).
* The discrete transform follows the e^{-i<x,xi>} sign, so the angular
  frequencies of bin (k2, k1) on an H x W grid are
  xi1 = 2*pi*k1/W and xi2 = 2*pi*k2/H (fftfreq layout).
* Lowpass filtering to scale s multiplies the spectrum by e^{-s|xi|}.
* The two quadrature components carry the multiplier -i xi_j/|xi|, which
  restricted to one dimension is the classical Hilbert-transform pair
  (cos -> sin).  The isotropic Hilbert transform negates them, and it is
  the negated pair that extends a signal monogenically into the half
  space: with v = -R(Pf) the pair (u, v) is annihilated by d/ds + D.
  All scale-space identities checked in :mod:`monogenic.verify` hold in
  this convention and fail with the opposite sign.
* The multiplier is zeroed at the DC bin and at the (up to three)
  self-conjugate Nyquist bins; those bins cannot carry an odd imaginary
  multiplier on a real field.

Everything here acts on the periodic extension of the image.  The
multiplier algebra is then exact: lowpass composition is a semigroup and
all filters commute to roundoff.  Callers that want to suppress
wrap-around artefacts mirror-pad once around their whole pipeline
(:func:`mirror_pad` / :func:`crop`) rather than around individual calls,
which would break those identities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ImageTooSmallError, NegativeScaleError, NonRealOutputError

REAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# field containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """A real-valued image-domain function on a unit grid (row-major)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("ScalarField needs a non-empty 2D array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ScalarField samples must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class VectorField:
    """Pair of scalar fields: the e1 and e2 coefficients of a vector map."""

    v1: ScalarField
    v2: ScalarField

    def __post_init__(self):
        if self.v1.shape != self.v2.shape:
            raise ValueError("vector components must share dimensions")

    @property
    def shape(self):
        return self.v1.shape

    def magnitude(self) -> ScalarField:
        return ScalarField(np.hypot(self.v1.data, self.v2.data))


@dataclass(frozen=True)
class MonogenicField:
    """Scalar part u and vector part v of a signal at one scale s."""

    u: ScalarField
    v: VectorField
    scale: float

    def __post_init__(self):
        if self.u.shape != self.v.shape:
            raise ValueError("u and v must share dimensions")
        if not (self.scale >= 0.0):
            raise ValueError("scale must be non-negative")

    @property
    def shape(self):
        return self.u.shape

    def components(self):
        """(u, v1, v2) as raw arrays."""
        return self.u.data, self.v.v1.data, self.v.v2.data


@dataclass(frozen=True)
class SpectralGrid:
    """Per-bin angular frequencies for a width x height transform."""

    xi1: np.ndarray
    xi2: np.ndarray
    magnitude: np.ndarray

    @property
    def shape(self):
        return self.magnitude.shape


@lru_cache(maxsize=32)
def _grid_arrays(height: int, width: int):
    xi1 = (2.0 * np.pi * np.fft.fftfreq(width))[None, :] * np.ones((height, 1))
    xi2 = (2.0 * np.pi * np.fft.fftfreq(height))[:, None] * np.ones((1, width))
    mag = np.hypot(xi1, xi2)
    xi1.setflags(write=False)
    xi2.setflags(write=False)
    mag.setflags(write=False)
    return xi1, xi2, mag


def spectral_grid(height: int, width: int) -> SpectralGrid:
    xi1, xi2, mag = _grid_arrays(height, width)
    return SpectralGrid(xi1, xi2, mag)


@lru_cache(maxsize=32)
def _riesz_multipliers(height: int, width: int):
    """-i xi_j / |xi| with the unpairable bins zeroed.

    The component multiplier must be odd in its own frequency for a real
    output.  The DC bin and, on even-sized axes, the whole Nyquist line
    of that axis (where xi_j = -pi has no sign partner) cannot satisfy
    that, so the multiplier is set to 0 there.
    """
    xi1, xi2, mag = _grid_arrays(height, width)
    safe = np.where(mag > 0.0, mag, 1.0)
    r1 = -1j * xi1 / safe
    r2 = -1j * xi2 / safe
    r1[:, 0] = 0.0
    r2[0, :] = 0.0
    if width % 2 == 0:
        r1[:, width // 2] = 0.0
    if height % 2 == 0:
        r2[height // 2, :] = 0.0
    r1.setflags(write=False)
    r2.setflags(write=False)
    return r1, r2


def _apply_multiplier(data: np.ndarray, multiplier) -> np.ndarray:
    """ifft(multiplier * fft(data)).real with a symmetry guard."""
    out = np.fft.ifft2(multiplier * np.fft.fft2(data))
    scale = max(float(np.abs(data).max()), 1e-30)
    resid = float(np.abs(out.imag).max())
    if resid > REAL_TOL * scale:
        raise NonRealOutputError(
            f"imaginary residue {resid:g} exceeds {REAL_TOL:g} * {scale:g}")
    return np.ascontiguousarray(out.real)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def riesz_transform(f: ScalarField) -> VectorField:
    """Quadrature pair with multiplier -i xi_j / |xi| (cos -> sin in 1D)."""
    r1, r2 = _riesz_multipliers(f.height, f.width)
    return VectorField(ScalarField(_apply_multiplier(f.data, r1)),
                       ScalarField(_apply_multiplier(f.data, r2)))


def isotropic_hilbert(f: ScalarField) -> VectorField:
    """Vector-valued Hilbert transform: the negated quadrature pair.

    This is the sign that combines with the original signal into a
    monogenic (half-space extendable) pair.
    """
    r = riesz_transform(f)
    return VectorField(ScalarField(-r.v1.data), ScalarField(-r.v2.data))


def poisson_filter(f: ScalarField, s: float) -> ScalarField:
    """Lowpass to scale s: spectrum times e^{-s|xi|}.  s = 0 is the identity."""
    if s < 0.0:
        raise NegativeScaleError(f"scale {s} < 0")
    if s == 0.0:
        return ScalarField(f.data.copy())
    mag = _grid_arrays(f.height, f.width)[2]
    return ScalarField(_apply_multiplier(f.data, np.exp(-s * mag)))


def conjugate_poisson_filter(f: ScalarField, s: float) -> VectorField:
    """Vector part of the scale-s monogenic extension of f.

    Computed as isotropic_hilbert(poisson_filter(f, s)); the multipliers
    commute, so the order is irrelevant.
    """
    if s <= 0.0:
        raise NegativeScaleError(f"scale {s} must be positive")
    mag = _grid_arrays(f.height, f.width)[2]
    r1, r2 = _riesz_multipliers(f.height, f.width)
    p = np.exp(-s * mag)
    return VectorField(ScalarField(_apply_multiplier(f.data, -r1 * p)),
                       ScalarField(_apply_multiplier(f.data, -r2 * p)))


def monogenic_scale(f: ScalarField, s: float) -> MonogenicField:
    """The pair (u, v) = (lowpass, conjugate lowpass) of f at scale s."""
    if s <= 0.0:
        raise NegativeScaleError(f"scale {s} must be positive")
    return MonogenicField(poisson_filter(f, s), conjugate_poisson_filter(f, s), s)


def scale_derivative(f: ScalarField, s: float, mode: str = "analytic",
                     delta: float | None = None):
    """(du/ds, dv/ds) of the monogenic pair at scale s.

    "analytic" differentiates the multiplier: spectra are multiplied by
    -|xi| e^{-s|xi|} (plus the quadrature factors for the vector part).
    "fd" takes central differences (g(s+delta) - g(s-delta)) / (2 delta);
    the two agree to O(delta^2).
    """
    if s <= 0.0:
        raise NegativeScaleError(f"scale {s} must be positive")
    if mode == "analytic":
        mag = _grid_arrays(f.height, f.width)[2]
        r1, r2 = _riesz_multipliers(f.height, f.width)
        dp = -mag * np.exp(-s * mag)
        du = ScalarField(_apply_multiplier(f.data, dp))
        dv = VectorField(ScalarField(_apply_multiplier(f.data, -r1 * dp)),
                         ScalarField(_apply_multiplier(f.data, -r2 * dp)))
        return du, dv
    if mode == "fd":
        if delta is None:
            delta = 1e-3 * max(s, 1.0)
        if not 0.0 < delta < s:
            raise NegativeScaleError(
                f"finite-difference step {delta} must lie in (0, {s})")
        hi = monogenic_scale(f, s + delta)
        lo = monogenic_scale(f, s - delta)
        inv = 1.0 / (2.0 * delta)
        du = ScalarField((hi.u.data - lo.u.data) * inv)
        dv = VectorField(
            ScalarField((hi.v.v1.data - lo.v.v1.data) * inv),
            ScalarField((hi.v.v2.data - lo.v.v2.data) * inv))
        return du, dv
    raise ValueError(f"unknown mode {mode!r}")


def monogenic_shift(field: MonogenicField, ds: float) -> MonogenicField:
    """Move an existing monogenic field to scale + ds via the semigroup.

    Negative ds inverts the lowpass (multiplier e^{+|ds||xi|}); that is only
    well conditioned for small steps on effectively band-limited fields,
    which is how the identity checkers use it.
    """
    s_new = field.scale + ds
    if s_new <= 0.0:
        raise NegativeScaleError(f"shifted scale {s_new} must stay positive")
    mag = _grid_arrays(*field.shape)[2]
    m = np.exp(-ds * mag)
    u, v1, v2 = field.components()
    return MonogenicField(
        ScalarField(_apply_multiplier(u, m)),
        VectorField(ScalarField(_apply_multiplier(v1, m)),
                    ScalarField(_apply_multiplier(v2, m))),
        s_new)


# ---------------------------------------------------------------------------
# spatial derivatives
# ---------------------------------------------------------------------------

def spatial_gradient(f: ScalarField) -> VectorField:
    """Central differences in the interior, one-sided at the borders."""
    if f.width < 3 or f.height < 3:
        raise ImageTooSmallError("gradient needs at least 3 samples per axis")
    d2, d1 = np.gradient(f.data)
    return VectorField(ScalarField(d1), ScalarField(d2))


def cyclic_diff(data: np.ndarray, axis: int, order: int = 2) -> np.ndarray:
    """Periodic central difference along an axis (order 2 or 4).

    Matches the periodic domain of the spectral filters, so plane-wave
    fixtures see no boundary error.
    """
    if order == 2:
        return (np.roll(data, -1, axis=axis) - np.roll(data, 1, axis=axis)) / 2.0
    if order == 4:
        return (8.0 * (np.roll(data, -1, axis=axis) - np.roll(data, 1, axis=axis))
                - (np.roll(data, -2, axis=axis) - np.roll(data, 2, axis=axis))) / 12.0
    raise ValueError(f"unsupported order {order}")


def cyclic_gradient(data: np.ndarray, order: int = 2):
    """(d/dx1, d/dx2) with periodic stencils; returns raw arrays."""
    return cyclic_diff(data, 1, order), cyclic_diff(data, 0, order)


# ---------------------------------------------------------------------------
# boundary handling for the image pipeline
# ---------------------------------------------------------------------------

def mirror_pad(f: ScalarField, margin: int) -> tuple[ScalarField, int]:
    """Symmetric padding, clipped so the reflection stays valid.

    Returns the padded field and the margin actually applied.
    """
    if margin < 0:
        raise ValueError("margin must be non-negative")
    m = min(margin, f.height, f.width)
    if m == 0:
        return f, 0
    return ScalarField(np.pad(f.data, m, mode="symmetric")), m


def crop(data: np.ndarray, margin: int) -> np.ndarray:
    if margin == 0:
        return data
    return data[margin:-margin, margin:-margin]
