"""Synthetic test images.

The pipeline and the identity checkers are exercised on these instead of
photographs.  Values are floats, typically inside [0, 1] with a positive
base level: phase features divide by the local amplitude, so fixtures
avoid large exactly-zero regions just like natural gray images do.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erf

from .scalespace import ScalarField


def _axes(width: int, height: int):
    x1 = np.arange(width, dtype=np.float64)[None, :] + np.zeros((height, 1))
    x2 = np.arange(height, dtype=np.float64)[:, None] + np.zeros((1, width))
    return x1, x2


def vertical_step(width: int = 64, height: int = 64, column: float = 31.0,
                  low: float = 0.35, high: float = 0.85,
                  edge_width: float = 0.7) -> ScalarField:
    """Soft vertical step: erf profile centred on `column`.

    The sub-pixel centre and width are chosen so the response peak of
    every detector lands on a grid column; a hard step gives classical
    3x3 stencils two exactly-tied columns, which no non-maximum
    suppression can thin.
    """
    x1, _ = _axes(width, height)
    prof = 0.5 * (1.0 + erf((x1 - column) / (edge_width * np.sqrt(2.0))))
    return ScalarField(low + (high - low) * prof)


def ramp(width: int = 64, height: int = 64, slope: float = 1.0,
         axis: str = "x1", offset: float = 0.0) -> ScalarField:
    x1, x2 = _axes(width, height)
    return ScalarField(offset + slope * (x1 if axis == "x1" else x2))


def plane_wave(width: int, height: int, cycles: float = 1.0,
               phase: float = 0.0, amplitude: float = 1.0,
               offset: float = 0.0, axis: str = "x1") -> ScalarField:
    """cos wave along one axis; `cycles` counts full periods across it."""
    x1, x2 = _axes(width, height)
    x = x1 if axis == "x1" else x2
    n = width if axis == "x1" else height
    om = 2.0 * np.pi * cycles / n
    return ScalarField(offset + amplitude * np.cos(om * x + phase))


def radial_blob(width: int = 96, height: int = 96, sigma: float = 9.0,
                base: float = 0.3, amplitude: float = 0.6,
                center: tuple[float, float] | None = None) -> ScalarField:
    x1, x2 = _axes(width, height)
    cx, cy = center if center is not None else (width / 2.0, height / 2.0)
    r2 = (x1 - cx) ** 2 + (x2 - cy) ** 2
    return ScalarField(base + amplitude * np.exp(-r2 / (2.0 * sigma ** 2)))


def band_limited_noise(width: int = 128, height: int = 128, sigma: float = 4.0,
                       cutoff: float | None = 0.9, seed: int = 0) -> ScalarField:
    """Zero-mean unit-variance noise with a Gaussian spectral envelope,
    hard-truncated above `cutoff` (angular frequency) so it is literally
    band limited."""
    rng = np.random.default_rng(seed)
    spectrum = np.fft.fft2(rng.standard_normal((height, width)))
    xi1 = (2 * np.pi * np.fft.fftfreq(width))[None, :]
    xi2 = (2 * np.pi * np.fft.fftfreq(height))[:, None]
    mag = np.hypot(xi1 + np.zeros_like(xi2), xi2 + np.zeros_like(xi1))
    env = np.exp(-0.5 * (sigma * mag) ** 2)
    if cutoff is not None:
        env = np.where(mag <= cutoff, env, 0.0)
    env[0, 0] = 0.0
    out = np.fft.ifft2(spectrum * env).real
    return ScalarField(out / out.std())


def textured_scene(width: int = 96, height: int = 96, seed: int = 3,
                   noise_level: float = 0.05) -> ScalarField:
    """A soft step and a blob under pixel noise; the sweep fixture.

    Small scales resolve the noise as a dense froth of edges, large scales
    keep only the two structures, so the edge-pixel count drops with s.
    """
    x1, x2 = _axes(width, height)
    noise = band_limited_noise(width, height, sigma=1.0, cutoff=None, seed=seed)
    img = (0.55 + 0.2 * np.tanh((x1 - width / 2.0) / 2.0)
           + 0.18 * np.exp(-((x1 - 30.0) ** 2 + (x2 - 30.0) ** 2) / 72.0)
           + noise_level * noise.data)
    return ScalarField(np.clip(img, 0.05, 1.1))
