"""Edge-gradient methods and the thinning pipeline.

Four phase-based responses (all vector valued, evaluated pointwise from a
monogenic field and its scale derivatives):

* dpc       (u dv/ds - v du/ds) / (u^2 + |v|^2)
* la        (u Du + |v| D|v|) / (u^2 + |v|^2), the gradient of ln A
* mdpc      dpc minus the orientation-curvature term Vec[(Dn)n] sin^2(theta)
* la_mdpc   mdpc minus la

plus two classical baselines (sobel, canny).  Vector responses feed
non-maximum suppression through their magnitude and direction.

Magnitudes are commensurated across methods by mapping the 99th percentile
to 10.0 before hysteresis, so one (low, high) = (1.0, 3.5) threshold pair
is meaningful for responses of wildly different dynamic range.  Both the
percentile and the target are configurable.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import BadThresholdsError, ImageTooSmallError, NegativeScaleError
from .features import DEFAULT_EPS_REL
from .scalespace import (MonogenicField, ScalarField, crop,
                         cyclic_gradient, mirror_pad, monogenic_scale,
                         scale_derivative)

METHODS = ("canny", "sobel", "dpc", "la", "mdpc", "la_mdpc")
PHASE_METHODS = ("dpc", "la", "mdpc", "la_mdpc")

_SOBEL_X = np.array([[-1.0, 0.0, 1.0],
                     [-2.0, 0.0, 2.0],
                     [-1.0, 0.0, 1.0]])


@dataclass(frozen=True)
class GradientMap:
    """Vector-valued edge response with its magnitude."""

    g1: ScalarField
    g2: ScalarField
    magnitude: ScalarField
    method: str
    scale: float

    @classmethod
    def from_components(cls, g1: np.ndarray, g2: np.ndarray,
                        method: str, scale: float) -> "GradientMap":
        return cls(ScalarField(g1), ScalarField(g2),
                   ScalarField(np.hypot(g1, g2)), method, scale)

    @property
    def shape(self):
        return self.magnitude.shape


@dataclass(frozen=True)
class EdgeMap:
    """Binary edge mask plus the parameters that produced it."""

    mask: np.ndarray
    provenance: dict

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        object.__setattr__(self, "mask", m)

    def count(self) -> int:
        return int(self.mask.sum())


@dataclass(frozen=True)
class DetectorConfig:
    method: str = "mdpc"
    scale: float = 0.5
    fd_step: float | None = None          # defaults to 1e-3 * max(scale, 1)
    mask_eps: float = DEFAULT_EPS_REL     # relative to max amplitude
    nms_radius: float = 1.5
    low: float = 1.0
    high: float = 3.5
    pad: int = 16
    canny_sigma: float = 1.0
    derivative_mode: str = "analytic"     # or "fd"
    norm_percentile: float = 99.0
    norm_target: float = 10.0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.scale <= 0.0:
            raise NegativeScaleError(f"scale {self.scale} must be positive")
        if self.low >= self.high:
            raise BadThresholdsError(f"low {self.low} must be below high {self.high}")
        if self.nms_radius <= 0.0:
            raise ValueError("nms_radius must be positive")
        if self.pad < 0:
            raise ValueError("pad must be non-negative")
        if self.fd_step is not None and self.fd_step <= 0.0:
            raise ValueError("fd_step must be positive")
        if self.derivative_mode not in ("analytic", "fd"):
            raise ValueError("derivative_mode must be 'analytic' or 'fd'")

    def replace(self, **kw) -> "DetectorConfig":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class DetectionResult:
    edges: EdgeMap
    gradient: GradientMap


# ---------------------------------------------------------------------------
# phase-based responses
# ---------------------------------------------------------------------------

def _masked_ratio(f: MonogenicField, eps_rel: float):
    u, v1, v2 = f.components()
    amp2 = u * u + v1 * v1 + v2 * v2
    amp = np.sqrt(amp2)
    eps = eps_rel * max(float(amp.max()), 1e-300)
    mask = amp > eps
    return u, v1, v2, np.where(mask, amp2, 1.0), mask, eps


def dpc_gradient(f: MonogenicField, df_ds, eps_rel: float = DEFAULT_EPS_REL) -> GradientMap:
    """Scale derivative of the phase vector, in its ratio form."""
    du, dv = df_ds
    u, v1, v2, amp2, mask, _ = _masked_ratio(f, eps_rel)
    us, v1s, v2s = du.data, dv.v1.data, dv.v2.data
    g1 = np.where(mask, (u * v1s - v1 * us) / amp2, 0.0)
    g2 = np.where(mask, (u * v2s - v2 * us) / amp2, 0.0)
    return GradientMap.from_components(g1, g2, "dpc", f.scale)


def la_gradient(f: MonogenicField, eps_rel: float = DEFAULT_EPS_REL,
                order: int = 2) -> GradientMap:
    """Gradient of the attenuation, assembled from u and |v| directly."""
    u, v1, v2, amp2, mask, _ = _masked_ratio(f, eps_rel)
    vn = np.hypot(v1, v2)
    du1, du2 = cyclic_gradient(u, order)
    dv1, dv2 = cyclic_gradient(vn, order)
    g1 = np.where(mask, (u * du1 + vn * dv1) / amp2, 0.0)
    g2 = np.where(mask, (u * du2 + vn * dv2) / amp2, 0.0)
    return GradientMap.from_components(g1, g2, "la", f.scale)


def orientation_correction(f: MonogenicField, eps_rel: float = DEFAULT_EPS_REL,
                           order: int = 2):
    """Vec[(D n) n] sin^2(theta) for n = v/|v|, in closed form.

    D n of a unit vector field has only scalar and bivector grades
    (-div n and curl n); multiplying by n back gives a pure vector:

        e1: -div(n) n1 - curl(n) n2      e2: -div(n) n2 + curl(n) n1

    Zero (by convention) wherever the orientation is masked.
    """
    u, v1, v2, amp2, mask, eps = _masked_ratio(f, eps_rel)
    vn = np.hypot(v1, v2)
    omask = vn > eps
    safe = np.where(omask, vn, 1.0)
    n1 = np.where(omask, v1 / safe, 0.0)
    n2 = np.where(omask, v2 / safe, 0.0)
    div_n = cyclic_gradient(n1, order)[0] + cyclic_gradient(n2, order)[1]
    curl_n = cyclic_gradient(n2, order)[0] - cyclic_gradient(n1, order)[1]
    sin2 = np.where(mask, (vn * vn) / amp2, 0.0)
    c1 = np.where(omask, (-div_n * n1 - curl_n * n2) * sin2, 0.0)
    c2 = np.where(omask, (-div_n * n2 + curl_n * n1) * sin2, 0.0)
    return c1, c2


def mdpc_gradient(f: MonogenicField, df_ds, eps_rel: float = DEFAULT_EPS_REL) -> GradientMap:
    """dpc response minus the orientation-curvature correction."""
    base = dpc_gradient(f, df_ds, eps_rel)
    c1, c2 = orientation_correction(f, eps_rel)
    return GradientMap.from_components(base.g1.data - c1, base.g2.data - c2,
                                       "mdpc", f.scale)


def mixed_gradient(f: MonogenicField, df_ds, eps_rel: float = DEFAULT_EPS_REL) -> GradientMap:
    """mdpc response minus la response."""
    m = mdpc_gradient(f, df_ds, eps_rel)
    a = la_gradient(f, eps_rel)
    return GradientMap.from_components(m.g1.data - a.g1.data,
                                       m.g2.data - a.g2.data,
                                       "la_mdpc", f.scale)


# ---------------------------------------------------------------------------
# classical baselines
# ---------------------------------------------------------------------------

def sobel_gradient(img: ScalarField) -> GradientMap:
    if img.width < 3 or img.height < 3:
        raise ImageTooSmallError("sobel needs at least a 3x3 image")
    g1 = ndimage.correlate(img.data, _SOBEL_X, mode="reflect")
    g2 = ndimage.correlate(img.data, _SOBEL_X.T, mode="reflect")
    return GradientMap.from_components(g1, g2, "sobel", 0.0)


def canny_gradient(img: ScalarField, sigma: float = 1.0) -> GradientMap:
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    smooth = ndimage.gaussian_filter(img.data, sigma, mode="reflect")
    g2, g1 = np.gradient(smooth)
    return GradientMap.from_components(g1, g2, "canny", 0.0)


# ---------------------------------------------------------------------------
# thinning and linking
# ---------------------------------------------------------------------------

def normalize_gradient(g: GradientMap, percentile: float = 99.0,
                       target: float = 10.0) -> GradientMap:
    """Rescale so that the requested magnitude percentile maps to target.

    A blank map (percentile 0) is returned unchanged.
    """
    q = float(np.percentile(g.magnitude.data, percentile))
    if q <= 0.0:
        return g
    f = target / q
    return GradientMap.from_components(g.g1.data * f, g.g2.data * f,
                                       g.method, g.scale)


def non_maximum_suppression(g: GradientMap, radius: float = 1.5) -> GradientMap:
    """Keep pixels whose magnitude is >= the bilinearly interpolated
    magnitudes at +-radius along the gradient direction."""
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    mag = g.magnitude.data
    h, w = mag.shape
    gm = np.where(mag > 0.0, mag, 1.0)
    dx = np.where(mag > 0.0, g.g1.data / gm, 0.0)
    dy = np.where(mag > 0.0, g.g2.data / gm, 0.0)
    cols = np.arange(w)[None, :] + np.zeros((h, 1))
    rows = np.arange(h)[:, None] + np.zeros((1, w))

    def sample(x, y):
        x = np.clip(x, 0.0, w - 1.0)
        y = np.clip(y, 0.0, h - 1.0)
        x0 = np.floor(x).astype(np.intp)
        y0 = np.floor(y).astype(np.intp)
        x1 = np.minimum(x0 + 1, w - 1)
        y1 = np.minimum(y0 + 1, h - 1)
        fx = x - x0
        fy = y - y0
        return (mag[y0, x0] * (1 - fx) * (1 - fy)
                + mag[y0, x1] * fx * (1 - fy)
                + mag[y1, x0] * (1 - fx) * fy
                + mag[y1, x1] * fx * fy)

    ahead = sample(cols + radius * dx, rows + radius * dy)
    behind = sample(cols - radius * dx, rows - radius * dy)
    keep = (mag >= ahead) & (mag >= behind) & (mag > 0.0)
    z = np.where(keep, 1.0, 0.0)
    return GradientMap.from_components(g.g1.data * z, g.g2.data * z,
                                       g.method, g.scale)


_EIGHT = np.ones((3, 3), dtype=bool)


def hysteresis_threshold(g: GradientMap, low: float, high: float) -> EdgeMap:
    """Seeds at magnitude >= high, grown over 8-connected pixels >= low."""
    if low >= high:
        raise BadThresholdsError(f"low {low} must be below high {high}")
    mag = g.magnitude.data
    candidates = mag >= low
    labels, n = ndimage.label(candidates, structure=_EIGHT)
    prov = {"method": g.method, "scale": g.scale, "low": low, "high": high}
    if n == 0:
        return EdgeMap(np.zeros_like(candidates), prov)
    seeds = np.unique(labels[mag >= high])
    seeds = seeds[seeds > 0]
    return EdgeMap(np.isin(labels, seeds), prov)


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

def _phase_response(img: ScalarField, cfg: DetectorConfig) -> GradientMap:
    padded, m = mirror_pad(img, cfg.pad)
    fld = monogenic_scale(padded, cfg.scale)
    if cfg.method == "la":
        g = la_gradient(fld, cfg.mask_eps)
    else:
        df_ds = scale_derivative(padded, cfg.scale, cfg.derivative_mode, cfg.fd_step)
        fn = {"dpc": dpc_gradient, "mdpc": mdpc_gradient,
              "la_mdpc": mixed_gradient}[cfg.method]
        g = fn(fld, df_ds, cfg.mask_eps)
    return GradientMap.from_components(crop(g.g1.data, m), crop(g.g2.data, m),
                                       cfg.method, cfg.scale)


def detect(img: ScalarField, cfg: DetectorConfig) -> DetectionResult:
    """Grayscale image -> gradient map -> NMS -> hysteresis -> edge map.

    The returned gradient map is on the normalized magnitude scale that
    the thresholds apply to.
    """
    if cfg.method in PHASE_METHODS:
        raw = _phase_response(img, cfg)
    elif cfg.method == "sobel":
        raw = sobel_gradient(img)
    else:
        raw = canny_gradient(img, cfg.canny_sigma)
    norm = normalize_gradient(raw, cfg.norm_percentile, cfg.norm_target)
    thin = non_maximum_suppression(norm, cfg.nms_radius)
    edges = hysteresis_threshold(thin, cfg.low, cfg.high)
    prov = dict(edges.provenance)
    prov.update({"nms_radius": cfg.nms_radius, "pad": cfg.pad,
                 "norm_percentile": cfg.norm_percentile,
                 "norm_target": cfg.norm_target})
    return DetectionResult(EdgeMap(edges.mask, prov), norm)
