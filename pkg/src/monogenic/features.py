"""Pointwise feature maps of a monogenic field.

Amplitude A = sqrt(u^2 + |v|^2), attenuation a = ln A, phase angle
theta = atan2(|v|, u) in [0, pi], unit orientation v/|v| and phase vector
(v/|v|) * theta.  The two-argument arctangent is deliberate: arctan(|v|/u)
cannot reach the (pi/2, pi] half of the stated range, atan2 can and is
continuous across u = 0.

Real images have pixels where A or |v| vanish and the features are
undefined there, so every map carries a validity mask instead of inventing
values.  Downstream code treats masked pixels as zero response.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import clifford
from .scalespace import MonogenicField, ScalarField, VectorField, cyclic_gradient

DEFAULT_EPS_REL = 1e-8


def _epsilon(amplitude: np.ndarray, eps_rel: float) -> float:
    return eps_rel * max(float(amplitude.max()), 1e-300)


@dataclass(frozen=True)
class LocalFeatures:
    """All feature maps of one monogenic field, plus their masks."""

    amplitude: ScalarField
    attenuation: ScalarField
    phase_angle: ScalarField
    orientation: VectorField
    phase_vector: VectorField
    amplitude_mask: np.ndarray   # True where A > eps
    orientation_mask: np.ndarray  # True where |v| > eps
    eps: float


def local_amplitude(f: MonogenicField) -> ScalarField:
    u, v1, v2 = f.components()
    return ScalarField(np.sqrt(u * u + v1 * v1 + v2 * v2))


def local_attenuation(f: MonogenicField, eps: float) -> tuple[ScalarField, np.ndarray]:
    """(1/2) ln(u^2 + |v|^2); pixels with amplitude <= eps are masked and
    pinned to ln(eps)."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    amp = local_amplitude(f).data
    mask = amp > eps
    att = np.log(np.where(mask, amp, eps))
    return ScalarField(att), mask


def phase_angle(f: MonogenicField) -> ScalarField:
    u, v1, v2 = f.components()
    return ScalarField(np.arctan2(np.hypot(v1, v2), u))


def local_orientation(f: MonogenicField, eps: float) -> tuple[VectorField, np.ndarray]:
    """Unit vector v/|v| where defined; (0,0) and mask=False elsewhere."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    _, v1, v2 = f.components()
    vn = np.hypot(v1, v2)
    mask = vn > eps
    safe = np.where(mask, vn, 1.0)
    n1 = np.where(mask, v1 / safe, 0.0)
    n2 = np.where(mask, v2 / safe, 0.0)
    return VectorField(ScalarField(n1), ScalarField(n2)), mask


def local_phase_vector(f: MonogenicField, eps: float) -> tuple[VectorField, np.ndarray]:
    """orientation * phase_angle; carries (0,0) at masked pixels."""
    orient, mask = local_orientation(f, eps)
    th = phase_angle(f).data
    return VectorField(ScalarField(orient.v1.data * th),
                       ScalarField(orient.v2.data * th)), mask


def compute_features(f: MonogenicField, eps_rel: float = DEFAULT_EPS_REL) -> LocalFeatures:
    """Evaluate every feature map once, with a shared epsilon.

    eps_rel is relative to the maximum amplitude of this field.
    """
    amp = local_amplitude(f)
    eps = _epsilon(amp.data, eps_rel)
    att, amask = local_attenuation(f, eps)
    th = phase_angle(f)
    orient, omask = local_orientation(f, eps)
    pv = VectorField(ScalarField(orient.v1.data * th.data),
                     ScalarField(orient.v2.data * th.data))
    return LocalFeatures(amp, att, th, orient, pv, amask, omask, eps)


def instantaneous_frequency(f: MonogenicField, eps_rel: float = DEFAULT_EPS_REL,
                            order: int = 4) -> tuple[ScalarField, np.ndarray]:
    """Scalar part of (Dirac F) F^{-1} for the paravector F = u + v.

    Evaluated with the generic Clifford product on component grids; the
    spatial derivatives use periodic central differences.  Order 4 is the
    default: second-order stencils leave an O(omega^2) bias that is too
    coarse for the frequency/attenuation duality checks.
    Masked (and zeroed) where the amplitude is at or below eps.
    """
    u, v1, v2 = f.components()
    amp2 = u * u + v1 * v1 + v2 * v2
    eps = _epsilon(np.sqrt(amp2), eps_rel)
    mask = np.sqrt(amp2) > eps

    F = clifford.paravector_grid(u, v1, v2)
    d1F = tuple(cyclic_gradient(c, order)[0] for c in F)
    d2F = tuple(cyclic_gradient(c, order)[1] for c in F)
    DF = clifford.dirac_from_derivatives(d1F, d2F)
    safe = np.where(mask, amp2, 1.0)
    Finv = tuple(c / safe for c in clifford.conjugate_grid(F))
    sc = clifford.geometric_product_grid(DF, Finv)[0]
    return ScalarField(np.where(mask, sc, 0.0)), mask


def directional_expansion(f: MonogenicField, eps_rel: float = DEFAULT_EPS_REL,
                          order: int = 4) -> tuple[ScalarField, np.ndarray]:
    """The expanded form of the instantaneous frequency:

        Sc[D n] sin(theta) cos(theta) + Sc[(D theta) n]

    with n = v/|v| (the second summand is the directional phase
    derivative).  Cross-check route for `instantaneous_frequency`; it
    needs a healthy orientation, so the mask excludes |v| <= eps.
    """
    feats = compute_features(f, eps_rel)
    th = feats.phase_angle.data
    n1 = feats.orientation.v1.data
    n2 = feats.orientation.v2.data
    dn1_x1, _ = cyclic_gradient(n1, order)
    _, dn2_x2 = cyclic_gradient(n2, order)
    dth_x1, dth_x2 = cyclic_gradient(th, order)
    # Sc[D n] = -div n; Sc[(D theta) n] = -grad(theta) . n
    div_n = dn1_x1 + dn2_x2
    out = -np.sin(th) * np.cos(th) * div_n - (dth_x1 * n1 + dth_x2 * n2)
    return ScalarField(np.where(feats.orientation_mask, out, 0.0)), feats.orientation_mask
