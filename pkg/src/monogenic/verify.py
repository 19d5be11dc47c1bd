"""Numerical verification of the scale-space identities.

Each checker evaluates both sides of one analytic identity on a smooth
synthetic field and reports residual statistics.  The identities:

* coupling: the scalar and vector parts of the generalized
  Cauchy-Riemann relation between local attenuation a and local phase
  vector r of a monogenic field,

      da/ds + Sc[(D e^r) e^-r] = 0
      dr/ds + D a - Vec[(D n) n] sin^2(theta) + (sin cos - theta) dn/ds = 0

  with n = v/|v| (the |v| normalization: it is the one consistent with
  the companion vector-part closed forms below);
* scalar-part: Sc[(d/ds e^r) e^-r] = 0, an algebraic consequence of
  |n| = 1, limited only by the finite-difference step;
* vector-parts: the closed forms of Vec[(d/ds e^r) e^-r] and
  Vec[(D e^r) e^-r];
* axial: for kernels u(rho,s) + (conj(x)/|x|) v(rho,s) the coupling
  collapses to an ODE system in (rho, s); evaluated symbolically on the
  Cauchy-kernel closed forms, plus the 1D Cauchy-Riemann reduction;
* frequency: the instantaneous frequency equals -da/ds;
* mismatch: on genuinely 2D fields the differential-phase-congruency
  zeros do NOT coincide with attenuation extrema; the responsible extra
  term is measured and must exceed a floor (and vanish on plane signals).

Scale derivatives of derived features use central differences of fields
shifted along the scale semigroup; spatial derivatives use 4th-order
periodic stencils.  Both leave O(delta^2) + O(h^4) residual floors, which
the tolerances reflect.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable

import numpy as np

from . import clifford
from .errors import OriginSingularityError, ValidationError
from .features import compute_features, instantaneous_frequency
from .fixtures import band_limited_noise, plane_wave, radial_blob
from .scalespace import (MonogenicField, cyclic_gradient,
                         monogenic_scale, monogenic_shift, spectral_grid)

DEFAULT_DELTA = 1e-3
DEFAULT_EPS_REL = 1e-6


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidualReport:
    """Residual field of one identity plus the statistics judged against
    a tolerance.  `comparison` is "le" for residuals that must stay small
    and "ge" for terms that must provably exceed a floor."""

    name: str
    residual: np.ndarray
    mask: np.ndarray
    statistic: str
    tolerance: float
    comparison: str = "le"
    params: dict = dc_field(default_factory=dict)
    median: float = float("nan")
    p95: float = float("nan")
    sup: float = float("nan")
    value: float = float("nan")
    passed: bool = False
    vacuous: bool = False

    @classmethod
    def build(cls, name, residual, mask, statistic, tolerance,
              comparison="le", params=None) -> "ResidualReport":
        residual = np.abs(np.asarray(residual, dtype=float))
        mask = np.asarray(mask, dtype=bool)
        stats = cls._stats(residual, mask)
        vacuous = not bool(mask.any())
        value = stats.get(statistic, float("nan"))
        if vacuous:
            passed = True
        elif comparison == "le":
            passed = bool(value <= tolerance)
        elif comparison == "ge":
            passed = bool(value > tolerance)
        else:
            raise ValueError(f"unknown comparison {comparison!r}")
        return cls(name, residual, mask, statistic, tolerance, comparison,
                   dict(params or {}), stats["median"], stats["p95"],
                   stats["sup"], value, passed, vacuous)

    @staticmethod
    def _stats(residual: np.ndarray, mask: np.ndarray) -> dict:
        if not mask.any():
            return {"median": 0.0, "p95": 0.0, "sup": 0.0}
        vals = residual[mask]
        return {"median": float(np.median(vals)),
                "p95": float(np.quantile(vals, 0.95)),
                "sup": float(vals.max())}

    def recompute(self) -> dict:
        """Statistics recomputed from the stored residual field."""
        return self._stats(self.residual, self.mask)

    def csv_row(self) -> dict:
        return {"identity": self.name, "statistic": self.statistic,
                "value": repr(self.value), "tolerance": repr(self.tolerance),
                "pass": str(self.passed)}


CSV_COLUMNS = ("identity", "statistic", "value", "tolerance", "pass")


def write_reports_csv(reports, path) -> Path:
    p = Path(path)
    with p.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for r in reports:
            w.writerow(r.csv_row())
    return p


# ---------------------------------------------------------------------------
# closed-form oracle
# ---------------------------------------------------------------------------

def cauchy_kernel_oracle(x1, x2, s):
    """Monogenic Cauchy-kernel point values and features, m = 2.

        u  = s / d^{3/2}          v_j = -x_j / d^{3/2}       d = s^2 + |x|^2
        a  = -ln d                r   = -(x/|x|) arctan(|x|/s)

    Inputs broadcast; every sample must avoid the origin.  Returns the
    tuple (u, v1, v2, a, r1, r2).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    s = np.asarray(s, dtype=float)
    d = s * s + x1 * x1 + x2 * x2
    if np.any(d <= 1e-300):
        raise OriginSingularityError("Cauchy kernel is singular at the origin")
    p = d ** 1.5
    u = s / p
    v1 = -x1 / p
    v2 = -x2 / p
    a = -np.log(d)
    rho = np.hypot(x1, x2)
    safe = np.where(rho > 0.0, rho, 1.0)
    ang = np.arctan2(rho, s)
    r1 = np.where(rho > 0.0, -(x1 / safe) * ang, 0.0)
    r2 = np.where(rho > 0.0, -(x2 / safe) * ang, 0.0)
    return u, v1, v2, a, r1, r2


# ---------------------------------------------------------------------------
# shared feature plumbing
# ---------------------------------------------------------------------------

def _scale_rates(fld: MonogenicField):
    """d/ds of (u, v1, v2) from the field itself (multiplier -|xi|)."""
    from .scalespace import _apply_multiplier  # internal by design
    mag = spectral_grid(*fld.shape).magnitude
    u, v1, v2 = fld.components()
    return (_apply_multiplier(u, -mag), _apply_multiplier(v1, -mag),
            _apply_multiplier(v2, -mag))


def _attenuation_rate(fld: MonogenicField):
    u, v1, v2 = fld.components()
    us, v1s, v2s = _scale_rates(fld)
    amp2 = u * u + v1 * v1 + v2 * v2
    safe = np.where(amp2 > 0.0, amp2, 1.0)
    return (u * us + v1 * v1s + v2 * v2s) / safe, amp2


def _feats(fld: MonogenicField, eps_rel: float):
    return compute_features(fld, eps_rel)


def _shifted_feats(fld: MonogenicField, delta: float, eps_rel: float):
    hi = _feats(monogenic_shift(fld, +delta), eps_rel)
    lo = _feats(monogenic_shift(fld, -delta), eps_rel)
    return hi, lo


def _central(hi: np.ndarray, lo: np.ndarray, delta: float) -> np.ndarray:
    return (hi - lo) / (2.0 * delta)


def _orientation_curvature(n1, n2, order=4):
    """(D n) n for unit n: pure vector (-div n1 - curl n2, -div n2 + curl n1)."""
    div_n = cyclic_gradient(n1, order)[0] + cyclic_gradient(n2, order)[1]
    curl_n = cyclic_gradient(n2, order)[0] - cyclic_gradient(n1, order)[1]
    return -div_n * n1 - curl_n * n2, -div_n * n2 + curl_n * n1


# ---------------------------------------------------------------------------
# identity checkers
# ---------------------------------------------------------------------------

def check_cauchy_riemann_coupling(fld: MonogenicField, delta: float = DEFAULT_DELTA,
                                  eps_rel: float = DEFAULT_EPS_REL,
                                  order: int = 4, tol_scalar: float = 1e-3,
                                  tol_vector: float = 1e-3):
    """Scalar and vector coupling between attenuation and phase vector."""
    ft = _feats(fld, eps_rel)
    th = ft.phase_angle.data
    n1, n2 = ft.orientation.v1.data, ft.orientation.v2.data
    da_ds, _ = _attenuation_rate(fld)

    E = clifford.exp_vector_grid(n1, n2, th)
    Einv = clifford.conjugate_grid(E)
    d1E = tuple(cyclic_gradient(c, order)[0] for c in E)
    d2E = tuple(cyclic_gradient(c, order)[1] for c in E)
    DE = clifford.dirac_from_derivatives(d1E, d2E)
    res7 = da_ds + clifford.geometric_product_grid(DE, Einv)[0]

    hi, lo = _shifted_feats(fld, delta, eps_rel)
    dr1 = _central(hi.phase_vector.v1.data, lo.phase_vector.v1.data, delta)
    dr2 = _central(hi.phase_vector.v2.data, lo.phase_vector.v2.data, delta)
    dn1 = _central(hi.orientation.v1.data, lo.orientation.v1.data, delta)
    dn2 = _central(hi.orientation.v2.data, lo.orientation.v2.data, delta)
    a = ft.attenuation.data
    Da1, Da2 = cyclic_gradient(a, order)
    k1, k2 = _orientation_curvature(n1, n2, order)
    s2 = np.sin(th) ** 2
    sc = np.sin(th) * np.cos(th)
    res8 = np.hypot(dr1 + Da1 - k1 * s2 + (sc - th) * dn1,
                    dr2 + Da2 - k2 * s2 + (sc - th) * dn2)

    mask = ft.amplitude_mask & ft.orientation_mask
    params = {"s": fld.scale, "delta": delta, "eps_rel": eps_rel, "order": order}
    return (ResidualReport.build("coupling-scalar", res7, mask, "median",
                                 tol_scalar, params=params),
            ResidualReport.build("coupling-vector", res8, mask, "median",
                                 tol_vector, params=params))


def check_phase_direction_scalar_part(fld: MonogenicField,
                                      delta: float = DEFAULT_DELTA,
                                      eps_rel: float = DEFAULT_EPS_REL,
                                      tol: float = 1e-6) -> ResidualReport:
    """Sc[(d/ds e^r) e^-r] = 0; residual is pure differencing error."""
    ft = _feats(fld, eps_rel)
    E = clifford.exp_vector_grid(ft.orientation.v1.data,
                                 ft.orientation.v2.data,
                                 ft.phase_angle.data)
    hi, lo = _shifted_feats(fld, delta, eps_rel)
    Ehi = clifford.exp_vector_grid(hi.orientation.v1.data,
                                   hi.orientation.v2.data, hi.phase_angle.data)
    Elo = clifford.exp_vector_grid(lo.orientation.v1.data,
                                   lo.orientation.v2.data, lo.phase_angle.data)
    dE = tuple(_central(h, l, delta) for h, l in zip(Ehi, Elo))
    res = clifford.geometric_product_grid(dE, clifford.conjugate_grid(E))[0]
    mask = ft.amplitude_mask & ft.orientation_mask
    return ResidualReport.build(
        "phase-direction-scalar", res, mask, "median", tol,
        params={"s": fld.scale, "delta": delta, "eps_rel": eps_rel})


def check_phase_direction_vector_parts(fld: MonogenicField,
                                       delta: float = DEFAULT_DELTA,
                                       eps_rel: float = DEFAULT_EPS_REL,
                                       order: int = 4, tol: float = 1e-4):
    """Vector grades of the two phase-direction derivatives against their
    closed forms."""
    ft = _feats(fld, eps_rel)
    th = ft.phase_angle.data
    n1, n2 = ft.orientation.v1.data, ft.orientation.v2.data
    E = clifford.exp_vector_grid(n1, n2, th)
    Einv = clifford.conjugate_grid(E)

    hi, lo = _shifted_feats(fld, delta, eps_rel)
    Ehi = clifford.exp_vector_grid(hi.orientation.v1.data,
                                   hi.orientation.v2.data, hi.phase_angle.data)
    Elo = clifford.exp_vector_grid(lo.orientation.v1.data,
                                   lo.orientation.v2.data, lo.phase_angle.data)
    dE = tuple(_central(h, l, delta) for h, l in zip(Ehi, Elo))
    lhs_scale = clifford.geometric_product_grid(dE, Einv)
    dn1 = _central(hi.orientation.v1.data, lo.orientation.v1.data, delta)
    dn2 = _central(hi.orientation.v2.data, lo.orientation.v2.data, delta)
    dr1 = _central(hi.phase_vector.v1.data, lo.phase_vector.v1.data, delta)
    dr2 = _central(hi.phase_vector.v2.data, lo.phase_vector.v2.data, delta)
    sc = np.sin(th) * np.cos(th)
    res23 = np.hypot(lhs_scale[1] - ((sc - th) * dn1 + dr1),
                     lhs_scale[2] - ((sc - th) * dn2 + dr2))

    d1E = tuple(cyclic_gradient(c, order)[0] for c in E)
    d2E = tuple(cyclic_gradient(c, order)[1] for c in E)
    DE = clifford.dirac_from_derivatives(d1E, d2E)
    lhs_space = clifford.geometric_product_grid(DE, Einv)
    k1, k2 = _orientation_curvature(n1, n2, order)
    s2 = np.sin(th) ** 2
    res24 = np.hypot(lhs_space[1] + s2 * k1, lhs_space[2] + s2 * k2)

    mask = ft.amplitude_mask & ft.orientation_mask
    params = {"s": fld.scale, "delta": delta, "eps_rel": eps_rel, "order": order}
    return (ResidualReport.build("phase-direction-vector-scale", res23, mask,
                                 "median", tol, params=params),
            ResidualReport.build("phase-direction-vector-space", res24, mask,
                                 "median", tol, params=params))


def check_axial_system(s_values=(0.5, 1.0, 2.0), m: int = 2,
                       rho_range=(0.5, 5.0), samples: int = 201,
                       tol: float = 1e-8) -> ResidualReport:
    """Axial-form ODE system on the Cauchy-kernel closed forms.

    The attenuation and phase angle are differentiated symbolically in
    (rho, s); the two equations are then evaluated numerically, term by
    term, with the (m-1)/rho curvature contributions included.
    """
    import sympy as sp

    rho_s, s_s, m_s = sp.symbols("rho s m", positive=True)
    a_expr = -(m_s / 2) * sp.log(s_s ** 2 + rho_s ** 2)
    th_expr = sp.atan(rho_s / s_s)
    eq_a = (sp.diff(a_expr, s_s) + sp.diff(th_expr, rho_s)
            + (m_s - 1) / rho_s * sp.sin(th_expr) * sp.cos(th_expr))
    eq_b = (sp.diff(th_expr, s_s) - sp.diff(a_expr, rho_s)
            - (m_s - 1) / rho_s * sp.sin(th_expr) ** 2)
    fa = sp.lambdify((rho_s, s_s, m_s), eq_a, "numpy")
    fb = sp.lambdify((rho_s, s_s, m_s), eq_b, "numpy")

    rho = np.linspace(rho_range[0], rho_range[1], samples)
    res = []
    for s in s_values:
        if s <= 0:
            raise ValidationError("axial check needs positive scales")
        res.append(np.maximum(np.abs(fa(rho, s, m)), np.abs(fb(rho, s, m))))
    res = np.concatenate(res)
    return ResidualReport.build(
        "axial-system", res, np.ones_like(res, dtype=bool), "sup", tol,
        params={"m": m, "s_values": tuple(s_values), "rho_range": rho_range})


def check_cauchy_riemann_1d(n: int = 1024, s: float = 0.8, sigma: float = 8.0,
                            cutoff: float = 0.5, seed: int = 12,
                            order: int = 4, eps_rel: float = DEFAULT_EPS_REL,
                            tol: float = 1e-4) -> ResidualReport:
    """1D reduction: a + i theta of an analytic pair obeys Cauchy-Riemann.

    Builds a band-limited 1D signal, extends it with the 1D lowpass and
    quadrature multipliers, and checks da/ds + dtheta/dx = 0 and
    da/dx - dtheta/ds = 0.  Phase derivatives are taken in quotient form,
    which avoids wrap-around jumps of the angle itself.
    """
    rng = np.random.default_rng(seed)
    xi = 2.0 * np.pi * np.fft.fftfreq(n)
    spectrum = np.fft.fft(rng.standard_normal(n))
    env = np.exp(-0.5 * (sigma * np.abs(xi)) ** 2)
    env = np.where(np.abs(xi) <= cutoff, env, 0.0)
    env[0] = 0.0
    ghat = spectrum * env
    low = np.exp(-s * np.abs(xi))
    quad = -1j * np.sign(xi)   # classical pair: cos -> sin
    if n % 2 == 0:
        quad[n // 2] = 0.0
    u = np.fft.ifft(low * ghat).real
    v = np.fft.ifft(quad * low * ghat).real
    us = np.fft.ifft(-np.abs(xi) * low * ghat).real
    vs = np.fft.ifft(quad * -np.abs(xi) * low * ghat).real

    def dx(arr):
        return cyclic_gradient(arr[None, :], order)[0][0]

    ux, vx = dx(u), dx(v)
    amp2 = u * u + v * v
    mask = np.sqrt(amp2) > eps_rel * np.sqrt(amp2).max()
    safe = np.where(mask, amp2, 1.0)
    da_ds = (u * us + v * vs) / safe
    da_dx = (u * ux + v * vx) / safe
    dth_dx = (u * vx - v * ux) / safe
    dth_ds = (u * vs - v * us) / safe
    res = np.maximum(np.abs(da_ds + dth_dx), np.abs(da_dx - dth_ds))
    return ResidualReport.build(
        "axial-1d-reduction", res, mask, "median", tol,
        params={"n": n, "s": s, "sigma": sigma, "seed": seed, "order": order})


def check_instantaneous_frequency_identity(fld: MonogenicField,
                                           eps_rel: float = DEFAULT_EPS_REL,
                                           order: int = 4,
                                           tol: float = 1e-3) -> ResidualReport:
    """Relative residual of (instantaneous frequency) + da/ds."""
    freq, fmask = instantaneous_frequency(fld, eps_rel, order)
    da_ds, amp2 = _attenuation_rate(fld)
    denom = np.maximum(np.abs(da_ds), 1e-12)
    res = np.abs(freq.data + da_ds) / denom
    vn = np.hypot(*fld.components()[1:])
    mask = fmask & (vn > eps_rel * np.sqrt(amp2).max())
    return ResidualReport.build(
        "frequency-duality", res, mask, "median", tol,
        params={"s": fld.scale, "eps_rel": eps_rel, "order": order})


def check_plane_wave_frequency(cycles: int = 8, shape=(32, 128), s: float = 0.5,
                               phase: float = 0.3, order: int = 4,
                               tol: float = 1e-3) -> ResidualReport:
    """Absolute agreement of both duality sides on a single plane wave."""
    img = plane_wave(shape[1], shape[0], cycles=cycles, phase=phase)
    fld = monogenic_scale(img, s)
    freq, fmask = instantaneous_frequency(fld, order=order)
    da_ds, _ = _attenuation_rate(fld)
    res = np.abs(freq.data + da_ds)
    omega = 2.0 * np.pi * cycles / shape[1]
    return ResidualReport.build(
        "frequency-plane-wave", res, fmask, "sup", tol,
        params={"omega": omega, "s": s, "order": order})


def check_dpc_extrema_mismatch(fld: MonogenicField, delta: float = DEFAULT_DELTA,
                               eps_rel: float = DEFAULT_EPS_REL, order: int = 4,
                               orientation_floor: float = 0.01,
                               tolerance: float = 1e-2,
                               comparison: str = "ge",
                               name: str = "mismatch") -> ResidualReport:
    """Magnitude of the extra term separating phase-congruency zeros from
    attenuation extrema:

        |-Vec[(D n) n] sin^2(theta) + (sin cos - theta) dn/ds|

    With comparison "ge" the report passes when the term exceeds the
    tolerance (genuinely 2D field); with "le" when it vanishes within it
    (plane signal).  Statistics run over pixels with a healthy orientation
    (|v| above `orientation_floor` times its maximum).
    """
    ft = _feats(fld, eps_rel)
    th = ft.phase_angle.data
    n1, n2 = ft.orientation.v1.data, ft.orientation.v2.data
    hi, lo = _shifted_feats(fld, delta, eps_rel)
    dn1 = _central(hi.orientation.v1.data, lo.orientation.v1.data, delta)
    dn2 = _central(hi.orientation.v2.data, lo.orientation.v2.data, delta)
    k1, k2 = _orientation_curvature(n1, n2, order)
    s2 = np.sin(th) ** 2
    sc = np.sin(th) * np.cos(th)
    extra = np.hypot(-k1 * s2 + (sc - th) * dn1,
                     -k2 * s2 + (sc - th) * dn2)
    vn = np.hypot(*fld.components()[1:])
    mask = ft.amplitude_mask & (vn > orientation_floor * vn.max())
    return ResidualReport.build(
        name, extra, mask, "sup", tolerance, comparison=comparison,
        params={"s": fld.scale, "delta": delta, "orientation_floor": orientation_floor})


# ---------------------------------------------------------------------------
# built-in suites
# ---------------------------------------------------------------------------

def _standard_field() -> MonogenicField:
    noise = band_limited_noise(128, 128, sigma=7.0, cutoff=0.6, seed=7)
    return monogenic_scale(noise, 0.5)


def _suite_coupling(k: float):
    return list(check_cauchy_riemann_coupling(_standard_field(),
                                              tol_scalar=k * 1e-3,
                                              tol_vector=k * 1e-3))


def _suite_scalar_part(k: float):
    return [check_phase_direction_scalar_part(_standard_field(), tol=k * 1e-6)]


def _suite_vector_parts(k: float):
    return list(check_phase_direction_vector_parts(_standard_field(), tol=k * 1e-4))


def _suite_axial(k: float):
    return [check_axial_system(tol=k * 1e-8),
            check_cauchy_riemann_1d(tol=k * 1e-4)]


def _suite_frequency(k: float):
    return [check_instantaneous_frequency_identity(_standard_field(), tol=k * 1e-3),
            check_plane_wave_frequency(tol=k * 1e-3)]


def _suite_mismatch(k: float):
    blob = monogenic_scale(radial_blob(96, 96, sigma=9.0), 0.5)
    plane = monogenic_scale(plane_wave(1024, 16, cycles=1, phase=0.7), 0.5)
    return [check_dpc_extrema_mismatch(blob, tolerance=k * 1e-2, comparison="ge",
                                       name="mismatch-blob"),
            check_dpc_extrema_mismatch(plane, tolerance=k * 1e-3, comparison="le",
                                       name="mismatch-plane")]


SUITES: dict[str, Callable[[float], list]] = {
    "coupling": _suite_coupling,
    "scalar-part": _suite_scalar_part,
    "vector-parts": _suite_vector_parts,
    "axial": _suite_axial,
    "frequency": _suite_frequency,
    "mismatch": _suite_mismatch,
}


def run_suite(selector: str = "all", tolerance_scale: float = 1.0) -> list:
    """Run one named suite, or all of them.

    tolerance_scale multiplies every tolerance (and the mismatch floor);
    it exists to tighten or relax a whole run, not individual checks.
    """
    if tolerance_scale <= 0.0:
        raise ValidationError("tolerance scale must be positive")
    if selector == "all":
        reports = []
        for fn in SUITES.values():
            reports.extend(fn(tolerance_scale))
        return reports
    if selector not in SUITES:
        raise ValidationError(
            f"unknown suite {selector!r}; choose from {('all',) + tuple(SUITES)}")
    return SUITES[selector](tolerance_scale)
