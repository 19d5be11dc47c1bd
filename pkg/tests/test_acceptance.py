"""Acceptance suite: every criterion at its stated tolerance, one printed
pass/fail line each.  Run with `pytest -s tests/test_acceptance.py` to see
the lines as they happen."""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from monogenic import cli, clifford, edgeops, fixtures, imageio, verify
from monogenic.edgeops import DetectorConfig, GradientMap
from monogenic.features import compute_features
from monogenic.scalespace import (MonogenicField, ScalarField, VectorField,
                                  monogenic_scale, poisson_filter,
                                  riesz_transform, scale_derivative)


@contextmanager
def criterion(n: int, desc: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {n:2d} FAIL: {desc}")
        raise
    dt = time.perf_counter() - t0
    print(f"ACCEPTANCE {n:2d} PASS: {desc}  [{dt:.2f}s]")


def thin_rows(mask, column, border=2):
    """Every interior row: nonempty, within 1 px of `column`, no two
    horizontally adjacent pixels."""
    for r in range(border, mask.shape[0] - border):
        cols = np.nonzero(mask[r])[0]
        assert len(cols) >= 1, f"row {r} empty"
        assert np.all(np.abs(cols - column) <= 1.0), f"row {r}: {cols}"
        assert not np.any(np.diff(cols) == 1), f"row {r} thick: {cols}"


def test_criterion_01_clifford_axioms():
    with criterion(1, "Clifford axioms: anti-commutation, v*v = -|v|^2 (1e4 vectors)"):
        t0 = time.perf_counter()
        e1e2 = clifford.geometric_product(clifford.E1, clifford.E2)
        e2e1 = clifford.geometric_product(clifford.E2, clifford.E1)
        assert (e1e2 + e2e1) == clifford.Multivector2()
        rng = np.random.default_rng(42)
        comps = rng.uniform(-10, 10, size=(10_000, 2))
        for c1, c2 in comps:
            v = clifford.Multivector2(c1=c1, c2=c2)
            sq = clifford.geometric_product(v, v)
            n2 = c1 * c1 + c2 * c2
            assert sq.c1 == 0.0 and sq.c2 == 0.0 and sq.c12 == 0.0
            assert abs(sq.s0 + n2) <= 1e-12 * max(1.0, n2)
        assert time.perf_counter() - t0 < 1.0


def test_criterion_02_riesz_involution_and_semigroup():
    with criterion(2, "Riesz involution sup<=1e-6; Poisson semigroup sup<=1e-8"):
        t0 = time.perf_counter()
        f = fixtures.band_limited_noise(128, 128, sigma=2.0, cutoff=1.2, seed=11)
        r = riesz_transform(f)
        rr = riesz_transform(r.v1).v1.data + riesz_transform(r.v2).v2.data
        assert np.abs(rr + f.data).max() <= 1e-6
        lhs = poisson_filter(poisson_filter(f, 0.1), 0.4)
        rhs = poisson_filter(f, 0.5)
        assert np.abs(lhs.data - rhs.data).max() <= 1e-8
        assert time.perf_counter() - t0 < 2.0


def test_criterion_03_coupling_identities(standard_field):
    with criterion(3, "attenuation/phase coupling: both medians <= 1e-3"):
        t0 = time.perf_counter()
        r_scalar, r_vector = verify.check_cauchy_riemann_coupling(standard_field)
        assert r_scalar.value <= 1e-3, r_scalar.value
        assert r_vector.value <= 1e-3, r_vector.value
        assert time.perf_counter() - t0 < 5.0


def test_criterion_04_scalar_part_and_step_ratio(standard_field):
    with criterion(4, "phase-direction scalar part <= 1e-6; delta-halving ratio in [3,5]"):
        r1 = verify.check_phase_direction_scalar_part(standard_field, delta=1e-3)
        r2 = verify.check_phase_direction_scalar_part(standard_field, delta=5e-4)
        assert r1.value <= 1e-6, r1.value
        ratio = r1.value / r2.value
        assert 3.0 <= ratio <= 5.0, ratio


def test_criterion_05_frequency_duality(standard_field):
    with criterion(5, "instantaneous frequency = -da/ds (rel<=1e-3; plane wave abs<=1e-3)"):
        r = verify.check_instantaneous_frequency_identity(standard_field)
        assert r.value <= 1e-3, r.value
        pw = verify.check_plane_wave_frequency(cycles=8, shape=(32, 128), s=0.5)
        assert pw.params["omega"] == pytest.approx(np.pi / 8)
        assert pw.value <= 1e-3, pw.value


def test_criterion_06_cauchy_kernel_oracle():
    with criterion(6, "Cauchy-kernel features match closed forms to 1e-10 (100 points)"):
        rng = np.random.default_rng(1)
        x1 = rng.uniform(-4, 4, (10, 10))
        x2 = rng.uniform(-4, 4, (10, 10))
        s = float(rng.uniform(0.5, 2.0))
        u, v1, v2, a_ref, r1_ref, r2_ref = verify.cauchy_kernel_oracle(x1, x2, s)
        fld = MonogenicField(ScalarField(u),
                             VectorField(ScalarField(v1), ScalarField(v2)), s)
        ft = compute_features(fld, eps_rel=1e-14)
        assert np.abs(ft.attenuation.data - a_ref).max() <= 1e-10
        assert np.abs(ft.phase_vector.v1.data - r1_ref).max() <= 1e-10
        assert np.abs(ft.phase_vector.v2.data - r2_ref).max() <= 1e-10


def test_criterion_07_axial_system():
    with criterion(7, "axial system sup <= 1e-8; 1D reduction <= 1e-4"):
        r = verify.check_axial_system(s_values=(0.5, 1.0, 2.0))
        assert r.value <= 1e-8, r.value
        r1d = verify.check_cauchy_riemann_1d()
        assert r1d.value <= 1e-4, r1d.value


def test_criterion_08_intrinsically_1d_collapse(plane_field):
    with criterion(8, "plane signal: MDPC-DPC sup<=1e-3; MDPC vs 1D oracle <=1e-4"):
        img, fld = plane_field
        df = scale_derivative(img, 0.5)
        d = edgeops.dpc_gradient(fld, df)
        m = edgeops.mdpc_gradient(fld, df)
        assert np.hypot(m.g1.data - d.g1.data, m.g2.data - d.g2.data).max() <= 1e-3
        from conftest import oracle_dpc_1d
        ref = oracle_dpc_1d(img.data[0], 0.5)
        assert np.abs(m.g1.data - ref[None, :]).max() <= 1e-4
        assert np.abs(m.g2.data).max() <= 1e-4


def test_criterion_09_full_pipeline(step_image):
    with criterion(9, "64x64 step: all six methods thin & within 1 px (<2s each)"):
        for method in edgeops.METHODS:
            t0 = time.perf_counter()
            res = edgeops.detect(step_image, DetectorConfig(method=method))
            assert time.perf_counter() - t0 < 2.0, method
            thin_rows(res.edges.mask, column=31.0)


def test_criterion_10_invariances(step_image):
    with criterion(10, "DPC homogeneity bit-exact; NMS idempotent; hysteresis monotone"):
        cfg = DetectorConfig(method="dpc")
        r1 = edgeops.detect(step_image, cfg)
        r2 = edgeops.detect(ScalarField(2.0 * step_image.data), cfg)
        assert np.array_equal(r1.edges.mask, r2.edges.mask)
        assert r1.edges.count() > 0

        g = edgeops.normalize_gradient(edgeops.sobel_gradient(step_image))
        once = edgeops.non_maximum_suppression(g, 1.5)
        twice = edgeops.non_maximum_suppression(once, 1.5)
        assert np.array_equal(once.magnitude.data, twice.magnitude.data)

        rng = np.random.default_rng(8)
        mag = 4.0 * rng.random((24, 24))
        gm = GradientMap.from_components(mag, np.zeros_like(mag), "sobel", 0.0)
        prev = None
        for low in (0.5, 1.0, 1.5, 2.0):
            cur = edgeops.hysteresis_threshold(gm, low, 3.5).mask
            if prev is not None:
                assert not np.any(cur & ~prev)
            prev = cur


def test_criterion_11_scale_sweep():
    with criterion(11, "noisy fixture: DPC edge count at s=5.0 < count at s=0.1"):
        scene = fixtures.textured_scene()
        counts = {}
        for s in (0.1, 5.0):
            res = edgeops.detect(scene, DetectorConfig(method="dpc", scale=s))
            counts[s] = res.edges.count()
        assert counts[5.0] < counts[0.1], counts


def test_criterion_12_determinism(tmp_path):
    with criterion(12, "two compare runs produce byte-identical outputs"):
        src = tmp_path / "step.pgm"
        imageio.save_gray(src, fixtures.vertical_step().data, "pgm")
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert cli.main(["compare", str(src), "--out-dir", str(out1)]) == 0
        assert cli.main(["compare", str(src), "--out-dir", str(out2)]) == 0
        names = sorted(p.name for p in out1.iterdir() if p.name != "manifest.json")
        assert len(names) >= 8
        for n in names:
            assert (out1 / n).read_bytes() == (out2 / n).read_bytes(), n
