import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from monogenic import clifford, edgeops, fixtures
from monogenic.edgeops import (DetectorConfig, GradientMap, canny_gradient,
                               detect, dpc_gradient, hysteresis_threshold,
                               la_gradient, mdpc_gradient, mixed_gradient,
                               non_maximum_suppression, normalize_gradient,
                               orientation_correction, sobel_gradient)
from monogenic.errors import (BadThresholdsError, ImageTooSmallError,
                              NegativeScaleError)
from monogenic.features import compute_features, local_attenuation
from monogenic.scalespace import (ScalarField, crop, cyclic_gradient,
                                  mirror_pad, monogenic_scale,
                                  scale_derivative)


def const_field(c=0.6, shape=(32, 32), s=0.5):
    img = ScalarField(np.full(shape, c))
    return img, monogenic_scale(img, s), scale_derivative(img, s)


def response(img, method, s=0.5, pad=16):
    """Phase response with the pipeline's mirror padding, so the periodic
    wrap-around of the raw image does not dominate."""
    padded, m = mirror_pad(img, pad)
    fld = monogenic_scale(padded, s)
    fn = {"dpc": dpc_gradient, "mdpc": mdpc_gradient, "la_mdpc": mixed_gradient}
    if method == "la":
        g = la_gradient(fld)
    else:
        g = fn[method](fld, scale_derivative(padded, s))
    return GradientMap.from_components(crop(g.g1.data, m), crop(g.g2.data, m),
                                       method, s)


from conftest import oracle_dpc_1d


class TestDpc:
    def test_constant_is_zero(self):
        _, fld, df = const_field()
        g = dpc_gradient(fld, df)
        assert np.abs(g.magnitude.data).max() == 0.0

    def test_plane_signal_matches_1d_oracle(self, plane_field):
        img, fld = plane_field
        df = scale_derivative(img, 0.5)
        g = dpc_gradient(fld, df)
        ref = oracle_dpc_1d(img.data[0], 0.5)
        assert np.abs(g.g1.data - ref[None, :]).max() <= 1e-4
        assert np.abs(g.g2.data).max() <= 1e-12

    def test_step_per_row_maximum_near_edge(self, step_image):
        g = response(step_image, "dpc")
        peaks = np.argmax(g.magnitude.data, axis=1)
        assert np.all(np.abs(peaks - 31.0) <= 1.0)

    def test_homogeneity_degree_zero(self, step_image):
        g0 = response(step_image, "dpc")
        g1 = response(ScalarField(3.1 * step_image.data), "dpc")
        assert np.abs(g0.g1.data - g1.g1.data).max() <= 1e-10


class TestLa:
    def test_constant_is_zero(self):
        _, fld, _ = const_field()
        assert np.abs(la_gradient(fld).magnitude.data).max() == 0.0

    def test_equals_gradient_of_attenuation(self):
        # ratio form vs differencing ln A; same stencil, smooth field,
        # compared away from orientation zeros
        w1 = fixtures.plane_wave(512, 512, cycles=1, phase=0.3, amplitude=0.22,
                                 offset=0.8)
        w2 = fixtures.plane_wave(512, 512, cycles=1, phase=1.1, amplitude=0.1,
                                 axis="x2")
        fld = monogenic_scale(ScalarField(w1.data + w2.data), 0.5)
        g = la_gradient(fld)
        att, _ = local_attenuation(fld, 1e-12)
        ga1, ga2 = cyclic_gradient(att.data)
        vn = np.hypot(*fld.components()[1:])
        m = vn > 0.2 * vn.max()
        assert np.abs(g.g1.data - ga1)[m].max() <= 1e-6
        assert np.abs(g.g2.data - ga2)[m].max() <= 1e-6

    def test_blob_response_is_radial(self, blob_field):
        g = la_gradient(blob_field, order=4)
        h, w = g.shape
        x1 = np.arange(w)[None, :] - w / 2.0
        x2 = np.arange(h)[:, None] - h / 2.0
        rho = np.hypot(x1 + 0 * x2, x2 + 0 * x1)
        safe = np.where(rho > 0, rho, 1.0)
        mag = g.magnitude.data
        ring = (rho > 4) & (rho < 16) & (mag > 0.1 * mag.max())
        cross = np.abs(g.g1.data * (x2 / safe) - g.g2.data * (x1 / safe))
        assert (cross[ring] / mag[ring]).max() <= 1e-3


class TestMdpc:
    def test_constant_is_zero(self):
        _, fld, df = const_field()
        assert np.abs(mdpc_gradient(fld, df).magnitude.data).max() == 0.0

    def test_collapses_to_dpc_on_plane_signal(self, plane_field):
        img, fld = plane_field
        df = scale_derivative(img, 0.5)
        d = dpc_gradient(fld, df)
        m = mdpc_gradient(fld, df)
        diff = np.hypot(m.g1.data - d.g1.data, m.g2.data - d.g2.data)
        assert diff.max() <= 1e-3

    def test_correction_matches_generic_clifford_route(self, blob_field):
        # closed form vs the full product table: build Dn via the Dirac
        # assembly, multiply by n, take the vector grade
        ft = compute_features(blob_field)
        n1 = ft.orientation.v1.data
        n2 = ft.orientation.v2.data
        zeros = np.zeros_like(n1)
        ngrid = (zeros, n1, n2, zeros)
        d1n = tuple(cyclic_gradient(c, 2)[0] for c in ngrid)
        d2n = tuple(cyclic_gradient(c, 2)[1] for c in ngrid)
        Dn = clifford.dirac_from_derivatives(d1n, d2n)
        prod = clifford.geometric_product_grid(Dn, ngrid)
        u, v1, v2 = blob_field.components()
        amp2 = u * u + v1 * v1 + v2 * v2
        sin2 = np.where(ft.amplitude_mask, (v1 * v1 + v2 * v2) / amp2, 0.0)
        gen1 = np.where(ft.orientation_mask, prod[1] * sin2, 0.0)
        gen2 = np.where(ft.orientation_mask, prod[2] * sin2, 0.0)
        c1, c2 = orientation_correction(blob_field)
        assert np.abs(gen1 - c1).max() <= 1e-10
        assert np.abs(gen2 - c2).max() <= 1e-10
        # grade bookkeeping: (D n) n never acquires scalar or bivector parts
        assert np.abs(prod[0]).max() <= 1e-10
        assert np.abs(prod[3]).max() <= 1e-10

    def test_difference_to_dpc_is_exactly_the_correction(self, blob_field):
        df = scale_derivative(fixtures.radial_blob(), 0.5)
        d = dpc_gradient(blob_field, df)
        m = mdpc_gradient(blob_field, df)
        c1, c2 = orientation_correction(blob_field)
        assert np.abs((d.g1.data - m.g1.data) - c1).max() <= 1e-12
        assert np.abs((d.g2.data - m.g2.data) - c2).max() <= 1e-12


class TestMixed:
    def test_constant_is_zero(self):
        _, fld, df = const_field()
        assert np.abs(mixed_gradient(fld, df).magnitude.data).max() == 0.0

    def test_is_mdpc_minus_la(self, step_image):
        fld = monogenic_scale(step_image, 0.5)
        df = scale_derivative(step_image, 0.5)
        mix = mixed_gradient(fld, df)
        m = mdpc_gradient(fld, df)
        a = la_gradient(fld)
        assert np.abs(mix.g1.data - (m.g1.data - a.g1.data)).max() <= 1e-12

    def test_step_per_row_maximum_near_edge(self, step_image):
        g = response(step_image, "la_mdpc")
        peaks = np.argmax(g.magnitude.data, axis=1)
        assert np.all(np.abs(peaks - 31.0) <= 1.0)


class TestSobel:
    def test_constant(self):
        g = sobel_gradient(ScalarField(np.full((8, 8), 2.0)))
        assert np.abs(g.magnitude.data).max() < 1e-12

    def test_unit_ramp_interior(self):
        g = sobel_gradient(fixtures.ramp(16, 16, slope=1.0))
        assert np.allclose(g.g1.data[1:-1, 1:-1], 8.0, atol=1e-12)
        assert np.abs(g.g2.data[1:-1, 1:-1]).max() < 1e-12

    def test_step_peak_at_edge(self, step_image):
        g = sobel_gradient(step_image)
        peaks = np.argmax(g.magnitude.data, axis=1)
        assert np.all(np.abs(peaks - 31.0) <= 1.0)

    def test_too_small(self):
        with pytest.raises(ImageTooSmallError):
            sobel_gradient(ScalarField(np.zeros((2, 8))))


class TestCanny:
    def test_constant(self):
        g = canny_gradient(ScalarField(np.full((8, 8), 2.0)))
        assert np.abs(g.magnitude.data).max() < 1e-12

    def test_step_peak_and_width_growth(self, step_image):
        g1 = canny_gradient(step_image, 1.0)
        g2 = canny_gradient(step_image, 2.0)
        row1 = g1.magnitude.data[32]
        row2 = g2.magnitude.data[32]
        assert abs(int(np.argmax(row1)) - 31) <= 1
        w1 = int((row1 > 0.5 * row1.max()).sum())
        w2 = int((row2 > 0.5 * row2.max()).sum())
        assert w2 > w1

    def test_linearity(self):
        rng = np.random.default_rng(3)
        a = ScalarField(rng.standard_normal((32, 32)))
        b = ScalarField(rng.standard_normal((32, 32)))
        lhs = canny_gradient(ScalarField(2.0 * a.data + 0.5 * b.data))
        rhs = 2.0 * canny_gradient(a).g1.data + 0.5 * canny_gradient(b).g1.data
        assert np.abs(lhs.g1.data - rhs).max() <= 1e-10


class TestNms:
    def test_single_pixel_survives(self):
        g1 = np.zeros((7, 7))
        g1[3, 3] = 2.0
        g = GradientMap.from_components(g1, np.zeros_like(g1), "sobel", 0.0)
        out = non_maximum_suppression(g, 1.5)
        assert out.magnitude.data[3, 3] == 2.0
        assert out.magnitude.data.sum() == 2.0

    def test_triangular_ridge_keeps_crest(self):
        # magnitudes 0 1 2 3 2 1 0 with horizontal direction: at radius
        # 1.5 the crest compares against 1.5 both sides, neighbours of the
        # crest compare against interpolants that include the crest
        prof = np.array([0.0, 1.0, 2.0, 3.0, 2.0, 1.0, 0.0])
        g1 = np.tile(prof, (5, 1))
        g = GradientMap.from_components(g1, np.zeros_like(g1), "sobel", 0.0)
        out = non_maximum_suppression(g, 1.5)
        for r in range(1, 4):
            assert list(np.nonzero(out.magnitude.data[r])[0]) == [3]

    def test_idempotent(self, step_image):
        g = normalize_gradient(sobel_gradient(step_image))
        once = non_maximum_suppression(g, 1.5)
        twice = non_maximum_suppression(once, 1.5)
        assert np.array_equal(once.magnitude.data, twice.magnitude.data)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_idempotent_on_random_maps(self, seed):
        rng = np.random.default_rng(seed)
        g1 = rng.random((12, 12))
        g2 = rng.random((12, 12)) - 0.5
        g = GradientMap.from_components(g1, g2, "sobel", 0.0)
        once = non_maximum_suppression(g, 1.5)
        twice = non_maximum_suppression(once, 1.5)
        assert np.array_equal(once.magnitude.data, twice.magnitude.data)

    def test_bad_radius(self, step_image):
        with pytest.raises(ValueError):
            non_maximum_suppression(sobel_gradient(step_image), 0.0)


class TestHysteresis:
    def mk(self, mag):
        mag = np.asarray(mag, dtype=float)
        return GradientMap.from_components(mag, np.zeros_like(mag), "sobel", 0.0)

    def test_all_below_low_empty(self):
        out = hysteresis_threshold(self.mk(np.full((5, 5), 0.5)), 1.0, 3.5)
        assert out.count() == 0

    def test_chain_follows_seed(self):
        mag = np.zeros((5, 5))
        mag[2, 0] = 4.0             # seed
        mag[2, 1] = mag[1, 2] = mag[2, 3] = 1.5   # 8-connected weak chain
        mag[4, 4] = 1.5             # disconnected weak pixel
        out = hysteresis_threshold(self.mk(mag), 1.0, 3.5)
        assert out.mask[2, 0] and out.mask[2, 1] and out.mask[1, 2] and out.mask[2, 3]
        assert not out.mask[4, 4]
        assert out.count() == 4

    def test_weak_blobs_without_seed_empty(self):
        mag = np.zeros((6, 6))
        mag[1, 1] = mag[1, 2] = 2.0
        mag[4, 4] = mag[4, 5] = 2.0
        assert hysteresis_threshold(self.mk(mag), 1.0, 3.5).count() == 0

    def test_bad_thresholds(self):
        with pytest.raises(BadThresholdsError):
            hysteresis_threshold(self.mk(np.zeros((4, 4))), 3.5, 1.0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6),
           st.floats(min_value=0.1, max_value=3.0))
    def test_monotone_in_low(self, seed, low):
        rng = np.random.default_rng(seed)
        g = self.mk(4.0 * rng.random((10, 10)))
        base = hysteresis_threshold(g, low, 3.5)
        tighter = hysteresis_threshold(g, min(low + 0.5, 3.4), 3.5)
        assert not np.any(tighter.mask & ~base.mask)


class TestDetectorConfig:
    def test_unknown_method(self):
        with pytest.raises(ValueError):
            DetectorConfig(method="prewitt")

    def test_bad_scale(self):
        with pytest.raises(NegativeScaleError):
            DetectorConfig(scale=-1.0)

    def test_bad_thresholds(self):
        with pytest.raises(BadThresholdsError):
            DetectorConfig(low=3.5, high=1.0)

    def test_bad_fd_step(self):
        with pytest.raises(ValueError):
            DetectorConfig(fd_step=0.0)

    def test_replace(self):
        cfg = DetectorConfig().replace(method="dpc", scale=1.0)
        assert cfg.method == "dpc" and cfg.scale == 1.0


class TestDetect:
    @pytest.mark.parametrize("method", edgeops.METHODS)
    def test_step_thin_and_located(self, step_image, method):
        res = detect(step_image, DetectorConfig(method=method))
        mask = res.edges.mask
        rows_hit = 0
        for r in range(2, 62):
            cols = np.nonzero(mask[r])[0]
            if len(cols) == 0:
                continue
            rows_hit += 1
            assert np.all(np.abs(cols - 31.0) <= 1.0), f"{method} row {r}: {cols}"
            assert not np.any(np.diff(cols) == 1), f"{method} row {r} not thin"
        assert rows_hit == 60

    def test_blank_image_empty(self):
        res = detect(ScalarField(np.full((32, 32), 0.4)), DetectorConfig(method="dpc"))
        assert res.edges.count() == 0

    def test_doubling_input_keeps_dpc_edges(self, step_image):
        r1 = detect(step_image, DetectorConfig(method="dpc"))
        r2 = detect(ScalarField(2.0 * step_image.data), DetectorConfig(method="dpc"))
        assert np.array_equal(r1.edges.mask, r2.edges.mask)

    def test_fd_mode_close_to_analytic(self, step_image):
        ra = detect(step_image, DetectorConfig(method="mdpc"))
        rf = detect(step_image, DetectorConfig(method="mdpc", derivative_mode="fd"))
        # same edges; the derivative routes differ at O(delta^2)
        assert np.array_equal(ra.edges.mask, rf.edges.mask)

    def test_provenance_recorded(self, step_image):
        res = detect(step_image, DetectorConfig(method="la"))
        prov = res.edges.provenance
        assert prov["method"] == "la"
        assert prov["nms_radius"] == 1.5

    def test_gradient_magnitude_consistent(self, step_image):
        res = detect(step_image, DetectorConfig(method="mdpc"))
        g = res.gradient
        hyp = np.hypot(g.g1.data, g.g2.data)
        assert np.abs(hyp - g.magnitude.data).max() <= 1e-10


@settings(max_examples=10, deadline=None)
@given(st.floats(min_value=0.1, max_value=50.0))
def test_dpc_response_scale_invariance(c):
    img = fixtures.vertical_step()
    fld = monogenic_scale(img, 0.5)
    df = scale_derivative(img, 0.5)
    g0 = dpc_gradient(fld, df)
    img2 = ScalarField(c * img.data)
    g1 = dpc_gradient(monogenic_scale(img2, 0.5), scale_derivative(img2, 0.5))
    assert np.abs(g0.g1.data - g1.g1.data).max() <= 1e-10
