import math

import numpy as np
import pytest

from crossdiff import (
    DiffusionMatrix,
    EdgeStoppingSpec,
    NCDF_NAMES,
    PresetLabelWarning,
    UnknownPreset,
    edge_stopping,
    eigen_discriminant,
    ellipticity,
    preset,
    rotation_matrix,
)


def brute_force_ellipticity(d: DiffusionMatrix, n_dirs: int = 360) -> float:
    """Independent oracle: min of xi^T d xi over unit directions."""
    angles = np.linspace(0.0, 2.0 * np.pi, n_dirs, endpoint=False)
    best = np.inf
    m = d.as_array()
    for a in angles:
        xi = np.array([np.cos(a), np.sin(a)])
        best = min(best, float(xi @ m @ xi))
    return best


class TestEdgeStopping:
    SPEC = EdgeStoppingSpec(10.0)

    def test_zero_gives_one(self):
        assert edge_stopping(0.0, self.SPEC) == 1.0

    def test_at_threshold_gives_half(self):
        for kappa in (0.5, 1.0, 10.0, 123.0):
            assert edge_stopping(kappa, EdgeStoppingSpec(kappa)) == pytest.approx(0.5, abs=1e-15)

    def test_three_kappa(self):
        assert edge_stopping(30.0, self.SPEC) == pytest.approx(0.1, abs=1e-15)

    def test_even_and_bounded(self):
        rng = np.random.Generator(np.random.Philox(key=10))
        w = rng.uniform(-1e4, 1e4, 200)
        g_pos = edge_stopping(w, self.SPEC)
        g_neg = edge_stopping(-w, self.SPEC)
        assert np.array_equal(g_pos, g_neg)
        assert np.all(g_pos > 0.0)
        assert np.all(g_pos <= 1.0)
        assert np.all((g_pos == 1.0) == (w == 0.0))

    def test_nonincreasing_in_abs(self):
        w = np.linspace(0.0, 100.0, 500)
        g = edge_stopping(w, self.SPEC)
        assert np.all(np.diff(g) <= 0.0)

    def test_kappa_validation(self):
        with pytest.raises(ValueError):
            EdgeStoppingSpec(0.0)
        with pytest.raises(ValueError):
            EdgeStoppingSpec(-1.0)


class TestEllipticity:
    def test_identity(self):
        assert ellipticity(DiffusionMatrix(1, 0, 0, 1)) == 1.0

    def test_ncdf1_closed_form(self):
        # symmetric part [[1, 0.5125], [0.5125, 1]]; min eigenvalue 1 - 0.5125
        d = preset("ncdf1").matrix
        assert ellipticity(d) == pytest.approx(0.4875, abs=1e-15)
        assert ellipticity(d) == pytest.approx(brute_force_ellipticity(d), abs=1e-3)

    def test_rotation_gives_cosine(self):
        for theta in (0.1, 0.5, math.pi / 3, 1.4):
            d = rotation_matrix(theta)
            assert ellipticity(d) == pytest.approx(math.cos(theta), abs=1e-12)

    def test_agrees_with_brute_force_on_random_matrices(self):
        rng = np.random.Generator(np.random.Philox(key=11))
        count = 0
        while count < 50:
            entries = rng.uniform(-2, 2, 4)
            d = DiffusionMatrix(*entries)
            if ellipticity(d) <= 0:
                continue
            count += 1
            assert ellipticity(d) == pytest.approx(brute_force_ellipticity(d), abs=1e-3)


class TestEigenDiscriminant:
    def test_ncdf_values(self):
        assert eigen_discriminant(preset("ncdf1").matrix) == pytest.approx(0.1, abs=1e-15)
        assert eigen_discriminant(preset("ncdf2").matrix) == pytest.approx(-0.0025, abs=1e-15)
        with pytest.warns(PresetLabelWarning):
            d3 = preset("ncdf3").matrix
        assert eigen_discriminant(d3) == pytest.approx(-0.09, abs=1e-15)
        assert eigen_discriminant(preset("ncdf6").matrix) == pytest.approx(0.0, abs=1e-15)

    def test_sign_classifies_eigenvalues(self):
        # oracle: numpy eigenvalues of the full matrix
        rng = np.random.Generator(np.random.Philox(key=12))
        for _ in range(100):
            d = DiffusionMatrix(*rng.uniform(-2, 2, 4))
            s = eigen_discriminant(d)
            eigs = np.linalg.eigvals(d.as_array())
            if s > 1e-9:
                assert np.all(np.abs(eigs.imag) < 1e-12)
                assert abs(eigs[0].real - eigs[1].real) > 1e-9
            elif s < -1e-9:
                assert np.all(np.abs(eigs.imag) > 1e-9)

    def test_ncdf1_distinct_real_eigenvalues(self):
        eigs = np.linalg.eigvals(preset("ncdf1").matrix.as_array())
        assert np.all(np.abs(eigs.imag) == 0.0)
        assert abs(eigs[0] - eigs[1]) > 0.3


class TestPresets:
    def test_published_coefficients(self):
        d4 = preset("ncdf4").matrix
        assert (d4.d11, d4.d12, d4.d21, d4.d22) == (1.0, 0.9, 1.0, 1.0)
        d5 = preset("ncdf5").matrix
        assert (d5.d11, d5.d12, d5.d21, d5.d22) == (1.0, -0.9, 0.9, 1.0)
        d1 = preset("ncdf1").matrix
        assert (d1.d11, d1.d12, d1.d21, d1.d22) == (1.0, 0.025, 1.0, 1.0)
        d2 = preset("ncdf2").matrix
        assert (d2.d11, d2.d12, d2.d21, d2.d22) == (1.0, -0.025, 0.025, 1.0)
        d6 = preset("ncdf6").matrix
        assert (d6.d11, d6.d12, d6.d21, d6.d22) == (1.0, -0.9, 0.225, 1.9)

    def test_rotation_pi_third(self):
        p = preset(f"rotation:{math.pi / 3}")
        assert p.matrix.d11 == pytest.approx(0.5, abs=1e-12)
        assert p.matrix.d12 == pytest.approx(-math.sqrt(3) / 2, abs=1e-12)
        assert p.matrix.d21 == pytest.approx(math.sqrt(3) / 2, abs=1e-12)
        assert p.matrix.d22 == pytest.approx(0.5, abs=1e-12)
        assert p.theta == pytest.approx(math.pi / 3)

    def test_case_insensitive(self):
        assert preset("NCDF4").matrix == preset("ncdf4").matrix

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset):
            preset("ncdf7")
        with pytest.raises(UnknownPreset):
            preset("rotation:nope")
        with pytest.raises(UnknownPreset):
            preset("rotation:2.0")  # outside (0, pi/2)

    def test_ncdf3_warns_about_label(self):
        with pytest.warns(PresetLabelWarning):
            preset("ncdf3")

    def test_other_presets_do_not_warn(self):
        import warnings

        for name in ("ncdf1", "ncdf2", "ncdf4", "ncdf5", "ncdf6"):
            with warnings.catch_warnings():
                warnings.simplefilter("error", PresetLabelWarning)
                preset(name)

    def test_all_presets_elliptic(self):
        import warnings

        for name in NCDF_NAMES:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", PresetLabelWarning)
                p = preset(name)
            assert p.alpha > 0.0
            assert p.alpha == ellipticity(p.matrix)
        for theta in (0.2, 0.7, 1.3):
            assert preset(f"rotation:{theta}").alpha > 0.0

    def test_labels_match_discriminant_sign_except_ncdf3(self):
        import warnings

        expected = {"ncdf1": 1, "ncdf2": -1, "ncdf4": 1, "ncdf5": -1, "ncdf6": 0}
        for name, sign in expected.items():
            s = eigen_discriminant(preset(name).matrix)
            got = 0 if abs(s) <= 1e-12 else (1 if s > 0 else -1)
            assert got == sign
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PresetLabelWarning)
            s3 = eigen_discriminant(preset("ncdf3").matrix)
        assert s3 < -1e-12  # contradicts its published zero label
