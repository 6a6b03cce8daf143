import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from resonances1d import absorber as ab
from resonances1d import spectral as sp
from resonances1d import transfer as tr
from resonances1d.errors import InputError, MeshMismatch, ResonantDenominator
from resonances1d.potential import square_potential, zero_potential

FREE_LAYER = ab.AbsorberSpec(0.0, 1.0, 0.0)
DEFAULT = ab.AbsorberSpec()
# two tall barriers trap long-lived states just below the real axis
CAVITY = square_potential([20, 0, 20], [-1.5, -1, 1, 1.5])


@pytest.fixture(scope="module")
def cavity():
    exact = tr.find_resonances_secular(CAVITY, (0.5, 6, -1, -1e-4))
    out = {}
    for sigma in (ab.DEFAULT_SIGMA, 0.0):
        spec = ab.AbsorberSpec(0, ab.DEFAULT_WIDTH, sigma)
        pp = ab.capped_pencil(CAVITY, spec, ab.capped_mesh(CAVITY, spec, 24))
        out[sigma] = sp.solve_pencil(pp, vectors=False).eigenvalues
    return exact, out


class TestSpec:
    def test_defaults(self):
        assert DEFAULT.width == 30 and DEFAULT.sigma == 5

    def test_ramp(self):
        assert DEFAULT.W(0.0) == 0
        assert DEFAULT.W(30.0) == -5j

    def test_validation(self):
        with pytest.raises(InputError):
            ab.AbsorberSpec(1, 1)
        with pytest.raises(InputError):
            ab.AbsorberSpec(sigma=-1)
        with pytest.raises(InputError):
            ab.AbsorberSpec(profile="cubic")

    def test_moved_keeps_width(self):
        s = DEFAULT.moved(2.0)
        assert (s.L, s.M, s.sigma) == (2.0, 32.0, 5.0)


class TestGamma:
    def test_free_exponentials(self):
        gp, gm = ab.integrate_gamma(FREE_LAYER, 2.0)
        assert gp == pytest.approx(cmath.exp(2j), abs=1e-10)
        assert gm == pytest.approx(cmath.exp(-2j), abs=1e-10)

    @pytest.mark.parametrize("lam", [2.0, 1.0 - 0.3j, 4.5])
    def test_wronskian(self, lam):
        gp, gm, dgp, dgm = ab.integrate_gamma(DEFAULT, lam, full=True)
        w = gp * dgm - dgp * gm
        assert abs(w - (-2j * lam)) <= 1e-9 * max(1.0, abs(gp * dgm))

    def test_absorption_favours_incoming(self):
        gp, gm = ab.integrate_gamma(DEFAULT, 2.0)
        assert abs(gm) > abs(gp)

    def test_converged_against_tighter_tolerance(self):
        a = ab.rho(DEFAULT, 2.0)
        b = ab.rho(DEFAULT, 2.0, rtol=1e-13)
        assert abs(a - b) <= 1e-6 * abs(b)

    def test_zero_lambda_rejected(self):
        with pytest.raises(InputError):
            ab.integrate_gamma(DEFAULT, 0.0)


class TestRho:
    @pytest.mark.parametrize("lam", [0.5, 2.0, 3.7])
    def test_free_closed_form(self, lam):
        r = ab.rho(FREE_LAYER, lam)
        assert r == pytest.approx(-cmath.exp(2j * lam), abs=1e-9)
        assert abs(r) == pytest.approx(1, abs=1e-9)

    def test_default_absorbs_on_window(self):
        assert max(abs(ab.rho(DEFAULT, lam)) for lam in np.linspace(1, 5, 41)) <= 1e-3

    def test_reflection_grows_at_low_frequency(self):
        assert abs(ab.rho(DEFAULT, 0.2)) > abs(ab.rho(DEFAULT, 1.0))

    @pytest.mark.parametrize("lam", [1.0, 2.0, 4.0])
    def test_opposite_frequencies_are_reciprocal(self, lam):
        # gamma_-(lam) = gamma_+(-lam), so rho(lam) rho(-lam) = 1
        assert ab.rho(DEFAULT, lam) * ab.rho(DEFAULT, -lam) == pytest.approx(1, rel=1e-8)

    @pytest.mark.parametrize("lam", [1.0, 2.0 - 0.3j])
    def test_conjugate_mirror_without_absorption(self, lam):
        mirror = ab.rho(FREE_LAYER, -np.conj(lam))
        assert mirror == pytest.approx(np.conj(ab.rho(FREE_LAYER, lam)), abs=1e-9)

    def test_conjugate_mirror_fails_under_absorption(self):
        r = ab.rho(DEFAULT, 2.0)
        assert abs(ab.rho(DEFAULT, -2.0) - np.conj(r)) > 1e3

    def test_reflection_record(self):
        d = ab.reflection(DEFAULT, 2.0)
        assert d.rho == pytest.approx(-d.gamma_plus_M / d.gamma_minus_M)
        assert d.lambda_hat == pytest.approx(ab.lambda_hat(2.0, d.rho))


class TestLambdaHat:
    def test_identity(self):
        assert ab.lambda_hat(2 - 1j, 0) == 2 - 1j

    def test_arithmetic(self):
        assert ab.lambda_hat(3, 1e-3) == pytest.approx(2.994005994005994, rel=1e-14)

    def test_resonant_denominator(self):
        with pytest.raises(ResonantDenominator):
            ab.lambda_hat(1, -1)

    @settings(max_examples=100)
    @given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=10),
           st.complex_numbers(max_magnitude=0.99))
    def test_perturbation_bound(self, lam, r):
        bound = 2 * abs(lam) * abs(r) / (1 - abs(r))
        assert abs(ab.lambda_hat(lam, r) - lam) <= bound * (1 + 1e-12) + 4e-16 * abs(lam)


class TestCappedPencil:
    def test_box_spectrum(self):
        p = zero_potential((0, 1), "halfline", "dirichlet")
        spec = ab.AbsorberSpec(0, 2, 0.0)
        pp = ab.capped_pencil(p, spec, ab.capped_mesh(p, spec, 24))
        ev = sp.solve_pencil(pp, vectors=False).eigenvalues
        ev = np.sort(ev[(ev.real > 0) & (np.abs(ev) < 7)].real)
        np.testing.assert_allclose(ev, np.arange(1, 7) * np.pi / 3, rtol=1e-8)

    def test_layers_mirrored_on_full_line(self):
        p = square_potential([-1], [-1, 1])
        mesh = ab.capped_mesh(p, ab.AbsorberSpec(0, 6, 1.0), 8)
        assert mesh.endpoints[0] == -7 and mesh.endpoints[-1] == 7

    def test_mesh_must_cover_layers(self):
        p = square_potential([-1], [-1, 1])
        with pytest.raises(MeshMismatch):
            ab.capped_pencil(p, DEFAULT, sp.default_mesh(p, 8))

    def test_cavity_resonances_within_reflection_bound(self, cavity):
        exact, ev = cavity
        assert len(exact) == 5
        for lam in exact:
            r = abs(ab.rho(DEFAULT, lam))
            d = np.abs(ev[ab.DEFAULT_SIGMA] - lam).min()
            assert d <= 5 * r * abs(lam)
            if r <= 1e-3:
                assert d <= 1e-2 * abs(lam)

    def test_removing_absorber_degrades_agreement(self, cavity):
        exact, ev = cavity
        for lam in exact[:3]:
            with_layer = np.abs(ev[ab.DEFAULT_SIGMA] - lam).min()
            without = np.abs(ev[0.0] - lam).min()
            assert without > 100 * with_layer
            # the closed box has a real spectrum, so the decay rate is lost
            assert without >= 0.9 * abs(lam.imag)
