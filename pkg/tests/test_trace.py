import numpy as np
import pytest

from billzeta.errors import DomainError, IncompleteDataError, NumericalError
from billzeta.stability import det_one_minus_poincare
from billzeta.trace import (
    BumpFunction,
    build_measure,
    experimental_compare,
    gaussian_weight,
    ikawa_scan,
    lemma41_search,
    pair,
    resonance_side,
    window_count,
)
from billzeta.zeta import Pole
from tests.conftest import restrict


@pytest.fixture(scope="module")
def bump():
    return BumpFunction()


def test_bump_normalization(bump):
    assert abs(bump.value(0.5) - 1.05) < 1e-12
    assert abs(bump.value(-0.5) - 1.05) < 1e-12


def test_bump_support_and_symmetry(bump):
    assert bump.value(0.0) > bump.value(0.5) > 0.0
    for t in (2.11, -2.2, 5.0):
        assert bump.value(t) == 0.0
    grid = np.linspace(-2.0, 2.0, 41)
    assert np.allclose(bump.value(grid), bump.value(-grid))


def test_bump_transform_is_nonnegative(bump):
    lams = np.linspace(-200.0, 200.0, 401)
    vals = bump.fourier(lams)
    assert np.all(vals >= 0.0)
    assert bump.fourier(0.0) > 0.0


def test_bump_transform_consistency(bump):
    for lam in (0.0, 1.7, 12.0, -33.3):
        z = bump.phi_hat(lam) if hasattr(bump, "phi_hat") else None
        if z is None:
            break
        assert abs(bump.fourier(lam) - bump.scale * abs(z) ** 2) < 1e-12 * max(
            1.0, bump.fourier(lam)
        )


def test_bump_vectorization(bump):
    arr = bump.value(np.array([0.0, 0.5, 3.0]))
    assert arr.shape == (3,)
    assert np.isscalar(bump.value(0.25)) or np.ndim(bump.value(0.25)) == 0


def test_measure_kinds(db10):
    half = build_measure(db10, "half")
    even = build_measure(db10, "even")
    dirichlet = build_measure(db10, "dirichlet")
    full = build_measure(db10, "full")
    assert half.cutoff == (db10.n_max + 1) * db10.config.d0
    assert np.all(half.weight > 0.0)
    assert np.all(full.weight > 0.0)
    # even kind doubles the even-m mass and kills odd m
    sel = even.weight != 0.0
    assert np.allclose(even.weight[sel], 2.0 * half.weight[sel])
    assert np.all(np.abs(dirichlet.weight) == half.weight)
    with pytest.raises(ValueError):
        build_measure(db10, "odd")


def test_pair_short_window_exact_value(db12, bump):
    measure = build_measure(db12, "dirichlet")
    rec = db12.record_for((1, 2))
    det = det_one_minus_poincare(rec.lam)
    expected = 3.0 * bump.value(0.0) * rec.T / np.sqrt(det)
    got = pair(measure, bump, 8.0, 50.0)
    assert abs(got - expected) < 1e-12 * expected
    assert window_count(measure, 8.0, 50.0) == 3


def test_pair_domain_checks(db12, bump):
    measure = build_measure(db12, "dirichlet")
    with pytest.raises(DomainError):
        pair(measure, bump, 2.0, 10.0)
    with pytest.raises(DomainError):
        pair(measure, bump, 10.0, 0.5)
    with pytest.raises(IncompleteDataError):
        pair(measure, bump, 51.5, 1.2)


def test_ikawa_scan_special_sequence(db12, bump):
    scan = ikawa_scan(db12, beta=1.0, alpha0=0.25, j_max=4, bump=bump)
    assert scan.gamma0_T == pytest.approx(8.0, abs=1e-12)
    assert len(scan.special_rows) == 4
    assert all(row[4] for row in scan.special_rows)
    lam12 = db12.record_for((1, 2)).lam_abs
    expected_rate = np.log(lam12) / (2.0 * scan.gamma0_T)
    assert abs(scan.fit_c0 - expected_rate) < 0.02
    assert scan.fit_c > 0.0


def test_ikawa_scan_respects_horizon(db10, bump):
    with pytest.raises(IncompleteDataError):
        ikawa_scan(db10, beta=1.0, alpha0=0.25, j_max=6, bump=bump)


def test_gaussian_weight_dual_agreement(db12, bump):
    g = gaussian_weight(db12, 12.8, 0.1, bump=bump)
    assert abs(g.direct - g.quadrature) <= max(g.quad_error, 1e-8)
    assert g.direct > 0.0
    assert g.bound_holds
    assert g.lower_bound <= g.direct


def test_gaussian_weight_grid_lower_bound(db12, bump):
    for t in np.linspace(9.0, 14.0, 5):
        for sigma in (0.1, 0.3):
            g = gaussian_weight(db12, float(t), sigma, bump=bump)
            assert g.bound_holds


def test_gaussian_weight_domain_checks(db12, bump):
    with pytest.raises(DomainError):
        gaussian_weight(db12, 12.8, 1.5, bump=bump)
    with pytest.raises(DomainError):
        gaussian_weight(db12, 12.8, 0.0, bump=bump)
    with pytest.raises(IncompleteDataError):
        gaussian_weight(db12, 51.5, 0.1, bump=bump)
    with pytest.raises(NumericalError):
        gaussian_weight(db12, 12.8, 0.1, xi_max=4.0, bump=bump)


def test_shell_search_finds_mass(db12, abscissas):
    report = lemma41_search(db12, abscissas[1.0], eps=0.1, t_max=40.0)
    assert np.sum(report.qualifying) >= 10
    assert np.all(report.sums[report.qualifying] >= report.thresholds[report.qualifying])
    assert report.t_sequence.size == np.sum(report.qualifying)
    assert "qualifying" in report.summary()


def test_shell_search_eps_monotone(db12, abscissas):
    few = lemma41_search(db12, abscissas[1.0], eps=0.02, t_max=40.0)
    many = lemma41_search(db12, abscissas[1.0], eps=0.3, t_max=40.0)
    assert np.sum(many.qualifying) >= np.sum(few.qualifying)


def test_shell_search_zero_rate_branch(db12):
    with pytest.raises(DomainError):
        lemma41_search(db12, 0.0, eps=0.1, t_max=30.0)
    report = lemma41_search(db12, 0.0, eps=0.1, t_max=30.0, u=1.0)
    assert np.allclose(report.thresholds, np.exp(-0.5 * report.centers))
    assert np.sum(report.qualifying) > 0


def test_shell_search_empty_is_quiet(db12, abscissas):
    report = lemma41_search(db12, abscissas[1.0], eps=0.1, t_max=6.0)
    assert np.sum(report.qualifying) == 0
    assert report.summary() == "no qualifying shell below t_max"


def test_shell_search_horizon(db10, abscissas):
    with pytest.raises(IncompleteDataError):
        lemma41_search(db10, abscissas[1.0], eps=0.1, t_max=44.0)


def test_experimental_compare_is_finite(db10, bump):
    poles = [
        Pole(complex(-0.12, 0.0), 1, 0.0, 0.1),
        Pole(complex(-0.26, 0.81), 2, 0.0, 0.1),
    ]
    rows = experimental_compare(db10, poles, 1.0, [8.0, 16.0], bump=bump)
    assert len(rows) == 2
    for ell, m, orbit, res, ratio in rows:
        assert np.isfinite(orbit)
        assert np.isfinite(res)
    assert resonance_side(poles, bump, 8.0, np.exp(8.0)) == pytest.approx(
        rows[0][3], rel=1e-12
    )
