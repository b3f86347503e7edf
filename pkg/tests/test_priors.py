"""Prior fields: Jeffreys, alpha-parallel, Weyl, reparametrization, CSV."""

import numpy as np
import pytest

from weylprior import (
    Axis,
    GridSpec,
    alpha_prior_field,
    jeffreys_field,
    normalize_field,
    prior_values,
    theorem_ratio_check,
    weyl_prior_field,
)
from weylprior.errors import GridError
from weylprior.priors import read_csv, reparam_transform, write_csv

from conftest import vech_theta


def small_grid():
    return GridSpec((Axis("mu", -1.0, 1.0, 5), Axis("sigma2", 0.5, 2.0, 5)))


class TestGrid:
    def test_axis_validation(self):
        with pytest.raises(GridError):
            Axis("a", 1.0, 0.0, 5)
        with pytest.raises(GridError):
            Axis("a", -1.0, 2.0, 4, spacing="log")
        with pytest.raises(GridError):
            Axis("a", 0.0, 1.0, 1)
        assert Axis("a", 2.0, 2.0, 1).values() == pytest.approx([2.0])

    def test_points_c_order(self):
        g = GridSpec((Axis("a", 0.0, 1.0, 2), Axis("b", 0.0, 2.0, 3)))
        pts = g.points()
        assert pts.shape == (6, 2)
        np.testing.assert_array_equal(pts[:3, 0], 0.0)
        np.testing.assert_array_equal(pts[:3, 1], [0.0, 1.0, 2.0])

    def test_cell_volumes_sum_to_box(self):
        g = small_grid()
        assert g.cell_volumes().sum() == pytest.approx(2.0 * 1.5, abs=1e-12)

    def test_log_spacing(self):
        vals = Axis("s", 0.5, 8.0, 5, spacing="log").values()
        np.testing.assert_allclose(vals[1:] / vals[:-1], 2.0, rtol=1e-12)


class TestFields:
    def test_jeffreys_closed_form(self, g1):
        # sqrt(det g) = 1 / (sqrt(2) sigma^3) in the (mu, sigma^2) chart
        field = jeffreys_field(g1, small_grid())
        want = 1.0 / (np.sqrt(2.0) * field.points[:, 1] ** 1.5)
        np.testing.assert_allclose(field.values, want, rtol=1e-10)

    def test_alpha_zero_is_jeffreys(self, g1):
        grid = small_grid()
        a0 = alpha_prior_field(g1, grid, 0.0, anchor=[0.0, 1.0])
        jf = jeffreys_field(g1, grid)
        np.testing.assert_allclose(a0.values, jf.values, rtol=1e-9)

    def test_alpha_prior_closed_form(self, g1):
        # exp(-(a/2) * (3/2) ln s2) * 1/(sqrt2 s2^{3/2}) for anchor (., 1)
        pts = np.array([[0.0, 0.5], [0.0, 1.0], [0.0, 4.0]])
        vals = prior_values(g1, pts, "alpha", alpha=2.0, anchor=[0.0, 1.0])
        want = pts[:, 1] ** -1.5 * pts[:, 1] ** -1.5 / np.sqrt(2.0)
        np.testing.assert_allclose(vals, want, rtol=1e-9)
        assert vals[2] == pytest.approx(0.011048543456039806, rel=1e-8)

    def test_weyl_prior_constant_gaussian1d(self, g1):
        # exp((m/2) Omega) sqrt(det g) = s2^{3/2} / (sqrt2 s2^{3/2}) = 1/sqrt2
        field = weyl_prior_field(g1, small_grid(), anchor=[0.0, 1.0])
        np.testing.assert_allclose(field.values, 1.0 / np.sqrt(2.0), rtol=1e-8)

    def test_missing_anchor(self, g1):
        with pytest.raises(GridError):
            prior_values(g1, [[0.0, 1.0]], "weyl")
        with pytest.raises(GridError):
            prior_values(g1, [[0.0, 1.0]], "alpha", anchor=[0.0, 1.0])

    def test_unknown_kind(self, g1):
        with pytest.raises(GridError):
            prior_values(g1, [[0.0, 1.0]], "haldane")

    def test_normalize(self, g1):
        field = normalize_field(jeffreys_field(g1, small_grid()))
        mass = field.values @ field.grid.cell_volumes()
        assert mass == pytest.approx(1.0, abs=1e-12)
        assert field.normalization == "normalized-over-grid"


class TestTheoremRatio:
    def test_gaussian1d(self, g1):
        out = theorem_ratio_check(g1, small_grid(), anchor=[0.0, 1.0])
        assert out["alpha"] == -2.0
        assert out["max_rel_deviation"] < 1e-10

    def test_mv2(self, mv2):
        grid = GridSpec((
            Axis("mu1", 0.0, 0.0, 1), Axis("mu2", 0.0, 0.0, 1),
            Axis("s11", 0.8, 1.6, 3), Axis("s12", 0.0, 0.2, 2),
            Axis("s22", 0.9, 1.4, 3)))
        out = theorem_ratio_check(mv2, grid, anchor=vech_theta([0, 0], np.eye(2)))
        assert out["alpha"] == -5.0
        assert out["max_rel_deviation"] < 1e-10

    def test_discrete_families(self, bern, pois):
        gb = GridSpec((Axis("p", 0.2, 0.8, 7),))
        assert theorem_ratio_check(bern, gb, anchor=[0.5])["max_rel_deviation"] < 1e-10
        gp = GridSpec((Axis("lam", 0.5, 5.0, 7),))
        assert theorem_ratio_check(pois, gp, anchor=[1.0])["max_rel_deviation"] < 1e-10


class TestReparam:
    def test_jeffreys_covariance(self, g1):
        # Jeffreys in (mu, sigma) is sqrt(2)/sigma^2; transforming the
        # (mu, sigma^2) field must match the natively computed one
        grid = small_grid()
        field = jeffreys_field(g1, grid)
        moved = reparam_transform(field, g1, "mu_sigma")
        native = prior_values(g1, moved.points, "jeffreys", chart="mu_sigma")
        np.testing.assert_allclose(moved.values, native, rtol=1e-9)
        assert moved.chart == "mu_sigma"

    def test_density_jacobian_factor(self, g1):
        # dtheta_src/dtheta_tgt for sigma2 -> sigma is 2 sigma
        field = jeffreys_field(g1, GridSpec((Axis("mu", 0.0, 0.0, 1),
                                             Axis("sigma2", 4.0, 4.0, 1))))
        moved = reparam_transform(field, g1, "mu_sigma")
        assert moved.points[0, 1] == pytest.approx(2.0)
        assert moved.values[0] == pytest.approx(field.values[0] * 4.0, rel=1e-12)


class TestCSV:
    def test_round_trip(self, g1, tmp_path):
        field = weyl_prior_field(g1, small_grid(), anchor=[0.0, 1.0])
        path = tmp_path / "field.csv"
        write_csv(field, path)
        names, pts, vals = read_csv(path)
        assert names == ["mu", "sigma2"]
        np.testing.assert_array_equal(pts, field.points)
        np.testing.assert_array_equal(vals, field.values)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(GridError):
            read_csv(p)
