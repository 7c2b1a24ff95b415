import numpy as np
import pytest
from scipy.integrate import quad
from scipy.spatial import ConvexHull

from trace_bounds import geometry as G


def ellipse_perimeter(a, b):
    """Independent oracle: adaptive quadrature of the arclength integral."""
    val, _ = quad(lambda t: np.sqrt(a**2 * np.sin(t)**2 + b**2 * np.cos(t)**2),
                  0.0, 2.0 * np.pi, limit=200)
    return val


class TestDomainSpec:
    def test_constructors_validate(self):
        with pytest.raises(G.GeometryError):
            G.DomainSpec.disk(-1.0, 0.02)
        with pytest.raises(G.GeometryError):
            G.DomainSpec.disk(1.0, 0.0)
        with pytest.raises(G.GeometryError):
            G.DomainSpec.annulus(1.0, 0.5, 0.02)
        with pytest.raises(G.GeometryError):
            G.DomainSpec(kind="banana", h=0.1, dim=2)
        with pytest.raises(G.GeometryError):
            G.DomainSpec(kind="disk", h=0.1, dim=3, radius=1.0)
        with pytest.raises(G.GeometryError):
            G.DomainSpec.levelset("", 0.1)

    def test_levelset_expression_language(self):
        fn = G.parse_levelset_expression("min(x^2+y^2-1, max(x, -y))", 2)
        pts = np.array([[0.0, 0.0], [2.0, 0.0], [-3.0, 1.0]])
        expected = np.minimum(pts[:, 0]**2 + pts[:, 1]**2 - 1,
                              np.maximum(pts[:, 0], -pts[:, 1]))
        np.testing.assert_allclose(fn(pts), expected, rtol=1e-14)
        fn3 = G.parse_levelset_expression("sqrt(x^2+y^2+z^2) - 1.5", 3)
        p3 = np.array([[1.0, 1.0, 1.0]])
        np.testing.assert_allclose(fn3(p3), np.sqrt(3) - 1.5)

    def test_expression_division_and_precedence(self):
        fn = G.parse_levelset_expression("(x/2)^2 + y^2 - 1", 2)
        pts = np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        np.testing.assert_allclose(fn(pts), (pts[:, 0] / 2)**2 + pts[:, 1]**2 - 1,
                                   rtol=1e-14)
        fn2 = G.parse_levelset_expression("2 - 3 - 1", 2)  # left assoc
        assert fn2(np.zeros((1, 2)))[0] == -2.0
        fn3 = G.parse_levelset_expression("2^3^2", 2)  # right assoc
        assert fn3(np.zeros((1, 2)))[0] == 512.0

    def test_expression_errors(self):
        for bad in ("x +", "foo(x)", "x ~ y", "min(x)", "(x", "x) y"):
            with pytest.raises(G.GeometryError):
                G.parse_levelset_expression(bad, 2)
        with pytest.raises(G.GeometryError):
            G.parse_levelset_expression("z", 2)  # z needs dim 3


class TestBuildDomain:
    def test_disk_measures(self, disk):
        assert abs(disk.volume - np.pi) / np.pi < 0.01
        assert abs(disk.area - 2 * np.pi) / (2 * np.pi) < 0.01

    def test_ball_measures(self, ball):
        assert abs(ball.volume - 4 * np.pi / 3) / (4 * np.pi / 3) < 0.03
        assert abs(ball.area - 4 * np.pi) / (4 * np.pi) < 0.03

    def test_ellipse_measures(self, ellipse):
        perimeter = ellipse_perimeter(2.0, 1.0)
        assert abs(perimeter - 9.6884) < 1e-3  # anchor the oracle itself
        assert abs(ellipse.volume - 2 * np.pi) / (2 * np.pi) < 0.01
        assert abs(ellipse.area - perimeter) / perimeter < 0.01

    def test_ellipsoid_measures(self):
        dom = G.build_domain(G.DomainSpec.ellipsoid(1.5, 1.0, 0.75, 0.1))
        exact_volume = 4 * np.pi / 3 * 1.5 * 1.0 * 0.75
        assert abs(dom.volume - exact_volume) / exact_volume < 0.03
        # Thomsen's approximation is good to ~1% for these axis ratios
        p = 1.6075
        approx_area = 4 * np.pi * (((1.5 * 1.0)**p + (1.5 * 0.75)**p
                                    + (1.0 * 0.75)**p) / 3) ** (1 / p)
        assert abs(dom.area - approx_area) / approx_area < 0.03
        assert np.abs(np.linalg.norm(dom.boundary_normal, axis=1) - 1).max() < 1e-12

    def test_levelset_sphere_3d(self):
        dom = G.build_domain(G.DomainSpec.levelset("x^2+y^2+z^2-1", 0.15, 3,
                                                   (-1.5, 1.5)))
        assert abs(dom.volume - 4 * np.pi / 3) / (4 * np.pi / 3) < 0.05
        exact = dom.boundary_pos / np.linalg.norm(dom.boundary_pos, axis=1,
                                                  keepdims=True)
        assert np.abs(dom.boundary_normal - exact).max() < 1e-7

    def test_normals_are_unit(self, disk, ball, ellipse, annulus):
        for dom in (disk, ball, ellipse, annulus):
            lengths = np.linalg.norm(dom.boundary_normal, axis=1)
            assert np.abs(lengths - 1.0).max() < 1e-12

    def test_interior_levelset_negative(self, disk):
        assert (disk.phi.ravel()[disk.interior_flat] < 0).all()

    @pytest.mark.parametrize("spec,n", [
        (G.DomainSpec.disk(1.0, 0.02), 2),
        (G.DomainSpec.ball(1.0, 0.1), 3),
    ])
    def test_divergence_theorem(self, spec, n):
        # both sides computed independently: surface flux of w(x)=x vs n|Omega|
        dom = G.build_domain(spec)
        flux = G.integrate_boundary(
            dom, np.sum(dom.boundary_pos * dom.boundary_normal, axis=1))
        assert abs(flux - n * dom.volume) / (n * dom.volume) < 0.02

    def test_refinement_first_order(self):
        errs_v, errs_a = [], []
        for h in (0.08, 0.04, 0.02):
            dom = G.build_domain(G.DomainSpec.disk(1.0, h))
            errs_v.append(abs(dom.volume - np.pi))
            errs_a.append(abs(dom.area - 2 * np.pi))
        # at least first order: error at h/2 no worse than ~0.75 of error at h
        floor = 1e-9
        assert errs_v[1] <= 0.75 * errs_v[0] + floor
        assert errs_v[2] <= 0.75 * errs_v[1] + floor
        assert errs_a[1] <= 0.75 * errs_a[0] + floor
        assert errs_a[2] <= 0.75 * errs_a[1] + floor

    def test_too_coarse_raises(self):
        # a small disk centred between grid nodes contains none of them
        spec = G.DomainSpec.levelset("(x-0.05)^2+(y-0.05)^2-0.0016", 0.1, 2,
                                     (-0.5, 0.5))
        with pytest.raises(G.GeometryError, match="too coarse"):
            G.build_domain(spec)

    def test_unbounded_levelset_raises(self):
        with pytest.raises(G.GeometryError, match="not bounded"):
            G.build_domain(G.DomainSpec.levelset("x", 0.1, 2, (-1.0, 1.0)))

    def test_node_cap(self):
        # default cap is ~128^3 nodes; a 0.01-spaced ball grid exceeds it
        with pytest.raises(G.GeometryError, match="cap"):
            G.build_domain(G.DomainSpec.ball(1.0, 0.01))
        # the cap can be tightened explicitly
        with pytest.raises(G.GeometryError, match="cap"):
            G.build_domain(G.DomainSpec.ball(1.0, 0.1), max_nodes=1000)

    def test_levelset_numeric_normals_match_exact(self):
        dom = G.build_domain(G.DomainSpec.levelset("x^2+y^2-1", 0.05, 2, (-1.5, 1.5)))
        exact = dom.boundary_pos / np.linalg.norm(dom.boundary_pos, axis=1,
                                                  keepdims=True)
        assert np.abs(dom.boundary_normal - exact).max() < 1e-8

    def test_annulus_two_loops(self, annulus):
        radii = np.linalg.norm(annulus.boundary_pos, axis=1)
        assert (radii < 0.75).any() and (radii > 0.75).any()
        inner = radii < 0.75
        # inner normals point into the hole
        dots = np.sum(annulus.boundary_normal[inner]
                      * annulus.boundary_pos[inner], axis=1)
        assert (dots < 0).all()


class TestQuadrature:
    def test_volume_constant(self, disk):
        val = G.integrate_volume(disk, np.ones(disk.n_interior))
        assert abs(val - np.pi) / np.pi < 0.01

    def test_volume_odd_function(self, disk):
        val = G.integrate_volume(disk, disk.interior_coords[:, 0])
        assert abs(val) < 1e-2 * np.pi

    def test_volume_x_squared(self, disk):
        # polar oracle: int r^2 cos^2 = pi/4
        val = G.integrate_volume(disk, disk.interior_coords[:, 0] ** 2)
        assert abs(val - np.pi / 4) / (np.pi / 4) < 0.01

    def test_boundary_constant(self, disk):
        val = G.integrate_boundary(disk, np.ones(disk.n_boundary))
        assert abs(val - 2 * np.pi) / (2 * np.pi) < 0.01

    def test_boundary_odd(self, disk):
        val = G.integrate_boundary(disk, disk.boundary_normal[:, 0])
        assert abs(val) < 1e-2

    def test_boundary_nu_x_squared(self, disk):
        # int cos^2 over the circle = pi
        val = G.integrate_boundary(disk, disk.boundary_normal[:, 0] ** 2)
        assert abs(val - np.pi) / np.pi < 0.01

    def test_nonfinite_rejected(self, disk):
        bad = np.ones(disk.n_interior)
        bad[0] = np.nan
        with pytest.raises(G.GeometryError):
            G.integrate_volume(disk, bad)
        badb = np.ones(disk.n_boundary)
        badb[0] = np.inf
        with pytest.raises(G.GeometryError):
            G.integrate_boundary(disk, badb)

    def test_shape_mismatch_rejected(self, disk):
        with pytest.raises(G.GeometryError):
            G.integrate_volume(disk, np.ones(3))


class TestSimplexFraction:
    def test_against_convex_hull_oracle(self, rng):
        # independent geometric oracle: clip the simplex and take hull volume
        for _ in range(200):
            d = int(rng.integers(2, 4))
            verts = rng.normal(size=(d + 1, d))
            vals = rng.normal(size=d + 1)
            frac = G._simplex_inside_fraction(vals[None])[0]
            pts = [verts[i] for i in range(d + 1) if vals[i] < 0]
            for i in range(d + 1):
                for j in range(i + 1, d + 1):
                    if (vals[i] < 0) != (vals[j] < 0):
                        t = vals[i] / (vals[i] - vals[j])
                        pts.append(verts[i] + t * (verts[j] - verts[i]))
            if len(pts) <= d:
                expected = 0.0
            else:
                try:
                    expected = (ConvexHull(np.array(pts), qhull_options="QJ").volume
                                / ConvexHull(verts, qhull_options="QJ").volume)
                except Exception:
                    continue
            assert abs(frac - expected) < 1e-5

    def test_tie_values(self):
        assert abs(G._simplex_inside_fraction(np.array([[-1., -1., 1., 1.]]))[0]
                   - 0.5) < 1e-6
        assert abs(G._simplex_inside_fraction(np.array([[-1., 1., 1., 1.]]))[0]
                   - 0.125) < 1e-6
        assert G._simplex_inside_fraction(np.array([[1., 1., 1., 1.]]))[0] == 0.0
        assert G._simplex_inside_fraction(np.array([[-1., -1., -1., -1.]]))[0] == 1.0
