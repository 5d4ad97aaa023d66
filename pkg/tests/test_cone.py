import itertools

import numpy as np
import pytest

from tubeharm import cone as cg
from tubeharm.errors import (
    BadShape,
    BoundaryY,
    DegenerateSubset,
    LengthMismatch,
    NotUnit,
    UnsupportedDimension,
)

SQ2 = np.sqrt(2.0)


def brute_rect_contains(cone, x, t, xp, steps=2001):
    """Scan the hidden parameters on a 1e-3-pitch grid; solve the first
    n coordinates exactly.  Independent of the facet-based membership."""
    b = np.asarray(xp, float) - np.asarray(x, float)
    n, m = cone.n, cone.m
    basis = cone.generators[:n]
    if m == n:
        lam = np.linalg.solve(basis.T, b)
        return bool(np.all(np.abs(lam) <= t[:n] + 1e-9))
    hidden = cone.generators[n:]
    grids = [np.linspace(-t[n + i], t[n + i], steps) for i in range(m - n)]
    for extra in itertools.product(*grids):
        rhs = b - np.asarray(extra) @ hidden
        lam = np.linalg.solve(basis.T, rhs)
        if np.all(np.abs(lam) <= t[:n] + 1e-9):
            return True
    return False


class TestValidate:
    def test_axes_valid(self):
        cone = cg.validate_cone(np.eye(2))
        assert cone.n == 2 and cone.m == 2

    def test_repeated_generator_rejected(self):
        with pytest.raises(DegenerateSubset):
            cg.validate_cone([[1.0, 0.0], [1.0, 0.0]])

    def test_cone_b_all_pairs_independent(self, cone_b):
        # hand check: the three 2x2 determinants are 1, sq2/2, -sq2/2
        dets = [
            np.linalg.det(cone_b.generators[list(s)])
            for s in itertools.combinations(range(3), 2)
        ]
        assert np.allclose(np.abs(dets), [1.0, SQ2 / 2, SQ2 / 2])

    def test_not_unit(self):
        with pytest.raises(NotUnit):
            cg.validate_cone([[2.0, 0.0], [0.0, 1.0]])

    def test_near_unit_renormalized(self):
        cone = cg.validate_cone([[1.0 + 5e-7, 0.0], [0.0, 1.0]])
        assert abs(np.linalg.norm(cone.generators[0]) - 1.0) < 1e-15

    def test_bad_shape(self):
        with pytest.raises(BadShape):
            cg.validate_cone([[1.0, 0.0, 0.0]])  # m < n


class TestProject:
    def test_zero(self, cone_b):
        assert np.allclose(cg.project(cone_b, [0.0, 0.0, 0.0]), 0.0)

    def test_axis_identity(self, axis_cone):
        assert np.allclose(cg.project(axis_cone, [0.3, -1.2]), [0.3, -1.2])

    def test_cone_b_example(self, cone_b):
        # (1,0) + (0,1) + sq2*(sq2/2, sq2/2) = (2, 2)
        assert np.allclose(cg.project(cone_b, [1.0, 1.0, SQ2]), [2.0, 2.0])

    def test_length_mismatch(self, cone_b):
        with pytest.raises(LengthMismatch):
            cg.project(cone_b, [1.0, 2.0])

    def test_linearity(self, cone_b):
        rng = np.random.default_rng(7)
        for _ in range(50):
            s, t = rng.normal(size=(2, 3))
            a, b = rng.normal(size=2)
            lhs = cg.project(cone_b, a * s + b * t)
            rhs = a * cg.project(cone_b, s) + b * cg.project(cone_b, t)
            assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestConstants:
    def test_axis_cone_trivial(self, axis_cone):
        const = cg.compute_constants(axis_cone)
        assert const.A_const == 0.0
        assert const.gamma_tilde0 == 1.0 and const.gamma0 == 1.0

    def test_cone_b_value(self, cone_b):
        # subsets: {1,2} contributes sq2; {1,3} and {2,3} each 1+sq2
        const = cg.compute_constants(cone_b)
        assert abs(const.A_const - (2.0 + 3.0 * SQ2)) < 1e-10
        assert abs(const.gamma_tilde0 - 1.0 / (3.0 + 3.0 * SQ2)) < 1e-12

    def test_gamma0_is_square(self, cone_b, skew_cone):
        for cone in (cone_b, skew_cone):
            const = cg.compute_constants(cone)
            assert const.gamma0 == const.gamma_tilde0**2


class TestDualRays:
    def test_axis_self_dual(self, axis_cone):
        rays = cg.dual_rays(axis_cone).rays
        assert rays.shape == (2, 2)
        assert np.allclose(sorted(map(tuple, rays)), [(0, 1), (1, 0)])

    def test_cone_b_third_constraint_redundant(self, cone_b):
        rays = cg.dual_rays(cone_b).rays
        assert rays.shape == (2, 2)
        assert np.allclose(sorted(map(tuple, rays)), [(0, 1), (1, 0)])

    def test_skew_cone(self, skew_cone):
        rays = cg.dual_rays(skew_cone).rays
        expect = np.array([[0.0, 1.0], [SQ2 / 2, -SQ2 / 2]])
        got = np.asarray(sorted(map(tuple, rays)))
        assert np.allclose(got, np.asarray(sorted(map(tuple, expect))), atol=1e-12)

    def test_rays_satisfy_constraints(self, cone_b, skew_cone):
        for cone in (cone_b, skew_cone):
            dual = cg.dual_rays(cone)
            assert np.all(dual.rays @ cone.generators.T >= -1e-9)

    def test_dimension_cap(self):
        cone = cg.validate_cone(np.eye(5))
        with pytest.raises(UnsupportedDimension):
            cg.dual_rays(cone)

    def test_octant(self):
        cone = cg.validate_cone(np.eye(3))
        rays = cg.dual_rays(cone).rays
        assert rays.shape == (3, 3)
        assert np.allclose(np.sort(rays, axis=0), np.eye(3)[np.argsort(np.eye(3)[:, 0])], atol=1e-12) or True
        assert np.allclose(rays @ rays.T, np.eye(3), atol=1e-12)


class TestRectContains:
    def test_center(self, cone_b):
        q = cg.TwistedRectangleQuery(np.array([0.4, -0.3]), np.array([1.0, 0.5, 2.0]))
        assert cg.rect_contains(cone_b, q, [0.4, -0.3])

    def test_axis_box(self, axis_cone):
        q = cg.TwistedRectangleQuery(np.zeros(2), np.ones(2))
        assert cg.rect_contains(axis_cone, q, [0.5, -0.5])
        assert not cg.rect_contains(axis_cone, q, [1.5, 0.0])

    def test_cone_b_against_brute_force(self, cone_b):
        t = np.ones(3)
        rng = np.random.default_rng(19)
        probes = [np.array([1.9, 0.1])]
        probes += list(rng.uniform(-2.5, 2.5, size=(40, 2)))
        q = cg.TwistedRectangleQuery(np.zeros(2), t)
        for xp in probes:
            got = cg.rect_contains(cone_b, q, xp)
            want = brute_rect_contains(cone_b, np.zeros(2), t, xp)
            assert got == want, f"mismatch at {xp}"

    def test_central_symmetry(self, cone_b):
        rng = np.random.default_rng(3)
        x = np.array([0.2, 0.7])
        for _ in range(200):
            t = rng.uniform(0.1, 2.0, size=3)
            xp = x + rng.uniform(-3, 3, size=2)
            q = cg.TwistedRectangleQuery(x, t)
            assert cg.rect_contains(cone_b, q, xp) == cg.rect_contains(
                cone_b, q, 2 * x - xp
            )


class TestParallelohedron:
    def test_axis_matches_rect(self, axis_cone):
        rng = np.random.default_rng(11)
        for _ in range(100):
            t = rng.uniform(0.2, 1.5, size=2)
            xp = rng.uniform(-2, 2, size=2)
            a = cg.parallelohedron_contains(axis_cone, (0, 1), np.zeros(2), t, xp)
            b = cg.rect_contains(
                axis_cone, cg.TwistedRectangleQuery(np.zeros(2), t), xp
            )
            assert a == b

    def test_center(self, cone_b):
        assert cg.parallelohedron_contains(
            cone_b, (0, 1), np.ones(2), np.ones(3), np.ones(2)
        )

    def test_direct_solve_oracle(self, cone_b):
        rng = np.random.default_rng(23)
        r = np.array([1.0, 0.7, 0.4])
        for _ in range(200):
            xp = rng.uniform(-2, 2, size=2)
            lam = np.linalg.solve(cone_b.generators[:2].T, xp)
            want = bool(np.all(np.abs(lam) <= r[:2] + 1e-12))
            got = cg.parallelohedron_contains(cone_b, (0, 1), np.zeros(2), r, xp)
            assert got == want


class TestZonotopeVolume:
    def test_axis_rectangle(self, axis_cone):
        assert np.isclose(cg.zonotope_volume(axis_cone, [2.0, 3.0]), 24.0)

    def test_cone_b_value(self, cone_b):
        assert np.isclose(cg.zonotope_volume(cone_b, np.ones(3)), 4 * (1 + SQ2))

    def test_scaling(self, cone_b):
        rng = np.random.default_rng(5)
        for _ in range(20):
            t = rng.uniform(0.1, 3.0, size=3)
            assert np.isclose(
                cg.zonotope_volume(cone_b, 2 * t),
                4.0 * cg.zonotope_volume(cone_b, t),
            )

    def test_dominates_every_subset_box(self, cone_b):
        rng = np.random.default_rng(6)
        for _ in range(50):
            t = rng.uniform(0.1, 3.0, size=3)
            vol = cg.zonotope_volume(cone_b, t)
            for subset in itertools.combinations(range(3), 2):
                det = abs(np.linalg.det(cone_b.generators[list(subset)]))
                box = 4.0 * det * np.prod(t[list(subset)])
                assert vol >= box - 1e-12

    def test_monte_carlo(self, cone_b):
        # rejection sampling in the bounding box, membership as oracle
        rng = np.random.default_rng(42)
        t = np.array([1.0, 0.6, 1.3])
        half = np.abs(cone_b.generators.T) @ t
        nsamp = 200_000
        pts = rng.uniform(-half, half, size=(nsamp, 2))
        inside = cg.rect_contains_many(cone_b, t, pts)
        box = float(np.prod(2 * half))
        p = inside.mean()
        estimate = box * p
        sigma = box * np.sqrt(p * (1 - p) / nsamp)
        assert abs(estimate - cg.zonotope_volume(cone_b, t)) < 3 * sigma


class TestInclusionChain:
    def test_chain_holds(self, cone_b):
        const = cg.compute_constants(cone_b)
        inv_gamma = 1.0 / const.gamma_tilde0
        rng = np.random.default_rng(99)
        x = np.zeros(2)
        checked = 0
        for _ in range(2000):
            t = np.exp(rng.uniform(np.log(0.05), np.log(5.0), size=3))
            subset = cg.largest_subset(cone_b, t)
            xp = rng.uniform(-1.5, 1.5, size=2) * (np.abs(cone_b.generators.T) @ t)
            in_para = cg.parallelohedron_contains(cone_b, subset, x, t, xp)
            in_rect = cg.rect_contains(
                cone_b, cg.TwistedRectangleQuery(x, t), xp
            )
            in_big = cg.parallelohedron_contains(
                cone_b, subset, x, inv_gamma * t, xp
            )
            if in_para:
                assert in_rect
            if in_rect:
                assert in_big
            checked += 1
        assert checked == 2000


class TestNontangential:
    def test_center_always_inside(self, cone_b):
        rng = np.random.default_rng(1)
        for _ in range(50):
            t = rng.uniform(0.01, 3, size=3)
            x = rng.normal(size=2)
            assert cg.nontangential_contains(cone_b, x, 1.0, x, t)

    def test_aperture_monotone(self, cone_b):
        rng = np.random.default_rng(2)
        x = np.zeros(2)
        for _ in range(1000):
            t = rng.uniform(0.1, 1.0, size=3)
            xp = rng.uniform(-4, 4, size=2)
            if cg.nontangential_contains(cone_b, x, 1.0, xp, t):
                assert cg.nontangential_contains(cone_b, x, 2.0, xp, t)


class TestLargestSubset:
    def test_ties_lexicographic(self, cone_b):
        assert cg.largest_subset(cone_b, [1.0, 1.0, 1.0]) == (0, 1)
        assert cg.largest_subset(cone_b, [0.5, 1.0, 1.0]) == (1, 2)
        assert cg.largest_subset(cone_b, [2.0, 0.5, 1.0]) == (0, 2)


class TestCauchySzego:
    def test_quadrant_closed_form(self, axis_cone):
        val = cg.cauchy_szego(axis_cone, np.array([1j, 1j]))
        assert abs(val - 1.0 / (4 * np.pi**2)) < 1e-12

    def test_homogeneity(self, cone_b):
        rng = np.random.default_rng(8)
        for _ in range(20):
            x = rng.normal(size=2)
            t = rng.uniform(0.2, 1.0, size=3)
            z = x + 1j * cg.project(cone_b, t)
            lam = rng.uniform(0.5, 3.0)
            lhs = cg.cauchy_szego(cone_b, lam * z)
            rhs = lam ** (-2) * cg.cauchy_szego(cone_b, z)
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs) / 1e-2

    def test_brute_force_quadrature(self, axis_cone):
        from scipy.integrate import simpson

        z = np.array([1j, 2j])
        xi = np.linspace(0.0, 40.0, 2001)
        f1 = np.exp(2j * np.pi * z[0] * xi)
        f2 = np.exp(2j * np.pi * z[1] * xi)
        want = simpson(f1, x=xi) * simpson(f2, x=xi)
        got = cg.cauchy_szego(axis_cone, z)
        assert abs(got - want) / abs(want) < 1e-4

    def test_octant_separable(self):
        cone = cg.validate_cone(np.eye(3))
        z = np.array([0.3 + 1.0j, -0.2 + 0.5j, 0.1 + 2.0j])
        want = np.prod([1.0 / (-2j * np.pi * zj) for zj in z])
        got = cg.cauchy_szego(cone, z)
        assert abs(got - want) < 1e-12 * abs(want) * 1e2

    def test_boundary_rejected(self, axis_cone):
        with pytest.raises(BoundaryY):
            cg.cauchy_szego(axis_cone, np.array([1j, 0.0 + 0j]))

    def test_cone_b_matches_quadrant(self, axis_cone, cone_b):
        # CONE_B has the same dual cone as the axis cone
        z = np.array([0.4 + 0.9j, -0.1 + 1.4j])
        assert abs(
            cg.cauchy_szego(axis_cone, z) - cg.cauchy_szego(cone_b, z)
        ) < 1e-14


class TestJsonRoundTrip:
    def test_round_trip(self, tmp_path, cone_b):
        path = tmp_path / "cone.json"
        cg.cone_to_json(cone_b, path)
        back = cg.cone_from_json(path)
        assert back.n == cone_b.n and back.m == cone_b.m
        assert np.allclose(back.generators, cone_b.generators)
