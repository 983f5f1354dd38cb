"""Space-time heat solve: time differentiation, smoother, assembly."""

import numpy as np
import pytest
import scipy.special

from ssem.assembly import SmootherSpec
from ssem.chebyshev import extrema_axis, inverse_extrema, roots_axis
from ssem.geometry import star_domain
from ssem.parabolic import (
    ParabolicProblem,
    SpaceTimeGrid,
    assemble_parabolic,
    bessel_j0,
    solve_parabolic,
    spacetime_half_inverse,
    spacetime_half_inverse_adjoint,
    time_diff_matrix,
)

from oracles import dense_operator


def exact_heat(x, y, t):
    """Two decaying radial modes of the heat equation on the unit scale."""
    r = np.hypot(x, y)
    return (np.exp(-t) * bessel_j0(r)
            - np.exp(-t / 4.0) * bessel_j0(r / 2.0))


STAR_HEAT = ParabolicProblem(
    domain=star_domain(),
    initial=lambda x, y: exact_heat(x, y, 0.0),
    lateral=lambda points, t: exact_heat(points[:, 0], points[:, 1], t),
    exact=exact_heat,
)


def star_grid(m, n=10):
    return SpaceTimeGrid(space_axes=(roots_axis(m), roots_axis(m)),
                         time_axis=extrema_axis(n, 0.0, 2.0))


class TestTimeDiffMatrix:
    def test_constant(self):
        mat = time_diff_matrix(extrema_axis(10, 0.0, 2.0))
        assert np.max(np.abs(mat @ np.ones(11))) < 1e-12

    def test_linear(self):
        axis = extrema_axis(10, 0.0, 2.0)
        mat = time_diff_matrix(axis)
        assert mat @ axis.nodes == pytest.approx(np.ones(11), abs=1e-12)

    def test_cubic(self):
        axis = extrema_axis(10, 0.0, 2.0)
        mat = time_diff_matrix(axis)
        assert mat @ axis.nodes ** 3 == pytest.approx(
            3.0 * axis.nodes ** 2, abs=1e-10)

    def test_full_degree(self):
        axis = extrema_axis(8, 0.0, 2.0)
        mat = time_diff_matrix(axis)
        expect = 8.0 * axis.nodes ** 7
        assert mat @ axis.nodes ** 8 == pytest.approx(
            expect, abs=1e-10 * np.max(np.abs(expect)))


class TestBesselJ0:
    def test_at_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_against_scipy(self):
        r = np.linspace(0.0, 2.0, 101)
        assert bessel_j0(r) == pytest.approx(scipy.special.j0(r), abs=1e-15)

    def test_shape_preserved(self):
        assert bessel_j0(np.ones((3, 4))).shape == (3, 4)


class TestAssembleParabolic:
    def test_row_counts_m10(self):
        system = assemble_parabolic(STAR_HEAT, star_grid(10))
        assert system.n_heat_rows == 280
        assert system.n_initial_rows == 28
        assert system.n_lateral_rows == 130
        assert system.n_rows == 438

    def test_row_counts_m12(self):
        system = assemble_parabolic(STAR_HEAT, star_grid(12))
        assert (system.n_heat_rows, system.n_initial_rows,
                system.n_lateral_rows) == (400, 40, 150)

    def test_rhs_stacking(self):
        grid = star_grid(10)
        system = assemble_parabolic(STAR_HEAT, grid)
        nh, ni = system.n_heat_rows, system.n_initial_rows
        assert system.rhs[:nh] == pytest.approx(np.zeros(nh), abs=0.0)
        from ssem.geometry import interior_coordinates
        coords = interior_coordinates(grid.space_axes, system.interior)
        assert system.rhs[nh:nh + ni] == pytest.approx(
            exact_heat(coords[:, 0], coords[:, 1], 0.0), abs=1e-15)
        lat = system.rhs[nh + ni:].reshape(system.boundary.count, 10)
        expect = exact_heat(system.boundary.points[:, 0:1],
                            system.boundary.points[:, 1:2],
                            grid.time_axis.nodes[None, 1:])
        assert lat == pytest.approx(expect, abs=1e-15)

    def test_exact_solution_interior_residual(self):
        grid = star_grid(20)
        system = assemble_parabolic(STAR_HEAT, grid)
        x = grid.space_axes[0].nodes[:, None, None]
        y = grid.space_axes[1].nodes[None, :, None]
        t = grid.time_axis.nodes[None, None, :]
        res = system.residual(exact_heat(x, y, t))
        assert np.max(np.abs(res[:system.n_heat_rows])) <= 1e-7

    def test_steady_harmonic_state_consistent(self):
        steady = ParabolicProblem(
            domain=star_domain(),
            initial=lambda x, y: x**2 - y**2,
            lateral=lambda points, t: points[:, 0] ** 2 - points[:, 1] ** 2,
        )
        grid = star_grid(10, n=6)
        system = assemble_parabolic(steady, grid)
        x = grid.space_axes[0].nodes[:, None, None]
        y = grid.space_axes[1].nodes[None, :, None]
        u = np.broadcast_to(x**2 - y**2, (10, 10, 7)).copy()
        assert np.max(np.abs(system.residual(u))) < 1e-10

    def test_adjoint_identity(self):
        system = assemble_parabolic(STAR_HEAT, star_grid(8, n=5))
        rng = np.random.default_rng(21)
        u = rng.standard_normal((8, 8, 6))
        v = rng.standard_normal(system.n_rows)
        lhs = np.dot(system.apply(u), v)
        rhs = np.sum(u * system.apply_transpose(v))
        assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))

    def test_transpose_columns_match_apply_transpose(self):
        system = assemble_parabolic(STAR_HEAT, star_grid(8, n=5))
        rng = np.random.default_rng(22)
        for i in rng.choice(system.n_rows, size=5, replace=False):
            e = np.zeros(system.n_rows)
            e[i] = 1.0
            col = system.transpose_columns(int(i), int(i) + 1)[0]
            assert np.max(np.abs(col - system.apply_transpose(e))) < 1e-12


class TestSpacetimeSmoother:
    def test_constant_unchanged(self):
        u = np.ones((5, 5, 4))
        out = spacetime_half_inverse(u, SmootherSpec("power", 4.0))
        assert out == pytest.approx(u, abs=1e-13)

    def test_spatial_mode_p2(self):
        m, n = 9, 5
        theta = np.pi * (2 * np.arange(m) + 1) / (2 * m)
        u = np.broadcast_to(np.cos(3 * theta)[:, None, None],
                            (m, m, n + 1)).copy()
        out = spacetime_half_inverse(u, SmootherSpec("power", 2.0))
        assert out == pytest.approx(u / 10.0, abs=1e-12)

    def test_temporal_mode_p2(self):
        m, n = 6, 7
        coeff = np.zeros(n + 1)
        coeff[2] = 1.0
        u = np.broadcast_to(inverse_extrema(coeff), (m, m, n + 1)).copy()
        out = spacetime_half_inverse(u, SmootherSpec("power", 2.0))
        assert out == pytest.approx(u / 5.0, abs=1e-12)

    def test_roundtrip(self):
        rng = np.random.default_rng(23)
        u = rng.standard_normal((6, 6, 5))
        fwd = spacetime_half_inverse(u, SmootherSpec("power", 4.0))
        back = spacetime_half_inverse(fwd, SmootherSpec("power", -4.0))
        assert back == pytest.approx(u, abs=1e-12)

    def test_spectrum_is_positive_diagonal(self):
        # similar to the diagonal multiplier, so real positive eigenvalues
        for spec in (SmootherSpec("power", 6.0), SmootherSpec("exp")):
            dense = dense_operator(
                lambda w: spacetime_half_inverse(w, spec), (5, 5, 4))
            eigs = np.linalg.eigvals(dense)
            assert np.max(np.abs(eigs.imag)) < 1e-10
            assert np.all(eigs.real > 0)

    def test_adjoint_matches_dense_transpose(self):
        for spec in (SmootherSpec("power", 4.0), SmootherSpec("exp")):
            fwd = dense_operator(
                lambda w: spacetime_half_inverse(w, spec), (4, 4, 4))
            adj = dense_operator(
                lambda w: spacetime_half_inverse_adjoint(w, spec), (4, 4, 4))
            assert np.max(np.abs(adj - fwd.T)) < 1e-13

    def test_time_factor_breaks_symmetry(self):
        fwd = dense_operator(
            lambda w: spacetime_half_inverse(w, SmootherSpec("power", 4.0)),
            (4, 4, 4))
        assert np.max(np.abs(fwd - fwd.T)) > 1e-6


class TestSolveParabolic:
    def test_residual_and_error(self):
        report = solve_parabolic(STAR_HEAT, star_grid(10),
                                 SmootherSpec("power", 4.0))
        system = assemble_parabolic(STAR_HEAT, star_grid(10))
        assert report.residual_l2 <= 1e-7 * np.linalg.norm(system.rhs)
        assert (report.n_omega, report.n_gamma) == (28, 13)
        x = star_grid(10).space_axes[0].nodes
        ii, jj = system.interior.indices.T
        vals = exact_heat(x[ii][:, None], x[jj][:, None],
                          star_grid(10).time_axis.nodes[None, :])
        err = np.sqrt(np.mean((report.solution[ii, jj, :] - vals) ** 2))
        assert err < 1e-3

    def test_zero_data_gives_zero(self):
        quiet = ParabolicProblem(
            domain=star_domain(),
            initial=lambda x, y: np.zeros_like(x),
            lateral=lambda points, t: np.zeros(points.shape[0]),
        )
        report = solve_parabolic(quiet, star_grid(8, n=5),
                                 SmootherSpec("power", 4.0))
        assert np.max(np.abs(report.solution)) < 1e-12
