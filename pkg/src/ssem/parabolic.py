"""Space-time solve of the heat initial-boundary value problem.

The grid is a tensor product of two spatial Chebyshev roots axes with a
Chebyshev extrema axis in time (so t = 0 is an actual node and the
initial condition is a plain restriction row). Constraints collocate
u_t - lap(u) = 0 at interior nodes for t > 0, restrict to the initial
slice, and interpolate spatially on the lateral boundary for t > 0; the
smoother is the same power/exponential multiplier extended with the
integer time frequency.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .assembly import (
    BoundaryConditionSpec,
    ConstraintSystem,
    SmootherSpec,
    _boundary_rows,
)
from .chebyshev import (
    ExtremaAxis,
    diff2,
    diff2_transpose,
    forward_cheb,
    forward_extrema,
    inverse_cheb,
    inverse_extrema,
)
from .geometry import (
    DomainSpec,
    classify_interior,
    interior_coordinates,
    sample_boundary_2d,
)
from .solver import SolveReport, pinv_solve

__all__ = [
    "SpaceTimeGrid",
    "ParabolicProblem",
    "time_diff_matrix",
    "bessel_j0",
    "assemble_parabolic",
    "spacetime_half_inverse",
    "spacetime_half_inverse_adjoint",
    "solve_parabolic",
]


@dataclass(frozen=True, eq=False)
class SpaceTimeGrid:
    """Two spatial roots axes and one extrema time axis."""

    space_axes: tuple  # (RootsAxis, RootsAxis)
    time_axis: ExtremaAxis


@dataclass(frozen=True, eq=False)
class ParabolicProblem:
    """Heat IBVP data: spatial domain, initial value, lateral data.

    initial is u0(x, y) vectorized over coordinate arrays; lateral is
    g(points, t) for boundary points (n, 2) at a scalar time; exact, if
    given, is u(x, y, t) for error reporting.
    """

    domain: DomainSpec
    initial: callable
    lateral: callable
    exact: callable = None


def time_diff_matrix(axis: ExtremaAxis) -> np.ndarray:
    """Dense spectral differentiation matrix on the extrema time axis.

    Built from the barycentric weights of the extrema nodes (+-1
    alternation, halved at the endpoints), so it is exact on polynomials
    of degree <= n in t regardless of the interval; cf. Trefethen,
    Spectral Methods in MATLAB (2000).
    """
    t = axis.nodes
    n = axis.n
    w = (-1.0) ** np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    mat = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        others = np.arange(n + 1) != j
        mat[j, others] = (w[others] / w[j]) / (t[j] - t[others])
        mat[j, j] = -mat[j, others].sum()
    return mat


def bessel_j0(r):
    """Bessel function of the first kind, order zero, by power series.

    Terms are accumulated until they drop below 1e-17 in magnitude;
    adequate on the radii of the embedding box (|r| <= 2).
    """
    r = np.asarray(r, dtype=float)
    x2 = (r / 2.0) ** 2
    term = np.ones_like(x2)
    out = np.ones_like(x2)
    for q in range(1, 64):
        term = term * (-x2) / q**2
        out = out + term
        if np.max(np.abs(term)) < 1e-17:
            break
    return out


def assemble_parabolic(problem: ParabolicProblem,
                       grid: SpaceTimeGrid) -> ConstraintSystem:
    """Constraint system of the heat IBVP on the space-time grid.

    Row order: heat-operator rows at interior nodes for t > 0 (node
    outer, time inner), then the initial restriction rows, then lateral
    rows (boundary point outer, time inner); right-hand side stacks
    (0; u0; g) to match.
    """
    sx, sy = grid.space_axes
    taxis = grid.time_axis
    n = taxis.n
    axes = (sx, sy, taxis)
    interior = classify_interior(problem.domain, grid.space_axes)
    boundary = sample_boundary_2d(problem.domain, sx.m)
    # Dirichlet trace rows in space, tensored with time restrictions
    rows_b = _boundary_rows(BoundaryConditionSpec(trace=1.0, flux=0.0,
                                                  data=0.0),
                            boundary, grid.space_axes)
    dmat = time_diff_matrix(taxis)
    ii, jj = interior.indices[:, 0], interior.indices[:, 1]
    n_heat = interior.count * n
    n_init = interior.count
    n_lat = boundary.count * n

    coords = interior_coordinates(grid.space_axes, interior)
    u0 = np.asarray(problem.initial(coords[:, 0], coords[:, 1]), dtype=float)
    gvals = np.stack(
        [np.asarray(problem.lateral(boundary.points, taxis.nodes[j]),
                    dtype=float) for j in range(1, n + 1)],
        axis=1,
    )  # (n_gamma, n)
    rhs = np.concatenate([np.zeros(n_heat), u0, gvals.ravel()])

    def heat_operator(u):
        ut = np.tensordot(u, dmat, axes=([2], [1]))
        return ut - diff2(u, -3, -3) - diff2(u, -2, -2)

    def apply_fn(u):
        heat = heat_operator(u)[ii, jj, 1:]          # (n_omega, n)
        init = u[ii, jj, 0]
        lat = np.tensordot(rows_b, u, axes=([1, 2], [0, 1]))[:, 1:]
        return np.concatenate([heat.ravel(), init, lat.ravel()])

    def apply_transpose_fn(v):
        out = np.zeros((sx.m, sy.m, n + 1))
        g = np.zeros_like(out)
        g[ii, jj, 1:] = v[:n_heat].reshape(interior.count, n)
        out += np.tensordot(g, dmat, axes=([2], [0]))
        out -= diff2_transpose(g, -3, -3) + diff2_transpose(g, -2, -2)
        out[ii, jj, 0] += v[n_heat:n_heat + n_init]
        v_lat = v[n_heat + n_init:].reshape(boundary.count, n)
        out[:, :, 1:] += np.tensordot(rows_b, v_lat, axes=([0], [0]))
        return out

    def transpose_columns_fn(start, stop):
        blocks = []
        for lo, hi, build in (
            (0, n_heat, _heat_cols),
            (n_heat, n_heat + n_init, _init_cols),
            (n_heat + n_init, n_heat + n_init + n_lat, _lat_cols),
        ):
            a, b = max(start, lo), min(stop, hi)
            if a < b:
                blocks.append(build(a - lo, b - lo))
        return np.concatenate(blocks, axis=0)

    def _heat_cols(a, b):
        rows = np.arange(a, b)
        node, tj = rows // n, 1 + rows % n
        e = np.zeros((b - a, sx.m, sy.m, n + 1))
        e[np.arange(b - a), ii[node], jj[node], tj] = 1.0
        cols = np.tensordot(e, dmat, axes=([3], [0]))
        cols -= diff2_transpose(e, -3, -3) + diff2_transpose(e, -2, -2)
        return cols

    def _init_cols(a, b):
        e = np.zeros((b - a, sx.m, sy.m, n + 1))
        e[np.arange(b - a), ii[a:b], jj[a:b], 0] = 1.0
        return e

    def _lat_cols(a, b):
        rows = np.arange(a, b)
        pt, tj = rows // n, 1 + rows % n
        e = np.zeros((b - a, sx.m, sy.m, n + 1))
        e[np.arange(b - a), :, :, tj] = rows_b[pt]
        return e

    system = ConstraintSystem(axes, interior, boundary, rhs, apply_fn,
                              apply_transpose_fn, transpose_columns_fn,
                              n_omega=interior.count, n_gamma=boundary.count)
    system.n_heat_rows = n_heat
    system.n_initial_rows = n_init
    system.n_lateral_rows = n_lat
    return system


def _spacetime_multiplier(spec: SmootherSpec, shape) -> np.ndarray:
    """S^{-1/2} multiplier on the (m, m, n+1) mixed frequency grid."""
    k2 = np.zeros(shape)
    for ax, size in enumerate(shape):
        k = np.arange(size, dtype=float) ** 2
        k2 = k2 + k.reshape((1,) * ax + (size,) + (1,) * (2 - ax))
    return spec.half_inverse_multiplier(k2)


def spacetime_half_inverse(u: np.ndarray, spec: SmootherSpec) -> np.ndarray:
    """Apply the space-time S^{-1/2}: roots transforms in space, the
    extrema transform in time, multiplier in (1 + |k_x|^2 + k_t^2)."""
    u = np.asarray(u, dtype=float)
    c = forward_cheb(u, axes=(u.ndim - 3, u.ndim - 2))
    c = forward_extrema(c, axis=-1)
    c = c * _spacetime_multiplier(spec, u.shape[u.ndim - 3:])
    c = inverse_extrema(c, axis=-1)
    return inverse_cheb(c, axes=(u.ndim - 3, u.ndim - 2))


def spacetime_half_inverse_adjoint(u: np.ndarray,
                                   spec: SmootherSpec) -> np.ndarray:
    """The exact adjoint of spacetime_half_inverse.

    The roots-grid factors are symmetric, but the extrema-grid time
    factor is not (its analysis/synthesis pair carries uneven endpoint
    weights), so the adjoint swaps each transform for its transpose:
    synthesis^T in place of analysis, analysis^T in place of synthesis.
    """
    u = np.asarray(u, dtype=float)
    m = u.shape[u.ndim - 3]
    n = u.shape[-1] - 1
    a = np.full(m, 1.0 / m)
    a[0] = 1.0 / (2.0 * m)
    gamma = np.full(n + 1, n / 2.0)
    gamma[0] = gamma[-1] = float(n)
    ends = np.full(n + 1, 2.0)
    ends[0] = ends[-1] = 1.0
    sp = (u.ndim - 3, u.ndim - 2)
    ax = a.reshape(m, 1, 1)
    ay = a.reshape(1, m, 1)
    # synthesis^T per axis: V^T = a^{-1} (analysis), plain V in time
    c = forward_cheb(u, axes=sp) / ax / ay
    c = inverse_extrema(c, axis=-1)
    c = c * _spacetime_multiplier(spec, u.shape[u.ndim - 3:])
    # analysis^T per axis: V a in space, (1,2,..,2,1) V (2 gamma)^{-1} in time
    c = inverse_cheb(c * ax * ay, axes=sp)
    return inverse_extrema(c / (2.0 * gamma), axis=-1) * ends


def solve_parabolic(problem: ParabolicProblem, grid: SpaceTimeGrid,
                    spec: SmootherSpec) -> SolveReport:
    """Assemble, materialize, and solve the heat IBVP."""
    system = assemble_parabolic(problem, grid)
    return pinv_solve(system, lambda b: spacetime_half_inverse(b, spec),
                      lambda b: spacetime_half_inverse_adjoint(b, spec))
