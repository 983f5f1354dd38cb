"""Constraint assembly: interior operator rows, boundary rows, smoothers.

The solve selects, among all grid functions satisfying the constraints
C u = b, the one of minimal smoothness norm. C stacks interior rows
(the differential operator collocated at interior grid nodes) over
boundary rows (point evaluation / directional derivative at sampled
boundary points); the smoother is a positive frequency multiplier. The
dense matrix handed to the solver is S^{-1/2} C^T, materialized column
by column through the implicit operators.

Coefficient functions are evaluated lazily: interior coefficients are
callables of the unpacked node coordinates (or plain constants),
boundary coefficients and data are callables of (points, normals)
arrays (or constants). Interior rows come first, boundary rows second,
each in ascending index order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebyshev import (
    RootsAxis,
    bary_deriv_row,
    bary_interp_row,
    diff1,
    diff1_transpose,
    diff2,
    diff2_transpose,
    forward_cheb,
    inverse_cheb,
)
from .geometry import (
    BoundaryPointSet,
    DomainSpec,
    InteriorIndexSet,
    classify_interior,
    interior_coordinates,
    sample_boundary,
)

__all__ = [
    "EllipticOperatorSpec",
    "BoundaryConditionSpec",
    "SmootherSpec",
    "ConstraintSystem",
    "apply_operator",
    "apply_operator_transpose",
    "boundary_row",
    "build_rhs",
    "smoother_multiplier_array",
    "apply_smoother_half_inverse",
    "apply_smoother_half_forward",
    "assemble_elliptic",
    "materialize_matrix",
]

MATERIALIZE_CHUNK = 256


@dataclass(frozen=True, eq=False)
class EllipticOperatorSpec:
    """Second-order operator -a_ij d_ij u + b_i d_i u + c u with source f.

    second_order maps axis pairs (i, j) to coefficients a_ij (note the
    leading minus in the operator); first_order maps axes to b_i; zeroth
    is c (or None); source is f. Supply symmetric pairs explicitly when
    mixed derivatives are present.
    """

    second_order: dict
    first_order: dict
    zeroth: object = None
    source: object = 0.0


@dataclass(frozen=True, eq=False)
class BoundaryConditionSpec:
    """Boundary operator a(y) u(y) + b(y) grad(u)(y) . nu with data g.

    trace is a, flux is b; (a, b) must not both vanish at any sampled
    point. data, trace and flux may be constants or callables of
    (points, normals).
    """

    trace: object
    flux: object
    data: object


@dataclass(frozen=True, eq=False)
class SmootherSpec:
    """Positive frequency multiplier defining the selection norm.

    kind "power" uses (1 + |k|^2)^(-p/2); kind "exp" uses exp(-|k|/2)
    with the Euclidean norm of the integer frequency vector.
    """

    kind: str = "power"
    p: float | None = 4.0

    def half_inverse_multiplier(self, k_squared: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return (1.0 + k_squared) ** (-self.p / 2.0)
        if self.kind == "exp":
            return np.exp(-np.sqrt(k_squared) / 2.0)
        raise ValueError(f"unknown smoother kind {self.kind!r}")


def _coeff_at_nodes(coeff, coords: np.ndarray) -> np.ndarray:
    """Evaluate an interior coefficient at node coordinates (n, d)."""
    n = coords.shape[0]
    if callable(coeff):
        return np.broadcast_to(np.asarray(coeff(*coords.T), dtype=float),
                               (n,)).copy()
    return np.full(n, float(coeff))


def _coeff_at_points(coeff, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Evaluate a boundary coefficient at sampled points."""
    n = points.shape[0]
    if callable(coeff):
        return np.broadcast_to(np.asarray(coeff(points, normals), dtype=float),
                               (n,)).copy()
    return np.full(n, float(coeff))


# ---------------------------------------------------------------------------
# interior operator
# ---------------------------------------------------------------------------

def apply_operator(u: np.ndarray, op: EllipticOperatorSpec,
                   interior: InteriorIndexSet, axes) -> np.ndarray:
    """Collocate the operator at the interior nodes.

    Derivatives are taken spectrally on the full grid, then restricted;
    coefficients are evaluated only at the interior nodes.
    """
    u = np.asarray(u, dtype=float)
    d = len(axes)
    sel = tuple(interior.indices.T)
    coords = interior_coordinates(axes, interior)
    out = np.zeros(interior.count)
    for (i, j), a in op.second_order.items():
        out -= _coeff_at_nodes(a, coords) * diff2(u, i - d, j - d)[sel]
    for i, b in op.first_order.items():
        out += _coeff_at_nodes(b, coords) * diff1(u, i - d)[sel]
    if op.zeroth is not None:
        out += _coeff_at_nodes(op.zeroth, coords) * u[sel]
    return out


def apply_operator_transpose(v: np.ndarray, op: EllipticOperatorSpec,
                             interior: InteriorIndexSet, axes) -> np.ndarray:
    """Exact adjoint of :func:`apply_operator`.

    Extends the interior values by zero, then applies the transposed
    derivative operators: -D2_ij^T (a_ij v) + D_i^T (b_i v) + c v.
    """
    d = len(axes)
    shape = tuple(ax.m for ax in axes)
    sel = tuple(interior.indices.T)
    coords = interior_coordinates(axes, interior)
    v = np.asarray(v, dtype=float)
    out = np.zeros(shape)
    for (i, j), a in op.second_order.items():
        g = np.zeros(shape)
        g[sel] = _coeff_at_nodes(a, coords) * v
        out -= diff2_transpose(g, i - d, j - d)
    for i, b in op.first_order.items():
        g = np.zeros(shape)
        g[sel] = _coeff_at_nodes(b, coords) * v
        out += diff1_transpose(g, i - d)
    if op.zeroth is not None:
        g = np.zeros(shape)
        g[sel] = _coeff_at_nodes(op.zeroth, coords) * v
        out += g
    return out


def _interior_transpose_columns(op: EllipticOperatorSpec,
                                interior: InteriorIndexSet, axes,
                                start: int, stop: int) -> np.ndarray:
    """Columns C^T e_i for a chunk of interior rows, as grid tensors."""
    d = len(axes)
    shape = tuple(ax.m for ax in axes)
    idx = interior.indices[start:stop]
    n = idx.shape[0]
    coords = np.stack([axes[j].nodes[idx[:, j]] for j in range(d)], axis=-1)
    sel = (np.arange(n), *idx.T)
    out = np.zeros((n,) + shape)
    for (i, j), a in op.second_order.items():
        g = np.zeros((n,) + shape)
        g[sel] = _coeff_at_nodes(a, coords)
        out -= diff2_transpose(g, i - d, j - d)
    for i, b in op.first_order.items():
        g = np.zeros((n,) + shape)
        g[sel] = _coeff_at_nodes(b, coords)
        out += diff1_transpose(g, i - d)
    if op.zeroth is not None:
        out[sel] += _coeff_at_nodes(op.zeroth, coords)
    return out


# ---------------------------------------------------------------------------
# boundary rows
# ---------------------------------------------------------------------------

def boundary_row(point, normal, bc: BoundaryConditionSpec, axes) -> np.ndarray:
    """One boundary constraint row as a grid-shaped weight tensor."""
    pts = np.asarray(point, dtype=float).reshape(1, -1)
    nrm = np.asarray(normal, dtype=float).reshape(1, -1)
    a = _coeff_at_points(bc.trace, pts, nrm)[0]
    b = _coeff_at_points(bc.flux, pts, nrm)[0]
    row = np.zeros(tuple(ax.m for ax in axes))
    if a != 0.0:
        row += a * bary_interp_row(axes, point)
    if b != 0.0:
        row += b * bary_deriv_row(axes, point, normal)
    return row


def _boundary_rows(bc: BoundaryConditionSpec, boundary: BoundaryPointSet,
                   axes) -> np.ndarray:
    a = _coeff_at_points(bc.trace, boundary.points, boundary.normals)
    b = _coeff_at_points(bc.flux, boundary.points, boundary.normals)
    if np.any((a == 0.0) & (b == 0.0)):
        raise ValueError("boundary condition vanishes at a sampled point")
    rows = np.zeros((boundary.count,) + tuple(ax.m for ax in axes))
    for i in range(boundary.count):
        if a[i] != 0.0:
            rows[i] += a[i] * bary_interp_row(axes, boundary.points[i])
        if b[i] != 0.0:
            rows[i] += b[i] * bary_deriv_row(axes, boundary.points[i],
                                             boundary.normals[i])
    return rows


def build_rhs(op: EllipticOperatorSpec, bc: BoundaryConditionSpec,
              interior: InteriorIndexSet, boundary: BoundaryPointSet,
              axes) -> np.ndarray:
    """Stack the data: source at interior nodes, boundary data after."""
    coords = interior_coordinates(axes, interior)
    f = _coeff_at_nodes(op.source, coords)
    g = _coeff_at_points(bc.data, boundary.points, boundary.normals)
    return np.concatenate([f, g])


# ---------------------------------------------------------------------------
# smoothers
# ---------------------------------------------------------------------------

def smoother_multiplier_array(spec: SmootherSpec, shape) -> np.ndarray:
    """The S^{-1/2} multiplier evaluated on the full frequency grid."""
    k_squared = np.zeros(shape)
    for ax, m in enumerate(shape):
        k = np.arange(m, dtype=float) ** 2
        k_squared = k_squared + k.reshape((1,) * ax + (m,)
                                          + (1,) * (len(shape) - ax - 1))
    return spec.half_inverse_multiplier(k_squared)


def _apply_multiplier_array(u: np.ndarray, mult: np.ndarray, d: int) -> np.ndarray:
    """Apply a precomputed multiplier over the trailing d (roots) axes."""
    axes = range(u.ndim - d, u.ndim)
    return inverse_cheb(forward_cheb(u, axes=axes) * mult, axes=axes)


def apply_smoother_half_inverse(u: np.ndarray, spec: SmootherSpec,
                                d: int | None = None) -> np.ndarray:
    """Apply S^{-1/2}; trailing d axes of u are the grid axes."""
    u = np.asarray(u, dtype=float)
    if d is None:
        d = u.ndim
    mult = smoother_multiplier_array(spec, u.shape[u.ndim - d:])
    return _apply_multiplier_array(u, mult, d)


def apply_smoother_half_forward(u: np.ndarray, spec: SmootherSpec,
                                d: int | None = None) -> np.ndarray:
    """Apply S^{+1/2} (reciprocal multiplier), e.g. for norm reporting."""
    u = np.asarray(u, dtype=float)
    if d is None:
        d = u.ndim
    mult = 1.0 / smoother_multiplier_array(spec, u.shape[u.ndim - d:])
    return _apply_multiplier_array(u, mult, d)


# ---------------------------------------------------------------------------
# constraint system
# ---------------------------------------------------------------------------

class ConstraintSystem:
    """The linear constraints C u = b of one discrete problem.

    apply / apply_transpose realize C and its exact adjoint through the
    implicit spectral operators; transpose_columns materializes a chunk
    of C^T basis columns as grid tensors for the solver.
    """

    def __init__(self, axes, interior, boundary, rhs, apply_fn,
                 apply_transpose_fn, transpose_columns_fn,
                 n_omega, n_gamma):
        self.axes = tuple(axes)
        self.grid_shape = tuple(ax.m if isinstance(ax, RootsAxis) else ax.n + 1
                                for ax in axes)
        self.interior = interior
        self.boundary = boundary
        self.rhs = rhs
        self.n_rows = rhs.shape[0]
        self.n_omega = n_omega
        self.n_gamma = n_gamma
        self._apply = apply_fn
        self._apply_transpose = apply_transpose_fn
        self._transpose_columns = transpose_columns_fn

    def apply(self, u: np.ndarray) -> np.ndarray:
        """C u: all constraint values for a grid function."""
        return self._apply(np.asarray(u, dtype=float))

    def apply_transpose(self, v: np.ndarray) -> np.ndarray:
        """C^T v: the adjoint, as a grid function."""
        return self._apply_transpose(np.asarray(v, dtype=float))

    def transpose_columns(self, start: int, stop: int) -> np.ndarray:
        """Grid tensors C^T e_i for rows start..stop-1."""
        return self._transpose_columns(start, stop)

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.apply(u) - self.rhs


def assemble_elliptic(domain: DomainSpec, axes, op: EllipticOperatorSpec,
                      bc: BoundaryConditionSpec) -> ConstraintSystem:
    """Classify, sample, and wire up the constraint system of a BVP."""
    m = axes[0].m
    interior = classify_interior(domain, axes)
    boundary = sample_boundary(domain, m)
    rows_b = _boundary_rows(bc, boundary, axes)
    rhs = build_rhs(op, bc, interior, boundary, axes)
    d = len(axes)

    def apply_fn(u):
        vals_a = apply_operator(u, op, interior, axes)
        vals_b = np.tensordot(rows_b, u, axes=d)
        return np.concatenate([vals_a, vals_b])

    def apply_transpose_fn(v):
        out = apply_operator_transpose(v[:interior.count], op, interior, axes)
        out += np.tensordot(v[interior.count:], rows_b, axes=1)
        return out

    def transpose_columns_fn(start, stop):
        n_i = interior.count
        if stop <= n_i:
            return _interior_transpose_columns(op, interior, axes, start, stop)
        if start >= n_i:
            return rows_b[start - n_i:stop - n_i].copy()
        top = _interior_transpose_columns(op, interior, axes, start, n_i)
        return np.concatenate([top, rows_b[:stop - n_i]], axis=0)

    return ConstraintSystem(axes, interior, boundary, rhs, apply_fn,
                            apply_transpose_fn, transpose_columns_fn,
                            n_omega=interior.count, n_gamma=boundary.count)


def materialize_matrix(system: ConstraintSystem, half_inverse) -> np.ndarray:
    """Dense M = S^{-1/2} C^T, one column per constraint.

    half_inverse applies the smoother to a batch of grid tensors (batch
    axis first). Columns are computed in fixed chunks; the result is
    independent of the chunk schedule.
    """
    size = int(np.prod(system.grid_shape))
    n = system.n_rows
    if size < n:
        raise ValueError(
            f"under-resolved grid: {size} grid points cannot carry "
            f"{n} constraints"
        )
    cols = np.empty((n, size))
    for start in range(0, n, MATERIALIZE_CHUNK):
        stop = min(start + MATERIALIZE_CHUNK, n)
        block = system.transpose_columns(start, stop)
        cols[start:stop] = half_inverse(block).reshape(stop - start, size)
    return cols.T
