"""Built-in convergence experiments and their error/fit metrics.

Five benchmark problems with known exact solutions, each swept over a
list of grid sizes and smoother exponents. The reported l2 error is the
root mean square of u - exact over the interior grid nodes (all time
slices included for the parabolic problem); rows whose error has fallen
to the conditioning floor (cond times machine epsilon above the error)
are flagged and excluded from order fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import (
    BoundaryConditionSpec,
    EllipticOperatorSpec,
    SmootherSpec,
    apply_smoother_half_inverse,
    assemble_elliptic,
)
from .chebyshev import extrema_axis, roots_axis
from .geometry import (
    annulus_domain,
    disc_domain,
    interior_coordinates,
    star_ball_domain,
    star_domain,
)
from .parabolic import (
    ParabolicProblem,
    SpaceTimeGrid,
    assemble_parabolic,
    bessel_j0,
    spacetime_half_inverse,
    spacetime_half_inverse_adjoint,
)
from .solver import pinv_solve

__all__ = [
    "PROBLEM_IDS",
    "ExperimentConfig",
    "ConvergenceRow",
    "ConfigError",
    "l2_error",
    "run_experiment",
    "fit_convergence_order",
    "solve_problem",
]

EPS = 2.2e-16
DEFAULT_TIME_POINTS = 10


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, value, or combination)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment sweep: a problem, grid sizes, and smoothers."""

    problem: str
    grids: tuple
    p_list: tuple = ()          # empty with the exponential smoother
    smoother: str = "power"
    out: str = ""
    seed: int = 0
    time_points: int = DEFAULT_TIME_POINTS

    def __post_init__(self):
        if self.problem not in PROBLEM_IDS:
            raise ConfigError(
                f"unknown problem {self.problem!r}; choose one of "
                f"{sorted(PROBLEM_IDS)}"
            )
        if not self.grids:
            raise ConfigError("grids must be a non-empty list of sizes")
        if any(m < 6 for m in self.grids):
            raise ConfigError(f"grid sizes must be >= 6, got {list(self.grids)}")
        if self.smoother not in ("power", "exp"):
            raise ConfigError(f"smoother must be 'power' or 'exp', "
                              f"got {self.smoother!r}")
        if self.smoother == "power":
            if not self.p_list:
                raise ConfigError("p_list must be non-empty for the power "
                                  "smoother")
            d = _PROBLEMS[self.problem].grid_dim
            bad = [p for p in self.p_list if p <= d / 2]
            if bad:
                raise ConfigError(
                    f"smoother exponents must exceed d/2 = {d / 2} for "
                    f"bounded point constraints; got {bad}"
                )

    def smoother_specs(self):
        if self.smoother == "exp":
            return [("exp", SmootherSpec(kind="exp"))]
        return [(_format_p(p), SmootherSpec(kind="power", p=float(p)))
                for p in self.p_list]


def _format_p(p) -> str:
    return f"{p:g}"


@dataclass
class ConvergenceRow:
    """One (m, smoother) outcome; extra diagnostics ride along the CSV
    columns (m..seconds) for acceptance checks."""

    m: int
    n_omega: int
    n_gamma: int
    p: str
    l2_error: float
    linf_error: float
    cond: float
    seconds: float
    residual_linf: float = math.nan
    rhs_linf: float = math.nan
    floored: bool = False
    failed: bool = False

    def mark_floor(self):
        self.floored = (np.isfinite(self.cond)
                        and self.cond * EPS > self.l2_error)


# ---------------------------------------------------------------------------
# problem roster
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Problem:
    grid_dim: int
    build: object  # callable(m, time_points) -> (system, half_inverse factory, errfun)


def _elliptic_problem(domain_fn, dim, op, bc, exact, quotient_constants=False):
    # quotient_constants: pure Neumann data determines u only up to an
    # additive constant (constants lie in the kernel of both the interior
    # operator and the flux rows), so errors are measured in the quotient.
    def build(m, time_points):
        axes = tuple(roots_axis(m) for _ in range(dim))
        system = assemble_elliptic(domain_fn(), axes, op, bc)

        def half_inverse_factory(spec):
            def half_inverse(b):
                return apply_smoother_half_inverse(b, spec, d=dim)

            return half_inverse, half_inverse  # symmetric on roots grids

        def errors(u):
            coords = interior_coordinates(axes, system.interior)
            diff = u[tuple(system.interior.indices.T)] - exact(*coords.T)
            if quotient_constants:
                diff = diff - diff.mean()
            return (float(np.sqrt(np.mean(diff**2))),
                    float(np.max(np.abs(diff))))

        return system, half_inverse_factory, errors

    return _Problem(grid_dim=dim, build=build)


def _parabolic_problem():
    def exact(x, y, t):
        r = np.hypot(x, y)
        return (np.exp(-t) * bessel_j0(r)
                - np.exp(-t / 4.0) * bessel_j0(r / 2.0))

    problem = ParabolicProblem(
        domain=star_domain(),
        initial=lambda x, y: exact(x, y, 0.0),
        lateral=lambda points, t: exact(points[:, 0], points[:, 1], t),
        exact=exact,
    )

    def build(m, time_points):
        grid = SpaceTimeGrid(
            space_axes=(roots_axis(m), roots_axis(m)),
            time_axis=extrema_axis(time_points, 0.0, 2.0),
        )
        system = assemble_parabolic(problem, grid)

        def half_inverse_factory(spec):
            return (lambda b: spacetime_half_inverse(b, spec),
                    lambda b: spacetime_half_inverse_adjoint(b, spec))

        def errors(u):
            ii, jj = system.interior.indices.T
            coords = interior_coordinates(grid.space_axes, system.interior)
            vals = exact(coords[:, 0:1], coords[:, 1:2],
                         grid.time_axis.nodes[None, :])
            diff = u[ii, jj, :] - vals
            return (float(np.sqrt(np.mean(diff**2))),
                    float(np.max(np.abs(diff))))

        return system, half_inverse_factory, errors

    return _Problem(grid_dim=3, build=build)


def _build_roster():
    laplace = EllipticOperatorSpec(second_order={(0, 0): 1.0, (1, 1): 1.0},
                                   first_order={}, zeroth=None, source=0.0)
    dirichlet_disc = _elliptic_problem(
        disc_domain, 2, laplace,
        BoundaryConditionSpec(
            trace=1.0, flux=0.0,
            data=lambda pts, nrm: pts[:, 0] ** 2 - pts[:, 1] ** 2),
        exact=lambda x, y: x**2 - y**2,
    )

    neumann_star = _elliptic_problem(
        star_domain, 2,
        EllipticOperatorSpec(
            second_order={(0, 0): lambda x, y: 2.0 + y,
                          (1, 1): lambda x, y: 2.0 - x},
            first_order={}, zeroth=None,
            source=lambda x, y: -12.0 * (x + y)),
        BoundaryConditionSpec(
            trace=0.0, flux=1.0,
            data=lambda pts, nrm: 3.0 * pts[:, 0] ** 2 * nrm[:, 0]
            + 3.0 * pts[:, 1] ** 2 * nrm[:, 1]),
        exact=lambda x, y: x**3 + y**3,
        quotient_constants=True,
    )

    robin_annulus = _elliptic_problem(
        annulus_domain, 2,
        EllipticOperatorSpec(
            second_order={(0, 0): 1.0, (1, 1): 1.0},
            first_order={}, zeroth=None,
            source=lambda x, y: -np.sinh(x) - np.cosh(y)),
        BoundaryConditionSpec(
            trace=1.0, flux=1.0,
            data=lambda pts, nrm: np.sinh(pts[:, 0]) + np.cosh(pts[:, 1])
            + np.cosh(pts[:, 0]) * nrm[:, 0] + np.sinh(pts[:, 1]) * nrm[:, 1]),
        exact=lambda x, y: np.sinh(x) + np.cosh(y),
    )

    laplace3 = EllipticOperatorSpec(
        second_order={(0, 0): 1.0, (1, 1): 1.0, (2, 2): 1.0},
        first_order={}, zeroth=None,
        source=lambda x, y, z: -2.0 * y * np.sin(z) + x**2 * y * np.sin(z))
    dirichlet_3d = _elliptic_problem(
        star_ball_domain, 3, laplace3,
        BoundaryConditionSpec(
            trace=1.0, flux=0.0,
            data=lambda pts, nrm: pts[:, 0] ** 2 * pts[:, 1]
            * np.sin(pts[:, 2])),
        exact=lambda x, y, z: x**2 * y * np.sin(z),
    )

    return {
        "dirichlet-disc": dirichlet_disc,
        "neumann-star": neumann_star,
        "robin-annulus": robin_annulus,
        "dirichlet-3d": dirichlet_3d,
        "parabolic-star": _parabolic_problem(),
    }


_PROBLEMS = _build_roster()
PROBLEM_IDS = tuple(sorted(_PROBLEMS))


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def l2_error(u, exact, interior, axes) -> float:
    """RMS of u - exact over the interior grid nodes."""
    if interior.count == 0:
        raise ValueError("interior index set is empty")
    coords = interior_coordinates(axes, interior)
    diff = np.asarray(u)[tuple(interior.indices.T)] - exact(*coords.T)
    return float(np.sqrt(np.mean(diff**2)))


def fit_convergence_order(rows) -> float:
    """Negated least-squares slope of log(l2_error) against log(m).

    Rows flagged as floored (or failed, or with vanishing error) are
    excluded; at least three distinct grid sizes must remain.
    """
    pts = [(r.m, r.l2_error) for r in rows
           if not r.failed and not r.floored and r.l2_error > 0.0]
    if len({m for m, _ in pts}) < 3:
        raise ValueError(
            f"need at least 3 usable rows with distinct m to fit an "
            f"order, have {len(pts)}"
        )
    logm = np.log([m for m, _ in pts])
    loge = np.log([e for _, e in pts])
    slope = np.polyfit(logm, loge, 1)[0]
    return float(-slope)


def solve_problem(problem_id: str, m: int, spec: SmootherSpec,
                  time_points: int = DEFAULT_TIME_POINTS):
    """Build and solve one benchmark instance.

    Returns (report, row) where row carries the CSV fields plus residual
    diagnostics.
    """
    prob = _PROBLEMS[problem_id]
    system, half_inverse_factory, errors = prob.build(m, time_points)
    half_inverse, half_inverse_adjoint = half_inverse_factory(spec)
    report = pinv_solve(system, half_inverse, half_inverse_adjoint)
    l2, linf = errors(report.solution)
    row = ConvergenceRow(
        m=m,
        n_omega=report.n_omega,
        n_gamma=report.n_gamma,
        p="",
        l2_error=l2,
        linf_error=linf,
        cond=report.cond_estimate,
        seconds=report.seconds,
        residual_linf=report.residual_linf,
        rhs_linf=float(np.max(np.abs(system.rhs))),
    )
    row.mark_floor()
    return report, row


def run_experiment(config: ExperimentConfig):
    """Sweep the configured problem over (m, smoother) and collect rows.

    Solver failures are recorded as failed rows (NaN metrics) and the
    sweep continues.
    """
    rows = []
    for m in config.grids:
        for label, spec in config.smoother_specs():
            try:
                _, row = solve_problem(config.problem, m, spec,
                                       config.time_points)
                row.p = label
            except Exception:
                row = ConvergenceRow(
                    m=m, n_omega=0, n_gamma=0, p=label,
                    l2_error=math.nan, linf_error=math.nan,
                    cond=math.nan, seconds=math.nan, failed=True,
                )
            rows.append(row)
    return rows
