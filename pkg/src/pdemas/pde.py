"""Spatial discretization and explicit time stepping for the coupled heat-type agents.

Each agent field lives on a uniform grid over [0, L] with M cells (M+1
nodes).  Dynamics are advanced with explicit Euler under a CFL-style guard
on the diffusion term; the forcing (control + disturbance) is supplied by
the caller per step.  Boundary handling:

* ``BC_DIRICHLET``     -- both ends pinned to zero,
* ``BC_NEUMANN_RIGHT`` -- left end pinned, right end driven by a per-agent
  flux through a second-order ghost node (used by the boundary-controller
  baseline).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CFL_SAFETY = 0.8

BC_DIRICHLET = 0
BC_NEUMANN_RIGHT = 1


class StabilityViolation(ValueError):
    """Time step too large for the explicit diffusion update."""


class NonFinite(FloatingPointError):
    """A state entry became NaN or infinite during stepping."""


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Uniform grid on [0, length] with n_cells intervals (n_cells + 1 nodes)."""

    length: float
    n_cells: int

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"grid length must be positive, got {self.length}")
        if self.n_cells < 4:
            raise ValueError(f"need at least 4 cells, got {self.n_cells}")

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.length, self.n_nodes)

    def nearest_node(self, x: float) -> int:
        """Index of the grid node closest to x."""
        return int(round(x / self.dx))


@dataclass(frozen=True, eq=False)
class DiffusionParams:
    k: float

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError(f"diffusion coefficient must be positive, got {self.k}")


@dataclass(frozen=True, eq=False)
class EnsembleState:
    """Fields of all agents at one time instant: row i samples y_i on the grid."""

    time: float
    fields: np.ndarray

    def __post_init__(self):
        f = np.array(self.fields, dtype=float)
        if f.ndim != 2:
            raise ValueError(f"fields must be 2-D (agents x nodes), got shape {f.shape}")
        if not np.all(np.isfinite(f)):
            raise NonFinite("state contains non-finite entries")
        f.flags.writeable = False
        object.__setattr__(self, "fields", f)

    @property
    def n_agents(self) -> int:
        return self.fields.shape[0]


def trapezoid_integral(samples: np.ndarray, grid: SpatialGrid) -> float:
    """Composite trapezoid rule for node samples over [0, L]."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != grid.n_nodes:
        raise ValueError(f"expected {grid.n_nodes} samples, got {samples.shape[-1]}")
    return float(grid.dx * (0.5 * samples[0] + samples[1:-1].sum() + 0.5 * samples[-1]))


def discrete_laplacian(field: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Second-order central difference of a node-sampled field.

    Boundary entries of the result are zero; the integrator pins boundary
    nodes separately.
    """
    field = np.asarray(field, dtype=float)
    if field.shape[-1] != grid.n_nodes:
        raise ValueError(f"expected {grid.n_nodes} samples, got {field.shape[-1]}")
    out = np.zeros_like(field)
    dx2 = grid.dx * grid.dx
    out[..., 1:-1] = (field[..., :-2] - 2.0 * field[..., 1:-1] + field[..., 2:]) / dx2
    return out


def forward_difference(field: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Per-interval forward-difference slopes (length M for M+1 node samples)."""
    field = np.asarray(field, dtype=float)
    return (field[..., 1:] - field[..., :-1]) / grid.dx


def interval_integral(interval_values: np.ndarray, grid: SpatialGrid) -> float:
    """Integral of a per-interval quantity (one value per grid cell)."""
    interval_values = np.asarray(interval_values, dtype=float)
    if interval_values.shape[-1] != grid.n_cells:
        raise ValueError(f"expected {grid.n_cells} interval values, got {interval_values.shape[-1]}")
    return float(grid.dx * interval_values.sum())


def check_step_size(dt: float, grid: SpatialGrid, params: DiffusionParams) -> None:
    limit = CFL_SAFETY * grid.dx * grid.dx / (2.0 * params.k)
    if dt > limit:
        raise StabilityViolation(
            f"dt={dt:g} exceeds the explicit-diffusion guard {limit:g} "
            f"(safety {CFL_SAFETY} * dx^2 / (2k))"
        )


def step(
    state: EnsembleState,
    control: np.ndarray,
    disturbance: np.ndarray,
    grid: SpatialGrid,
    params: DiffusionParams,
    dt: float,
    bc: int = BC_DIRICHLET,
    boundary_flux: np.ndarray | None = None,
) -> EnsembleState:
    """One explicit Euler update y <- y + dt*(k*D2 y + u + d) at interior nodes.

    ``control`` and ``disturbance`` are (N, M+1) evaluations from the
    pre-step state.  With ``BC_DIRICHLET`` both boundary nodes are re-pinned
    to zero.  With ``BC_NEUMANN_RIGHT`` the right node is advanced using the
    ghost value y[M+1] = y[M-1] + 2*dx*flux and the left node stays pinned.

    Raises StabilityViolation if dt fails the diffusion guard and NonFinite
    if the update produces NaN or infinity.
    """
    check_step_size(dt, grid, params)
    y = state.fields
    d2 = discrete_laplacian(y, grid)
    new = y + dt * (params.k * d2 + control + disturbance)
    new[:, 0] = 0.0
    if bc == BC_DIRICHLET:
        new[:, -1] = 0.0
    elif bc == BC_NEUMANN_RIGHT:
        if boundary_flux is None:
            raise ValueError("BC_NEUMANN_RIGHT requires boundary_flux")
        dx2 = grid.dx * grid.dx
        ghost = y[:, -2] + 2.0 * grid.dx * boundary_flux
        d2_right = (y[:, -2] - 2.0 * y[:, -1] + ghost) / dx2
        new[:, -1] = y[:, -1] + dt * (params.k * d2_right + disturbance[:, -1])
    else:
        raise ValueError(f"unknown boundary-condition code {bc}")
    if not np.all(np.isfinite(new)):
        raise NonFinite(f"non-finite state after step at t={state.time + dt:g}")
    return EnsembleState(time=state.time + dt, fields=new)
