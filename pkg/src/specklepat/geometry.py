"""Spatial grids, the star phantom, transducer layouts, and the recording timebase.

All positions are 3D and in meters. Object grids are uniform 2D lattices
embedded in a plane of constant z; transducers may sit in or out of that
plane. One indexing convention is used everywhere: grid points are stored
row-major, ``index = row * n_x + col``, with point 0 at the (x, y) minimum
corner. Reshaping a field vector with ``field.reshape(n_y, n_x)`` therefore
gives an image whose axis 0 is y and axis 1 is x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(a, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class ObjectGrid:
    """Uniform 2D lattice of candidate absorber positions embedded in 3D.

    Attributes
    ----------
    n_x, n_y : int
        Lattice dimensions; the grid has ``n_x * n_y`` points.
    extent_x, extent_y : float
        Physical side lengths in meters. Points span ``[-extent/2, extent/2]``
        in each lateral direction, centered on the origin.
    plane_z : float
        The z coordinate shared by every grid point.
    points : ndarray, shape (N, 3)
        Row-major point positions, point 0 at
        ``(-extent_x/2, -extent_y/2, plane_z)``.
    """

    n_x: int
    n_y: int
    extent_x: float
    extent_y: float
    plane_z: float
    points: np.ndarray

    @property
    def n_points(self) -> int:
        return self.n_x * self.n_y

    @property
    def spacing_x(self) -> float:
        return self.extent_x / (self.n_x - 1)

    @property
    def spacing_y(self) -> float:
        return self.extent_y / (self.n_y - 1)

    @property
    def xs(self) -> np.ndarray:
        """x coordinates of the lattice columns."""
        return np.linspace(-self.extent_x / 2, self.extent_x / 2, self.n_x)

    @property
    def ys(self) -> np.ndarray:
        """y coordinates of the lattice rows."""
        return np.linspace(-self.extent_y / 2, self.extent_y / 2, self.n_y)

    def index_of(self, row: int, col: int) -> int:
        """Flat point index of lattice site (row, col)."""
        if not (0 <= row < self.n_y and 0 <= col < self.n_x):
            raise IndexError(f"lattice site ({row}, {col}) outside {self.n_y}x{self.n_x} grid")
        return row * self.n_x + col

    def rowcol_of(self, index: int) -> tuple[int, int]:
        """Lattice site (row, col) of a flat point index."""
        if not 0 <= index < self.n_points:
            raise IndexError(f"point index {index} outside grid of {self.n_points} points")
        return divmod(index, self.n_x)


@dataclass(frozen=True)
class ObjectField:
    """A coefficient vector attached to a grid (phantom or reconstruction)."""

    grid: ObjectGrid
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if rho.shape != (self.grid.n_points,):
            raise ValueError(
                f"field length {rho.shape} does not match grid with {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(rho)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "rho", _frozen(rho))

    def image(self) -> np.ndarray:
        """Field as an (n_y, n_x) image."""
        return self.rho.reshape(self.grid.n_y, self.grid.n_x)


@dataclass(frozen=True)
class TransducerArray:
    """Point transducer positions, shape (M, 3), in meters."""

    positions: np.ndarray
    kind: str

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must be an (M, 3) array with M >= 1")
        if self.kind not in ("square", "circular"):
            raise ValueError(f"unknown array kind: {self.kind!r}")
        # pairwise-distinct check; M is small so the quadratic cost is fine
        diff = pos[:, None, :] - pos[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        if dist.min() == 0.0:
            raise ValueError("transducer positions must be pairwise distinct")
        object.__setattr__(self, "positions", _frozen(pos))

    @property
    def n_transducers(self) -> int:
        return self.positions.shape[0]


@dataclass(frozen=True)
class Timebase:
    """Uniform recording time axis: T samples spaced dt starting at t0."""

    T: int
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        if self.T < 2:
            raise ValueError("timebase needs at least 2 samples")
        if self.dt <= 0:
            raise ValueError("sample period must be positive")

    @property
    def duration(self) -> float:
        return (self.T - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.T)


def make_grid(
    n_x: int, n_y: int, extent_x: float, extent_y: float, plane_z: float = 0.0
) -> ObjectGrid:
    """Build a centered uniform grid of ``n_x * n_y`` points at height plane_z."""
    if n_x < 2 or n_y < 2:
        raise ValueError(f"grid dimensions must be >= 2, got ({n_x}, {n_y})")
    if extent_x <= 0 or extent_y <= 0:
        raise ValueError(f"grid extents must be positive, got ({extent_x}, {extent_y})")
    xs = np.linspace(-extent_x / 2, extent_x / 2, n_x)
    ys = np.linspace(-extent_y / 2, extent_y / 2, n_y)
    xx, yy = np.meshgrid(xs, ys)  # xx[row, col] = xs[col]
    points = np.column_stack([xx.ravel(), yy.ravel(), np.full(n_x * n_y, float(plane_z))])
    return ObjectGrid(
        n_x=int(n_x),
        n_y=int(n_y),
        extent_x=float(extent_x),
        extent_y=float(extent_y),
        plane_z=float(plane_z),
        points=_frozen(points),
    )


def star_phantom(
    grid: ObjectGrid, n_arms: int, inner_radius: float, outer_radius: float
) -> ObjectField:
    """Binary star target: n_arms wedges alternating on/off between two radii.

    The circle is divided into ``2 * n_arms`` equal angular sectors and every
    other sector is filled between inner_radius and outer_radius, producing a
    deterministic Siemens-star-like pattern with n_arms filled wedges.
    """
    if n_arms < 3:
        raise ValueError(f"star needs at least 3 arms, got {n_arms}")
    max_radius = min(grid.extent_x, grid.extent_y) / 2
    if not (0 <= inner_radius < outer_radius <= max_radius):
        raise ValueError(
            "star radii out of bounds: need 0 <= inner < outer <= "
            f"{max_radius:g}, got inner={inner_radius:g} outer={outer_radius:g}"
        )
    x = grid.points[:, 0]
    y = grid.points[:, 1]
    r = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), 2 * np.pi)
    sector = np.floor(theta / (np.pi / n_arms)).astype(int)
    on = (sector % 2 == 0) & (r >= inner_radius) & (r <= outer_radius)
    return ObjectField(grid=grid, rho=on.astype(float))


def square_array(
    m_side: int, standoff: float, extent: float, grid: ObjectGrid
) -> TransducerArray:
    """m_side x m_side transducer lattice at z = plane_z + standoff.

    The lattice is centered over the grid and spans ``extent`` in both
    lateral directions (a single transducer sits at the center).
    """
    if m_side < 1:
        raise ValueError(f"array side must be >= 1, got {m_side}")
    if standoff <= 0:
        raise ValueError(f"standoff must be positive, got {standoff}")
    if extent <= 0:
        raise ValueError(f"array extent must be positive, got {extent}")
    if m_side == 1:
        coords = np.array([0.0])
    else:
        coords = np.linspace(-extent / 2, extent / 2, m_side)
    xx, yy = np.meshgrid(coords, coords)
    z = grid.plane_z + standoff
    positions = np.column_stack([xx.ravel(), yy.ravel(), np.full(m_side * m_side, z)])
    return TransducerArray(positions=positions, kind="square")


def circular_array(M: int, radius: float, grid: ObjectGrid) -> TransducerArray:
    """M transducers equally spaced on a circle around the grid center, in-plane."""
    if M < 1:
        raise ValueError(f"need at least one transducer, got {M}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    angles = 2 * np.pi * np.arange(M) / M
    positions = np.column_stack(
        [radius * np.cos(angles), radius * np.sin(angles), np.full(M, grid.plane_z)]
    )
    return TransducerArray(positions=positions, kind="circular")
