"""Grid geometry, state-vector layout, and ghost-cell handling.

The cell-centered state vector stacks, in canonical order, the ion fluid
block (D, mx, my, mz, En), the electron fluid block, the electromagnetic
fields (Bx, By, Bz, Ex, Ey, Ez), and, when divergence cleaning is active,
the two correction potentials (psi, phi).  Field arrays are laid out as
(nx + 2*ghost, ny + 2*ghost, ncomp) with components last so that per-cell
linear algebra batches naturally.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

# Conserved component indices (canonical serialization order).
ION_D, ION_MX, ION_MY, ION_MZ, ION_E = 0, 1, 2, 3, 4
ELE_D, ELE_MX, ELE_MY, ELE_MZ, ELE_E = 5, 6, 7, 8, 9
BX, BY, BZ = 10, 11, 12
EX, EY, EZ = 13, 14, 15
PSI, PHI = 16, 17

NCOMP = 16
NCOMP_PHM = 18

ION = slice(ION_D, ION_E + 1)
ELE = slice(ELE_D, ELE_E + 1)
EM = slice(BX, EZ + 1)

# Primitive component indices: (rho, ux, uy, uz, p) per species.
NPRIM = 10
PRIM_ION = slice(0, 5)
PRIM_ELE = slice(5, 10)

PERIODIC = "periodic"
NEUMANN = "neumann"
WALL = "conducting_wall"
BC_KINDS = (PERIODIC, NEUMANN, WALL)

# Components that are odd under reflection at a perfectly conducting wall.
# Normal momentum and normal B flip; tangential E flips (so it vanishes on
# the wall); the Gauss-law potential phi is odd because div E is.
_ODD_CONS_WALL_Y = (ION_MY, ELE_MY, BY, EX, EZ, PHI)
_ODD_CONS_WALL_X = (ION_MX, ELE_MX, BX, EY, EZ, PHI)
_ODD_PRIM_WALL_Y = (2, 7)  # uy of both species
_ODD_PRIM_WALL_X = (1, 6)  # ux of both species


@dataclass(frozen=True)
class Grid2D:
    """Uniform Cartesian mesh with a ghost-cell rind.

    Cell (i, j) is centered at (x0 + (i + 1/2) dx, y0 + (j + 1/2) dy);
    vertex array index (i, j) addresses the corner at (x0 + i dx, y0 + j dy),
    i.e. there are (nx + 1) x (ny + 1) vertices.
    """

    nx: int
    ny: int
    x0: float
    y0: float
    x1: float
    y1: float
    bc_x: str = PERIODIC
    bc_y: str = PERIODIC
    ghost: int = 2

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ConfigError(f"grid needs nx, ny >= 1, got {self.nx} x {self.ny}")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ConfigError("grid bounds must satisfy x1 > x0 and y1 > y0")
        if self.ghost < 2:
            raise ConfigError("ghost width must be >= 2 (second-order stencils)")
        for bc in (self.bc_x, self.bc_y):
            if bc not in BC_KINDS:
                raise ConfigError(f"unknown boundary kind {bc!r}; expected one of {BC_KINDS}")

    @property
    def dx(self):
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self):
        return (self.y1 - self.y0) / self.ny

    @property
    def shape(self):
        """Padded array shape (without the component axis)."""
        g = self.ghost
        return (self.nx + 2 * g, self.ny + 2 * g)

    @property
    def interior(self):
        g = self.ghost
        return (slice(g, g + self.nx), slice(g, g + self.ny))

    def cell_centers(self, with_ghosts=False):
        """1-D coordinate arrays (x, y) of cell centers."""
        g = self.ghost if with_ghosts else 0
        ix = np.arange(-g, self.nx + g)
        iy = np.arange(-g, self.ny + g)
        return (self.x0 + (ix + 0.5) * self.dx, self.y0 + (iy + 0.5) * self.dy)

    def vertices(self):
        """1-D coordinate arrays (x, y) of cell corners, (nx+1,) and (ny+1,)."""
        return (self.x0 + np.arange(self.nx + 1) * self.dx,
                self.y0 + np.arange(self.ny + 1) * self.dy)

    def alloc(self, ncomp=NCOMP):
        return np.zeros(self.shape + (ncomp,))


def _fill_axis(field, grid, axis, bc, odd):
    g = grid.ghost
    n = grid.nx if axis == 0 else grid.ny
    sl = [slice(None)] * field.ndim

    def take(idx):
        s = list(sl)
        s[axis] = idx
        return tuple(s)

    if bc == PERIODIC:
        if n >= g:
            field[take(slice(0, g))] = field[take(slice(n, n + g))]
            field[take(slice(g + n, g + n + g))] = field[take(slice(g, 2 * g))]
        else:
            # narrow grids (e.g. single-row 1-D runs) need modular wrapping
            src = g + (np.arange(-g, 0) % n)
            field[take(slice(0, g))] = field[take(src)]
            src = g + (np.arange(n, n + g) % n)
            field[take(slice(g + n, g + n + g))] = field[take(src)]
    elif bc == NEUMANN:
        field[take(slice(0, g))] = field[take(slice(g, g + 1))]
        field[take(slice(g + n, g + n + g))] = field[take(slice(g + n - 1, g + n))]
    elif bc == WALL:
        for layer in range(g):
            field[take(g - 1 - layer)] = field[take(g + layer)]
            field[take(g + n + layer)] = field[take(g + n - 1 - layer)]
        idx = [c for c in odd if c < field.shape[-1]]
        if idx:
            for gsl in (slice(0, g), slice(g + n, g + n + g)):
                s = take(gsl)
                field[s][..., idx] *= -1.0
    else:  # pragma: no cover - Grid2D validates on construction
        raise ConfigError(f"unknown boundary kind {bc!r}")


def fill_ghosts(field, grid, odd_x=(), odd_y=()):
    """Populate the ghost rind of a padded field array in place.

    ``odd_x`` / ``odd_y`` list the component indices that change sign when
    mirrored at a conducting wall normal to that axis; they are ignored for
    periodic and Neumann boundaries.  The x sweep runs first so the corner
    ghosts filled by the y sweep see consistent data.  Returns the array.
    """
    odd = odd_x if field.ndim == 3 else ()
    _fill_axis(field, grid, 0, grid.bc_x, odd)
    odd = odd_y if field.ndim == 3 else ()
    _fill_axis(field, grid, 1, grid.bc_y, odd)
    return field


def fill_ghosts_conserved(U, grid):
    return fill_ghosts(U, grid, odd_x=_ODD_CONS_WALL_X, odd_y=_ODD_CONS_WALL_Y)


def fill_ghosts_primitive(P, grid):
    return fill_ghosts(P, grid, odd_x=_ODD_PRIM_WALL_X, odd_y=_ODD_PRIM_WALL_Y)


def fill_ghosts_vector(A, grid):
    """Ghost fill for a cell-centered planar vector field (..., 2) like the current."""
    return fill_ghosts(A, grid, odd_x=(0,), odd_y=(1,))


# ---------------------------------------------------------------------------
# Per-cell record types.  Production code works on arrays; these are the
# canonical flat serialization used at API boundaries and in tests.

@dataclass
class SpeciesConserved:
    D: float
    mx: float
    my: float
    mz: float
    En: float


@dataclass
class SpeciesPrimitive:
    rho: float
    ux: float
    uy: float
    uz: float
    p: float


@dataclass
class EmState:
    Bx: float = 0.0
    By: float = 0.0
    Bz: float = 0.0
    Ex: float = 0.0
    Ey: float = 0.0
    Ez: float = 0.0
    psi: float = 0.0
    phi: float = 0.0


@dataclass
class ConservedVector:
    ion: SpeciesConserved
    electron: SpeciesConserved
    em: EmState
    with_potentials: bool = False


def flatten(cv):
    """Canonical flat ordering: ion block, electron block, B, E [, psi, phi]."""
    vals = [cv.ion.D, cv.ion.mx, cv.ion.my, cv.ion.mz, cv.ion.En,
            cv.electron.D, cv.electron.mx, cv.electron.my, cv.electron.mz, cv.electron.En,
            cv.em.Bx, cv.em.By, cv.em.Bz, cv.em.Ex, cv.em.Ey, cv.em.Ez]
    if cv.with_potentials:
        vals += [cv.em.psi, cv.em.phi]
    return np.asarray(vals, dtype=float)


def unflatten(vec):
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (NCOMP,) and vec.shape != (NCOMP_PHM,):
        raise ValueError(f"expected {NCOMP} or {NCOMP_PHM} components, got shape {vec.shape}")
    with_pot = vec.shape[0] == NCOMP_PHM
    em = EmState(*vec[BX:EZ + 1])
    if with_pot:
        em.psi, em.phi = vec[PSI], vec[PHI]
    return ConservedVector(ion=SpeciesConserved(*vec[ION]),
                           electron=SpeciesConserved(*vec[ELE]),
                           em=em, with_potentials=with_pot)
