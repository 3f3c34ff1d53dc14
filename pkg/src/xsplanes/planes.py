"""The eight predicted planes z = +-m*x +- y (mod 1) and their geometry.

For shift count a the coefficients are m = 2**a - 1 and m = 2**a + 1; with
both signs on x and y that makes eight planes.  Distances are vertical on
the torus (z folded mod 1), which is well defined for graphs z = f(x, y)
mod 1 and cheap; meshes sample the slab region used for the magnified
plots, split at the mod-1 wrap so each surface piece is a clean sheet.
"""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class Plane:
    """One surface z = sign_x*m*x + sign_y*y (mod 1)."""

    m: int
    sign_x: int
    sign_y: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"coefficient m must be positive, got {self.m}")
        if self.sign_x not in (1, -1) or self.sign_y not in (1, -1):
            raise ValueError("sign_x and sign_y must be +1 or -1")

    @property
    def name(self) -> str:
        sx = "p" if self.sign_x == 1 else "n"
        sy = "p" if self.sign_y == 1 else "n"
        return f"m{self.m}_{sx}{sy}"

    def height(self, x: float, y: float) -> float:
        """z of the plane at (x, y), folded into [0, 1)."""
        f = self.sign_x * self.m * x + self.sign_y * y
        return f - math.floor(f)


@dataclass(frozen=True)
class PlaneFamily:
    """All eight planes for one shift count, in fixed enumeration order."""

    a: int
    planes: tuple[Plane, ...]

    def __post_init__(self):
        if len(self.planes) != 8:
            raise ValueError(f"expected 8 planes, got {len(self.planes)}")


def family(a: int) -> PlaneFamily:
    """The eight planes for shift count a.

    Order is fixed for reproducible tie-breaks: m ascending, then sign_x
    with + before -, then sign_y with + before -.
    """
    if not 1 <= a <= 62:
        raise ValueError(f"shift count must be in 1..62, got {a}")
    planes = tuple(
        Plane(m, sx, sy)
        for m in ((1 << a) - 1, (1 << a) + 1)
        for sx in (1, -1)
        for sy in (1, -1)
    )
    return PlaneFamily(a, planes)


def torus_dist(p: tuple[float, float, float], plane: Plane) -> float:
    """Vertical distance mod 1 from point p to the plane, in [0, 1/2]."""
    x, y, z = p
    t = z - (plane.sign_x * plane.m * x + plane.sign_y * y)
    frac = t % 1.0
    return min(frac, 1.0 - frac)


def min_dist(p: tuple[float, float, float], fam: PlaneFamily) -> tuple[float, Plane]:
    """Minimum torus distance over the family and the arg-min plane.

    Ties keep the earliest plane in the family's fixed order.
    """
    best = None
    best_plane = None
    for plane in fam.planes:
        d = torus_dist(p, plane)
        if best is None or d < best:
            best = d
            best_plane = plane
    return best, best_plane


@dataclass(frozen=True)
class MeshStrip:
    """One polyline of the sampled surface, constant x, ordered by y.

    branch is the integer k with k <= sign_x*m*x + sign_y*y < k+1 along the
    strip; strips sharing a branch belong to the same connected sheet.
    """

    branch: int
    vertices: tuple[tuple[float, float, float], ...]


def mesh(plane: Plane, x_max: float, magnify: float, grid: int) -> list[MeshStrip]:
    """Sample z = plane height over [0, x_max] x [0, 1] as strips along y.

    Emits `grid` stations per axis; vertices are (magnify*x, y, z).  Each
    strip is split where the mod-1 wrap crosses it (the branch index
    changes); fragments with fewer than two vertices are dropped, so the
    vertex total is grid*grid minus those wrap losses.
    """
    if not 0.0 < x_max <= 1.0:
        raise ValueError(f"x_max must be in (0, 1], got {x_max}")
    if magnify <= 0.0:
        raise ValueError(f"magnify must be positive, got {magnify}")
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    strips = []
    steps = grid - 1
    for j in range(grid):
        x = (j / steps) * x_max
        x_mag = magnify * x
        run_branch = None
        run = []
        for k in range(grid):
            y = k / steps
            f = plane.sign_x * plane.m * x + plane.sign_y * y
            branch = math.floor(f)
            vertex = (x_mag, y, f - branch)
            if branch != run_branch:
                if len(run) >= 2:
                    strips.append(MeshStrip(run_branch, tuple(run)))
                run_branch = branch
                run = []
            run.append(vertex)
        if len(run) >= 2:
            strips.append(MeshStrip(run_branch, tuple(run)))
    return strips


def component_count(strips: list[MeshStrip]) -> int:
    """Number of connected sheets in a sampled mesh (distinct branch indices)."""
    return len({s.branch for s in strips})
