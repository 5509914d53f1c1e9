"""Grid containers for densities and characteristic functions, with CSV IO.

GridDensity holds a nonnegative density on a square w-grid against the
measure du dv / (2pi); CharFunctionGrid holds complex characteristic-function
values on a square z-grid. Both serialize to a headered CSV plus a JSON
sidecar carrying geometry, mass, and provenance, written with shortest
round-trip float formatting so identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GridSpec:
    """Square grid geometry: resolution x resolution cells centered on center."""

    center: complex
    half_width: float
    resolution: int

    def __post_init__(self):
        if self.half_width <= 0:
            raise DomainError(f"half_width must be positive, got {self.half_width}")
        if self.resolution < 2:
            raise DomainError(f"resolution must be >= 2, got {self.resolution}")

    @property
    def cell(self) -> float:
        return 2.0 * self.half_width / self.resolution

    def axis(self, which: str = "u") -> np.ndarray:
        """Cell-center coordinates along one axis."""
        c0 = self.center.real if which == "u" else self.center.imag
        lo = c0 - self.half_width
        return lo + (np.arange(self.resolution) + 0.5) * self.cell

    def origin(self) -> tuple[float, float]:
        return (
            self.center.real - self.half_width,
            self.center.imag - self.half_width,
        )

    def same_geometry(self, other: "GridSpec") -> bool:
        return (
            self.resolution == other.resolution
            and abs(self.half_width - other.half_width) < 1e-12 * self.half_width
            and abs(self.center - other.center) < 1e-12 * (1 + self.half_width)
        )


def _require_pow2(n: int):
    if n < 64 or (n & (n - 1)) != 0:
        raise DomainError(f"density resolution must be a power of two >= 64, got {n}")


@dataclass(frozen=True)
class RectangleRegion:
    """Axis-aligned rectangle [u_min, u_max] x [v_min, v_max] in the w-plane."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float

    def __post_init__(self):
        if not (self.u_min < self.u_max and self.v_min < self.v_max):
            raise DomainError("rectangle needs u_min < u_max and v_min < v_max")

    def contains(self, w: np.ndarray) -> np.ndarray:
        """Half-open membership: [u_min, u_max) x [v_min, v_max)."""
        w = np.asarray(w)
        return (
            (w.real >= self.u_min)
            & (w.real < self.u_max)
            & (w.imag >= self.v_min)
            & (w.imag < self.v_max)
        )

    def area(self) -> float:
        return (self.u_max - self.u_min) * (self.v_max - self.v_min)


@dataclass
class GridDensity:
    """Density values[iu, iv] at cell centers; mass = sum * cell^2 / (2pi)."""

    spec: GridSpec
    values: np.ndarray
    method: str = ""
    seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    MEASURE = "du dv / (2 pi)"

    def __post_init__(self):
        _require_pow2(self.spec.resolution)
        r = self.spec.resolution
        if self.values.shape != (r, r):
            raise DomainError(
                f"values shape {self.values.shape} does not match resolution {r}"
            )

    def mass(self) -> float:
        return float(self.values.sum()) * self.spec.cell**2 / TWO_PI

    def min_value(self) -> float:
        return float(self.values.min())

    def to_csv(self, path):
        _write_grid_csv(path, ("u", "v", "density"), self.spec, [self.values])

    def sidecar(self) -> dict:
        side = {
            "kind": "grid-density",
            "center": [self.spec.center.real, self.spec.center.imag],
            "half_width": self.spec.half_width,
            "resolution": self.spec.resolution,
            "measure": self.MEASURE,
            "mass": self.mass(),
            "method": self.method,
            "seed": self.seed,
        }
        side.update(self.diagnostics)
        return side

    def write(self, csv_path):
        """CSV plus JSON sidecar next to it."""
        self.to_csv(csv_path)
        side_path = str(csv_path) + ".json"
        with open(side_path, "w", encoding="utf-8") as fh:
            json.dump(self.sidecar(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def from_csv(csv_path) -> "GridDensity":
        with open(str(csv_path) + ".json", "r", encoding="utf-8") as fh:
            side = json.load(fh)
        if side.get("kind") != "grid-density":
            raise DomainError(f"{csv_path}: sidecar is not a grid-density")
        res = int(side["resolution"])
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        if data.shape != (res * res, 3):
            raise DomainError(f"{csv_path}: expected {res * res} rows of u,v,density")
        spec = GridSpec(
            complex(side["center"][0], side["center"][1]),
            float(side["half_width"]),
            res,
        )
        vals = data[:, 2].reshape(res, res)
        return GridDensity(
            spec,
            vals,
            method=side.get("method", ""),
            seed=side.get("seed"),
        )


@dataclass
class CharFunctionGrid:
    """Characteristic function values[ia, ib] on a z-grid centered at 0.

    The grid has an odd number of nodes per axis with spacing
    2 Z / (resolution - 1), so z = 0 is a node; trapezoid weights apply at
    the +-Z endpoints when the grid is integrated.
    """

    half_width: float
    values: np.ndarray
    fitted_exponent: float = 0.0
    edge_level: float = 0.0
    tail_tol: float = 0.0
    max_radius_above_tol: float = 0.0
    method: str = ""
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        r = self.values.shape[0]
        if self.values.ndim != 2 or self.values.shape[1] != r:
            raise DomainError("char grid must be square")
        if r < 3 or r % 2 == 0:
            raise DomainError(
                f"char grid needs an odd node count >= 3 to contain z = 0, got {r}"
            )

    @property
    def resolution(self) -> int:
        return self.values.shape[0]

    @property
    def node_spacing(self) -> float:
        return 2.0 * self.half_width / (self.resolution - 1)

    def axis(self) -> np.ndarray:
        return -self.half_width + self.node_spacing * np.arange(self.resolution)

    def center_value(self) -> complex:
        m = self.resolution // 2
        return complex(self.values[m, m])

    def to_csv(self, path):
        spec_like = _OddGrid(self.axis())
        _write_grid_csv(
            path, ("a", "b", "re", "im"), spec_like, [self.values.real, self.values.imag]
        )

    def sidecar(self) -> dict:
        side = {
            "kind": "char-function-grid",
            "center": [0.0, 0.0],
            "half_width": self.half_width,
            "resolution": self.resolution,
            "fitted_exponent": self.fitted_exponent,
            "edge_level": self.edge_level,
            "tail_tol": self.tail_tol,
            "max_radius_above_tol": self.max_radius_above_tol,
            "method": self.method,
        }
        side.update(self.diagnostics)
        return side

    def write(self, csv_path):
        self.to_csv(csv_path)
        with open(str(csv_path) + ".json", "w", encoding="utf-8") as fh:
            json.dump(self.sidecar(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @staticmethod
    def from_csv(csv_path) -> "CharFunctionGrid":
        with open(str(csv_path) + ".json", "r", encoding="utf-8") as fh:
            side = json.load(fh)
        if side.get("kind") != "char-function-grid":
            raise DomainError(f"{csv_path}: sidecar is not a char-function-grid")
        res = int(side["resolution"])
        data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
        vals = (data[:, 2] + 1j * data[:, 3]).reshape(res, res)
        return CharFunctionGrid(
            half_width=float(side["half_width"]),
            values=vals,
            fitted_exponent=float(side.get("fitted_exponent", 0.0)),
            edge_level=float(side.get("edge_level", 0.0)),
            tail_tol=float(side.get("tail_tol", 0.0)),
            max_radius_above_tol=float(side.get("max_radius_above_tol", 0.0)),
            method=side.get("method", ""),
        )


class _OddGrid:
    """Adapter so char grids reuse the CSV writer (axes given directly)."""

    def __init__(self, ax):
        self._ax = ax

    def axis(self, which="u"):
        return self._ax


def _write_grid_csv(path, header, spec, value_arrays):
    """Row-major (u outer, v inner) CSV with shortest round-trip floats."""
    us = spec.axis("u")
    vs = spec.axis("v")
    n = len(us)
    cols = [np.repeat(us, n), np.tile(vs, n)]
    for arr in value_arrays:
        cols.append(np.asarray(arr).reshape(-1))
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(repr(float(x)) for x in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def integrate_rectangle(density: GridDensity, region: RectangleRegion) -> float:
    """Probability mass of region under the density, with boundary cells
    weighted by their fractional overlap. Separable, hence exact for the
    piecewise-constant cell model."""
    spec = density.spec
    cell = spec.cell

    def overlap(axis_lo, lo, hi):
        starts = axis_lo
        ends = axis_lo + cell
        return np.clip(np.minimum(ends, hi) - np.maximum(starts, lo), 0.0, cell)

    u0, v0 = spec.origin()
    ustarts = u0 + cell * np.arange(spec.resolution)
    vstarts = v0 + cell * np.arange(spec.resolution)
    wu = overlap(ustarts, region.u_min, region.u_max)
    wv = overlap(vstarts, region.v_min, region.v_max)
    return float(wu @ density.values @ wv) / TWO_PI


def rectangle_panel(
    half_width: float, count: int, seed: int, min_side_frac: float = 0.05
) -> list[RectangleRegion]:
    """Deterministic panel of random axis-aligned rectangles in the square
    [-half_width, half_width]^2. Sides shorter than min_side_frac of the
    square are redrawn so no rectangle is degenerate."""
    if count < 1:
        raise DomainError("panel needs count >= 1")
    rng = np.random.Generator(np.random.Philox(seed))
    out = []
    min_side = min_side_frac * half_width
    while len(out) < count:
        u = np.sort(rng.uniform(-half_width, half_width, 2))
        v = np.sort(rng.uniform(-half_width, half_width, 2))
        if u[1] - u[0] < min_side or v[1] - v[0] < min_side:
            continue
        out.append(
            RectangleRegion(float(u[0]), float(u[1]), float(v[0]), float(v[1]))
        )
    return out
