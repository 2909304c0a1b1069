"""Lattice boxes, coefficient fields, exponential sums and L^p norms on the torus.

The central object is the trigonometric polynomial

    F(x, t) = sum over n in the box of a_n e^{2 pi i (n.x + |n|^2 t)},

with frequencies on the truncated paraboloid {(n, |n|^2)}.  Everything here
is pure and immutable after construction; grid evaluation goes through a
zero-padded FFT that is exact at the grid nodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_MEMORY_CAP,
    TWO_PI,
    check_memory,
    csum,
)

__all__ = [
    "LatticeBox",
    "CoefficientField",
    "TorusPoint",
    "GridField",
    "build_lattice_box",
    "eval_exp_sum",
    "sample_grid",
    "lp_norm",
    "NormReport",
    "norm_report",
    "default_even_resolution",
]


@dataclass(frozen=True)
class LatticeBox:
    """The box {n in Z^d : |n_j| <= radii[j]} enumerated lexicographically."""

    d: int
    radii: tuple[int, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if len(self.radii) != self.d:
            raise ValueError(
                f"expected {self.d} radii, got {len(self.radii)}"
            )
        if any(r < 0 for r in self.radii):
            raise ValueError(f"radii must be nonnegative, got {self.radii}")
        object.__setattr__(self, "radii", tuple(int(r) for r in self.radii))

    @property
    def cardinality(self) -> int:
        out = 1
        for r in self.radii:
            out *= 2 * r + 1
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(2 * r + 1 for r in self.radii)

    @property
    def sum_sq_radii(self) -> int:
        """Largest possible |n|^2 over the box."""
        return sum(r * r for r in self.radii)

    def points(self) -> np.ndarray:
        """All lattice points, shape (cardinality, d), lexicographic order."""
        axes = [np.arange(-r, r + 1) for r in self.radii]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def contains(self, n) -> bool:
        n = tuple(int(v) for v in n)
        return len(n) == self.d and all(
            abs(v) <= r for v, r in zip(n, self.radii)
        )


def build_lattice_box(d: int, radii) -> LatticeBox:
    """Construct the lattice box, validating dimension and radii."""
    radii = tuple(int(r) for r in radii)
    return LatticeBox(d=int(d), radii=radii)


@dataclass(frozen=True)
class TorusPoint:
    """A point (x, t) on T^d x T with all coordinates reduced mod 1."""

    x: tuple[float, ...]
    t: float

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) % 1.0 for v in self.x))
        object.__setattr__(self, "t", float(self.t) % 1.0)

    @property
    def d(self) -> int:
        return len(self.x)


class CoefficientField:
    """A finitely supported coefficient sequence {a_n} on a lattice box."""

    def __init__(self, box: LatticeBox, coeffs: dict):
        self.box = box
        cleaned = {}
        for n, a in coeffs.items():
            key = tuple(int(v) for v in (n if isinstance(n, tuple) else (n,)))
            if not box.contains(key):
                raise ValueError(f"coefficient support {key} outside box {box.radii}")
            cleaned[key] = complex(a)
        self.coeffs = cleaned
        self._dense = None

    # -- constructors -------------------------------------------------

    @classmethod
    def constant(cls, box: LatticeBox, value: complex = 1.0) -> "CoefficientField":
        pts = box.points()
        return cls(box, {tuple(p): value for p in pts})

    @classmethod
    def delta(cls, box: LatticeBox, at=None) -> "CoefficientField":
        at = tuple([0] * box.d) if at is None else tuple(at)
        return cls(box, {at: 1.0})

    @classmethod
    def random_unit(cls, box: LatticeBox, seed: int = 0) -> "CoefficientField":
        """Complex Gaussian coefficients normalized to unit l2 mass."""
        rng = np.random.default_rng(seed)
        pts = box.points()
        vals = rng.standard_normal(len(pts)) + 1j * rng.standard_normal(len(pts))
        vals /= np.linalg.norm(vals)
        return cls(box, {tuple(p): v for p, v in zip(pts, vals)})

    @classmethod
    def from_dense(cls, box: LatticeBox, arr: np.ndarray) -> "CoefficientField":
        arr = np.asarray(arr, dtype=complex)
        if arr.shape != box.shape:
            raise ValueError(f"dense shape {arr.shape} != box shape {box.shape}")
        out = cls(box, {})
        out._dense = arr.copy()
        idx = np.argwhere(arr != 0)
        out.coeffs = {
            tuple(int(i) - r for i, r in zip(ix, box.radii)): complex(arr[tuple(ix)])
            for ix in idx
        }
        return out

    # -- basic quantities ---------------------------------------------

    def dense(self) -> np.ndarray:
        """Coefficients as an array of box shape (index = n + radii)."""
        if self._dense is None:
            arr = np.zeros(self.box.shape, dtype=complex)
            for n, a in self.coeffs.items():
                arr[tuple(v + r for v, r in zip(n, self.box.radii))] = a
            self._dense = arr
        return self._dense

    def l2_norm(self) -> float:
        return math.sqrt(
            math.fsum(abs(a) ** 2 for a in self.coeffs.values())
        )

    def normalize(self) -> "CoefficientField":
        nrm = self.l2_norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero field")
        return CoefficientField(
            self.box, {n: a / nrm for n, a in self.coeffs.items()}
        )

    def translate_phase(self, x0) -> "CoefficientField":
        """Replace a_n by a_n e^{2 pi i n.x0} (spatial translation of F)."""
        x0 = tuple(float(v) for v in x0)
        return CoefficientField(
            self.box,
            {
                n: a * np.exp(2j * np.pi * sum(v * c for v, c in zip(n, x0)))
                for n, a in self.coeffs.items()
            },
        )

    def __len__(self) -> int:
        return len(self.coeffs)


def eval_exp_sum(field: CoefficientField, p: TorusPoint) -> complex:
    """Direct evaluation of F at one torus point, compensated accumulation."""
    if p.d != field.box.d:
        raise ValueError(f"point dimension {p.d} != box dimension {field.box.d}")
    if not field.coeffs:
        return 0.0 + 0.0j
    pts = np.array(list(field.coeffs.keys()), dtype=float)
    amps = np.array(list(field.coeffs.values()), dtype=complex)
    phase = pts @ np.asarray(p.x, dtype=float) + (pts**2).sum(axis=1) * p.t
    return csum(amps * np.exp(1j * TWO_PI * phase))


@dataclass
class GridField:
    """Samples of F on the uniform grid j/R over T^d x T.

    resolution is (R_1, ..., R_d, R_t); samples[j_1, ..., j_d, j_t] equals
    F(j_1/R_1, ..., j_d/R_d, j_t/R_t).  aliasing_free_for records the largest
    even exponent 2k for which equal-weight averaging of |F|^{2k} over this
    grid is exact.
    """

    resolution: tuple[int, ...]
    samples: np.ndarray
    box: LatticeBox
    aliasing_free_for: int | None = None
    coeff_l2_sq: float = field(default=0.0)

    def mean_abs_pow(self, p: float) -> float:
        return float(np.mean(np.abs(self.samples) ** p))

    # -- serialization: flat little-endian float64 pairs + JSON header --

    def save(self, path_base: str) -> tuple[str, str]:
        data = np.ascontiguousarray(self.samples, dtype="<c16")
        bin_path = path_base + ".bin"
        json_path = path_base + ".json"
        with open(bin_path, "wb") as fh:
            fh.write(data.tobytes())
        header = {
            "format": "toruslab-grid",
            "version": 1,
            "encoding": "little-endian float64 re/im pairs, C order",
            "shape": list(self.samples.shape),
            "resolution": list(self.resolution),
            "box": {"d": self.box.d, "radii": list(self.box.radii)},
            "norm_metadata": {
                "coeff_l2_sq": self.coeff_l2_sq,
                "aliasing_free_for": self.aliasing_free_for,
            },
        }
        with open(json_path, "w") as fh:
            json.dump(header, fh, indent=1, sort_keys=True)
        return bin_path, json_path

    @classmethod
    def load(cls, path_base: str) -> "GridField":
        with open(path_base + ".json") as fh:
            header = json.load(fh)
        if header.get("format") != "toruslab-grid":
            raise ValueError("not a toruslab grid file")
        shape = tuple(header["shape"])
        raw = np.fromfile(path_base + ".bin", dtype="<c16")
        samples = raw.reshape(shape)
        box = LatticeBox(header["box"]["d"], tuple(header["box"]["radii"]))
        meta = header["norm_metadata"]
        return cls(
            resolution=tuple(header["resolution"]),
            samples=samples,
            box=box,
            aliasing_free_for=meta["aliasing_free_for"],
            coeff_l2_sq=meta["coeff_l2_sq"],
        )


def _aliasing_free_order(box: LatticeBox, resolution) -> int | None:
    """Largest even 2k with R_j >= 2k N_j + 1 and R_t >= 2k sum N_j^2 + 1."""
    ks = []
    for R, N in zip(resolution[:-1], box.radii):
        if N > 0:
            ks.append((R - 1) // (2 * N))
    ssq = box.sum_sq_radii
    if ssq > 0:
        ks.append((resolution[-1] - 1) // (2 * ssq))
    if not ks:
        return None  # single constant term, every grid is exact
    k = min(ks)
    return 2 * k if k >= 1 else None


def default_even_resolution(box: LatticeBox, k: int) -> tuple[int, ...]:
    """Smallest grid on which |F|^{2k} averages exactly."""
    spatial = tuple(2 * k * N + 1 for N in box.radii)
    return spatial + (2 * k * max(box.sum_sq_radii, 1) + 1,)


def sample_grid(
    field: CoefficientField,
    resolution,
    method: str = "auto",
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> GridField:
    """Sample F on the uniform grid of the given resolution.

    The FFT path places each coefficient at its frequency reduced mod the
    resolution and applies an unscaled inverse FFT; this reproduces the
    pointwise sums exactly at the nodes for any resolution.  The direct
    path exists as an independent cross-check for small grids.
    """
    resolution = tuple(int(r) for r in resolution)
    if len(resolution) != field.box.d + 1:
        raise ValueError(
            f"resolution needs {field.box.d + 1} entries, got {len(resolution)}"
        )
    if any(r < 1 for r in resolution):
        raise ValueError(f"resolution entries must be >= 1, got {resolution}")
    n_nodes = int(np.prod(resolution))
    check_memory(n_nodes, 16, memory_cap)

    if method not in ("auto", "fft", "direct"):
        raise ValueError(f"unknown method {method!r}")

    if method == "direct" or (method == "auto" and n_nodes <= 4096):
        it = np.ndindex(*resolution)
        flat = np.array(
            [
                eval_exp_sum(
                    field,
                    TorusPoint(
                        tuple(j / R for j, R in zip(idx[:-1], resolution[:-1])),
                        idx[-1] / resolution[-1],
                    ),
                )
                for idx in it
            ],
            dtype=complex,
        )
        samples = flat.reshape(resolution)
    else:
        spec = np.zeros(resolution, dtype=complex)
        for n, a in field.coeffs.items():
            ssq = sum(v * v for v in n)
            idx = tuple(v % R for v, R in zip(n, resolution[:-1]))
            idx = idx + (ssq % resolution[-1],)
            spec[idx] += a
        samples = np.fft.ifftn(spec, norm="forward")

    l2sq = math.fsum(abs(a) ** 2 for a in field.coeffs.values())
    return GridField(
        resolution=resolution,
        samples=samples,
        box=field.box,
        aliasing_free_for=_aliasing_free_order(field.box, resolution),
        coeff_l2_sq=l2sq,
    )


def lp_norm(gridfield: GridField, p: float) -> float:
    """(mean over grid of |sample|^p)^{1/p}.

    Exact for even p = 2k whenever gridfield.aliasing_free_for >= 2k, since
    |F|^{2k} is then a trigonometric polynomial integrated exactly by
    equal-weight averaging.  Otherwise it is a quadrature estimate; see
    norm_report for a version carrying an error proxy.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return gridfield.mean_abs_pow(p) ** (1.0 / p)


@dataclass(frozen=True)
class NormReport:
    """An L^p norm value plus its exactness tag and refinement proxy."""

    p: float
    value: float
    exact: bool
    resolution: tuple[int, ...]
    refinement_delta: float | None


def norm_report(
    field: CoefficientField,
    p: float,
    resolution=None,
    memory_cap: int = DEFAULT_MEMORY_CAP,
) -> NormReport:
    """L^p norm with an exactness tag.

    Even p with an aliasing-free grid is exact.  For other p the default
    grid is 4x the p=4 aliasing bound and the change under doubling the
    time axis is reported as the error proxy.
    """
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    box = field.box
    is_even = abs(p - round(p)) < 1e-12 and round(p) % 2 == 0
    if resolution is None:
        if is_even:
            resolution = default_even_resolution(box, round(p) // 2)
        else:
            base = default_even_resolution(box, 2)
            resolution = tuple(4 * r for r in base)
    grid = sample_grid(field, resolution, memory_cap=memory_cap)
    value = lp_norm(grid, p)
    exact = is_even and (grid.aliasing_free_for or 0) >= round(p)
    delta = None
    if not exact:
        doubled = tuple(2 * r for r in resolution)
        grid2 = sample_grid(field, doubled, memory_cap=memory_cap)
        delta = abs(lp_norm(grid2, p) - value)
    return NormReport(
        p=float(p),
        value=value,
        exact=exact,
        resolution=tuple(resolution),
        refinement_delta=delta,
    )
