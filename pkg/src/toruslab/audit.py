"""Bound audits: fitted constants against asymptotic shapes, JSON/CSV export.

Every inequality in this package has the shape  lhs <= C * rhs.  An audit
records the parameter grid, both sides, the minimal constants that make the
inequality hold on the grid, and a pass flag whose meaning is audit-specific
(usually stability of the fitted constants across a scaling study).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import slope_fit, spread_factor

__all__ = ["BoundAudit", "fit_constant", "pareto_knee"]


def fit_constant(lhs, rhs) -> float:
    """Minimal C with lhs <= C * rhs on the grid (vacuous rows skipped)."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    mask = rhs > 0
    if not mask.any():
        return 0.0
    return float(np.max(lhs[mask] / rhs[mask]))


def pareto_knee(c1s, c2s) -> tuple[float, float]:
    """Knee of a decreasing Pareto curve by the log-log L-curve criterion.

    Takes the point closest (in log-log coordinates) to the utopia corner
    built from the smallest C1 and smallest positive C2 on the curve.
    """
    c1s = np.asarray(c1s, dtype=float)
    c2s = np.asarray(c2s, dtype=float)
    mask = (c1s > 0) & (c2s > 0)
    if not mask.any():
        # every C1 on the grid already closes the bound alone
        i = int(np.argmin(c1s))
        return float(c1s[i]), float(c2s[i])
    l1 = np.log(c1s[mask])
    l2 = np.log(c2s[mask])
    d2 = (l1 - l1.min()) ** 2 + (l2 - l2.min()) ** 2
    j = int(np.argmin(d2))
    idx = np.flatnonzero(mask)[j]
    return float(c1s[idx]), float(c2s[idx])


@dataclass
class BoundAudit:
    """Measured lhs vs fitted-constant * rhs_shape over a parameter grid."""

    name: str
    epsilon: float
    parameter_grid: list[tuple]
    lhs: np.ndarray
    rhs_shape: np.ndarray
    fitted_constants: list[float]
    passed: bool
    columns: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lhs = np.asarray(self.lhs, dtype=float)
        self.rhs_shape = np.asarray(self.rhs_shape, dtype=float)
        if self.lhs.shape != self.rhs_shape.shape:
            raise ValueError("lhs and rhs_shape must have matching shapes")
        if len(self.parameter_grid) != self.lhs.size:
            raise ValueError("parameter grid size must match lhs size")

    @property
    def fitted_global(self) -> float:
        return fit_constant(self.lhs, self.rhs_shape)

    def holds_elementwise(self, constant: float | None = None) -> bool:
        c = self.fitted_global if constant is None else constant
        mask = self.rhs_shape > 0
        return bool(np.all(self.lhs[mask] <= c * self.rhs_shape[mask] * (1 + 1e-12)))

    def stability(self) -> float:
        return spread_factor(self.fitted_constants)

    # -- export ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "epsilon": self.epsilon,
            "columns": list(self.columns),
            "parameter_grid": [list(t) for t in self.parameter_grid],
            "lhs": self.lhs.tolist(),
            "rhs_shape": self.rhs_shape.tolist(),
            "fitted_constants": [float(c) for c in self.fitted_constants],
            "fitted_global": self.fitted_global,
            "pass": bool(self.passed),
            "extra": _jsonable(self.extra),
        }

    def to_csv_rows(self) -> list[list]:
        head = list(self.columns) if self.columns else [
            f"p{i}" for i in range(len(self.parameter_grid[0]) if self.parameter_grid else 0)
        ]
        rows = [head + ["lhs", "rhs_shape", "ratio"]]
        for params, lhs, rhs in zip(self.parameter_grid, self.lhs, self.rhs_shape):
            ratio = lhs / rhs if rhs > 0 else math.nan
            rows.append(list(params) + [lhs, rhs, ratio])
        return rows

    def save(self, path_base: str) -> tuple[str, str]:
        json_path = path_base + ".json"
        csv_path = path_base + ".csv"
        with open(json_path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
        with open(csv_path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.to_csv_rows())
        return json_path, csv_path

    def slope(self, x_index: int = 0) -> float:
        """Slope of log(lhs) against log(parameter column x_index)."""
        xs = np.array([float(t[x_index]) for t in self.parameter_grid])
        mask = (xs > 0) & (self.lhs > 0)
        s, _ = slope_fit(np.log(xs[mask]), np.log(self.lhs[mask]))
        return s


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj
