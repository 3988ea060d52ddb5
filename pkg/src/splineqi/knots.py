"""Clamped knot sequences, partition generators, and Greville moment grids.

Index conventions used throughout the package: a degree-m spline space on
[a, b] with n subintervals has the clamped knot array

    t[0] = ... = t[m] = a < t[m+1] < ... < t[m+n-1] < b = t[m+n] = ... = t[n+2m]

stored as a flat numpy array of length n + 2m + 1. Basis function j
(j = 0 .. n+m-1) lives on knots t[j .. j+m+1]. The Greville abscissa of
index j is the mean of the m knots t[j+1 .. j+m], and the moment of order l
is the l-th elementary symmetric function of that window divided by C(m, l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

FAMILIES = ("uniform", "arithmetic", "geometric", "random")


@dataclass(frozen=True, eq=False)
class KnotVector:
    """Clamped knot sequence for one spline space.

    Fields: ``degree`` (m >= 1), ``t`` (read-only array of n + 2m + 1 knot
    values with (m+1)-fold ends), ``n`` (number of subintervals, >= 1).
    """

    degree: int
    t: np.ndarray
    n: int

    @property
    def a(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def interior(self) -> np.ndarray:
        """Strictly increasing interior knots (may be empty for n = 1)."""
        return self.t[self.degree + 1 : self.degree + self.n]

    @property
    def steps(self) -> np.ndarray:
        """Subinterval lengths h_1 .. h_n."""
        brk = self.t[self.degree : self.degree + self.n + 1]
        return np.diff(brk)

    @property
    def dimension(self) -> int:
        """Number of basis functions, n + m."""
        return self.n + self.degree


def make_clamped_knots(a: float, b: float, interior, m: int) -> KnotVector:
    """Build a clamped knot vector from interval ends and interior knots.

    ``interior`` must be strictly increasing and lie strictly inside (a, b);
    it may be empty. Raises ValueError on any malformed input.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"degree must be an integer >= 1, got {m!r}")
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    inner = np.asarray(interior, dtype=float)
    if inner.ndim != 1:
        raise ValueError("interior knots must be a flat sequence")
    if inner.size:
        if not np.all(np.diff(inner) > 0):
            raise ValueError("interior knots must be strictly increasing")
        if inner[0] <= a or inner[-1] >= b:
            raise ValueError("interior knots must lie strictly inside (a, b)")
    n = inner.size + 1
    t = np.concatenate([np.full(m + 1, a), inner, np.full(m + 1, b)])
    t.setflags(write=False)
    return KnotVector(degree=m, t=t, n=n)


@dataclass(frozen=True)
class PartitionSpec:
    """Recipe for a partition of [a, b] into n subintervals.

    families:
      uniform     equal steps
      arithmetic  steps in arithmetic progression; ``ratio`` = h_n / h_1
      geometric   steps with constant ratio; ``ratio`` = h_{k+1} / h_k
      random      seeded positive steps, uniform in [0.05, 1] before scaling

    The record form (family, a, b, n, ratio, seed) round-trips through
    ``to_record`` / ``from_record`` and is the CLI config format.
    """

    family: str
    a: float = 0.0
    b: float = 1.0
    n: int = 8
    ratio: float = 1.0
    seed: int = 0

    def to_record(self) -> dict:
        return {
            "family": self.family,
            "a": float(self.a),
            "b": float(self.b),
            "n": int(self.n),
            "ratio": float(self.ratio),
            "seed": int(self.seed),
        }

    @classmethod
    def from_record(cls, record: dict) -> "PartitionSpec":
        allowed = {"family", "a", "b", "n", "ratio", "seed"}
        unknown = set(record) - allowed
        if unknown:
            raise ValueError(f"unknown partition keys: {sorted(unknown)}")
        if "family" not in record:
            raise ValueError("partition record needs a 'family' entry")
        return cls(
            family=str(record["family"]),
            a=float(record.get("a", 0.0)),
            b=float(record.get("b", 1.0)),
            n=int(record.get("n", 8)),
            ratio=float(record.get("ratio", 1.0)),
            seed=int(record.get("seed", 0)),
        )


def _partition_steps(spec: PartitionSpec) -> np.ndarray:
    span = spec.b - spec.a
    n = spec.n
    if spec.family == "uniform":
        return np.full(n, span / n)
    if spec.family == "arithmetic":
        if n == 1:
            return np.array([span])
        rho = spec.ratio
        weights = 1.0 + (rho - 1.0) * np.arange(n) / (n - 1)
        return span * weights / weights.sum()
    if spec.family == "geometric":
        r = spec.ratio
        weights = r ** np.arange(n)
        return span * weights / weights.sum()
    if spec.family == "random":
        rng = np.random.default_rng(spec.seed)
        weights = rng.uniform(0.05, 1.0, size=n)
        return span * weights / weights.sum()
    raise ValueError(f"unknown partition family {spec.family!r}")


def generate_partition(spec: PartitionSpec, m: int) -> KnotVector:
    """Instantiate a PartitionSpec as a clamped degree-m knot vector.

    Deterministic: the same spec (including seed) always produces the same
    knots. The degree is passed separately because the spec record is
    degree-free.
    """
    if spec.family not in FAMILIES:
        raise ValueError(f"unknown partition family {spec.family!r}")
    if not isinstance(spec.n, int) or spec.n < 1:
        raise ValueError(f"need n >= 1 subintervals, got {spec.n!r}")
    if not spec.a < spec.b:
        raise ValueError(f"need a < b, got a={spec.a}, b={spec.b}")
    if spec.family in ("arithmetic", "geometric") and not spec.ratio > 0:
        raise ValueError(f"need ratio > 0, got {spec.ratio}")
    if spec.family == "uniform":
        # exact endpoints and evenly rounded interior
        interior = np.linspace(spec.a, spec.b, spec.n + 1)[1:-1]
    else:
        steps = _partition_steps(spec)
        interior = spec.a + np.cumsum(steps)[:-1]
    return make_clamped_knots(spec.a, spec.b, interior, m)


def elementary_symmetric(values: np.ndarray) -> np.ndarray:
    """All elementary symmetric functions sigma_0 .. sigma_k of k values.

    Incremental polynomial build-up (coefficients of prod (x + v)), O(k^2),
    no divisions.
    """
    values = np.asarray(values, dtype=float)
    k = values.size
    esp = np.zeros(k + 1)
    esp[0] = 1.0
    for j, v in enumerate(values, start=1):
        esp[1 : j + 1] = esp[1 : j + 1] + v * esp[0:j]
    return esp


@dataclass(frozen=True, eq=False)
class GrevilleGrid:
    """Greville abscissae with their symmetric-function moments.

    ``theta[j]`` is the mean of the m knots supporting index j;
    ``moments[j, l]`` is the order-l moment (elementary symmetric function of
    the window over C(m, l), with moments[:, 0] = 1);
    ``centered_second[j]`` is theta_j^2 - moments[j, 2], computed by the
    cancellation-free pairwise double sum, and is >= 0 with equality exactly
    when the whole window is one repeated knot.
    """

    theta: np.ndarray
    moments: np.ndarray
    centered_second: np.ndarray


def greville_grid(kv: KnotVector) -> GrevilleGrid:
    """Compute Greville abscissae, moments, and centered second moments.

    Raises ValueError if the abscissae fail to be strictly increasing (they
    always are for simple interior knots; the check guards malformed input).
    """
    m = kv.degree
    dim = kv.dimension
    theta = np.empty(dim)
    moments = np.empty((dim, m + 1))
    centered = np.zeros(dim)
    binom = np.array([math.comb(m, l) for l in range(m + 1)], dtype=float)
    for j in range(dim):
        window = kv.t[j + 1 : j + m + 1]
        moments[j] = elementary_symmetric(window) / binom
        theta[j] = moments[j, 1]
        if m >= 2:
            acc = 0.0
            for r in range(m - 1):
                d = window[r] - window[r + 1 :]
                acc += float(np.dot(d, d))
            centered[j] = acc / (m * m * (m - 1))
    if not np.all(np.diff(theta) > 0):
        raise ValueError("Greville abscissae are not strictly increasing")
    theta.setflags(write=False)
    moments.setflags(write=False)
    centered.setflags(write=False)
    return GrevilleGrid(theta=theta, moments=moments, centered_second=centered)
