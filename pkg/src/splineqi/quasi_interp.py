"""Quasi-interpolants: differential form and discrete stencil operators.

Two operator styles live here. The differential quasi-interpolant takes a
derivative oracle and produces the projector coefficients

    c_i = sum_l a_l(theta_i) D^l f(theta_i) / l!

where a_l are central moment coefficients of the knot window; it reproduces
every spline in the space. The discrete operators sample f only at Greville
points: a three-point stencil at offsets {-1, 0, 1} (or {-p, 0, p}) whose
weights are the unique quadratically exact combination

    mu_i(f) = f(theta_i) - tbar_i * [theta_{i-p}, theta_i, theta_{i+p}] f

with tbar_i the centered second moment of the window.

Boundary policy for stencil operators: the two extreme indices use pure
point evaluation (exact there, the window is a single repeated knot); any
other index whose offsets would leave the index set shifts its outer sites
inward to the nearest available ones and re-solves for quadratic exactness.
Interior here means every knot touched by the stencil's windows is simple,
which holds exactly for p + m - 1 <= i <= n - p; norm bounds are guaranteed
only on that range, and `norm_upper_bound` can restrict to it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bspline import SplineFunction, SplineSpace
from .knots import elementary_symmetric, make_clamped_knots

KIND_DQI = "dqi"
KIND_Q2STAR = "q2star"
KIND_QP2STAR = "qp2star"
KIND_NEARBEST = "nearbest"


@dataclass(frozen=True, eq=False)
class Stencil:
    """Sampling functional mu_i(f) = sum_s weights[s] * f(theta[i + offsets[s]]).

    ``boundary`` marks stencils whose knot windows touch the repeated end
    knots (including shifted and point-evaluation stencils); norm bounds are
    only asserted away from those.
    """

    i: int
    offsets: tuple[int, ...]
    weights: np.ndarray
    boundary: bool = False

    @property
    def sites(self) -> tuple[int, ...]:
        return tuple(self.i + s for s in self.offsets)

    def l1(self) -> float:
        return float(np.abs(self.weights).sum())

    def apply(self, samples: np.ndarray) -> float:
        acc = 0.0
        for s, w in zip(self.offsets, self.weights):
            acc += w * samples[self.i + s]
        return acc


@dataclass(frozen=True, eq=False)
class QuasiInterpolant:
    """Discrete quasi-interpolant: one stencil per basis index.

    ``q`` is the guaranteed polynomial exactness degree, ``p`` the offset
    radius. ``interior_lo``/``interior_hi`` bound the index range where no
    stencil window touches a repeated end knot. Near-best operators carry
    their per-index optimal l1 values and the interior max ``nu1_star``.
    """

    space: SplineSpace
    kind: str
    q: int
    p: int
    stencils: tuple[Stencil, ...]
    interior_lo: int
    interior_hi: int
    lp_values: tuple[float, ...] | None = None
    nu1_star: float | None = None

    def to_record(self) -> dict:
        kv = self.space.knots
        return {
            "kind": self.kind,
            "degree": kv.degree,
            "q": self.q,
            "p": self.p,
            "a": kv.a,
            "b": kv.b,
            "interior": [float(x) for x in kv.interior],
            "stencils": [
                {
                    "i": st.i,
                    "offsets": list(st.offsets),
                    "weights": [float(w) for w in st.weights],
                    "boundary": st.boundary,
                }
                for st in self.stencils
            ],
        }

    @classmethod
    def from_record(cls, record: dict) -> "QuasiInterpolant":
        kv = make_clamped_knots(
            record["a"], record["b"], record["interior"], int(record["degree"])
        )
        space = SplineSpace.from_knots(kv)
        stencils = tuple(
            Stencil(
                i=int(item["i"]),
                offsets=tuple(int(s) for s in item["offsets"]),
                weights=np.array(item["weights"], dtype=float),
                boundary=bool(item["boundary"]),
            )
            for item in record["stencils"]
        )
        p = int(record["p"])
        lo, hi = _interior_range(kv.degree, p, kv.n)
        return cls(
            space=space,
            kind=str(record["kind"]),
            q=int(record["q"]),
            p=p,
            stencils=stencils,
            interior_lo=lo,
            interior_hi=hi,
        )

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "QuasiInterpolant":
        return cls.from_record(json.loads(text))


def _interior_range(m: int, p: int, n: int) -> tuple[int, int]:
    # all knots touched by the stencil windows are simple exactly here
    return p + m - 1, n - p


def dqi_coefficients(space: SplineSpace, i: int) -> np.ndarray:
    """Central moment coefficients a_0 .. a_m of the window at index i.

    a_s is the s-th elementary symmetric function of the mean-centered knot
    window divided by C(m, s); a_0 = 1 and a_1 = 0 exactly. These are the
    weights of D^s f(theta_i)/s! in the differential quasi-interpolant, and
    a_2 = -(theta_i^2 - theta_i^(2)).
    """
    kv = space.knots
    m = kv.degree
    if not 0 <= i < space.dimension:
        raise ValueError(f"index {i} outside 0..{space.dimension - 1}")
    window = kv.t[i + 1 : i + m + 1]
    centered = window - space.grid.theta[i]
    esp = elementary_symmetric(centered)
    a = np.array([esp[s] / math.comb(m, s) for s in range(m + 1)])
    a[0] = 1.0
    a[1] = 0.0
    return a


DerivativeOracle = Callable[[float], Sequence[float]]


def apply_dqi(space: SplineSpace, oracle: DerivativeOracle) -> SplineFunction:
    """Differential quasi-interpolant from a derivative oracle.

    ``oracle(x)`` must return at least m+1 values (f(x), f'(x), ..., f^(m)(x));
    derivatives at points coinciding with knots follow the same one-sided
    convention as `eval_spline`, which makes the operator reproduce every
    spline in the space exactly.
    """
    m = space.degree
    theta = space.greville
    inv_fact = np.array([1.0 / math.factorial(l) for l in range(m + 1)])
    coeffs = np.empty(space.dimension)
    for i in range(space.dimension):
        derivs = np.asarray(oracle(theta[i]), dtype=float)
        if derivs.ndim != 1 or derivs.size < m + 1:
            raise ValueError(
                f"oracle must supply {m + 1} derivative values, got shape {derivs.shape}"
            )
        a = dqi_coefficients(space, i)
        coeffs[i] = float(np.dot(a * inv_fact, derivs[: m + 1]))
    return SplineFunction(space, coeffs)


def _three_point_weights(
    theta: np.ndarray, tbar_i: float, i: int, jm: int, jp: int
) -> np.ndarray:
    """Quadratically exact weights at sites (theta[jm], theta[i], theta[jp])."""
    dm = theta[i] - theta[jm]
    dp = theta[jp] - theta[i]
    dd = theta[jp] - theta[jm]
    return np.array(
        [
            -tbar_i / (dd * dm),
            1.0 + tbar_i / (dp * dm),
            -tbar_i / (dd * dp),
        ]
    )


def _point_eval_stencil(i: int) -> Stencil:
    return Stencil(i=i, offsets=(0,), weights=np.array([1.0]), boundary=True)


def _build_radius_p(space: SplineSpace, p: int, kind: str) -> QuasiInterpolant:
    kv = space.knots
    theta = space.grid.theta
    tbar = space.grid.centered_second
    dim = space.dimension
    lo, hi = _interior_range(kv.degree, p, kv.n)
    stencils = []
    for i in range(dim):
        if i == 0 or i == dim - 1:
            stencils.append(_point_eval_stencil(i))
            continue
        jm = max(0, i - p)
        jp = min(dim - 1, i + p)
        w = _three_point_weights(theta, tbar[i], i, jm, jp)
        stencils.append(
            Stencil(
                i=i,
                offsets=(jm - i, 0, jp - i),
                weights=w,
                boundary=not lo <= i <= hi,
            )
        )
    return QuasiInterpolant(
        space=space,
        kind=kind,
        q=2,
        p=p,
        stencils=tuple(stencils),
        interior_lo=lo,
        interior_hi=hi,
    )


def build_q2star(space: SplineSpace) -> QuasiInterpolant:
    """Three-point quadratically exact operator at offsets {-1, 0, 1}.

    Weights at index i are (-tbar/(d-(d-+d+)), 1 + tbar/(d-d+),
    -tbar/(d+(d-+d+))) with d- and d+ the Greville gaps around theta_i.
    Needs degree >= 2.
    """
    if space.degree < 2:
        raise ValueError("quadratic exactness needs degree >= 2")
    return _build_radius_p(space, 1, KIND_Q2STAR)


def build_qp2star(
    space: SplineSpace, p: int, allow_uncertified: bool = False
) -> QuasiInterpolant:
    """Wide three-point operator at offsets {-p, 0, p}, quadratically exact.

    For p >= m the interior operator norm is bounded by (m+1)/(m-1)
    independently of the partition. Smaller p is rejected unless
    ``allow_uncertified`` is set (no norm guarantee then).
    """
    if space.degree < 2:
        raise ValueError("quadratic exactness needs degree >= 2")
    if not isinstance(p, int) or p < 1:
        raise ValueError(f"offset radius must be an integer >= 1, got {p!r}")
    if p < space.degree and not allow_uncertified:
        raise ValueError(
            f"p={p} below degree {space.degree}: norm bound not guaranteed "
            "(pass allow_uncertified=True to build anyway)"
        )
    return _build_radius_p(space, p, KIND_QP2STAR)


def greville_samples(space: SplineSpace, fn: Callable[[float], float]) -> np.ndarray:
    """Sample a function at all Greville abscissae."""
    return np.array([fn(float(x)) for x in space.greville])


def apply_qi(qi: QuasiInterpolant, samples: np.ndarray) -> SplineFunction:
    """Apply a stencil operator to Greville samples of f."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (qi.space.dimension,):
        raise ValueError(
            f"need {qi.space.dimension} Greville samples, got {samples.shape}"
        )
    coeffs = np.array([st.apply(samples) for st in qi.stencils])
    return SplineFunction(qi.space, coeffs)


def norm_upper_bound(qi: QuasiInterpolant, interior_only: bool = False) -> float:
    """Max stencil l1 norm: an upper bound for the sup-norm of the operator.

    With ``interior_only`` the max runs over stencils whose windows avoid the
    repeated end knots; raises if that range is empty.
    """
    if interior_only:
        chosen = [
            st for st in qi.stencils if qi.interior_lo <= st.i <= qi.interior_hi
        ]
        if not chosen:
            raise ValueError(
                f"no interior stencils for p={qi.p} on n={qi.space.knots.n} subintervals"
            )
    else:
        chosen = list(qi.stencils)
    return max(st.l1() for st in chosen)


def theoretical_bound(kind: str, m: int) -> float:
    """Partition-independent interior norm bound for a stencil family."""
    if kind == KIND_Q2STAR:
        if m < 1:
            raise ValueError("degree must be >= 1")
        return float((m + 4) // 2)
    if kind in (KIND_QP2STAR, KIND_NEARBEST):
        if m < 2:
            raise ValueError("bound (m+1)/(m-1) needs degree >= 2")
        return (m + 1) / (m - 1)
    raise ValueError(f"no norm bound known for kind {kind!r}")
