"""Derived operators and empirical studies built on the quasi-interpolants.

Integrating or differentiating the spline approximation S f instead of f
itself turns each operator into a quadrature rule / differentiation matrix
on the Greville sites. The convergence studies drive an operator across a
family of refined partitions and fit the observed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .bspline import SplineFunction, SplineSpace, basis_integral, eval_basis_derivative
from .knots import KnotVector, PartitionSpec, generate_partition
from .nearbest import build_nearbest_qi
from .quasi_interp import (
    KIND_DQI,
    KIND_NEARBEST,
    KIND_Q2STAR,
    KIND_QP2STAR,
    QuasiInterpolant,
    apply_dqi,
    apply_qi,
    build_q2star,
    build_qp2star,
    greville_samples,
)

__all__ = [
    "QuadratureRule",
    "quadrature_from_qi",
    "DifferentiationMatrix",
    "differentiation_matrix",
    "TestFunction",
    "BUILTIN_FUNCTIONS",
    "OperatorRecipe",
    "operator_recipe",
    "evaluation_grid",
    "ConvergenceRow",
    "ConvergenceReport",
    "convergence_study",
    "DiffRow",
    "DiffReport",
    "differentiation_study",
]


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Weights over the Greville sites; integrates whatever the underlying
    operator reproduces exactly (polynomials up to ``exactness_degree``)."""

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int

    def integrate(self, samples: np.ndarray) -> float:
        samples = np.asarray(samples, dtype=float)
        if samples.shape != self.nodes.shape:
            raise ValueError(
                f"expected {self.nodes.shape[0]} samples, got {samples.shape}"
            )
        return float(np.dot(self.weights, samples))

    def integrate_fn(self, fn: Callable[[float], float]) -> float:
        return self.integrate(np.array([float(fn(x)) for x in self.nodes]))


def quadrature_from_qi(qi: QuasiInterpolant) -> QuadratureRule:
    """Integrate the spline output exactly: node k collects lambda_j(k - j)
    times the basis integral, over every stencil j touching k."""
    space = qi.space
    w = np.zeros(space.dimension)
    for st in qi.stencils:
        integral = basis_integral(space, st.i)
        for s, lam in zip(st.offsets, st.weights):
            w[st.i + s] += lam * integral
    nodes = space.greville.copy()
    nodes.flags.writeable = False
    w.flags.writeable = False
    return QuadratureRule(nodes=nodes, weights=w, exactness_degree=qi.q)


# ---------------------------------------------------------------------------
# differentiation


@dataclass(frozen=True, eq=False)
class DifferentiationMatrix:
    """Maps samples at the Greville sites to derivative values there,
    by differentiating the spline the operator builds from the samples."""

    matrix: np.ndarray
    nodes: np.ndarray
    bandwidth: int

    def apply(self, samples: np.ndarray) -> np.ndarray:
        samples = np.asarray(samples, dtype=float)
        if samples.shape != self.nodes.shape:
            raise ValueError(
                f"expected {self.nodes.shape[0]} samples, got {samples.shape}"
            )
        return self.matrix @ samples


def differentiation_matrix(qi: QuasiInterpolant) -> DifferentiationMatrix:
    space = qi.space
    m = space.degree
    if m < 2:
        raise ValueError("differentiation needs degree >= 2")
    dim = space.dimension
    coeff_map = np.zeros((dim, dim))
    for st in qi.stencils:
        for s, lam in zip(st.offsets, st.weights):
            coeff_map[st.i, st.i + s] = lam
    basis_prime = np.zeros((dim, dim))
    for row, x in enumerate(space.greville):
        first, derivs = eval_basis_derivative(space, float(x))
        basis_prime[row, first : first + m + 1] = derivs
    D = basis_prime @ coeff_map
    tol = 1e-14 * max(1.0, float(np.abs(D).max()))
    rows, cols = np.nonzero(np.abs(D) > tol)
    bandwidth = int(np.abs(rows - cols).max()) if rows.size else 0
    D.flags.writeable = False
    nodes = space.greville.copy()
    nodes.flags.writeable = False
    return DifferentiationMatrix(matrix=D, nodes=nodes, bandwidth=bandwidth)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Closed-form target with derivatives and (optionally) an antiderivative.

    ``derivatives(x, k)`` returns the array f(x), f'(x), ..., f^(k)(x).
    """

    name: str
    value: Callable[[float], float]
    derivatives: Callable[[float, int], np.ndarray]
    integral: Callable[[float, float], float] | None = None


def _sin_derivs(x: float, k: int) -> np.ndarray:
    return np.sin(x + np.arange(k + 1) * (np.pi / 2.0))


def _exp_derivs(x: float, k: int) -> np.ndarray:
    return np.full(k + 1, np.exp(x))


def _runge_derivs(x: float, k: int) -> np.ndarray:
    # 1/(1+25x^2) = Re[1/(1+5ix)]; differentiate the complex resolvent
    base = 1.0 / (1.0 + 5.0j * x)
    out = np.empty(k + 1)
    fact = 1.0
    power = 1.0 + 0.0j
    for order in range(k + 1):
        if order > 0:
            fact *= order
            power *= -5.0j
        out[order] = (fact * power * base ** (order + 1)).real
    return out


BUILTIN_FUNCTIONS = {
    "sin": TestFunction(
        name="sin",
        value=math.sin,
        derivatives=_sin_derivs,
        integral=lambda a, b: math.cos(a) - math.cos(b),
    ),
    "exp": TestFunction(
        name="exp",
        value=math.exp,
        derivatives=_exp_derivs,
        integral=lambda a, b: math.exp(b) - math.exp(a),
    ),
    "runge": TestFunction(
        name="runge",
        value=lambda x: 1.0 / (1.0 + 25.0 * x * x),
        derivatives=_runge_derivs,
        integral=lambda a, b: (math.atan(5.0 * b) - math.atan(5.0 * a)) / 5.0,
    ),
}


# ---------------------------------------------------------------------------
# operator recipes


@dataclass(frozen=True)
class OperatorRecipe:
    """Deferred operator construction, reusable across partition sizes."""

    kind: str
    p: int | None = None
    q: int = 2

    def build(self, space: SplineSpace) -> QuasiInterpolant:
        if self.kind == KIND_Q2STAR:
            return build_q2star(space)
        if self.kind == KIND_QP2STAR:
            assert self.p is not None
            return build_qp2star(space, self.p)
        if self.kind == KIND_NEARBEST:
            assert self.p is not None
            return build_nearbest_qi(space, self.p, self.q)
        raise ValueError(f"kind {self.kind!r} has no stencil operator")

    def approximate(self, space: SplineSpace, f: TestFunction) -> SplineFunction:
        if self.kind == KIND_DQI:
            m = space.degree
            return apply_dqi(space, lambda x: f.derivatives(x, m))
        qi = self.build(space)
        return apply_qi(qi, greville_samples(space, f.value))


def operator_recipe(kind: str, p: int | None = None, q: int = 2) -> OperatorRecipe:
    kinds = (KIND_DQI, KIND_Q2STAR, KIND_QP2STAR, KIND_NEARBEST)
    if kind not in kinds:
        raise ValueError(f"kind must be one of {kinds}, got {kind!r}")
    if kind in (KIND_QP2STAR, KIND_NEARBEST):
        if p is None:
            raise ValueError(f"kind {kind!r} requires an offset radius p")
    elif p is not None:
        raise ValueError(f"kind {kind!r} does not take an offset radius")
    return OperatorRecipe(kind=kind, p=p, q=q)


# ---------------------------------------------------------------------------
# convergence studies


def evaluation_grid(kv: KnotVector) -> np.ndarray:
    """11 points per knot span, deduplicated; dense enough for sup norms."""
    m = kv.degree
    pieces = [np.linspace(kv.t[k], kv.t[k + 1], 11) for k in range(m, m + kv.n)]
    return np.unique(np.concatenate(pieces))


@dataclass(frozen=True, eq=False)
class ConvergenceRow:
    n: int
    h_max: float
    error: float
    order_running: float


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]
    fitted_order: float
    constant: float


def _fit_order(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log err against log h over the finest half."""
    valid = [(h, e) for h, e in points if e > 0.0]
    tail = valid[len(valid) // 2 :]
    if len(tail) < 2 or len({h for h, _ in tail}) < 2:
        return float("nan"), float("nan")
    logs_h = np.log([h for h, _ in tail])
    logs_e = np.log([e for _, e in tail])
    slope, intercept = np.polyfit(logs_h, logs_e, 1)
    return float(slope), float(np.exp(intercept))


def _running_order(prev: tuple[float, float] | None, h: float, err: float) -> float:
    if prev is None:
        return float("nan")
    h_prev, err_prev = prev
    if err_prev <= 0.0 or err <= 0.0 or h_prev == h:
        return float("nan")
    return float(np.log(err_prev / err) / np.log(h_prev / h))


def convergence_study(
    recipe: OperatorRecipe,
    f: TestFunction,
    sizes: tuple[int, ...],
    template: PartitionSpec,
    degree: int,
) -> ConvergenceReport:
    """Sup-norm error of the operator's approximation to f across sizes."""
    rows: list[ConvergenceRow] = []
    prev: tuple[float, float] | None = None
    for n in sorted(sizes):
        kv = generate_partition(replace(template, n=n), degree)
        space = SplineSpace.from_knots(kv)
        approx = recipe.approximate(space, f)
        grid = evaluation_grid(kv)
        err = max(abs(approx(float(x)) - f.value(float(x))) for x in grid)
        h = float(kv.steps.max())
        rows.append(ConvergenceRow(n=n, h_max=h, error=float(err),
                                   order_running=_running_order(prev, h, err)))
        prev = (h, float(err))
    fitted, constant = _fit_order([(r.h_max, r.error) for r in rows])
    return ConvergenceReport(rows=tuple(rows), fitted_order=fitted, constant=constant)


@dataclass(frozen=True, eq=False)
class DiffRow:
    n: int
    h_max: float
    err_interior: float
    err_all: float
    order_running: float


@dataclass(frozen=True, eq=False)
class DiffReport:
    rows: tuple[DiffRow, ...]
    fitted_order: float


def differentiation_study(
    recipe: OperatorRecipe,
    f: TestFunction,
    sizes: tuple[int, ...],
    template: PartitionSpec,
    degree: int,
) -> DiffReport:
    """Max error of the differentiation matrix at the Greville sites.

    Rates are fitted on the interior rows (boundary stencils lose an order);
    the full-range error is reported alongside.
    """
    rows: list[DiffRow] = []
    prev: tuple[float, float] | None = None
    for n in sorted(sizes):
        kv = generate_partition(replace(template, n=n), degree)
        space = SplineSpace.from_knots(kv)
        qi = recipe.build(space)
        D = differentiation_matrix(qi)
        samples = greville_samples(space, f.value)
        exact = np.array([f.derivatives(float(x), 1)[1] for x in space.greville])
        diff = np.abs(D.apply(samples) - exact)
        lo, hi = degree + 1, space.dimension - degree - 2
        err_int = float(diff[lo : hi + 1].max()) if hi >= lo else float(diff.max())
        err_all = float(diff.max())
        h = float(kv.steps.max())
        rows.append(DiffRow(n=n, h_max=h, err_interior=err_int, err_all=err_all,
                            order_running=_running_order(prev, h, err_int)))
        prev = (h, err_int)
    fitted, _ = _fit_order([(r.h_max, r.err_interior) for r in rows])
    return DiffReport(rows=tuple(rows), fitted_order=fitted)
