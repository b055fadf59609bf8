"""Anisotropic coefficient fields (A, rho) and their constructions.

A medium is a pair of immutable evaluators: a symmetric 2x2 matrix field
A(x) and a positive scalar field rho(x), together with a certified
two-sided ellipticity constant. Constructions cover constants, diagonal
and expression-defined fields, the pushforward of the identity medium
through a diffeomorphism, and the free-space extension that continues
(A, rho) by (Id, 1) outside the domain with interior-limit convention on
the boundary itself.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError, NumericalError, ValidationError


@dataclass(frozen=True)
class MediumCoefficients:
    """Matrix field A(x), density rho(x), and ellipticity certificate."""

    matrix: Callable[[np.ndarray], np.ndarray]  # (N,2) -> (N,2,2)
    density: Callable[[np.ndarray], np.ndarray]  # (N,2) -> (N,)
    c_ellip: Optional[float] = None
    regularity: str = "lipschitz"  # declared smoothness class; trusted metadata
    label: str = "custom"

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, float))
        return self.matrix(points), self.density(points)

    @staticmethod
    def identity():
        return MediumCoefficients.isotropic(1.0)

    @staticmethod
    def isotropic(a: float, rho: Optional[float] = None):
        a = float(a)
        if a <= 0:
            raise ConfigurationError("isotropic coefficient must be positive")
        r = a if rho is None else float(rho)
        if r <= 0:
            raise ConfigurationError("density must be positive")

        def matrix(points):
            points = np.atleast_2d(points)
            out = np.zeros((points.shape[0], 2, 2))
            out[:, 0, 0] = a
            out[:, 1, 1] = a
            return out

        def density(points):
            return np.full(np.atleast_2d(points).shape[0], r)

        return MediumCoefficients(
            matrix=matrix, density=density,
            c_ellip=max(a, 1.0 / a), regularity="analytic",
            label=f"isotropic(a={a}, rho={r})",
        )

    @staticmethod
    def diagonal(a11: float, a22: float, rho: float = 1.0):
        if min(a11, a22, rho) <= 0:
            raise ConfigurationError("diagonal entries and density must be positive")

        def matrix(points):
            points = np.atleast_2d(points)
            out = np.zeros((points.shape[0], 2, 2))
            out[:, 0, 0] = a11
            out[:, 1, 1] = a22
            return out

        def density(points):
            return np.full(np.atleast_2d(points).shape[0], rho)

        c = max(a11, a22, 1.0 / a11, 1.0 / a22)
        return MediumCoefficients(matrix=matrix, density=density, c_ellip=c,
                                  regularity="analytic",
                                  label=f"diagonal({a11},{a22})")


def ellipticity_constant(medium: MediumCoefficients, samples) -> float:
    """Smallest c >= 1 with c^-1 |xi|^2 <= xi.A(x)xi <= c |xi|^2 on the samples.

    Raises ValidationError listing offending points when A is not symmetric
    or not positive definite somewhere.
    """
    samples = np.atleast_2d(np.asarray(samples, float))
    if samples.size == 0:
        raise ValidationError("ellipticity check requires a nonempty sample set")
    A = medium.matrix(samples)
    asym = np.abs(A - np.transpose(A, (0, 2, 1))).max(axis=(1, 2))
    scale = np.abs(A).max(axis=(1, 2)) + 1e-300
    bad_sym = asym > 1e-10 * scale
    if np.any(bad_sym):
        pts = samples[bad_sym][:5]
        raise ValidationError(f"A is not symmetric at points {pts.tolist()}")
    eig = np.linalg.eigvalsh(0.5 * (A + np.transpose(A, (0, 2, 1))))
    lam_min = eig[:, 0]
    lam_max = eig[:, -1]
    bad_pd = lam_min <= 0.0
    if np.any(bad_pd):
        pts = samples[bad_pd][:5]
        raise ValidationError(f"A is not positive definite at points {pts.tolist()}")
    return float(max(lam_max.max(), 1.0 / lam_min.min(), 1.0))


# ---------------------------------------------------------------------------
# diffeomorphisms and pushforward media
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Diffeomorphism:
    """Forward map, Jacobian, and (possibly Newton-based) inverse."""

    forward: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray]  # (N,2) -> (N,2,2)
    inverse: Optional[Callable[[np.ndarray], np.ndarray]] = None
    boundary_fixing: bool = False
    label: str = "diffeomorphism"

    def apply_inverse(self, points, tol=1e-12, max_iter=60):
        """Phi^-1 by damped Newton when no closed-form inverse is given."""
        points = np.atleast_2d(np.asarray(points, float))
        if self.inverse is not None:
            return self.inverse(points)
        x = points.copy()
        for _ in range(max_iter):
            r = self.forward(x) - points
            if np.max(np.abs(r)) < tol:
                return x
            J = self.jacobian(x)
            det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
            if np.any(np.abs(det) < 1e-14):
                raise NumericalError("Jacobian became singular during inversion")
            dx = np.empty_like(x)
            dx[:, 0] = (J[:, 1, 1] * r[:, 0] - J[:, 0, 1] * r[:, 1]) / det
            dx[:, 1] = (-J[:, 1, 0] * r[:, 0] + J[:, 0, 0] * r[:, 1]) / det
            x -= dx
        raise NumericalError("map inversion did not converge")

    def validate(self, sample_points, boundary_points=None, tol=1e-10):
        pts = np.atleast_2d(np.asarray(sample_points, float))
        back = self.apply_inverse(self.forward(pts))
        if np.max(np.abs(back - pts)) > tol:
            raise ValidationError("inverse(forward(x)) != x beyond tolerance")
        J = self.jacobian(pts)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        if np.any(det <= 0.0):
            raise ValidationError("Jacobian determinant is not positive everywhere")
        if self.boundary_fixing and boundary_points is not None:
            bp = np.atleast_2d(np.asarray(boundary_points, float))
            if np.max(np.abs(self.forward(bp) - bp)) > tol:
                raise ValidationError("map declared boundary-fixing but moves the boundary")


def sine_bump_diffeomorphism(square, amplitude=(0.1, 0.07)) -> Diffeomorphism:
    """Boundary-fixing map of an axis-aligned square via a product-sine bump.

    Phi(x) = x + amp * sin(pi*(x-x0)/s) * sin(pi*(y-y0)/s); the bump and its
    gradient vanish at the corners, so DPhi = Id there.
    """
    x0, y0 = square.vertices[0]
    s = square.side
    ax, ay = float(amplitude[0]), float(amplitude[1])
    if max(abs(ax), abs(ay)) * (math.pi / s) >= 0.45:
        raise ConfigurationError("bump amplitude too large to stay a diffeomorphism")

    def bump(points):
        u = math.pi * (points[:, 0] - x0) / s
        v = math.pi * (points[:, 1] - y0) / s
        return np.sin(u) * np.sin(v), u, v

    def forward(points):
        points = np.atleast_2d(np.asarray(points, float))
        b, _, _ = bump(points)
        out = points.copy()
        out[:, 0] += ax * b
        out[:, 1] += ay * b
        return out

    def jacobian(points):
        points = np.atleast_2d(np.asarray(points, float))
        _, u, v = bump(points)
        dbx = (math.pi / s) * np.cos(u) * np.sin(v)
        dby = (math.pi / s) * np.sin(u) * np.cos(v)
        J = np.zeros((points.shape[0], 2, 2))
        J[:, 0, 0] = 1.0 + ax * dbx
        J[:, 0, 1] = ax * dby
        J[:, 1, 0] = ay * dbx
        J[:, 1, 1] = 1.0 + ay * dby
        return J

    return Diffeomorphism(forward=forward, jacobian=jacobian, inverse=None,
                          boundary_fixing=True,
                          label=f"sine_bump(ax={ax}, ay={ay})")


def identity_diffeomorphism() -> Diffeomorphism:
    def forward(points):
        return np.atleast_2d(np.asarray(points, float)).copy()

    def jacobian(points):
        points = np.atleast_2d(points)
        J = np.zeros((points.shape[0], 2, 2))
        J[:, 0, 0] = 1.0
        J[:, 1, 1] = 1.0
        return J

    return Diffeomorphism(forward=forward, jacobian=jacobian,
                          inverse=lambda p: np.atleast_2d(np.asarray(p, float)).copy(),
                          boundary_fixing=True, label="identity")


def scaling_diffeomorphism(factor: float) -> Diffeomorphism:
    factor = float(factor)
    if factor <= 0:
        raise ConfigurationError("scaling factor must be positive")

    def forward(points):
        return factor * np.atleast_2d(np.asarray(points, float))

    def jacobian(points):
        points = np.atleast_2d(points)
        J = np.zeros((points.shape[0], 2, 2))
        J[:, 0, 0] = factor
        J[:, 1, 1] = factor
        return J

    return Diffeomorphism(forward=forward, jacobian=jacobian,
                          inverse=lambda p: np.atleast_2d(np.asarray(p, float)) / factor,
                          boundary_fixing=False, label=f"scaling({factor})")


def pushforward_medium(phi: Diffeomorphism, domain=None) -> MediumCoefficients:
    """Transport the homogeneous medium through Phi.

    A(y) = DPhi DPhi^T / det DPhi and rho(y) = 1 / det DPhi, evaluated at
    x = Phi^-1(y). This is the unique convention for which v solving
    (Lap + k^2) v = 0 makes u = v o Phi^-1 solve (div A grad + k^2 rho) u = 0.
    """

    def fields(points):
        points = np.atleast_2d(np.asarray(points, float))
        x = phi.apply_inverse(points)
        J = phi.jacobian(x)
        det = J[:, 0, 0] * J[:, 1, 1] - J[:, 0, 1] * J[:, 1, 0]
        if np.any(det <= 0.0):
            raise ValidationError("pushforward hit a nonpositive Jacobian determinant")
        A = np.einsum("nij,nkj->nik", J, J) / det[:, None, None]
        return A, 1.0 / det

    def matrix(points):
        return fields(points)[0]

    def density(points):
        return fields(points)[1]

    return MediumCoefficients(matrix=matrix, density=density, c_ellip=None,
                              regularity="smooth",
                              label=f"pushforward({phi.label})")


def extend_to_freespace(medium: MediumCoefficients, domain) -> MediumCoefficients:
    """Continue (A, rho) by (Id, 1) outside the closed domain.

    Points on the boundary get the interior values (interior-limit
    convention used by all interface integrals).
    """

    def matrix(points):
        points = np.atleast_2d(np.asarray(points, float))
        out = np.zeros((points.shape[0], 2, 2))
        out[:, 0, 0] = 1.0
        out[:, 1, 1] = 1.0
        inside = domain.contains(points, closed=True)
        if np.any(inside):
            out[inside] = medium.matrix(points[inside])
        return out

    def density(points):
        points = np.atleast_2d(np.asarray(points, float))
        out = np.ones(points.shape[0])
        inside = domain.contains(points, closed=True)
        if np.any(inside):
            out[inside] = medium.density(points[inside])
        return out

    c = None if medium.c_ellip is None else max(medium.c_ellip, 1.0)
    return MediumCoefficients(matrix=matrix, density=density, c_ellip=c,
                              regularity=medium.regularity,
                              label=f"freespace({medium.label})")


# ---------------------------------------------------------------------------
# closed-form expression grammar for configuration files
# ---------------------------------------------------------------------------
_ALLOWED_FUNCS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "abs": np.abs, "tanh": np.tanh,
}
_ALLOWED_NAMES = {"pi": math.pi, "e": math.e}


def compile_expression(text: str) -> Callable[[np.ndarray], np.ndarray]:
    """Compile a scalar expression in x, y into a vectorized evaluator.

    Grammar: numbers, x, y, pi, e, + - * / ** and unary minus, and calls to
    sin, cos, tan, exp, log, sqrt, abs, tanh. Anything else is rejected.
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"bad coefficient expression {text!r}: {exc}") from exc

    for node in ast.walk(tree):
        if isinstance(node, ast.Expression):
            continue
        if isinstance(node, ast.BinOp) and isinstance(
            node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)
        ):
            continue
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            continue
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            continue
        if isinstance(node, ast.Name) and (
            node.id in ("x", "y") or node.id in _ALLOWED_NAMES
        ):
            continue
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and (
            node.func.id in _ALLOWED_FUNCS and not node.keywords
        ):
            continue
        if isinstance(node, (ast.Load, ast.operator, ast.unaryop)):
            continue
        raise ConfigurationError(
            f"coefficient expression {text!r} uses disallowed syntax: "
            f"{ast.dump(node)[:60]}"
        )

    code = compile(tree, "<medium-expression>", "eval")

    def evaluator(points):
        points = np.atleast_2d(np.asarray(points, float))
        env = {"x": points[:, 0], "y": points[:, 1], "__builtins__": {}}
        env.update(_ALLOWED_NAMES)
        env.update(_ALLOWED_FUNCS)
        val = eval(code, env)  # guarded by the whitelist above
        return np.broadcast_to(np.asarray(val, float), points.shape[:1]).copy()

    return evaluator


def medium_from_expressions(a11: str, a12: str, a22: str, rho: str) -> MediumCoefficients:
    """Matrix medium from the documented expression grammar (a21 = a12)."""
    e11 = compile_expression(a11)
    e12 = compile_expression(a12)
    e22 = compile_expression(a22)
    erho = compile_expression(rho)

    def matrix(points):
        points = np.atleast_2d(points)
        out = np.empty((points.shape[0], 2, 2))
        out[:, 0, 0] = e11(points)
        out[:, 0, 1] = out[:, 1, 0] = e12(points)
        out[:, 1, 1] = e22(points)
        return out

    return MediumCoefficients(matrix=matrix, density=lambda p: erho(p),
                              c_ellip=None, regularity="declared-smooth",
                              label=f"expressions({a11};{a12};{a22})")
