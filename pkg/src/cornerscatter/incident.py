"""Closed-form incident fields: exact values and gradients.

All constructors return an :class:`IncidentField` whose evaluators accept
(N, 2) arrays and return complex values/gradients; fields solve
(Lap + kappa^2) u = 0 exactly (kappa = 0 for the harmonic power field,
which exists for the free-boundary diagnostics only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import specfun
from .errors import ConfigurationError, DomainEvaluationError

_NEAR_ORIGIN = 1e-7


@dataclass(frozen=True)
class IncidentField:
    """Wavenumber plus exact value/gradient evaluators."""

    kappa: float
    value: Callable[[np.ndarray], np.ndarray]  # (N,2) -> (N,) complex
    gradient: Callable[[np.ndarray], np.ndarray]  # (N,2) -> (N,2) complex
    kind: str
    params: dict = field(default_factory=dict)

    def scaled(self, factor):
        """Same field multiplied by a constant (e.g. a*w incident waves)."""
        factor = complex(factor)
        return IncidentField(
            kappa=self.kappa,
            value=lambda p, _v=self.value: factor * _v(p),
            gradient=lambda p, _g=self.gradient: factor * _g(p),
            kind=self.kind,
            params={**self.params, "scale": factor},
        )

    def superpose(self, other):
        if abs(self.kappa - other.kappa) > 1e-12:
            raise ConfigurationError("superposition requires equal wavenumbers")
        return IncidentField(
            kappa=self.kappa,
            value=lambda p: self.value(p) + other.value(p),
            gradient=lambda p: self.gradient(p) + other.gradient(p),
            kind="superposition",
            params={"parts": (self.kind, other.kind)},
        )


def plane_wave(kappa: float, direction) -> IncidentField:
    """u(x) = exp(i kappa x.d) with |d| = 1."""
    if kappa <= 0:
        raise ConfigurationError("plane wave needs kappa > 0")
    d = np.asarray(direction, float)
    nrm = np.linalg.norm(d)
    if abs(nrm - 1.0) > 1e-9:
        raise ConfigurationError(f"direction must be a unit vector, |d| = {nrm}")
    d = d / nrm

    def value(points):
        points = np.atleast_2d(np.asarray(points, float))
        return np.exp(1j * kappa * points @ d)

    def gradient(points):
        u = value(points)
        return 1j * kappa * u[:, None] * d[None, :]

    return IncidentField(kappa=float(kappa), value=value, gradient=gradient,
                         kind="plane_wave", params={"direction": tuple(d)})


def _polar(points):
    points = np.atleast_2d(np.asarray(points, float))
    r = np.linalg.norm(points, axis=1)
    th = np.arctan2(points[:, 1], points[:, 0])
    return points, r, th


def _bessel_vec(m, x):
    return np.array([specfun._bessel_j_any(m, float(v)) for v in np.atleast_1d(x)])


def _bessel_prime_vec(m, x):
    x = np.atleast_1d(x)
    if m == 0:
        return -_bessel_vec(1, x)
    return 0.5 * (_bessel_vec(m - 1, x) - _bessel_vec(m + 1, x))


def circular_mode(m: int, kappa: float) -> IncidentField:
    """Entire cylinder mode u = J_m(kappa r) e^{i m theta}."""
    if kappa <= 0:
        raise ConfigurationError("circular mode needs kappa > 0")
    if m < 0:
        raise ConfigurationError("circular mode needs m >= 0")
    lead = (0.5 * kappa) ** m / math.factorial(m)

    def value(points):
        points, r, th = _polar(points)
        out = np.empty(points.shape[0], complex)
        near = r < _NEAR_ORIGIN
        far = ~near
        if np.any(far):
            out[far] = _bessel_vec(m, kappa * r[far]) * np.exp(1j * m * th[far])
        if np.any(near):
            z = points[near, 0] + 1j * points[near, 1]
            out[near] = lead * z**m
        return out

    def gradient(points):
        points, r, th = _polar(points)
        out = np.empty((points.shape[0], 2), complex)
        near = r < _NEAR_ORIGIN
        far = ~near
        if np.any(far):
            rr, tt = r[far], th[far]
            phase = np.exp(1j * m * tt)
            du_dr = kappa * _bessel_prime_vec(m, kappa * rr) * phase
            du_dth = 1j * m * _bessel_vec(m, kappa * rr) * phase
            cos, sin = np.cos(tt), np.sin(tt)
            out[far, 0] = cos * du_dr - sin / rr * du_dth
            out[far, 1] = sin * du_dr + cos / rr * du_dth
        if np.any(near):
            z = points[near, 0] + 1j * points[near, 1]
            if m == 0:
                out[near] = -0.5 * kappa**2 * lead * np.stack(
                    [points[near, 0], points[near, 1]], axis=1
                )
            else:
                dz = lead * m * z ** (m - 1)
                out[near, 0] = dz
                out[near, 1] = 1j * dz
        return out

    return IncidentField(kappa=float(kappa), value=value, gradient=gradient,
                         kind="circular_mode", params={"m": m})


def sector_mode(m: int, ell: int, k: int) -> IncidentField:
    """Global smooth eigenmode w = J_m(alpha_k r) sin(m theta), kappa = alpha_k.

    Vanishes on every ray theta = j*pi/m, in particular on both legs of the
    sector of opening ell*pi/m; it has a zero of order m at the origin.
    """
    if not (isinstance(m, int) and m >= 2):
        raise ConfigurationError("sector mode needs integer m >= 2")
    if not (isinstance(ell, int) and 1 <= ell < 2 * m):
        raise ConfigurationError("sector mode needs 1 <= ell < 2m")
    alpha = specfun.bessel_j_zero(m, k)
    lead = (0.5 * alpha) ** m / math.factorial(m)

    def value(points):
        points, r, th = _polar(points)
        out = np.empty(points.shape[0], complex)
        near = r < _NEAR_ORIGIN
        far = ~near
        if np.any(far):
            out[far] = _bessel_vec(m, alpha * r[far]) * np.sin(m * th[far])
        if np.any(near):
            z = points[near, 0] + 1j * points[near, 1]
            out[near] = lead * (z**m).imag
        return out

    def gradient(points):
        points, r, th = _polar(points)
        out = np.empty((points.shape[0], 2), complex)
        near = r < _NEAR_ORIGIN
        far = ~near
        if np.any(far):
            rr, tt = r[far], th[far]
            du_dr = alpha * _bessel_prime_vec(m, alpha * rr) * np.sin(m * tt)
            du_dth = m * _bessel_vec(m, alpha * rr) * np.cos(m * tt)
            cos, sin = np.cos(tt), np.sin(tt)
            out[far, 0] = cos * du_dr - sin / rr * du_dth
            out[far, 1] = sin * du_dr + cos / rr * du_dth
        if np.any(near):
            z = points[near, 0] + 1j * points[near, 1]
            zm1 = z ** (m - 1)
            out[near, 0] = lead * m * zm1.imag
            out[near, 1] = lead * m * zm1.real
        return out

    return IncidentField(kappa=float(alpha), value=value, gradient=gradient,
                         kind="sector_mode",
                         params={"m": m, "ell": ell, "k": k, "alpha": alpha})


def harmonic_power(alpha: float) -> IncidentField:
    """w = Re(z^alpha) on the principal branch; kappa = 0 (diagnostics only).

    On the sector legs theta = +-pi/(2 alpha) the gradient magnitude is
    alpha r^(alpha-1). Evaluation on the branch cut (negative real axis)
    raises.
    """
    alpha = float(alpha)
    if alpha <= 0.5:
        raise ConfigurationError("harmonic power needs alpha > 1/2")

    def _z(points):
        points = np.atleast_2d(np.asarray(points, float))
        on_cut = (points[:, 1] == 0.0) & (points[:, 0] < 0.0)
        if np.any(on_cut):
            raise DomainEvaluationError(
                "harmonic power field evaluated on the branch cut (negative real axis)"
            )
        return points[:, 0] + 1j * points[:, 1]

    def value(points):
        z = _z(points)
        out = np.zeros(z.shape, complex)
        nz = z != 0
        out[nz] = np.exp(alpha * np.log(z[nz])).real
        return out

    def gradient(points):
        z = _z(points)
        out = np.zeros((z.shape[0], 2), complex)
        nz = z != 0
        dz = alpha * np.exp((alpha - 1.0) * np.log(z[nz]))
        out[nz, 0] = dz.real
        out[nz, 1] = -dz.imag
        if np.any(~nz):
            if alpha < 1.0:
                raise DomainEvaluationError(
                    "gradient of r^alpha blows up at the origin for alpha < 1"
                )
            if alpha == 1.0:
                out[~nz, 0] = 1.0
        return out

    return IncidentField(kappa=0.0, value=value, gradient=gradient,
                         kind="harmonic_power", params={"alpha": alpha})
