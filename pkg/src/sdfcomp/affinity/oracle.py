"""Closed-form spatial-angle densities for balls, used to check the mesh quadrature.

For a query on a radial line of a circle or sphere the spatial angle of the
contact region has an analytic derivative ``gamma'(r)`` in the distance ratio
``r = eta / |xi|``, so the affinity collapses to a 1D integral in ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from ._quad import INV_SQRT_2PI
from .kernel import KernelParams, full_angle


@dataclass(frozen=True)
class Ball:
    """A circle (dim 2) or sphere (dim 3) of the given radius."""

    radius: float
    dim: int = 3

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError("Ball dimension must be 2 or 3")
        if not self.radius > 0:
            raise ValueError("radius must be positive")


def ball_gamma_prime(r, xi, ball: Ball):
    """Spatial-angle density d gamma / dr for a query at signed distance xi.

    In 2D the density carries inverse square-root singularities at both ends
    of its support; this returns the full value (infinite at the endpoints).
    """
    R = ball.radius
    c = R + xi
    a = abs(xi)
    b = (c + R) / a
    if not 1.0 <= r <= b:
        return 0.0
    num = c * c - R * R - (r * a) ** 2
    if ball.dim == 3:
        return math.pi * num / (c * r * r * a)
    return 2.0 * num / (r * a * a * math.sqrt((r + 1) * (b + r) * (r - 1) * (b - r)))


def _kernel_r2(s, r, lam, sigma):
    g = INV_SQRT_2PI / sigma * math.exp(-0.5 * ((r - 1.0) / sigma) ** 2)
    return lam * INV_SQRT_2PI * g * r * r / complex(s, r) ** 2


def affinity_1d_oracle(xi: float, shape: Ball, params: KernelParams) -> complex:
    """Affinity at signed distance ``xi`` from a ball, by 1D adaptive quadrature.

    The query lies at distance ``R + xi`` from the center.  At the center all
    of the boundary sits at ``r = 1`` and the spatial-angle density is a point
    mass of weight minus the full angle; that case is evaluated exactly.

    Raises
    ------
    ValueError
        If ``shape`` is not a :class:`Ball` or the query is outside its radial line.
    """
    if not isinstance(shape, Ball):
        raise ValueError(f"no closed-form spatial angle for {type(shape).__name__}")
    R = shape.radius
    c = R + xi
    if c < 0:
        raise ValueError("xi below -radius does not lie on a radial line")
    if xi == 0:
        return 0j
    s = 1.0 if xi > 0 else -1.0
    lam = params.lambda1 if xi > 0 else -params.lambda2
    sigma = params.sigma
    if c == 0.0:
        return _kernel_r2(s, 1.0, lam, sigma) * -full_angle(shape.dim)

    a = abs(xi)
    b = (c + R) / a
    upper = b if params.eps <= 0 else min(b, 1.0 + params.eps)
    # past 40 sigma the Gaussian underflows; keeps quad from missing the peak when b is huge
    upper = min(upper, 1.0 + 40.0 * sigma)

    if shape.dim == 3:
        def f(r):
            return ball_gamma_prime(r, xi, shape) * _kernel_r2(s, r, lam, sigma)
        opts = dict(limit=400, epsabs=0.0, epsrel=1e-11)
        re = integrate.quad(lambda r: f(r).real, 1.0, upper, **opts)[0]
        im = integrate.quad(lambda r: f(r).imag, 1.0, upper, **opts)[0]
        return complex(re, im)

    # 2D: pull the endpoint singularities into an algebraic quadrature weight
    num0 = c * c - R * R
    beta = -0.5 if upper == b else 0.0

    def smooth(r):
        core = 2.0 * (num0 - (r * a) ** 2) / (r * a * a * math.sqrt((r + 1) * (b + r)))
        if beta == 0.0:
            core /= math.sqrt(b - r)
        return core * _kernel_r2(s, r, lam, sigma)

    opts = dict(weight="alg", wvar=(-0.5, beta), limit=400, epsabs=0.0, epsrel=1e-11)
    re = integrate.quad(lambda r: smooth(r).real, 1.0, upper, **opts)[0]
    im = integrate.quad(lambda r: smooth(r).imag, 1.0, upper, **opts)[0]
    return complex(re, im)


def ball_gamma(eps: float, xi: float, shape: Ball) -> float:
    """Signed spatial angle of the eps-contact region of a ball (1D integral of gamma')."""
    R = shape.radius
    c = R + xi
    if c == 0.0:
        return -full_angle(shape.dim)
    a = abs(xi)
    b = (c + R) / a
    upper = min(b, 1.0 + eps)
    if shape.dim == 3:
        return integrate.quad(lambda r: ball_gamma_prime(r, xi, shape), 1.0, upper,
                              epsabs=0.0, epsrel=1e-11, limit=400)[0]
    beta = -0.5 if upper == b else 0.0

    def smooth(r):
        core = 2.0 * (c * c - R * R - (r * a) ** 2) / (r * a * a * math.sqrt((r + 1) * (b + r)))
        return core / math.sqrt(b - r) if beta == 0.0 else core

    return integrate.quad(smooth, 1.0, upper, weight="alg", wvar=(-0.5, beta),
                          epsabs=0.0, epsrel=1e-11, limit=400)[0]
