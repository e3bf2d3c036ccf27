"""Skeletal density affinity: kernel, boundary quadrature, grids and baselines."""

from .field import (
    AffinityField,
    CapacityError,
    GridSpec,
    affinity_at,
    affinity_field,
    affinity_many,
    dsl_affinity_at,
    dsl_field,
    field_for_solid,
    grid_for_solid,
    spatial_angle,
)
from .kernel import KernelParams, full_angle, g_sigma, phi_kernel, truncation_epsilon
from .oracle import Ball, affinity_1d_oracle, ball_gamma, ball_gamma_prime

__all__ = [
    "AffinityField", "Ball", "CapacityError", "GridSpec", "KernelParams",
    "affinity_1d_oracle", "affinity_at", "affinity_field", "affinity_many", "ball_gamma",
    "ball_gamma_prime", "dsl_affinity_at", "dsl_field", "field_for_solid", "full_angle",
    "g_sigma", "grid_for_solid", "phi_kernel", "spatial_angle", "truncation_epsilon",
]
