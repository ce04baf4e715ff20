"""Weighted consensus point and pairwise interaction forces."""

from collections.abc import Callable

import numpy as np

from ..errors import DimensionMismatch

# Shifted exponents below this flush the weight to exactly zero
UNDERFLOW_EXPONENT = -700.0


def consensus(positions, f_values, alpha: float) -> np.ndarray:
    """Softmax-weighted mean of the particle positions.

    Weights are ``exp(-alpha * (f - min f))``, so the best particle always
    carries weight 1 and the denominator cannot vanish for any finite alpha.

    Args:
        positions: (N, d) particle positions
        f_values: (N,) objective values, all finite
        alpha: Inverse temperature, nonnegative

    Returns:
        The (d,) consensus point, inside the coordinate-wise hull of the rows

    Raises:
        DimensionMismatch: If the number of values differs from N
        ValueError: If the ensemble is empty or a value is not finite
    """
    positions = np.asarray(positions, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    if positions.ndim != 2 or positions.shape[0] < 1:
        raise ValueError("positions must be an (N, d) array with N >= 1")
    if f_values.shape != (positions.shape[0],):
        raise DimensionMismatch(
            f"expected {positions.shape[0]} objective values, got shape {f_values.shape}"
        )
    if not np.all(np.isfinite(f_values)):
        raise ValueError("f_values must be finite")

    exponent = -alpha * (f_values - f_values.min())
    weights = np.where(exponent < UNDERFLOW_EXPONENT, 0.0, np.exp(exponent))
    point = weights @ positions / weights.sum()
    # rounding may leave the hull by an ulp
    return np.clip(point, positions.min(axis=0), positions.max(axis=0))


def repelling_forces(positions, lambda_t: float) -> np.ndarray:
    """Gaussian-kernel repulsion (λ/N) Σⱼ (xⁱ − xʲ) exp(−|xⁱ − xʲ|²/2) for every particle."""
    positions = np.asarray(positions, dtype=float)
    if lambda_t == 0:
        return np.zeros_like(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    kernel = np.exp(-0.5 * np.sum(diff**2, axis=-1))
    return lambda_t / len(positions) * np.einsum("ij,ijk->ik", kernel, diff)


def repelling_force(positions, i: int, lambda_t: float) -> np.ndarray:
    """Repelling force acting on particle ``i`` alone."""
    positions = np.asarray(positions, dtype=float)
    if not 0 <= i < len(positions):
        raise IndexError(f"particle index {i} out of range for {len(positions)} particles")
    diff = positions[i] - positions
    kernel = np.exp(-0.5 * np.sum(diff**2, axis=-1))
    return lambda_t / len(positions) * (kernel @ diff)


def interaction_drift(
    positions, grad_V: Callable[[np.ndarray], np.ndarray]
) -> np.ndarray:
    """Empirical convolution −(1/N) Σⱼ ∇V(xⁱ − xʲ) for every particle."""
    positions = np.asarray(positions, dtype=float)
    diff = positions[:, None, :] - positions[None, :, :]
    return -np.mean(grad_V(diff), axis=1)
