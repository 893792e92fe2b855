"""Synthetic data with planted structure, for tests and demonstrations."""

from __future__ import annotations

import numpy as np

from .datasets import BinaryDataset


def gaussian_blobs(sizes, d: int, seed: int, separation: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    """Isotropic unit-variance blobs whose centers lie ``separation * sqrt(2)`` from the origin.

    Returns ``(X, labels)`` with labels ``0..len(sizes)-1`` in blob order.
    """
    rng = np.random.default_rng(seed)
    X, y = [], []
    for label, size in enumerate(sizes):
        center = rng.normal(size=d)
        center *= separation * np.sqrt(2) / np.linalg.norm(center)
        X.append(center + rng.normal(size=(size, d)))
        y.extend([label] * size)
    return np.vstack(X), np.array(y)


def ar1_noise(rng: np.random.Generator, n: int, d: int, rho: float = 0.9, sigma: float = 1.0) -> np.ndarray:
    """Stationary AR(1) paths with marginal standard deviation ``sigma``."""
    innov = rng.normal(size=(n, d)) * sigma * np.sqrt(1 - rho**2)
    x = np.empty((n, d))
    x[:, 0] = rng.normal(size=n) * sigma
    for t in range(1, d):
        x[:, t] = rho * x[:, t - 1] + innov[:, t]
    return x


def planted_modes(
    seed: int,
    d: int = 100,
    n_min: int = 30,
    n_maj: int = 300,
    n_min_test: int = 60,
    n_maj_test: int = 600,
    sigma: float = 0.5,
    shift: float = 0.6,
    rho: float = 0.9,
) -> tuple[BinaryDataset, BinaryDataset]:
    """Imbalanced train/test pair whose minority class has three modes.

    Minority modes are sinusoids of frequency 1, 2, 3; each majority mode is
    a minority shape plus a cosine perturbation of amplitude ``shift``, with
    one extra flat majority mode. All series carry AR(1) noise.
    """
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, d)
    mino = [np.sin(2 * np.pi * f * t + phase) for f, phase in [(1, 0.0), (2, 1.0), (3, 2.0)]]
    majo = [m + shift * np.cos(2 * np.pi * (j + 1) * t) for j, m in enumerate(mino)] + [np.zeros(d)]

    def draw(templates, n):
        base = np.array([templates[i % len(templates)] for i in range(n)])
        return base + ar1_noise(rng, n, d, rho, sigma)

    train = BinaryDataset(draw(mino, n_min), draw(majo, n_maj), ("1",), f"planted-{seed}")
    test = BinaryDataset(draw(mino, n_min_test), draw(majo, n_maj_test), ("1",), f"planted-{seed}")
    return train, test
