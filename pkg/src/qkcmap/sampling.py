"""Seeded random points inside safe boxes for each geometry.

Boxes
-----
* QK cases: ``rho in [0.3, 5]``, ``phi, zt_I, z_I in [-2, 2]``, ``|X| <= 0.8``.
* CASK / rigid c-map: ``-g_M(q, q) - c in [1.5, 3]`` so that ``f_Z >= 0.75``;
  the spacelike ``z_j`` in ``[-0.6, 0.6]``, fibre coordinates in ``[-1, 1]``.
"""

from __future__ import annotations

import numpy as np

from .geometries import CaskStructure, HKData, QkMetricCase

RHO_BOX = (0.3, 5.0)
FIBRE_BOX = 2.0
X_RADIUS = 0.8


def ball_points(k: int, count: int, rng: np.random.Generator, radius: float = X_RADIUS) -> np.ndarray:
    """Uniform points in the ball of complex dimension k (real dimension 2k)."""
    d = 2 * k
    if d == 0:
        return np.zeros((count, 0))
    v = rng.normal(size=(count, d))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / d)
    return v * r[:, None]


def qk_points(case: QkMetricCase, count: int, rng: np.random.Generator, rho: float | None = None) -> list[np.ndarray]:
    """Random in-domain points; fixing ``rho`` samples a rho-level set."""
    nb = case.x_block
    nf = case.dim - nb - 1
    X = ball_points(nb // 2, count, rng)
    rhos = rng.uniform(*RHO_BOX, size=count) if rho is None else np.full(count, float(rho))
    rest = rng.uniform(-FIBRE_BOX, FIBRE_BOX, size=(count, nf))
    return [np.concatenate([X[i], [rhos[i]], rest[i]]) for i in range(count)]


def cask_points(cask: CaskStructure, count: int, rng: np.random.Generator, shift: float = 0.0) -> list[np.ndarray]:
    """Points with -g_M(q, q) in [1.5 + shift, 3 + shift]."""
    out = []
    for _ in range(count):
        z = rng.uniform(-0.6, 0.6, size=2 * cask.k)
        s = rng.uniform(1.5, 3.0) + shift
        r0 = np.sqrt(s + float(z @ z))
        t = rng.uniform(0.0, 2.0 * np.pi)
        out.append(np.concatenate([[r0 * np.cos(t), r0 * np.sin(t)], z]))
    return out


def level_set_points(cask: CaskStructure, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Points on g_M(xi, xi) = -1."""
    return [q / np.sqrt(-cask.norm_xi(q)) for q in cask_points(cask, count, rng)]


def hk_points(hk: HKData, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    n = hk.base.dim
    qs = cask_points(hk.base, count, rng, shift=max(hk.c, 0.0))
    return [np.concatenate([q, rng.uniform(-1.0, 1.0, size=n)]) for q in qs]
