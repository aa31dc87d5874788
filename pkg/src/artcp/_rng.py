"""Counter-based random streams for reproducible, order-independent sampling.

Every random draw in the package comes from a Philox stream addressed by a
(seed, tag, index) triple. Streams are independent by construction, so results
never depend on call order, evaluation order, or the number of worker threads.
Normal variates use Box-Muller on the stream's uniforms, which keeps generated
datasets bit-identical across platforms and numpy builds.
"""

from __future__ import annotations

import numpy as np

# Stream tags. Each consumer owns a tag so independent draws never collide.
TAG_PERMUTATION = 1
TAG_TIEBREAK_U = 2
TAG_JITTER = 3
TAG_NOISE = 4
TAG_SUPPORT = 5
TAG_COVARIATE = 6

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1


def stream(seed: int, tag: int, index: int = 0) -> np.random.Generator:
    """Return the Philox stream addressed by (seed, tag, index)."""
    key = np.array(
        [seed & _MASK64, ((tag & _MASK32) << 32) | (index & _MASK32)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
    """Draw standard normals via Box-Muller over counter-based uniforms."""
    shape = (size,) if isinstance(size, int) else tuple(size)
    m = int(np.prod(shape)) if shape else 1
    pairs = (m + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1], log is finite
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:m]
    return z.reshape(shape)


def truncated_standard_normal(
    rng: np.random.Generator, size: int | tuple[int, ...], bound: float = 6.0
) -> np.ndarray:
    """Standard normals with |z| <= bound enforced by redraw."""
    z = standard_normal(rng, size)
    flat = z.reshape(-1)
    bad = np.abs(flat) > bound
    while bad.any():
        flat[bad] = standard_normal(rng, int(bad.sum()))
        bad = np.abs(flat) > bound
    return flat.reshape(z.shape)


def student_t3(rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
    """t(3) variates via the normal / chi-square ratio construction."""
    shape = (size,) if isinstance(size, int) else tuple(size)
    m = int(np.prod(shape)) if shape else 1
    z = standard_normal(rng, (4, m))
    chi2 = z[1] ** 2 + z[2] ** 2 + z[3] ** 2
    return (z[0] / np.sqrt(chi2 / 3.0)).reshape(shape)
