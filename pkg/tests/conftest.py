import numpy as np
import pytest

from krein.geometry import (
    HyperboloidPoint,
    PoincarePoint,
    SpdPoint,
    SpherePoint,
    TorusPoint,
    hyperboloid_boost,
    poincare_to_hyperboloid,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_poincare(rng, n, dim=2, radius=0.9):
    out = []
    while len(out) < n:
        p = rng.uniform(-radius, radius, dim)
        if np.linalg.norm(p) < radius:
            out.append(PoincarePoint(p))
    return out


def random_hyperboloid(rng, n, dim=2, radius=0.9):
    return [poincare_to_hyperboloid(p) for p in random_poincare(rng, n, dim, radius)]


def random_sphere(rng, n, ambient=3):
    vecs = rng.normal(size=(n, ambient))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return [SpherePoint(v) for v in vecs]


def random_spd(rng, size):
    base = rng.normal(size=(size, size))
    return SpdPoint(base @ base.T + size * np.eye(size))


def random_torus(rng, n, dim=1):
    return [TorusPoint(rng.uniform(0.0, 2.0 * np.pi, dim)) for _ in range(n)]


def random_minkowski_isometry(rng, dim=2):
    """Random orthochronous Minkowski isometry: rotation, boost, rotation."""

    def rotation():
        theta = rng.uniform(0.0, 2.0 * np.pi)
        out = np.eye(dim + 1)
        out[1, 1] = out[2, 2] = np.cos(theta)
        out[1, 2] = -np.sin(theta)
        out[2, 1] = np.sin(theta)
        return out

    center = random_hyperboloid(rng, 1, dim)[0]
    return rotation() @ hyperboloid_boost(center) @ rotation()


def apply_isometry(mat, point):
    return HyperboloidPoint(mat @ point.coords)
