"""Ambient Riemannian models.

Curvature sign: R(X, Y)Z = (nabla_[X,Y] - [nabla_X, nabla_Y]) Z, so the Jacobi
operator K_xi(X) = R_{xi X} xi has eigenvalues +c on a space form of
curvature c.  In index form this is K_xi(X)^l = R^l_{ijk} X^i xi^j xi^k with
the usual R^l_{ijk} = d_i Gamma^l_jk - d_j Gamma^l_ik + ... .

Every model exposes the same small interface used by the geodesic/frame
integrator: an inner product at a point, the geodesic acceleration, the rate
of change of a parallel frame, and the Jacobi matrix of a velocity in a frame.
"""
from __future__ import annotations

from typing import Callable

import numpy as np

__all__ = [
    "GeometryError",
    "AmbientModel",
    "SpaceForm",
    "ChartMetric",
    "RankOneAdapted",
    "jacobi_operator",
    "covariant_jacobi",
    "geodesic_frame_step",
    "transport",
]

UNIT_TOL = 1e-8


class GeometryError(ValueError):
    pass


class AmbientModel:
    """Base class; subclasses supply the five geometric primitives."""

    dim: int  # dimension n+1 of the ambient manifold
    is_chart = False

    def gram(self, x) -> np.ndarray:
        raise NotImplementedError

    def inner(self, x, u, v) -> float:
        return float(np.asarray(u) @ self.gram(x) @ np.asarray(v))

    def acceleration(self, x, v) -> np.ndarray:
        raise NotImplementedError

    def frame_rate(self, x, v, frame) -> np.ndarray:
        raise NotImplementedError

    def jacobi_matrix(self, x, v, frame) -> np.ndarray:
        """Matrix of <K_v e_a, e_b> for the columns e_a of ``frame``."""
        raise NotImplementedError

    def covariant_jacobi_matrix(self, x, v, frame) -> np.ndarray:
        return _covariant_by_transport(self, x, v, frame)

    def excluded_direction(self, x):
        """Coordinate direction orthogonal to the tangent space (embedded models)."""
        return None

    def connection(self, x, u, w) -> np.ndarray:
        """Correction turning coordinate second derivatives into covariant ones."""
        return np.zeros_like(np.asarray(u, dtype=float))

    def tangent_frame(self, x) -> np.ndarray:
        """An orthonormal basis of T_x, as columns in coordinates."""
        x = np.asarray(x, dtype=float)
        return orthonormal_completion(self, x, np.zeros((x.size, 0)))


def orthonormal_completion(model: AmbientModel, x, vectors) -> np.ndarray:
    """Extend orthonormal columns ``vectors`` to an orthonormal basis of T_x."""
    G = model.gram(x)
    cols = [np.asarray(v, dtype=float) for v in np.asarray(vectors, dtype=float).T]
    skip = model.excluded_direction(x)
    if skip is not None:
        skip = np.asarray(skip, dtype=float)
        skip_norm = float(skip @ G @ skip)
    coords = G.shape[0]
    for k in range(coords):
        if len(cols) == model.dim:
            break
        w = np.zeros(coords)
        w[k] = 1.0
        if skip is not None:
            w = w - (skip @ G @ w) / skip_norm * skip
        for _ in range(2):
            for c in cols:
                w = w - (c @ G @ w) * c
        nrm2 = float(w @ G @ w)
        if nrm2 > 1e-10:
            cols.append(w / np.sqrt(nrm2))
    if len(cols) != model.dim:
        raise GeometryError("could not complete an orthonormal frame")
    return np.column_stack(cols)


def _check_unit(model, x, xi):
    nrm = model.inner(x, xi, xi)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise GeometryError(f"direction is not unit length (|xi|^2 = {nrm:.12g})")


def jacobi_operator(model: AmbientModel, x, xi, frame=None) -> np.ndarray:
    """(n+1)x(n+1) matrix of K_xi in an orthonormal frame (default: model frame)."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_unit(model, x, xi)
    frame = model.tangent_frame(x) if frame is None else np.asarray(frame, dtype=float)
    return model.jacobi_matrix(x, xi, frame)


def covariant_jacobi(model: AmbientModel, x, xi, frame=None) -> np.ndarray:
    """Matrix of (nabla_xi K)_xi in an orthonormal frame; odd in xi."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    _check_unit(model, x, xi)
    frame = model.tangent_frame(x) if frame is None else np.asarray(frame, dtype=float)
    return model.covariant_jacobi_matrix(x, xi, frame)


# ---------------------------------------------------------------------------
# geodesic + parallel frame integration


def _rates(model, x, v, frame):
    return v, model.acceleration(x, v), model.frame_rate(x, v, frame)


def geodesic_frame_step(model: AmbientModel, x, v, frame, h: float):
    """One classical RK4 step of (geodesic, parallel frame)."""
    k1 = _rates(model, x, v, frame)
    y2 = (x + 0.5 * h * k1[0], v + 0.5 * h * k1[1], frame + 0.5 * h * k1[2])
    k2 = _rates(model, *y2)
    y3 = (x + 0.5 * h * k2[0], v + 0.5 * h * k2[1], frame + 0.5 * h * k2[2])
    k3 = _rates(model, *y3)
    y4 = (x + h * k3[0], v + h * k3[1], frame + h * k3[2])
    k4 = _rates(model, *y4)
    out = []
    for y, a, b, c, d in zip((x, v, frame), k1, k2, k3, k4):
        out.append(y + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d))
    return tuple(out)


def transport(model: AmbientModel, x, v, frame, s: float, steps: int = 4):
    """Follow the geodesic through (x, v) for parameter s, carrying ``frame``."""
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    frame = np.asarray(frame, dtype=float)
    h = s / steps
    for _ in range(steps):
        x, v, frame = geodesic_frame_step(model, x, v, frame, h)
    return x, v, frame


def _covariant_by_transport(model, x, v, frame, delta: float = 2e-3, steps: int = 4):
    # derivative of K along the geodesic, read in a parallel frame
    xp, vp, fp = transport(model, x, v, frame, delta, steps)
    xm, vm, fm = transport(model, x, v, frame, -delta, steps)
    return (model.jacobi_matrix(xp, vp, fp) - model.jacobi_matrix(xm, vm, fm)) / (2.0 * delta)


# ---------------------------------------------------------------------------
# space forms


class SpaceForm(AmbientModel):
    """Simply connected space form of curvature c and dimension ``dim``.

    Points live in the standard model: the sphere of radius 1/sqrt(c) in
    R^{dim+1} (c > 0), R^dim (c = 0) or the hyperboloid <x,x> = 1/c in
    Minkowski space (c < 0).
    """

    def __init__(self, c: float, dim: int):
        if dim < 1:
            raise GeometryError("dimension must be positive")
        self.c = float(c)
        self.dim = int(dim)
        self.coords = self.dim + (0 if self.c == 0 else 1)
        self._gram = np.eye(self.coords)
        if self.c < 0:
            self._gram[0, 0] = -1.0

    def __repr__(self):
        return f"SpaceForm(c={self.c}, dim={self.dim})"

    def base_point(self) -> np.ndarray:
        x = np.zeros(self.coords)
        if self.c != 0:
            x[0] = 1.0 / np.sqrt(abs(self.c))
        return x

    def gram(self, x):
        return self._gram

    def excluded_direction(self, x):
        return None if self.c == 0 else np.asarray(x, dtype=float)

    def acceleration(self, x, v):
        if self.c == 0:
            return np.zeros_like(v)
        return -self.c * float(v @ self._gram @ v) * x

    def frame_rate(self, x, v, frame):
        if self.c == 0:
            return np.zeros_like(frame)
        return -self.c * np.outer(x, v @ self._gram @ frame)

    def jacobi_matrix(self, x, v, frame):
        G = self._gram
        vf = frame.T @ G @ v
        gram_f = frame.T @ G @ frame
        return self.c * (float(v @ G @ v) * gram_f - np.outer(vf, vf))

    def covariant_jacobi_matrix(self, x, v, frame):
        k = frame.shape[1]
        return np.zeros((k, k))


# ---------------------------------------------------------------------------
# chart metrics


class ChartMetric(AmbientModel):
    """Metric g(x) on an open set of R^dim; curvature by central differences."""

    is_chart = True

    def __init__(self, metric: Callable, dim: int, h: float = 1e-4, name: str = "chart"):
        self.metric = metric
        self.dim = int(dim)
        self.coords = self.dim
        self.h = float(h)
        self.name = name

    def __repr__(self):
        return f"ChartMetric({self.name}, dim={self.dim}, h={self.h})"

    def gram(self, x):
        g = np.asarray(self.metric(np.asarray(x, dtype=float)), dtype=float)
        if g.shape != (self.dim, self.dim):
            raise GeometryError(f"metric returned shape {g.shape}")
        return g

    def _inverse(self, g):
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise GeometryError("metric is not positive definite") from None
        return np.linalg.inv(g)

    def metric_derivatives(self, x) -> np.ndarray:
        """dg[k, i, j] = d_k g_ij."""
        x = np.asarray(x, dtype=float)
        out = np.empty((self.dim, self.dim, self.dim))
        for k in range(self.dim):
            e = np.zeros(self.dim)
            e[k] = self.h
            out[k] = (self.gram(x + e) - self.gram(x - e)) / (2.0 * self.h)
        return out

    def christoffel(self, x) -> np.ndarray:
        """Gamma[l, i, j] = Gamma^l_ij."""
        g = self.gram(x)
        ginv = self._inverse(g)
        dg = self.metric_derivatives(x)
        # lowered symbol Gamma_{m i j} = (d_i g_jm + d_j g_im - d_m g_ij) / 2
        low = 0.5 * (np.transpose(dg, (2, 0, 1)) + np.transpose(dg, (2, 1, 0)) - dg)
        return np.einsum("lm,mij->lij", ginv, low)

    def riemann(self, x) -> np.ndarray:
        """R[l, i, j, k] with R(d_i, d_j) d_k = R^l_ijk d_l in the usual convention."""
        x = np.asarray(x, dtype=float)
        gam = self.christoffel(x)
        dgam = np.empty((self.dim,) + gam.shape)  # dgam[i, l, j, k] = d_i Gamma^l_jk
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = self.h
            dgam[i] = (self.christoffel(x + e) - self.christoffel(x - e)) / (2.0 * self.h)
        deriv = np.einsum("iljk->lijk", dgam) - np.einsum("jlik->lijk", dgam)
        quad = np.einsum("lim,mjk->lijk", gam, gam) - np.einsum("ljm,mik->lijk", gam, gam)
        return deriv + quad

    def connection(self, x, u, w):
        return np.einsum("lij,i,j->l", self.christoffel(x), u, w)

    def acceleration(self, x, v):
        return -np.einsum("lij,i,j->l", self.christoffel(x), v, v)

    def frame_rate(self, x, v, frame):
        return -np.einsum("lij,i,ja->la", self.christoffel(x), v, frame)

    def jacobi_matrix(self, x, v, frame):
        R = self.riemann(x)
        images = np.einsum("lijk,ia,j,k->la", R, frame, v, v)
        return frame.T @ self.gram(x) @ images

    def tangent_frame(self, x):
        g = self.gram(x)
        try:
            L = np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise GeometryError("metric is not positive definite") from None
        return np.linalg.inv(L).T


# ---------------------------------------------------------------------------
# rank-one adapted (hypersurface-only)


class RankOneAdapted(AmbientModel):
    """Curvature-adapted hypersurface model with Jacobi eigenvalues in {c, 4c}.

    Only the scalar data is modelled: ``multiplicities`` gives how many
    principal directions carry the Jacobi eigenvalue c and 4c respectively.
    """

    def __init__(self, c: float, multiplicities):
        self.c = float(c)
        m1, m2 = (int(k) for k in multiplicities)
        if m1 < 0 or m2 < 0 or m1 + m2 < 1:
            raise GeometryError("multiplicities must be non-negative with positive sum")
        self.multiplicities = (m1, m2)
        self.dim = m1 + m2 + 1

    def __repr__(self):
        return f"RankOneAdapted(c={self.c}, multiplicities={self.multiplicities})"

    @property
    def kappas(self) -> list[float]:
        m1, m2 = self.multiplicities
        return [self.c] * m1 + [4.0 * self.c] * m2

    @property
    def classes(self) -> dict[float, int]:
        m1, m2 = self.multiplicities
        out = {}
        if m1:
            out[self.c] = m1
        if m2:
            out[4.0 * self.c] = out.get(4.0 * self.c, 0) + m2
        return out

    def gram(self, x):
        return np.eye(self.dim)

    def jacobi_matrix(self, x, v, frame):
        # adapted frame: e_1..e_n principal directions, last column the normal
        k = frame.shape[1]
        diag = np.zeros(k)
        diag[: len(self.kappas)] = self.kappas
        return np.diag(diag)

    def covariant_jacobi_matrix(self, x, v, frame):
        k = frame.shape[1]
        return np.zeros((k, k))
