"""Submanifold charts and the second-order data at a (point, unit normal) pair."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import norm, qmc

from ..trace_algebra import BLOCK_LETTERS
from .ambient import AmbientModel, GeometryError, orthonormal_completion

__all__ = [
    "SubmanifoldChart",
    "SecondOrderData",
    "NormalFrame",
    "split_operators",
    "reassemble",
    "normal_basis",
    "assemble_A",
    "block_assignment",
    "adapted_frame",
    "second_order_data",
    "sample_normal_bundle",
]

SYM_TOL = 1e-10


@dataclass
class SubmanifoldChart:
    """Parametrisation u in R^m -> coordinates of the ambient model."""

    m: int
    point: Callable
    jacobian: Callable
    hessian: Callable
    domain: Sequence[tuple[float, float]] = ()
    name: str = "submanifold"

    def __post_init__(self):
        if len(self.domain) != self.m:
            raise GeometryError(f"domain has {len(self.domain)} intervals for m={self.m}")

    @classmethod
    def from_expressions(cls, exprs: Sequence[str], m: int, domain, name="chart submanifold"):
        """Build from sympy-parsable expressions in u0, u1, ...; derivatives are symbolic."""
        import sympy as sp

        us = sp.symbols(f"u0:{m}") if m else ()
        try:
            fs = [sp.sympify(e, locals={str(u): u for u in us}) for e in exprs]
        except (sp.SympifyError, TypeError, SyntaxError) as exc:
            raise GeometryError(f"cannot parse chart expression: {exc}") from None
        extra = set().union(*(f.free_symbols for f in fs)) - set(us)
        if extra:
            raise GeometryError(f"unknown symbols in chart: {sorted(map(str, extra))}")
        jac = [[sp.diff(f, u) for u in us] for f in fs]
        hes = [[[sp.diff(f, u, w) for w in us] for u in us] for f in fs]
        f_point = sp.lambdify([us], fs, "numpy")
        f_jac = sp.lambdify([us], jac, "numpy")
        f_hes = sp.lambdify([us], hes, "numpy")
        size = len(fs)

        def point(u):
            return np.asarray(f_point(list(u)), dtype=float).reshape(size)

        def jacobian(u):
            return np.asarray(f_jac(list(u)), dtype=float).reshape(size, m)

        def hessian(u):
            return np.asarray(f_hes(list(u)), dtype=float).reshape(size, m, m)

        return cls(m, point, jacobian, hessian, tuple(tuple(d) for d in domain), name)

    @classmethod
    def single_point(cls, x, name="point"):
        x = np.asarray(x, dtype=float)
        return cls(0, lambda u: x.copy(), lambda u: np.zeros((x.size, 0)),
                   lambda u: np.zeros((x.size, 0, 0)), (), name)


def _check_symmetric(name, X):
    X = np.asarray(X, dtype=float)
    scale = max(1.0, float(np.linalg.norm(X)))
    if X.size and np.linalg.norm(X - X.T) > SYM_TOL * scale * 1e3:
        raise GeometryError(f"{name} is not symmetric")
    return X


@dataclass
class SecondOrderData:
    """Blocks of the shape, Jacobi and covariant Jacobi operators at one (p, nu)."""

    m: int
    n: int
    S_nu: np.ndarray
    K_top: np.ndarray
    K_bot: np.ndarray
    B: np.ndarray
    CK_top: np.ndarray
    CK_bot: np.ndarray
    CB: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        m, k = self.m, self.n - self.m
        if m < 0 or k < 0:
            raise GeometryError("need 0 <= m <= n")
        shapes = {
            "S_nu": (m, m), "K_top": (m, m), "CK_top": (m, m),
            "K_bot": (k, k), "CK_bot": (k, k), "B": (m, k), "CB": (m, k),
        }
        for name, shape in shapes.items():
            val = np.asarray(getattr(self, name), dtype=float).reshape(shape) if np.size(
                getattr(self, name)) == shape[0] * shape[1] else None
            if val is None:
                raise GeometryError(f"{name} must have shape {shape}")
            setattr(self, name, val)
        for name in ("S_nu", "K_top", "K_bot", "CK_top", "CK_bot"):
            _check_symmetric(name, getattr(self, name))

    def negated(self) -> "SecondOrderData":
        """Data of the opposite normal predicted by the parity rules."""
        return SecondOrderData(self.m, self.n, -self.S_nu, self.K_top, self.K_bot, self.B,
                               -self.CK_top, -self.CK_bot, -self.CB, dict(self.meta))

    def assignment(self) -> dict:
        return block_assignment(self)

    @classmethod
    def random(cls, rng: np.random.Generator, m: int, n: int, scale: float = 1.0):
        k = n - m

        def sym(d):
            X = rng.normal(scale=scale, size=(d, d))
            return (X + X.T) / 2.0

        return cls(m, n, sym(m), sym(m), sym(k), rng.normal(scale=scale, size=(m, k)),
                   sym(m), sym(k), rng.normal(scale=scale, size=(m, k)))


def block_assignment(data: SecondOrderData) -> dict:
    """Letter name -> matrix, plus integer keys 0..3 for A_0..A_3."""
    out = {
        "I_T": np.eye(data.m),
        "I_N": np.eye(data.n - data.m),
        "S": data.S_nu,
        "K_top": data.K_top,
        "CK_top": data.CK_top,
        "K_bot": data.K_bot,
        "CK_bot": data.CK_bot,
        "B": data.B,
        "Bt": data.B.T,
        "CB": data.CB,
        "CBt": data.CB.T,
    }
    assert set(out) == set(BLOCK_LETTERS)
    for r, A in enumerate(assemble_A(data)):
        out[r] = A
    return out


def assemble_A(data: SecondOrderData) -> list[np.ndarray]:
    """The n x n expansion matrices A_0..A_3."""
    m, k = data.m, data.n - data.m
    S, Kt, Kb, B = data.S_nu, data.K_top, data.K_bot, data.B
    Ct, Cb, CB = data.CK_top, data.CK_bot, data.CB
    zt, zn, zo = np.zeros((m, m)), np.zeros((k, k)), np.zeros((m, k))
    A0 = np.block([[zt, zo], [zo.T, np.eye(k)]])
    A1 = np.block([[S, zo], [zo.T, zn]])
    A2 = np.block([[S @ S + Kt, B], [B.T / 3.0, Kb / 3.0]])
    A3 = np.block([
        [Ct / 2.0 + S @ S @ S + Kt @ S, CB / 2.0],
        [CB.T / 4.0 + B.T @ S / 3.0, Cb / 4.0],
    ])
    return [A0, A1, A2, A3]


def split_operators(K, tangent_basis, normal_basis, nu=None, tol: float = 1e-8):
    """Split a symmetric operator into (top, restricted bottom, off-diagonal) blocks.

    ``K`` is a matrix in an orthonormal frame; the bases are columns of
    components in that frame and the last normal column is nu (or ``nu``
    is given separately and appended).
    """
    K = np.asarray(K, dtype=float)
    T = np.asarray(tangent_basis, dtype=float).reshape(K.shape[0], -1)
    N = np.asarray(normal_basis, dtype=float).reshape(K.shape[0], -1)
    if nu is not None:
        N = np.column_stack([N, np.asarray(nu, dtype=float)])
    Q = np.column_stack([T, N])
    if Q.shape[1] != K.shape[0] or not np.allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=tol):
        raise GeometryError("tangent and normal bases must form an orthonormal frame")
    N = N[:, :-1]  # drop nu
    return T.T @ K @ T, N.T @ K @ N, T.T @ K @ N


def reassemble(top, bottom, off, tangent_basis, normal_basis):
    """Inverse of ``split_operators`` for operators that kill nu."""
    T = np.asarray(tangent_basis, dtype=float)
    N = np.asarray(normal_basis, dtype=float)
    m, k = top.shape[0], bottom.shape[0]
    M = np.zeros((m + k + 1, m + k + 1))
    M[:m, :m] = top
    M[m:m + k, m:m + k] = bottom
    M[:m, m:m + k] = off
    M[m:m + k, :m] = off.T
    Q = np.column_stack([T, N])
    return Q @ M @ Q.T


@dataclass
class NormalFrame:
    """Orthonormal frame at p adapted to (T_pM, other normals, nu), in coordinates."""

    x: np.ndarray
    tangent: np.ndarray
    others: np.ndarray
    nu: np.ndarray
    chart_coeffs: np.ndarray  # tangent = jacobian @ chart_coeffs

    @property
    def full(self) -> np.ndarray:
        return np.column_stack([self.tangent, self.others, self.nu])

    @property
    def fiber(self) -> np.ndarray:
        """Frame of nu-perp (the tube tangent space at t = 0)."""
        return np.column_stack([self.tangent, self.others])


def _tangent_frame(model, x, J):
    G = model.gram(x)
    m = J.shape[1]
    if m == 0:
        return np.zeros((x.size, 0)), np.zeros((0, 0))
    induced = J.T @ G @ J
    try:
        L = np.linalg.cholesky(induced)
    except np.linalg.LinAlgError:
        raise GeometryError("parametrisation is not an immersion here") from None
    C = np.linalg.inv(L).T
    return J @ C, C


def normal_basis(model: AmbientModel, x, tangent) -> np.ndarray:
    """Orthonormal normal vectors; a single normal is oriented by the chart."""
    full = orthonormal_completion(model, x, tangent)
    N = full[:, tangent.shape[1]:]
    if N.shape[1] == 1:
        skip = model.excluded_direction(x)
        cols = ([np.asarray(skip, dtype=float)] if skip is not None else []) + [tangent, N]
        M = np.column_stack(cols)
        if M.shape[0] == M.shape[1] and np.linalg.det(M) < 0:
            N = -N
    return N


def adapted_frame(model: AmbientModel, sub: SubmanifoldChart, u, w) -> NormalFrame:
    """Frame at sub(u) whose last vector is nu = sum_j w_j (normal basis)_j."""
    u = np.asarray(u, dtype=float)
    x = sub.point(u)
    T, C = _tangent_frame(model, x, sub.jacobian(u))
    Nb = normal_basis(model, x, T)
    w = np.asarray(w, dtype=float)
    if w.size != Nb.shape[1]:
        raise GeometryError(f"normal coefficients have size {w.size}, expected {Nb.shape[1]}")
    w = w / np.linalg.norm(w)
    P = np.eye(w.size) - np.outer(w, w)
    vals, vecs = np.linalg.eigh(P)
    others = Nb @ vecs[:, vals > 0.5]
    return NormalFrame(x, T, others, Nb @ w, C)


def second_order_data(model: AmbientModel, sub: SubmanifoldChart, u, w,
                      covariant: bool = True) -> tuple[SecondOrderData, NormalFrame]:
    """SecondOrderData at (sub(u), nu) where nu has coefficients w in the normal basis."""
    fr = adapted_frame(model, sub, u, w)
    x, nu = fr.x, fr.nu
    m = sub.m
    n = model.dim - 1
    G = model.gram(x)
    J = sub.jacobian(np.asarray(u, dtype=float))
    H = sub.hessian(np.asarray(u, dtype=float))
    h = np.empty((m, m))
    for a in range(m):
        for b in range(m):
            cov = H[:, a, b] + model.connection(x, J[:, a], J[:, b])
            h[a, b] = cov @ G @ nu
    S = fr.chart_coeffs.T @ h @ fr.chart_coeffs if m else np.zeros((0, 0))
    S = (S + S.T) / 2.0
    frame = fr.full
    K = model.jacobi_matrix(x, nu, frame)
    CK = model.covariant_jacobi_matrix(x, nu, frame) if covariant else np.zeros_like(K)
    K = (K + K.T) / 2.0
    CK = (CK + CK.T) / 2.0
    eye = np.eye(n + 1)
    Tc, Nc = eye[:, :m], eye[:, m:]
    Kt, Kb, B = split_operators(K, Tc, Nc)
    Ct, Cb, CB = split_operators(CK, Tc, Nc)
    meta = {"K_nu_residual": float(np.abs(K[:, -1]).max()), "point": x, "nu": nu}
    return SecondOrderData(m, n, S, Kt, Kb, B, Ct, Cb, CB, meta), fr


def sample_normal_bundle(sub: SubmanifoldChart, fiber_dim: int, count: int, seed: int = 0):
    """Deterministic low-discrepancy samples (u, w) of the unit normal bundle.

    ``fiber_dim`` is the dimension of the normal space; w lies on its unit
    sphere.  For a one-dimensional normal space the two signs alternate.
    """
    d = sub.m + fiber_dim
    sampler = qmc.Halton(d=max(d, 1), scramble=True, seed=seed)
    pts = sampler.random(count)
    out = []
    for j, row in enumerate(pts):
        u = np.array([lo + (hi - lo) * row[a] for a, (lo, hi) in enumerate(sub.domain)])
        if fiber_dim == 1:
            w = np.array([1.0 if j % 2 == 0 else -1.0])
        else:
            z = norm.ppf(np.clip(row[sub.m:sub.m + fiber_dim], 1e-12, 1 - 1e-12))
            nz = np.linalg.norm(z)
            w = z / nz if nz > 1e-12 else np.eye(fiber_dim)[0]
        out.append((u, w))
    return out
