"""Riccati flows for tube shape operators, Taylor fits, cascade and reconstruction."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from ..trace_algebra import newton_convert
from .ambient import AmbientModel, GeometryError, RankOneAdapted, SpaceForm, transport
from .submanifold import SubmanifoldChart, adapted_frame, assemble_A, second_order_data

__all__ = [
    "BlowUpError",
    "IntegrationError",
    "riccati_scalar_flow",
    "scalar_pole",
    "TubeSample",
    "FlowSettings",
    "tube_flow",
    "tube_shape",
    "taylor_fit_invariants",
    "TaylorFit",
    "CascadeState",
    "cascade_step",
    "Reconstruction",
    "reconstruct_principal_curvatures",
]

BLOWUP_NORM = 1e6


class BlowUpError(GeometryError):
    def __init__(self, message: str, radius: float):
        super().__init__(message)
        self.radius = radius


class IntegrationError(GeometryError):
    pass


# ---------------------------------------------------------------------------
# scalar flow mu' = mu^2 + kappa


def scalar_pole(mu0: float, kappa: float, t0: float, t1: float):
    """First pole of the closed-form solution strictly after t0 towards t1, or None."""
    if t1 == t0:
        return None
    direction = 1.0 if t1 > t0 else -1.0
    if kappa > 0:
        s = math.sqrt(kappa)
        phase0 = -math.pi / 2 if mu0 == -math.inf else math.atan(mu0 / s)
        if direction > 0:
            target = math.pi / 2
        else:
            if mu0 == -math.inf:
                return t0  # singular start: only forward flow is defined
            target = -math.pi / 2
        pole = t0 + (target - phase0) / s
    elif kappa == 0:
        if mu0 == -math.inf:
            return None if direction > 0 else t0
        if mu0 == 0:
            return None
        pole = t0 + 1.0 / mu0
    else:
        s = math.sqrt(-kappa)
        if mu0 == -math.inf:
            return None if direction > 0 else t0
        if abs(mu0) <= s:
            return None
        pole = t0 - _arcoth(-mu0 / s) / s
    if (pole - t0) * direction <= 0:
        return None
    lo, hi = min(t0, t1), max(t0, t1)
    return pole if lo < pole <= hi else None


def _arcoth(x):
    return 0.5 * math.log((x + 1.0) / (x - 1.0))


def riccati_scalar_flow(mu0: float, kappa: float, t0: float, t1: float) -> float:
    """Solution at t1 of mu' = mu^2 + kappa with mu(t0) = mu0.

    ``mu0 = -inf`` selects the singular branch that behaves like -1/(t - t0).
    Raises BlowUpError when a pole lies in (t0, t1].
    """
    mu0 = float(mu0)
    kappa = float(kappa)
    pole = scalar_pole(mu0, kappa, t0, t1)
    if pole is not None:
        raise BlowUpError(f"scalar flow blows up at t = {pole:.12g}", pole)
    dt = t1 - t0
    if mu0 == -math.inf:
        if dt <= 0:
            raise BlowUpError("singular branch is undefined at or before its start", t0)
        if kappa > 0:
            s = math.sqrt(kappa)
            return -s / math.tan(s * dt)
        if kappa == 0:
            return -1.0 / dt
        s = math.sqrt(-kappa)
        return -s / math.tanh(s * dt)
    if kappa > 0:
        s = math.sqrt(kappa)
        return s * math.tan(s * dt + math.atan(mu0 / s))
    if kappa == 0:
        return mu0 / (1.0 - mu0 * dt)
    s = math.sqrt(-kappa)
    if abs(mu0) < s:
        return -s * math.tanh(s * dt - math.atanh(mu0 / s))
    if abs(mu0) == s:
        return mu0
    return -s / math.tanh(s * dt + _arcoth(-mu0 / s))


# ---------------------------------------------------------------------------
# matrix flow


@dataclass
class TubeSample:
    t: float
    S_t: np.ndarray
    Q: list[float]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        S = np.asarray(self.S_t, dtype=float)
        self.S_t = S
        if S.size and np.linalg.norm(S - S.T) > 1e-8 * max(1.0, np.linalg.norm(S)):
            raise GeometryError("tube shape operator is not symmetric")

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.S_t)


@dataclass
class FlowSettings:
    t0: float = 1e-4
    h_max: float = 1e-3
    grading: float = 0.004  # step <= grading * t near the singular start
    blowup: float = BLOWUP_NORM
    richardson: bool = False
    tol: float | None = None


def _power_sums(S, k_max):
    out, P = [], np.eye(S.shape[0])
    for _ in range(k_max):
        P = P @ S
        out.append(float(np.trace(P)))
    return out


def _grid(t_start, t_end, s: FlowSettings, refine: int):
    ts = [t_start]
    while ts[-1] < t_end - 1e-15:
        h = min(s.h_max, s.grading * ts[-1]) / refine
        ts.append(min(ts[-1] + h, t_end))
    return ts


def _riccati_rates(model, n, x, v, E, S):
    R = model.jacobi_matrix(x, v, E[:, :n])
    R = (R + R.T) / 2.0
    return v, model.acceleration(x, v), model.frame_rate(x, v, E), S @ S + R


def _riccati_step(model, n, y, h):
    k1 = _riccati_rates(model, n, *y)
    k2 = _riccati_rates(model, n, *(a + 0.5 * h * b for a, b in zip(y, k1)))
    k3 = _riccati_rates(model, n, *(a + 0.5 * h * b for a, b in zip(y, k2)))
    k4 = _riccati_rates(model, n, *(a + h * b for a, b in zip(y, k3)))
    return tuple(a + (h / 6.0) * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4))


def _initial_shape(data, t0):
    A = assemble_A(data)
    return (-A[0] + A[1] * t0 + A[2] * t0 ** 2 + A[3] * t0 ** 3) / t0


def _riccati_path(model, sub, u, w, times, k_max, s: FlowSettings, refine=1):
    data, fr = second_order_data(model, sub, u, w)
    n = data.n
    x, v, E = transport(model, fr.x, fr.nu, fr.full, s.t0, steps=8 * refine)
    S = _initial_shape(data, s.t0)
    y = (x, v, E, S)
    t = s.t0
    out = []
    for target in times:
        if target < s.t0:
            raise GeometryError(f"radius {target} is below the start radius {s.t0}")
        grid = _grid(t, target, s, refine)
        for a, b in zip(grid[:-1], grid[1:]):
            y = _riccati_step(model, n, y, b - a)
            nrm = float(np.linalg.norm(y[3]))
            if not np.isfinite(nrm) or nrm > s.blowup:
                raise BlowUpError(f"shape operator blew up near t = {b:.6g} (|S| = {nrm:.3g})", b)
        t = target
        S_t = (y[3] + y[3].T) / 2.0
        out.append(TubeSample(target, S_t, _power_sums(S_t, k_max),
                              {"method": "riccati", "t0": s.t0,
                               "init_truncation": s.t0 ** 3}))
    return out


def _closed_path(model: SpaceForm, sub, u, w, times, k_max):
    data, _ = second_order_data(model, sub, u, w, covariant=False)
    lam = np.linalg.eigvalsh(data.S_nu) if data.m else np.zeros(0)
    fiber = data.n - data.m
    out = []
    for t in times:
        mus = [riccati_scalar_flow(mu, model.c, 0.0, t) for mu in lam]
        mus += [riccati_scalar_flow(-math.inf, model.c, 0.0, t)] * fiber
        S_t = np.diag(mus)
        out.append(TubeSample(t, S_t, _power_sums(S_t, k_max), {"method": "closed"}))
    return out


def _adapted_path(model: RankOneAdapted, mus0, times, k_max, method):
    kap = model.kappas
    if len(mus0) != len(kap):
        raise GeometryError(f"need {len(kap)} principal curvatures, got {len(mus0)}")
    out = []
    for t in times:
        if method == "closed":
            mus = [riccati_scalar_flow(mu, k, 0.0, t) for mu, k in zip(mus0, kap)]
        else:
            mus = list(_scalar_rk4(np.asarray(mus0, dtype=float), np.asarray(kap), t))
        S_t = np.diag(mus)
        out.append(TubeSample(t, S_t, _power_sums(S_t, k_max), {"method": method}))
    return out


def _scalar_rk4(mu, kap, t, h=1e-3):
    steps = max(1, int(math.ceil(abs(t) / h)))
    h = t / steps
    f = lambda y: y * y + kap  # noqa: E731
    for _ in range(steps):
        k1 = f(mu)
        k2 = f(mu + 0.5 * h * k1)
        k3 = f(mu + 0.5 * h * k2)
        k4 = f(mu + h * k3)
        mu = mu + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.max(np.abs(mu)) > BLOWUP_NORM:
            raise BlowUpError("scalar flow blew up", t)
    return mu


def tube_flow(model: AmbientModel, sub, u, w, times: Sequence[float], k_max: int,
              method: str = "riccati", settings: FlowSettings | None = None) -> list[TubeSample]:
    """TubeSamples at increasing radii along the normal geodesic through (sub(u), nu).

    ``method`` is "riccati" (matrix flow in a parallel frame) or "closed"
    (scalar flows; space forms and rank-one models only).  For a
    RankOneAdapted model ``sub`` is the list of initial principal curvatures.
    """
    s = settings or FlowSettings()
    times = [float(t) for t in times]
    if any(b <= a for a, b in zip(times[:-1], times[1:])) or not times or times[0] <= 0:
        raise GeometryError("radii must be positive and strictly increasing")
    if isinstance(model, RankOneAdapted):
        return _adapted_path(model, list(sub), times, k_max, method)
    if method == "closed":
        if not isinstance(model, SpaceForm):
            raise GeometryError("closed-form flow needs a space form")
        return _closed_path(model, sub, u, w, times, k_max)
    if method != "riccati":
        raise GeometryError(f"unknown method {method!r}")
    samples = _riccati_path(model, sub, u, w, times, k_max, s)
    if s.richardson or s.tol is not None:
        fine = _riccati_path(model, sub, u, w, times, k_max, s, refine=2)
        for a, b in zip(samples, fine):
            err = float(np.linalg.norm(a.S_t - b.S_t)) / 15.0
            a.meta["error_estimate"] = err
            if s.tol is not None and err > s.tol:
                raise IntegrationError(f"integrator tolerance {s.tol:g} not met at t = {a.t:g} "
                                       f"(estimated error {err:.3g})")
    return samples


def tube_shape(model, sub, u, w, t: float, k_max: int, method: str = "riccati",
               settings: FlowSettings | None = None) -> TubeSample:
    return tube_flow(model, sub, u, w, [t], k_max, method, settings)[0]


# ---------------------------------------------------------------------------
# Taylor fit of t^i Q_i(t)


@dataclass
class TaylorFit:
    coefficients: dict  # (i, r) -> float
    residuals: dict  # i -> max abs fit residual
    condition: float
    degree: int

    def __getitem__(self, key):
        return self.coefficients[key]


def taylor_fit_invariants(model, sub, u, w, k_max: int, t_grid: Sequence[float],
                          degree: int | None = None, r_max: int = 3, method: str = "riccati",
                          settings: FlowSettings | None = None,
                          max_condition: float = 1e12) -> TaylorFit:
    """Least-squares estimates of the coefficients of t^i Q_i(t) for r <= r_max."""
    ts = np.sort(np.asarray(t_grid, dtype=float))
    if ts.size < 6:
        raise GeometryError("need at least six radii for the Taylor fit")
    deg = degree if degree is not None else min(ts.size - 1, 8)
    samples = tube_flow(model, sub, u, w, ts, k_max, method, settings)
    # conditioning of the scaled Vandermonde system
    scaled = (2 * ts - (ts[0] + ts[-1])) / (ts[-1] - ts[0])
    cond = float(np.linalg.cond(np.polynomial.chebyshev.chebvander(scaled, deg)))
    if cond > max_condition:
        raise GeometryError(f"Taylor fit is ill-conditioned (condition {cond:.3g})")
    coeffs, resid = {}, {}
    for i in range(1, k_max + 1):
        vals = np.array([s.t ** i * s.Q[i - 1] for s in samples])
        fit = Polynomial.fit(ts, vals, deg)
        resid[i] = float(np.max(np.abs(fit(ts) - vals)))
        c = fit.convert().coef
        for r in range(r_max + 1):
            coeffs[(i, r)] = float(c[r]) if r < c.size else 0.0
    return TaylorFit(coeffs, resid, cond, deg)


# ---------------------------------------------------------------------------
# cascade and reconstruction


class CascadeState:
    """Power sums p_k of principal curvatures, split by Jacobi eigenvalue class."""

    def __init__(self, classes: Mapping[float, Sequence[float]]):
        if not classes:
            raise GeometryError("cascade needs at least one curvature class")
        self.classes = {float(k): [float(p) for p in ps] for k, ps in classes.items()}

    @classmethod
    def from_curvatures(cls, groups: Mapping[float, Sequence[float]], k_max: int):
        """Build from principal curvatures grouped by class."""
        return cls({kap: [float(np.sum(np.asarray(mus, dtype=float) ** k)) for k in range(k_max + 1)]
                    for kap, mus in groups.items()})

    @classmethod
    def space_form(cls, c: float, Q: Sequence[float]):
        """Single class; Q = (Q_0, Q_1, ...) with Q_0 = n."""
        return cls({c: list(Q)})

    def order(self) -> int:
        return min(len(p) for p in self.classes.values()) - 1

    def Q(self, k: int) -> float:
        if k > self.order():
            raise GeometryError(f"class data only through order {self.order()}")
        return sum(p[k] for p in self.classes.values())

    def multiplicity(self, kappa: float) -> float:
        return self.classes[float(kappa)][0]

    def derivative(self, kappa: float, k: int) -> float:
        """p_k' = k (p_{k+1} + kappa p_{k-1}) for one class."""
        p = self.classes[float(kappa)]
        if k == 0:
            return 0.0
        if k + 1 >= len(p):
            raise GeometryError(f"class {kappa} lacks order {k + 1}")
        return k * (p[k + 1] + kappa * p[k - 1])


def cascade_step(state: CascadeState, Q_derivative: float, k: int) -> float:
    """Q_{k+1} = Q_k'/k - sum over classes of kappa p_{k-1}."""
    if k < 1:
        raise GeometryError("cascade needs k >= 1")
    total = 0.0
    for kap, p in state.classes.items():
        if len(p) < k:
            raise GeometryError(f"class {kap} lacks order {k - 1}")
        total += kap * p[k - 1]
    return Q_derivative / k - total


@dataclass
class Reconstruction:
    roots: np.ndarray
    residual: float
    complex_roots: bool
    polynomial: np.ndarray

    @property
    def real(self) -> np.ndarray:
        return np.sort(self.roots.real)


def reconstruct_principal_curvatures(Q: Sequence[float]) -> Reconstruction:
    """Roots of the characteristic polynomial with power sums Q_1..Q_n."""
    Q = [float(q) for q in Q]
    n = len(Q)
    if n == 0:
        raise GeometryError("need at least one power sum")
    e = newton_convert(Q)  # e_1..e_n
    coeffs = np.array([1.0] + [(-1) ** (j + 1) * float(e[j]) for j in range(n)])
    if not np.all(np.isfinite(coeffs)):
        raise GeometryError(f"characteristic polynomial is not finite: {coeffs}")
    try:
        roots = np.roots(coeffs)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"root finding failed for coefficients {coeffs}: {exc}") from None
    if roots.size != n:
        raise GeometryError(f"root finding returned {roots.size} roots for coefficients {coeffs}")
    cplx = bool(np.any(np.abs(roots.imag) > 1e-9 * max(1.0, float(np.max(np.abs(roots))))))
    resid = max(abs(float(np.sum(roots ** k).real) - Q[k - 1]) for k in range(1, n + 1))
    order = np.lexsort((roots.imag, roots.real))
    return Reconstruction(roots[order], resid, cplx, coeffs)
