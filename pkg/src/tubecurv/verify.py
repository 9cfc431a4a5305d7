"""Identity suites evaluated over sampled unit normal bundles, and their reports."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .catalog import Example
from .combinatorics import closed_form_phi_psi
from .geometry import (
    BlowUpError,
    CascadeState,
    RankOneAdapted,
    SpaceForm,
    cascade_step,
    reconstruct_principal_curvatures,
    riccati_scalar_flow,
    sample_normal_bundle,
    second_order_data,
    tube_flow,
)
from .trace_algebra import BlockTracePolynomial, evaluate

__all__ = [
    "PreconditionError",
    "IdentitySpec",
    "Record",
    "Report",
    "focal_identities",
    "subm_d_identities",
    "SUBM_D_CASES",
    "suite_thm_subm_d",
    "suite_focal_filtration",
    "suite_hypersurface",
    "suite_austere_norm",
    "sample_data",
]

PARITY_TOL = 1e-8
ODD_LETTERS = frozenset({"S", "CK_top", "CK_bot", "CB", "CBt"})


class PreconditionError(ValueError):
    """The example does not satisfy the hypothesis of the requested identity."""


@dataclass(frozen=True)
class IdentitySpec:
    name: str
    expr: BlockTracePolynomial
    expect: str  # "zero" or "const"
    tag: str

    def __post_init__(self):
        if self.expect not in ("zero", "const"):
            raise ValueError(f"expect must be 'zero' or 'const', not {self.expect!r}")

    @property
    def odd(self) -> bool:
        """Every word carries an odd number of nu-odd letters."""
        words = [w for w, _ in self.expr.items()]
        return bool(words) and all(
            sum(1 for x in w.letters if x in ODD_LETTERS) % 2 == 1 for w in words)


def _poly(*terms) -> BlockTracePolynomial:
    """Terms are (coefficient, letter, power, letter, power, ...)."""
    out = {}
    for term in terms:
        coeff, rest = term[0], term[1:]
        word = []
        for letter, power in zip(rest[::2], rest[1::2]):
            word.extend([letter] * power)
        out[tuple(word)] = out.get(tuple(word), 0) + Fraction(coeff)
    return BlockTracePolynomial.from_letters(out)


def _Q(j):
    return ("S", j)


def _focal_level(k: int) -> list[IdentitySpec]:
    """Identities first available at filtration level k."""
    F = Fraction
    tag = f"k>={k}"
    z, c = "zero", "const"
    if k == 1:
        return [
            IdentitySpec("Q1", _poly((1, *_Q(1))), z, tag),
            IdentitySpec("Q2+trKt+trKb/3", _poly((1, *_Q(2)), (1, "K_top", 1), (F(1, 3), "K_bot", 1)), c, tag),
            IdentitySpec("Q3+tr(SKt)+trCKt/2+trCKb/4",
                         _poly((1, *_Q(3)), (1, "S", 1, "K_top", 1), (F(1, 2), "CK_top", 1),
                               (F(1, 4), "CK_bot", 1)), z, tag),
        ]
    if k == 2:
        return [
            IdentitySpec("Q2-2trKb/3", _poly((1, *_Q(2)), (F(-2, 3), "K_bot", 1)), c, tag),
            IdentitySpec("Q3+tr(SKt)-trCKb/4",
                         _poly((1, *_Q(3)), (1, "S", 1, "K_top", 1), (F(-1, 4), "CK_bot", 1)), z, tag),
            IdentitySpec("Ric", _poly((1, "K_top", 1), (1, "K_bot", 1)), c, tag),
            IdentitySpec("trCK", _poly((1, "CK_top", 1), (1, "CK_bot", 1)), z, tag),
        ]
    if k == 3:
        return [
            IdentitySpec("trKb", _poly((1, "K_bot", 1)), c, tag),
            IdentitySpec("Q3+3trCKb/4", _poly((1, *_Q(3)), (F(3, 4), "CK_bot", 1)), z, tag),
            IdentitySpec("Q2", _poly((1, *_Q(2))), c, tag),
            IdentitySpec("tr(SKt)-trCKb", _poly((1, "S", 1, "K_top", 1), (-1, "CK_bot", 1)), z, tag),
        ]
    if k == 4:
        return [
            IdentitySpec("trCKb", _poly((1, "CK_bot", 1)), z, tag),
            IdentitySpec("Q3", _poly((1, *_Q(3))), z, tag),
            IdentitySpec("tr(SKt)", _poly((1, "S", 1, "K_top", 1)), z, tag),
        ]
    if k == 5:
        return [
            IdentitySpec("Q4-2rho2(Kb)/9", _poly((1, *_Q(4)), (F(-2, 9), "K_bot", 2)), c, tag),
            IdentitySpec("3tr(S^2Kt)+rho2(Kb)", _poly((3, "S", 2, "K_top", 1), (1, "K_bot", 2)), c, tag),
        ]
    if k == 6:
        return [
            IdentitySpec("rho2(Kb)", _poly((1, "K_bot", 2)), c, tag),
            IdentitySpec("2tr(S^3Kt)+3Q5+tr(Kb CKb)/12",
                         _poly((2, "S", 3, "K_top", 1), (3, *_Q(5)), (F(1, 12), "K_bot", 1, "CK_bot", 1)),
                         z, tag),
            IdentitySpec("Q4", _poly((1, *_Q(4))), c, tag),
            IdentitySpec("tr(S^2Kt)", _poly((1, "S", 2, "K_top", 1)), c, tag),
        ]
    d, rem = divmod(k - 1, 3)
    if rem == 0:  # k = 3d + 1
        return [
            IdentitySpec(f"Q{2 * d}", _poly((1, *_Q(2 * d))), c, tag),
            IdentitySpec(f"rho{d}(Kb)", _poly((1, "K_bot", d)), c, tag),
            IdentitySpec(f"tr(S^{2 * d - 2}Kt)", _poly((1, "S", 2 * d - 2, "K_top", 1)), c, tag),
            IdentitySpec(f"Q{2 * d + 1}-d3^(1-d)tr(Kb^{d - 1}CKb)/4",
                         _poly((1, *_Q(2 * d + 1)),
                               (-F(d, 4 * 3 ** (d - 1)), "K_bot", d - 1, "CK_bot", 1)), z, tag),
            IdentitySpec(f"{2 * d}tr(S^{2 * d - 1}Kt)+{3 * d + 1}Q{2 * d + 1}",
                         _poly((2 * d, "S", 2 * d - 1, "K_top", 1), (3 * d + 1, *_Q(2 * d + 1))), z, tag),
        ]
    if rem == 1:  # k = 3d + 2
        return [
            IdentitySpec(f"Q{2 * d + 1}", _poly((1, *_Q(2 * d + 1))), z, tag),
            IdentitySpec(f"tr(S^{2 * d - 1}Kt)", _poly((1, "S", 2 * d - 1, "K_top", 1)), z, tag),
            IdentitySpec(f"tr(Kb^{d - 1}CKb)", _poly((1, "K_bot", d - 1, "CK_bot", 1)), z, tag),
            IdentitySpec(f"{2 * d + 1}tr(S^{2 * d}Kt)+{3 * d + 2}Q{2 * d + 2}-3^(-{d + 1})rho{d + 1}(Kb)",
                         _poly((2 * d + 1, "S", 2 * d, "K_top", 1), (3 * d + 2, *_Q(2 * d + 2)),
                               (-F(1, 3 ** (d + 1)), "K_bot", d + 1)), c, tag),
        ]
    d -= 1  # k = 3d + 3
    return [
        IdentitySpec(f"Q{2 * d + 2}+3^(-{d + 1})rho{d + 1}(Kb)",
                     _poly((1, *_Q(2 * d + 2)), (F(1, 3 ** (d + 1)), "K_bot", d + 1)), c, tag),
        IdentitySpec(f"2tr(S^{2 * d + 1}Kt)+3Q{2 * d + 3}+3^(-{d})tr(Kb^{d}CKb)/4",
                     _poly((2, "S", 2 * d + 1, "K_top", 1), (3, *_Q(2 * d + 3)),
                           (F(1, 4 * 3 ** d), "K_bot", d, "CK_bot", 1)), z, tag),
    ]


def focal_identities(k: int, m: int | None = None, n: int | None = None) -> list[IdentitySpec]:
    """Cumulative identity set for a focal submanifold of a k-isoparametric family.

    With ``m`` and ``n`` given, the dimension-dependent special cases are added.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    out = []
    for level in range(1, k + 1):
        out.extend(_focal_level(level))
    if m is None or n is None:
        return out
    if m == 0:
        out.append(IdentitySpec("Ric (point)", _poly((1, "K_top", 1), (1, "K_bot", 1)), "const", "point"))
    bound = (2 * k + 1) // 3 if k <= 6 else (2 * k - 1) // 3
    if m >= 1 and (m <= bound or k >= n):
        for j in range(1, m + 1):
            expect = "zero" if j % 2 else "const"
            out.append(IdentitySpec(f"Q{j} (spectrum)", _poly((1, *_Q(j))), expect, "austere"))
    low = n - (k // 3 if k <= 6 else (k - 1) // 3)
    if n - m >= 1 and (m >= low or k >= n):
        for j in range(1, n - m + 1):
            out.append(IdentitySpec(f"rho{j}(Kb) (vertical)", _poly((1, "K_bot", j)), "const", "vertical"))
    return out


# case -> (kind, r offset, e offset, expect, constant Q range as (lo, hi) in terms of d)
SUBM_D_CASES = {
    "i": ("phi", 0, 0, "const", lambda d: (2 * d, 3 * d)),
    "ii": ("phi", 1, 0, "zero", lambda d: (2 * d + 1, 3 * d + 1)),
    "iii": ("phi", 0, 1, "const", lambda d: (2 * d, 3 * d + 1)),
    "iv": ("phi", 1, 1, "zero", lambda d: (2 * d + 1, 3 * d + 2)),
    "v": ("psi", 0, 0, "const", lambda d: (2 * d - 1, 3 * d - 1)),
    "vi": ("psi", 1, 0, "zero", lambda d: (2 * d, 3 * d)),
    "vii": ("psi", 0, 1, "const", lambda d: (2 * d - 1, 3 * d)),
    "viii": ("psi", 1, 1, "zero", lambda d: (2 * d, 3 * d + 1)),
}


def subm_d_identities(d: int, cases: Iterable[str] | None = None) -> list[tuple[IdentitySpec, tuple]]:
    forms = closed_form_phi_psi(d)
    out = []
    for case in (cases or SUBM_D_CASES):
        if case not in SUBM_D_CASES:
            raise PreconditionError(f"unknown case {case!r}")
        kind, dr, de, expect, rng = SUBM_D_CASES[case]
        expr = forms[(kind, 2 * d + dr, d + de)]
        name = f"({case}) {'Phi' if kind == 'phi' else 'Psi'}_{2 * d + dr}({d + de})"
        out.append((IdentitySpec(name, expr, expect, f"d={d}"), rng(d)))
    return out


# ---------------------------------------------------------------------------
# reports


@dataclass
class Record:
    name: str
    expect: str
    samples: int
    max_abs: float
    spread: float
    tolerance: float
    passed: bool
    mean: float = 0.0
    parity: float | None = None
    note: str = ""

    @property
    def residual(self) -> float:
        return self.max_abs if self.expect == "zero" else self.spread


def _round(x):
    return float(f"{x:.12e}") if isinstance(x, float) and math.isfinite(x) else x


@dataclass
class Report:
    suite: str
    example: str
    records: list[Record]
    meta: dict = field(default_factory=dict)
    timestamps: dict = field(default_factory=dict)  # never part of the deterministic body

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    def to_dict(self) -> dict:
        recs = [{k: _round(v) for k, v in asdict(r).items()} for r in self.records]
        return {"suite": self.suite, "example": self.example, "passed": self.passed,
                "records": recs, "meta": self.meta}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        head = ("identity", "expect", "n", "residual", "tol", "parity", "result")
        rows = [head]
        for r in self.records:
            rows.append((r.name, r.expect, str(r.samples), f"{r.residual:.3e}", f"{r.tolerance:.1e}",
                         "-" if r.parity is None else f"{r.parity:.1e}",
                         ("PASS" if r.passed else "FAIL") + (f"  {r.note}" if r.note else "")))
        widths = [max(len(row[j]) for row in rows) for j in range(len(head) - 1)]
        lines = [f"suite {self.suite} on {self.example}: {'PASS' if self.passed else 'FAIL'}"]
        for row in rows:
            cells = [c.ljust(w) for c, w in zip(row[:-1], widths)] + [row[-1]]
            lines.append("  ".join(cells))
        lines.append(f"config {self.meta.get('config_hash', '')[:16]}")
        return "\n".join(lines)


def config_hash(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def _default_tol(example: Example) -> float:
    return 1e-3 if example.is_chart else 1e-6


def _meta(example, suite, params, tol, samples, seed):
    payload = {"suite": suite, "params": params, "tolerance": tol, "samples": samples, "seed": seed,
               "descriptor": example.descriptor}
    return {"config_hash": config_hash(payload), "tolerance": tol, "samples": samples, "seed": seed,
            "params": params, "curvature_step": getattr(example.model, "h", None)}


def _resolve(example, tol, samples, seed):
    tol = _default_tol(example) if tol is None else float(tol)
    samples = int(example.sampling.get("samples", 128) if samples is None else samples)
    seed = int(example.sampling.get("seed", 0) if seed is None else seed)
    if samples < 1:
        raise PreconditionError("need at least one sample")
    return tol, samples, seed


def sample_data(example: Example, samples: int, seed: int, with_opposite: bool = True):
    """SecondOrderData at sampled (p, nu) pairs, optionally also at (p, -nu)."""
    pts = sample_normal_bundle(example.sub, example.fiber_dim, samples, seed)
    out = []
    for u, w in pts:
        data, _ = second_order_data(example.model, example.sub, u, w)
        opp = second_order_data(example.model, example.sub, u, -w)[0] if with_opposite else None
        out.append((data, opp))
    return out


def _record(spec: IdentitySpec, pairs, tol, note="") -> Record:
    vals = np.array([evaluate(spec.expr, d.assignment()) for d, _ in pairs])
    mean = float(np.mean(np.abs(vals)))
    max_abs = float(np.max(np.abs(vals)))
    spread = float((vals.max() - vals.min()) / max(1.0, mean))
    parity = None
    if spec.odd and spec.expect == "zero" and all(o is not None for _, o in pairs):
        opp = np.array([evaluate(spec.expr, o.assignment()) for _, o in pairs])
        parity = float(np.max(np.abs(vals + opp)))
    ok = (max_abs if spec.expect == "zero" else spread) <= tol
    if parity is not None:
        ok = ok and parity <= PARITY_TOL
    return Record(spec.name, spec.expect, len(vals), max_abs, spread, tol, bool(ok),
                  float(np.mean(vals)), parity, note)


def _check_submanifold(example):
    if isinstance(example.model, RankOneAdapted):
        raise PreconditionError("rank-one models carry no submanifold data; use the hypersurface suite")


# ---------------------------------------------------------------------------
# suites


def suite_thm_subm_d(example: Example, d: int, cases: Sequence[str] | None = None,
                     tol=None, samples=None, seed=None) -> Report:
    _check_submanifold(example)
    tol, samples, seed = _resolve(example, tol, samples, seed)
    specs = subm_d_identities(d, cases)
    for spec, (lo, hi) in specs:
        missing = [j for j in range(max(lo, 1), hi + 1) if not example.constant_q(j)]
        if missing:
            raise PreconditionError(
                f"{spec.name} needs tubes with constant Q_{lo}..Q_{hi}; "
                f"{example.name} does not declare Q_{missing[0]} constant")
    pairs = sample_data(example, samples, seed)
    records = [_record(spec, pairs, tol) for spec, _ in specs]
    params = {"d": d, "cases": [c for c in (cases or SUBM_D_CASES)]}
    return Report("subm-d", example.name, records, _meta(example, "subm-d", params, tol, samples, seed))


def suite_focal_filtration(example: Example, k: int, tol=None, samples=None, seed=None) -> Report:
    _check_submanifold(example)
    tol, samples, seed = _resolve(example, tol, samples, seed)
    fk = example.focal_k
    if fk == 0:
        raise PreconditionError(f"{example.name} is not marked as a focal submanifold (metadata focal_k)")
    if k > fk:
        raise PreconditionError(f"{example.name} is only {fk}-isoparametric; k={k} is not implied")
    if k > example.n and fk != math.inf:
        raise PreconditionError(f"k={k} exceeds n={example.n} and the family is not totally isoparametric")
    specs = focal_identities(k, example.m, example.n)
    pairs = sample_data(example, samples, seed)
    records = [_record(spec, pairs, tol) for spec in specs]
    return Report("focal", example.name, records,
                  _meta(example, "focal", {"k": k}, tol, samples, seed))


def suite_austere_norm(example: Example, tol=None, samples=None, seed=None) -> Report:
    _check_submanifold(example)
    tol, samples, seed = _resolve(example, tol, samples, seed)
    if not example.metadata.get("austere"):
        raise PreconditionError(f"{example.name} is not marked austere")
    pairs = sample_data(example, samples, seed)
    specs = [IdentitySpec("|S|^2", _poly((1, *_Q(2))), "const", "austere")]
    specs += [IdentitySpec(f"Q{j}", _poly((1, *_Q(j))), "zero", "austere")
              for j in range(1, example.m + 1, 2)]
    records = [_record(spec, pairs, tol) for spec in specs]
    # spectrum constancy
    spectra = np.array([np.sort(np.linalg.eigvalsh(d.S_nu)) for d, _ in pairs]) if example.m else None
    if spectra is not None:
        spread = float(np.max(spectra.max(axis=0) - spectra.min(axis=0)))
        opposite = float(np.max(np.abs(spectra + spectra[:, ::-1])))
        records.append(Record("spectrum", "const", len(pairs), opposite, spread, tol,
                              spread <= tol and opposite <= tol, float(np.mean(np.abs(spectra))),
                              None, "max_abs = |spectrum + reversed|"))
    return Report("austere", example.name, records,
                  _meta(example, "austere", {}, tol, samples, seed))


# hypersurface families


def _stencil(f, t, h):
    return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)


def _hypersurface_flows(example, u, w, radii, k_max):
    model = example.model
    if isinstance(model, RankOneAdapted):
        mus0 = np.asarray(example.sub, dtype=float) * (1 if w[0] > 0 else -1)
        return lambda ts: tube_flow(model, list(mus0), None, None, ts, k_max, "closed"), mus0
    data, _ = second_order_data(model, example.sub, u, w, covariant=False)
    mus0 = np.linalg.eigvalsh(data.S_nu)
    return lambda ts: tube_flow(model, example.sub, u, w, ts, k_max, "closed"), mus0


def _classes(model, mus):
    if isinstance(model, RankOneAdapted):
        groups = {}
        for kap, mu in zip(model.kappas, mus):
            groups.setdefault(kap, []).append(mu)
        return groups
    return {model.c: list(mus)}


def suite_hypersurface(example: Example, k: int = 1, tol=None, samples=None, seed=None,
                       radii: Sequence[float] | None = None, step: float = 1e-3) -> Report:
    """Constancy of Q_j on parallels, the Q cascade, and spectrum reconstruction."""
    model = example.model
    if not (isinstance(model, (SpaceForm, RankOneAdapted)) and example.metadata.get("hypersurface")):
        raise PreconditionError(f"{example.name} is not a hypersurface family in a space form "
                                "or rank-one model")
    if example.m != example.n:
        raise PreconditionError("hypersurface suite needs m = n")
    tol, samples, seed = _resolve(example, tol, samples, seed)
    n = example.n
    k = max(1, int(k))
    k_max = max(k, n) + 6
    radii = list(radii or example.metadata.get("radii") or np.linspace(0.05, 0.5, 10))
    if isinstance(model, RankOneAdapted):
        pts = [(None, np.array([1.0 if j % 2 == 0 else -1.0])) for j in range(samples)]
    else:
        pts = sample_normal_bundle(example.sub, 1, samples, seed)
    notes = []
    per_side: dict[int, list] = {1: [], -1: []}
    flows = {}
    for u, w in pts:
        side = 1 if w[0] > 0 else -1
        flow, mus0 = _hypersurface_flows(example, u, w, radii, k_max)
        use = []
        for t in radii:
            try:
                flow([t])
                use.append(t)
            except BlowUpError as exc:
                notes.append(f"side {side:+d}: focal at t={exc.radius:.6g}, radii truncated")
                break
        if not use:
            raise PreconditionError("every radius lies beyond the first focal point")
        samples_t = flow(use)
        per_side[side].append(np.array([s.Q for s in samples_t]))
        flows.setdefault(side, (flow, mus0, use))
    records = []
    # forward: Q_j(t) constant on each parallel
    for side, arrs in per_side.items():
        if not arrs:
            continue
        width = min(a.shape[0] for a in arrs)
        stack = np.array([a[:width] for a in arrs])  # (points, radii, j)
        spread = (stack.max(axis=0) - stack.min(axis=0)) / np.maximum(1.0, np.abs(stack).mean(axis=0))
        worst = float(spread.max())
        records.append(Record(f"Q_1..Q_{k_max} constant on parallels (side {side:+d})", "const",
                              stack.shape[0], float(np.abs(stack).max()), worst, tol, worst <= tol))
    # cascade and reconstruction on one representative normal line per side
    for side, (flow, mus0, use) in sorted(flows.items(), reverse=True):
        q_at = lambda t, j: flow([t])[0].Q[j - 1]  # noqa: E731
        worst = 0.0
        h = step
        inner = [t for t in use if t - 2 * h > 0]
        for t in inner:
            mus = np.diag(flow([t])[0].S_t)  # class order for rank-one models
            state = CascadeState.from_curvatures(_classes(model, mus), k_max)
            for kk in range(1, min(5, k_max - 1) + 1):
                dq = _stencil(lambda s: q_at(s, kk), t, h)
                pred = cascade_step(state, dq, kk)
                worst = max(worst, abs(pred - state.Q(kk + 1)) / max(1.0, abs(state.Q(kk + 1))))
        ctol = max(tol, 1e-5)
        records.append(Record(f"cascade Q_(k+1) = Q_k'/k - sum kappa p_(k-1), k<=5 (side {side:+d})",
                              "zero", len(inner), worst, worst, ctol, worst <= ctol))
        records.append(_reconstruction_record(model, flow, mus0, inner, k, n, h, tol, side))
    meta = _meta(example, "hypersurface", {"k": k, "radii": radii, "step": step}, tol, samples, seed)
    meta["notes"] = sorted(set(notes))
    return Report("hypersurface", example.name, records, meta)


def _reconstruction_record(model, flow, mus0, radii, k, n, h, tol, side):
    """Q_1..Q_k sampled, Q_(k+1)..Q_n by the cascade, roots pulled back to t = 0."""
    kap = model.c if isinstance(model, SpaceForm) else None

    def q_fn(j):
        if j == 0:
            return lambda t: float(n)
        if j <= k:
            return lambda t: flow([t])[0].Q[j - 1]
        prev, prev2 = q_fn(j - 1), q_fn(j - 2)

        def f(t):
            return _stencil(prev, t, h) / (j - 1) - kap * prev2(t)

        return f

    rows = []
    resid = 0.0
    for t in radii:
        if kap is None:
            qs = flow([t])[0].Q[:n]
            rec = reconstruct_principal_curvatures(qs)
            target = np.sort(flow([t])[0].eigenvalues)
            rows.append(rec.real - target)
        else:
            qs = [q_fn(j)(t) for j in range(1, n + 1)]
            rec = reconstruct_principal_curvatures(qs)
            back = np.sort([riccati_scalar_flow(mu, kap, t, 0.0) for mu in rec.real])
            rows.append(back)
        resid = max(resid, rec.residual)
    rows = np.array(rows)
    if kap is None:
        spread = float(np.abs(rows).max())
        name = f"reconstructed spectrum vs per-class flows (side {side:+d})"
    else:
        spread = float((rows.max(axis=0) - rows.min(axis=0)).max())
        name = f"reconstructed spectrum pulled back to t=0, spread over radii (side {side:+d})"
    ok = spread <= tol
    return Record(name, "const", len(radii), float(np.abs(rows).max()), spread, tol, ok,
                  float(np.mean(rows)), None, f"power-sum residual {resid:.1e}")
