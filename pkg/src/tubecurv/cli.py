"""Command line interface: ``tubecurv expand|phi-psi|tube|verify|selftest``.

Exit codes: 0 when every check passes, 1 on a failed check, 2 on bad input.
"""
from __future__ import annotations

import json
import math
import sys

import click

from .catalog import DescriptorError, catalog_dir, catalog_names, load_descriptor
from .combinatorics import (
    closed_form_phi_psi,
    iterated_theta_identity_check,
    phi,
    phi_psi_block,
    psi,
    upsilon,
)
from .geometry import GeometryError, sample_normal_bundle, tube_flow
from .trace_algebra import series_trace_power
from .verify import (
    SUBM_D_CASES,
    PreconditionError,
    suite_austere_norm,
    suite_focal_filtration,
    suite_hypersurface,
    suite_thm_subm_d,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
INPUT_ERRORS = (DescriptorError, PreconditionError, GeometryError)


def _emit(payload: dict, text: str, fmt: str):
    click.echo(json.dumps(payload, indent=2, sort_keys=True) if fmt == "json" else text)


def _load(path):
    try:
        return load_descriptor(path)
    except DescriptorError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


format_option = click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text",
                             show_default=True)


@click.group()
def cli():
    """Tube series coefficients, tube flows and identity suites."""


@cli.command()
@click.argument("i", type=click.IntRange(0))
@click.argument("r", type=click.IntRange(0))
@format_option
def expand(i, r, fmt):
    """Print Upsilon_ir from the refined formula and by brute force."""
    refined = upsilon(i, r, "refined")
    brute = upsilon(i, r, "brute")
    match = refined == brute
    text = f"refined: {refined.pretty()}\nbrute:   {brute.pretty()}\n{'MATCH' if match else 'MISMATCH'}"
    _emit({"i": i, "r": r, "refined": refined.dump(), "brute": brute.dump(), "match": match}, text, fmt)
    sys.exit(EXIT_OK if match else EXIT_FAIL)


@cli.command("phi-psi")
@click.argument("d", type=click.IntRange(1))
@format_option
def phi_psi_cmd(d, fmt):
    """Print Phi/Psi, their block forms and the closed-form comparison."""
    forms = closed_form_phi_psi(d)
    lines, rows, ok = [], [], True
    for (kind, r, e), closed in forms.items():
        fn = phi if kind == "phi" else psi
        raw = fn(r, e)
        block = phi_psi_block(kind, r, e)
        match = block == closed and not block.residual
        ok &= match
        label = f"{'Phi' if kind == 'phi' else 'Psi'}_{r}({e})"
        lines += [f"{label} = {raw.pretty()}", f"  blocks: {block.pretty()}", f"  closed: {closed.pretty()}",
                  f"  {'MATCH' if match else 'MISMATCH'}"]
        rows.append({"name": label, "trace": raw.dump(), "blocks": block.dump(), "closed": closed.dump(),
                     "match": match})
    _emit({"d": d, "forms": rows, "match": ok}, "\n".join(lines), fmt)
    sys.exit(EXIT_OK if ok else EXIT_FAIL)


@cli.command()
@click.argument("descriptor")
@click.option("--t", "radii", type=float, multiple=True, required=True, help="Radius (repeatable).")
@click.option("--kmax", type=click.IntRange(1), default=4, show_default=True)
@click.option("--method", type=click.Choice(["riccati", "closed"]), default="riccati", show_default=True)
@click.option("--sample", "index", type=click.IntRange(0), default=0, show_default=True,
              help="Index of the (p, nu) sample to follow.")
@click.option("--seed", type=int, default=None)
@format_option
def tube(descriptor, radii, kmax, method, index, seed, fmt):
    """Print tube shape operator samples along one normal geodesic."""
    ex = _load(descriptor)
    seed = ex.sampling.get("seed", 0) if seed is None else seed
    try:
        if hasattr(ex.sub, "m"):
            u, w = sample_normal_bundle(ex.sub, ex.fiber_dim, index + 1, seed)[index]
            samples = tube_flow(ex.model, ex.sub, u, w, sorted(radii), kmax, method)
        else:
            samples = tube_flow(ex.model, ex.sub, None, None, sorted(radii), kmax, method)
    except GeometryError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    rows = [{"t": s.t, "Q": s.Q, "eigenvalues": s.eigenvalues.tolist()} for s in samples]
    text = "\n".join(
        f"t={s.t:<8g} Q=[{', '.join(f'{q:.10g}' for q in s.Q)}]  "
        f"mu=[{', '.join(f'{v:.10g}' for v in s.eigenvalues)}]" for s in samples)
    _emit({"example": ex.name, "samples": rows}, text, fmt)


@cli.command()
@click.argument("descriptor")
@click.option("--suite", type=click.Choice(["subm-d", "focal", "hypersurface", "austere"]), required=True)
@click.option("--d", "d", type=click.IntRange(1), default=1, show_default=True)
@click.option("--k", "k", type=click.IntRange(1), default=1, show_default=True)
@click.option("--cases", default=",".join(SUBM_D_CASES), show_default=True)
@click.option("--tol", type=float, default=None, help="Override the default tolerance.")
@click.option("--seed", type=int, default=None)
@click.option("--samples", type=click.IntRange(1), default=None)
@click.option("--output", type=click.Path(dir_okay=False), default=None, help="Also write the report here.")
@format_option
def verify(descriptor, suite, d, k, cases, tol, seed, samples, output, fmt):
    """Run an identity suite over the sampled unit normal bundle."""
    ex = _load(descriptor)
    opts = {"tol": tol, "samples": samples, "seed": seed}
    try:
        if suite == "subm-d":
            report = suite_thm_subm_d(ex, d, [c.strip() for c in cases.split(",") if c.strip()], **opts)
        elif suite == "focal":
            report = suite_focal_filtration(ex, k, **opts)
        elif suite == "hypersurface":
            report = suite_hypersurface(ex, k, **opts)
        else:
            report = suite_austere_norm(ex, **opts)
    except INPUT_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    body = report.to_json() if fmt == "json" else report.to_text()
    click.echo(body)
    if output:
        with open(output, "w") as fh:
            fh.write(body + "\n")
    sys.exit(EXIT_OK if report.passed else EXIT_FAIL)


@cli.command()
def selftest():
    """Quick end-to-end checks of every module."""
    results = []

    def check(name, fn):
        try:
            ok = bool(fn())
        except Exception as exc:  # report and continue
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        results.append(ok)
        click.echo(f"{'PASS' if ok else 'FAIL'}  {name}")

    check("refined = brute force for 2 <= i, r <= 6",
          lambda: all(upsilon(i, r) == series_trace_power(i, r)[r]
                      for i in range(2, 7) for r in range(2, 7)))
    check("Phi/Psi closed forms for d = 1, 2",
          lambda: all(phi_psi_block(kind, r, e) == form and not phi_psi_block(kind, r, e).residual
                      for d in (1, 2) for (kind, r, e), form in closed_form_phi_psi(d).items()))
    check("iterated theta identity, 1 <= a <= 8",
          lambda: all(iterated_theta_identity_check(a, b, e)
                      for a in range(1, 9) for b in range(0, 9) for e in range(0, 9)))

    def tube_check():
        ex = load_descriptor("great_circle_in_s3")
        u, w = sample_normal_bundle(ex.sub, ex.fiber_dim, 1, 0)[0]
        ts = [0.2, 0.7, 1.2]
        got = [s.Q[0] for s in tube_flow(ex.model, ex.sub, u, w, ts, 1)]
        return all(abs(q - (math.tan(t) - 1 / math.tan(t))) < 1e-8 for q, t in zip(got, ts))

    check("great circle tube Q_1 = tan t - cot t", tube_check)
    check("focal suite, point in S^3, k = 4",
          lambda: suite_focal_filtration(load_descriptor("point_in_s3"), 4, samples=32).passed)
    check("hypersurface suite, Clifford torus",
          lambda: suite_hypersurface(load_descriptor("clifford_torus_s3"), 1, samples=8).passed)
    check("catalog descriptors load",
          lambda: all(load_descriptor(name) is not None for name in catalog_names()))
    sys.exit(EXIT_OK if all(results) else EXIT_FAIL)


@cli.command("catalog")
def catalog_cmd():
    """List the built-in descriptors."""
    click.echo(f"# {catalog_dir()}")
    for name in catalog_names():
        click.echo(name)


def main(argv=None) -> int:
    """Entry point returning the exit code instead of raising SystemExit."""
    try:
        cli.main(args=argv, prog_name="tubecurv", standalone_mode=False)
    except SystemExit as exc:
        return int(exc.code or 0)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    return EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
