"""Command-line interface.

Exit codes: 0 pass, 1 verification mismatch, 2 input error, 3 geometric
degeneracy, 4 resource cap.
"""

from __future__ import annotations

import sys as _sys

import click
import numpy as np

from . import binning, files, regions
from .bounds import (
    binning_thresholds,
    bound_constants,
    correction_terms,
    theorem1_system,
)
from .polytope import (
    LinearSystem,
    PolytopeError,
    Unbounded,
    enumerate_vertices,
    is_feasible,
    make_ineq,
)
from .probability import JointPmf, PmfError, build_joint

EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_RESOURCE = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    _sys.exit(code)


def _load_joint(path) -> JointPmf:
    try:
        return build_joint(files.load_pmf(path))
    except (files.FileFormatError, PmfError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))


@click.group()
def main():
    """Rate-region calculator and verifier for a two-sender two-receiver
    channel with a common message and a cognitive encoder."""


@main.command()
@click.option("--pmf", "pmf_path", required=True,
              type=click.Path(exists=False))
def info(pmf_path):
    """Print the sixteen bound constants, binning thresholds, and
    cross-correlation terms of a distribution."""
    pmf = _load_joint(pmf_path)
    try:
        c = bound_constants(pmf)
        terms = correction_terms(pmf)
        thr = binning_thresholds(pmf)
    except PmfError as exc:
        _fail(EXIT_INPUT, str(exc))
    click.echo("bound constants (bits):")
    for name, value in c.as_dict().items():
        click.echo(f"  {name:>2} = {value:.6f}")
    click.echo("binning thresholds (bits):")
    for name, value in zip(("u1|w1", "w2|w1,u1", "u2|u1,w1,w2"), thr):
        click.echo(f"  {name:>11} = {value:.6f}")
    click.echo("cross-correlation terms (bits):")
    for name, value in terms.items():
        click.echo(f"  {name} = {value:.6f}")


@main.command()
@click.option("--pmf", "pmf_path", required=True)
@click.option("--space", type=click.Choice(["TS", "R"]), required=True)
@click.option("--out", "out_path", required=True)
def region(pmf_path, space, out_path):
    """Write the rate region (H-representation plus vertices) to a file."""
    pmf = _load_joint(pmf_path)
    c = bound_constants(pmf)
    system = theorem1_system(c) if space == "TS" else regions.theorem2_region(c)
    vertices = None
    try:
        if is_feasible(system):
            vertices = enumerate_vertices(system).points
    except Unbounded as exc:
        _fail(EXIT_DEGENERATE, f"system unbounded: {exc}")
    files.save_region(system, out_path, vertices=vertices)
    n = len(system.inequalities)
    k = 0 if vertices is None else len(vertices)
    click.echo(f"wrote {n} inequalities, {k} vertices to {out_path}")


_CHECKS = ("theorem2", "appendixA-rx2", "appendixA-rx1")
_CASES = ("ic_hk", "ic_hodtani", "icc", "crc", "cmacc", "sicc")


@main.command()
@click.option("--pmf", "pmf_path", required=True)
@click.option("--check", "check_name", required=True)
def verify(pmf_path, check_name):
    """Run one mechanical verification and report pass/fail."""
    pmf = _load_joint(pmf_path)
    try:
        if check_name == "theorem2":
            report = regions.verify_theorem2(pmf)
        elif check_name == "appendixA-rx2":
            report = regions.verify_appendix_a(pmf, "rx2")
        elif check_name == "appendixA-rx1":
            report = regions.verify_appendix_a(pmf, "rx1")
        elif check_name.startswith("reduction:"):
            case = check_name.split(":", 1)[1]
            if case not in _CASES:
                _fail(EXIT_INPUT, f"unknown reduction case {case!r}; "
                      f"choose from {', '.join(_CASES)}")
            report = regions.verify_reduction(pmf, case)
        else:
            _fail(EXIT_INPUT, f"unknown check {check_name!r}; choose from "
                  f"{', '.join(_CHECKS)} or reduction:CASE")
    except (regions.WrongFactorization,
            regions.StrongInterferenceViolated, PmfError) as exc:
        _fail(EXIT_INPUT, str(exc))
    click.echo(f"verdict: {report.verdict}")
    for note in report.notes:
        click.echo(f"note: {note}")
    for label, witness, magnitude in report.violations:
        point = ", ".join(f"{x:.6f}" for x in witness)
        click.echo(f"violation: {label} at ({point}) by {magnitude:.3g}")
    if not report.passed:
        _sys.exit(EXIT_MISMATCH)
    click.echo("PASS")


@main.command()
@click.option("--family", "family_path", required=True)
@click.option("--out-hull", "hull_path", required=True)
@click.option("--out-cloud", "cloud_path", required=True)
def scan(family_path, hull_path, cloud_path):
    """Scan a parametric family and write the union hull and vertex cloud."""
    try:
        family = files.load_family(family_path)
    except (files.FileFormatError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
    try:
        result = regions.scan_union(family)
    except (PmfError, ValueError) as exc:
        _fail(EXIT_INPUT, str(exc))
    for note in result.skipped:
        click.echo(f"skipped: {note}", err=True)
    files.save_region(result.facets, hull_path,
                      vertices=result.hull_vertices.points)
    files.save_points_csv(result.cloud, ("R0", "R1", "R2"), cloud_path)
    click.echo(f"wrote {len(result.facets.inequalities)} facets to "
               f"{hull_path}, {len(result.cloud)} cloud points to "
               f"{cloud_path}")


def _polygon_ccw(points: np.ndarray) -> np.ndarray:
    center = points.mean(axis=0)
    angles = np.arctan2(points[:, 1] - center[1], points[:, 0] - center[0])
    return points[np.lexsort((points[:, 1], points[:, 0], angles))]


@main.command(name="slice")
@click.option("--region", "region_path", required=True)
@click.option("--fix", "fix_spec", required=True,
              help="variable=value, e.g. R0=0.25")
@click.option("--out", "out_path", required=True)
def slice_cmd(region_path, fix_spec, out_path):
    """Cut a 2-D polygon out of a three-rate region at fixed R0."""
    try:
        system, _ = files.load_region(region_path)
    except (files.FileFormatError, PolytopeError, OSError) as exc:
        _fail(EXIT_INPUT, str(exc))
    try:
        var, value_txt = fix_spec.split("=", 1)
        value = float(value_txt)
    except ValueError:
        _fail(EXIT_INPUT, f"--fix must look like R0=0.25, got {fix_spec!r}")
    var = var.strip()
    if var not in system.variables:
        _fail(EXIT_INPUT, f"{var!r} is not a region variable")
    keep = tuple(v for v in system.variables if v != var)
    if len(keep) != 2:
        _fail(EXIT_INPUT, "slicing needs a three-variable region")
    rows = []
    for iq in system.inequalities:
        coeffs = {v: c for v, c in iq.coeffs.items() if v != var}
        rhs = iq.rhs - float(iq.coeff(var)) * value
        rows.append(make_ineq(coeffs, rhs, iq.label))
    sliced = LinearSystem(keep, tuple(rows))
    if not is_feasible(sliced):
        _fail(EXIT_DEGENERATE, f"slice at {var} = {value} is empty")
    try:
        verts = enumerate_vertices(sliced).points
    except Unbounded as exc:
        _fail(EXIT_DEGENERATE, f"slice unbounded: {exc}")
    polygon = _polygon_ccw(verts) if len(verts) > 1 else verts
    closed = np.vstack([polygon, polygon[:1]])
    files.save_points_csv(closed, keep, out_path)
    click.echo(f"wrote {len(polygon)}-vertex polygon to {out_path}")


@main.command()
@click.option("--pmf", "pmf_path", required=True)
@click.option("--which", type=click.Choice(sorted(binning.LAYERS)),
              required=True)
@click.option("--n", "block_len", type=int, required=True)
@click.option("--trials", type=int, required=True)
@click.option("--eps", type=float, default=binning.DEFAULT_EPS,
              show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--margins", required=True,
              help="comma-separated margins in bits, ascending")
@click.option("--bin-rate", type=float, default=0.25, show_default=True)
@click.option("--out", "out_path", required=True)
def simulate(pmf_path, which, block_len, trials, eps, seed, margins,
             bin_rate, out_path):
    """Sweep the covering success rate against the binning-rate margin."""
    pmf = _load_joint(pmf_path)
    try:
        margin_list = [float(m) for m in margins.split(",") if m.strip()]
    except ValueError:
        _fail(EXIT_INPUT, f"bad margin list {margins!r}")
    try:
        cfg = binning.SimConfig(n=block_len, trials=trials, eps=eps,
                                seed=seed, which=which,
                                pre_bin_rate=bin_rate, bin_rate=bin_rate)
        curve = binning.threshold_sweep(pmf, cfg, margin_list)
    except binning.CodebookTooLarge as exc:
        _fail(EXIT_RESOURCE, str(exc))
    except (PmfError, ValueError) as exc:
        _fail(EXIT_INPUT, str(exc))
    files.save_curve_csv(curve, cfg, out_path)
    click.echo(f"wrote {len(curve)} sweep points to {out_path}")
