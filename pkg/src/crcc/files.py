"""JSON/CSV file formats.

Distributions travel as factor lists (flat row-major tables), regions as
H-representations with exact "p/q" coefficient strings plus optional
vertices, parametric families as a distribution file with a "parameters"
grid block.  Point clouds and sweep curves are CSV.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction

import numpy as np

from .families import FamilySpec
from .polytope import Inequality, LinearSystem, format_combo, parse_combo
from .probability import Factor, FactorizationSpec, PmfError


class FileFormatError(ValueError):
    """Malformed input document."""


def _check_fields(obj: dict, allowed: set[str], what: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise FileFormatError(f"{what}: unknown fields {sorted(unknown)}")


def _require(obj: dict, name: str, what: str):
    if name not in obj:
        raise FileFormatError(f"{what}: missing field {name!r}")
    return obj[name]


# -- distribution files ------------------------------------------------------

def load_pmf_doc(doc: dict) -> FactorizationSpec:
    _check_fields(doc, {"variables", "factors"}, "pmf document")
    var_docs = _require(doc, "variables", "pmf document")
    variables = []
    for v in var_docs:
        _check_fields(v, {"name", "size"}, "variable entry")
        variables.append((str(_require(v, "name", "variable")),
                          int(_require(v, "size", "variable"))))
    factors = []
    for f in _require(doc, "factors", "pmf document"):
        _check_fields(f, {"child", "parents", "table"}, "factor entry")
        child = _require(f, "child", "factor")
        if isinstance(child, list):
            child = tuple(str(c) for c in child)
        else:
            child = str(child)
        parents = tuple(str(p) for p in _require(f, "parents", "factor"))
        table = np.asarray(_require(f, "table", "factor"), dtype=float)
        factors.append(Factor(child=child, parents=parents, table=table))
    try:
        return FactorizationSpec(variables=tuple(variables),
                                 factors=tuple(factors))
    except PmfError as exc:
        raise FileFormatError(str(exc)) from exc


def load_pmf(path) -> FactorizationSpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: invalid JSON: {exc}") from exc
    return load_pmf_doc(doc)


def pmf_doc(spec: FactorizationSpec) -> dict:
    return {
        "variables": [{"name": n, "size": s} for n, s in spec.variables],
        "factors": [
            {"child": (f.child if isinstance(f.child, str)
                       else list(f.child)),
             "parents": list(f.parents),
             "table": [float(x) for x in np.asarray(f.table).ravel()]}
            for f in spec.factors],
    }


def save_pmf(spec: FactorizationSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(pmf_doc(spec), fh, indent=1)
        fh.write("\n")


# -- region files ------------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def region_doc(sys: LinearSystem, vertices=None) -> dict:
    doc = {
        "variables": list(sys.variables),
        "inequalities": [
            {"coeffs": {v: _frac_str(c) for v, c in sorted(iq.coeffs.items())},
             "rhs": float(iq.rhs),
             "symbolic": iq.sym_text(),
             "label": iq.label}
            for iq in sys.inequalities],
    }
    if vertices is not None:
        doc["vertices"] = [[float(x) for x in row] for row in vertices]
    return doc


def save_region(sys: LinearSystem, path, vertices=None) -> None:
    with open(path, "w") as fh:
        json.dump(region_doc(sys, vertices), fh, indent=1)
        fh.write("\n")


def load_region(path) -> tuple[LinearSystem, np.ndarray | None]:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: invalid JSON: {exc}") from exc
    _check_fields(doc, {"variables", "inequalities", "vertices"},
                  "region document")
    variables = tuple(str(v) for v in _require(doc, "variables", "region"))
    rows = []
    for iq in _require(doc, "inequalities", "region"):
        _check_fields(iq, {"coeffs", "rhs", "symbolic", "label"},
                      "inequality entry")
        coeffs = {str(v): Fraction(s)
                  for v, s in _require(iq, "coeffs", "inequality").items()}
        sym, scalar = parse_combo(iq.get("symbolic", "0"))
        rows.append(Inequality(coeffs=coeffs,
                               rhs=float(_require(iq, "rhs", "inequality")),
                               label=str(iq.get("label", "")),
                               sym=sym, sym_scalar=scalar))
    system = LinearSystem(variables, tuple(rows))
    verts = doc.get("vertices")
    return system, (None if verts is None else np.asarray(verts, dtype=float))


# -- family files ------------------------------------------------------------

def load_family(path) -> FamilySpec:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: invalid JSON: {exc}") from exc
    _check_fields(doc, {"variables", "factors", "parameters"},
                  "family document")
    variables = tuple(
        (str(_require(v, "name", "variable")),
         int(_require(v, "size", "variable")))
        for v in _require(doc, "variables", "family document"))
    factors = []
    for f in _require(doc, "factors", "family document"):
        _check_fields(f, {"child", "parents", "table"}, "factor entry")
        child = _require(f, "child", "factor")
        child = tuple(child) if isinstance(child, list) else str(child)
        factors.append((child,
                        tuple(str(p) for p in _require(f, "parents", "factor")),
                        tuple(_flatten(_require(f, "table", "factor")))))
    grid = []
    for p in _require(doc, "parameters", "family document"):
        _check_fields(p, {"name", "min", "max", "steps"}, "parameter entry")
        grid.append((str(_require(p, "name", "parameter")),
                     float(_require(p, "min", "parameter")),
                     float(_require(p, "max", "parameter")),
                     int(_require(p, "steps", "parameter"))))
    return FamilySpec(variables=variables, factors=tuple(factors),
                      grid=tuple(grid))


def _flatten(raw):
    if isinstance(raw, list):
        out = []
        for item in raw:
            out.extend(_flatten(item))
        return out
    return [raw]


# -- CSV ---------------------------------------------------------------------

def save_points_csv(points: np.ndarray, header, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in np.asarray(points):
            writer.writerow([f"{float(x) if x != 0 else 0.0:.12g}"
                             for x in row])


def save_curve_csv(curve, cfg, path) -> None:
    """Sweep curve rows: margin_bits, success_rate, trials, n, seed."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["margin_bits", "success_rate", "trials", "n",
                         "seed"])
        for margin, success in curve:
            writer.writerow([f"{margin:.12g}", f"{success:.12g}",
                             cfg.trials, cfg.n, cfg.seed])
