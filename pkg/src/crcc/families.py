"""Canonical factorization structures and distribution generators.

The full-channel joint factors along the chain
w0 -> w1 -> u1 -> w2 -> u2 -> x1, x2 -> (y1, y2); the special cases used by
the reduction checks constrain parent sets of the auxiliaries.  This module
knows those structures, can extract a matching conditional-factor spec from
any joint (for independence testing), generates random instances, and
handles parametric families over a scalar grid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .probability import (
    CANONICAL_ORDER,
    Factor,
    FactorizationSpec,
    JointPmf,
    PmfError,
    marginalize,
)

# (child, parents) chains; channel inputs and the channel itself are shared
_TAIL = (
    ("X1", ("W0", "W1", "U1")),
    ("X2", ("W0", "W2", "U2")),
    (("Y1", "Y2"), ("X1", "X2")),
)

_TAIL_NOAUX = (
    ("X1", ("W0", "W1")),
    ("X2", ("W0", "W2")),
    (("Y1", "Y2"), ("X1", "X2")),
)

# Fully correlated auxiliaries (the general achievability chain).
FORM2_STRUCTURE = (
    ("W0", ()),
    ("W1", ("W0",)),
    ("U1", ("W0", "W1")),
    ("W2", ("W0", "W1", "U1")),
    ("U2", ("W0", "W1", "U1", "W2")),
) + _TAIL

# Independent per-sender auxiliaries (interference-channel style).
ICC_STRUCTURE = (
    ("W0", ()),
    ("W1", ("W0",)),
    ("U1", ("W0", "W1")),
    ("W2", ("W0",)),
    ("U2", ("W0", "W2")),
) + _TAIL

# Everything conditionally independent given the cloud center.
HK_STRUCTURE = (
    ("W0", ()),
    ("W1", ("W0",)),
    ("U1", ("W0",)),
    ("W2", ("W0",)),
    ("U2", ("W0",)),
) + _TAIL

# Cognitive chain without common message (same shape as the full chain).
CRC_STRUCTURE = FORM2_STRUCTURE

# No rate-splitting auxiliaries; channel inputs driven by (W0, Wi).
FORM5_STRUCTURE = (
    ("W0", ()),
    ("W1", ("W0",)),
    ("U1", ()),
    ("W2", ("W0",)),
    ("U2", ()),
) + _TAIL_NOAUX

DEFAULT_SIZES = {n: 2 for n in CANONICAL_ORDER}


def _conditional_table(pmf: JointPmf, child: tuple[str, ...],
                       parents: tuple[str, ...]) -> np.ndarray:
    """p(child | parents) from the joint; zero-mass rows become uniform."""
    sub = marginalize(pmf, tuple(parents) + child)
    names = list(sub.names)
    perm = [names.index(n) for n in tuple(parents) + child]
    joint = np.transpose(sub.probs, perm)
    child_axes = tuple(range(len(parents), joint.ndim))
    cond_mass = joint.sum(axis=child_axes, keepdims=True)
    child_cells = int(np.prod([joint.shape[i] for i in child_axes], initial=1))
    uniform = np.full_like(joint, 1.0 / child_cells)
    with np.errstate(divide="ignore", invalid="ignore"):
        table = np.where(cond_mass > 0,
                         joint / np.where(cond_mass > 0, cond_mass, 1.0),
                         uniform)
    return table


def spec_from_structure(pmf: JointPmf, structure) -> FactorizationSpec:
    """Factorization spec with the given structure and tables read off
    from ``pmf`` itself (used for conditional-independence checks)."""
    factors = []
    for child, parents in structure:
        child_vars = (child,) if isinstance(child, str) else tuple(child)
        table = _conditional_table(pmf, child_vars, tuple(parents))
        factors.append(Factor(child=child, parents=tuple(parents), table=table))
    variables = tuple((n, pmf.size_of(n)) for n in CANONICAL_ORDER)
    return FactorizationSpec(variables=variables, factors=tuple(factors))


def _random_row(rng, k: int, spread: float) -> np.ndarray:
    row = 1.0 + spread * rng.random(k)
    return row / row.sum()


def _random_table(rng, parent_sizes, k: int, spread: float) -> np.ndarray:
    cells = int(np.prod(parent_sizes, initial=1))
    rows = np.stack([_random_row(rng, k, spread) for _ in range(cells)])
    return rows.reshape(tuple(parent_sizes) + (k,))


def _gate_map(rng, parent_names, own_w, own_u=None) -> np.ndarray:
    """Deterministic channel-input map: the sender's cloud and binning bits
    combined by a random monotone gate (OR/AND), so each layer stays
    visible to the receivers both marginally and conditionally (a parity
    here would hide the binning layer marginally)."""
    gate = max if rng.random() < 0.5 else min
    shape = (2,) * len(parent_names)
    table = np.zeros(shape + (2,))
    for combo in itertools.product((0, 1), repeat=len(parent_names)):
        vals = dict(zip(parent_names, combo))
        if own_u is None:
            bit = vals[own_w]
        else:
            bit = gate(vals[own_w], vals[own_u])
        table[combo + (bit,)] = 1.0
    return table


def _random_channel(rng) -> np.ndarray:
    """p(y1,y2|x1,x2): each output is its own input through a flip whose
    crossover depends on the other input (soft interference), so own-signal
    information stays strong while cross terms are genuinely nonzero."""
    base1, base2 = rng.uniform(0.02, 0.10, size=2)
    bump1, bump2 = rng.uniform(0.10, 0.30, size=2)
    table = np.zeros((2, 2, 2, 2))
    for x1, x2 in itertools.product((0, 1), repeat=2):
        d1 = base1 + (bump1 if x2 else 0.0)
        d2 = base2 + (bump2 if x1 else 0.0)
        for y1, y2 in itertools.product((0, 1), repeat=2):
            p1 = (1 - d1) if y1 == x1 else d1
            p2 = (1 - d2) if y2 == x2 else d2
            table[x1, x2, y1, y2] = p1 * p2
    return table


def random_structure_spec(rng, structure, sizes=None,
                          spread: float = 0.6) -> FactorizationSpec:
    """Random instance of a structure: mildly non-uniform auxiliary tables,
    parity channel inputs, near-deterministic noisy channel."""
    sizes = dict(DEFAULT_SIZES if sizes is None else sizes)
    factors = []
    for child, parents in structure:
        if child == ("Y1", "Y2") or (not isinstance(child, str)):
            factors.append(Factor(("Y1", "Y2"), tuple(parents),
                                  _random_channel(rng)))
            continue
        k = sizes[child]
        psizes = [sizes[p] for p in parents]
        if child in ("X1", "X2") and k == 2 and all(s == 2 for s in psizes):
            own_w = "W1" if child == "X1" else "W2"
            own_u = "U1" if child == "X1" else "U2"
            table = _gate_map(rng, parents, own_w,
                              own_u if own_u in parents else None)
        else:
            table = _random_table(rng, psizes, k, spread)
        factors.append(Factor(child, tuple(parents), table))
    variables = tuple((n, sizes[n]) for n in CANONICAL_ORDER)
    return FactorizationSpec(variables=variables, factors=tuple(factors))


def random_form2_spec(rng, spread: float = 0.6) -> FactorizationSpec:
    return random_structure_spec(rng, FORM2_STRUCTURE, spread=spread)


def random_form5_spec(rng, spread: float = 0.6) -> FactorizationSpec:
    sizes = dict(DEFAULT_SIZES)
    sizes["U1"] = sizes["U2"] = 1
    return random_structure_spec(rng, FORM5_STRUCTURE, sizes=sizes,
                                 spread=spread)


class FamilyError(PmfError):
    """Invalid parametric family or grid instantiation."""


@dataclass(frozen=True)
class FamilySpec:
    """A factorization whose table entries may be expressions in named
    scalar parameters, plus a rectangular evaluation grid."""

    variables: tuple[tuple[str, int], ...]
    factors: tuple[tuple[object, tuple[str, ...], tuple], ...]  # child, parents, raw table
    grid: tuple[tuple[str, float, float, int], ...]  # (name, lo, hi, steps)

    def parameter_names(self) -> list[str]:
        return [g[0] for g in self.grid]

    def grid_points(self):
        axes = []
        for name, lo, hi, steps in self.grid:
            if steps < 1:
                raise FamilyError(f"parameter {name}: steps must be >= 1")
            axes.append(np.linspace(lo, hi, steps) if steps > 1
                        else np.array([lo]))
        total = int(np.prod([len(a) for a in axes], initial=1))
        if total > 10**5:
            raise FamilyError(f"grid has {total} points (cap 10^5)")
        names = self.parameter_names()
        for combo in itertools.product(*axes):
            yield dict(zip(names, (float(v) for v in combo)))

    def instantiate(self, params: dict[str, float]) -> FactorizationSpec:
        factors = []
        for child, parents, raw in self.factors:
            flat = [_eval_entry(e, params, child) for e in _flatten(raw)]
            table = np.asarray(flat, dtype=float)
            if table.min(initial=0.0) < -1e-12 or table.max(initial=0.0) > 1 + 1e-12:
                raise FamilyError(
                    f"factor {child!r}: entry outside [0,1] at {params}")
            factors.append(Factor(child if isinstance(child, str) else tuple(child),
                                  tuple(parents), np.clip(table, 0.0, 1.0)))
        try:
            return FactorizationSpec(variables=self.variables,
                                     factors=tuple(factors))
        except PmfError as exc:
            raise FamilyError(f"invalid instantiation at {params}: {exc}") from exc


def _flatten(raw):
    if isinstance(raw, (list, tuple)):
        out = []
        for item in raw:
            out.extend(_flatten(item))
        return out
    return [raw]


def _eval_entry(entry, params: dict[str, float], child) -> float:
    if isinstance(entry, (int, float)):
        return float(entry)
    if isinstance(entry, str):
        try:
            return float(eval(entry, {"__builtins__": {}}, dict(params)))
        except Exception as exc:
            raise FamilyError(
                f"factor {child!r}: cannot evaluate entry {entry!r}: {exc}"
            ) from exc
    raise FamilyError(f"factor {child!r}: bad table entry {entry!r}")
