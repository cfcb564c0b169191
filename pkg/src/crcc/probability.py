"""Finite-alphabet joint distributions and information measures.

Distributions are dense numpy tensors indexed by an ordered list of named
variables.  Joints are either given directly or assembled from an ordered
list of conditional factors (a Bayesian-network style product).  All
information quantities are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SUM_TOL = 1e-9          # tolerated deviation of a (row) sum from 1
MAX_ENTRIES = 10**6     # dense-tensor size guard
CLAMP_TOL = 1e-12       # negative-MI clamp window

# Canonical variable order for a full channel instance.
CANONICAL_ORDER = ("W0", "W1", "U1", "W2", "U2", "X1", "X2", "Y1", "Y2")

CHANNEL_PAIR = ("Y1", "Y2")


class PmfError(ValueError):
    """Base class for distribution construction/query errors."""


class NonStochasticTable(PmfError):
    """A conditional table row does not sum to 1 within tolerance."""


class CyclicFactorOrder(PmfError):
    """A factor references a parent that is not an earlier child."""


class MissingChannelFactor(PmfError):
    """Some declared variable is not produced by any factor."""


class UnknownVariable(PmfError):
    """A named variable is not part of the distribution."""


class OverlappingSets(PmfError):
    """Mutual-information argument sets are not pairwise disjoint."""


@dataclass(frozen=True)
class JointPmf:
    """Joint distribution over named finite-alphabet variables.

    ``probs`` has one axis per variable, in ``variables`` order.  Entries are
    nonnegative and sum to 1; inputs off by at most ``SUM_TOL`` are
    renormalized, anything worse is rejected.
    """

    variables: tuple[tuple[str, int], ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = [n for n, _ in self.variables]
        if len(set(names)) != len(names):
            raise PmfError(f"duplicate variable names in {names}")
        sizes = tuple(s for _, s in self.variables)
        if any(s < 1 for s in sizes):
            raise PmfError("alphabet sizes must be >= 1")
        if math.prod(sizes) > MAX_ENTRIES:
            raise PmfError(f"tensor would exceed {MAX_ENTRIES} entries")
        probs = np.asarray(self.probs, dtype=float).reshape(sizes)
        if probs.min(initial=0.0) < 0:
            raise PmfError("negative probability entry")
        total = probs.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise PmfError(f"entries sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs / total)
        probs.setflags(write=False)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.variables)

    def size_of(self, name: str) -> int:
        for n, s in self.variables:
            if n == name:
                return s
        raise UnknownVariable(name)

    def _axes(self, names) -> list[int]:
        order = self.names
        axes = []
        for n in names:
            if n not in order:
                raise UnknownVariable(n)
            axes.append(order.index(n))
        return axes


@dataclass(frozen=True)
class Factor:
    """One conditional factor p(child | parents).

    ``child`` is a variable name, or the pair ``("Y1", "Y2")`` for the
    channel factor.  ``table`` is indexed by the parents in listed order and
    then the child variable(s), child index fastest.
    """

    child: str | tuple[str, str]
    parents: tuple[str, ...]
    table: np.ndarray = field(repr=False)

    @property
    def child_vars(self) -> tuple[str, ...]:
        return (self.child,) if isinstance(self.child, str) else tuple(self.child)


@dataclass(frozen=True)
class FactorizationSpec:
    """Ordered conditional-factor structure for a joint distribution."""

    variables: tuple[tuple[str, int], ...]
    factors: tuple[Factor, ...]

    def __post_init__(self):
        sizes = dict(self.variables)
        seen: list[str] = []
        pair_factors = 0
        for f in self.factors:
            for p in f.parents:
                if p not in sizes:
                    raise UnknownVariable(p)
                if p not in seen:
                    raise CyclicFactorOrder(
                        f"parent {p!r} of {f.child!r} is not an earlier child")
            for c in f.child_vars:
                if c not in sizes:
                    raise UnknownVariable(c)
                if c in seen:
                    raise PmfError(f"variable {c!r} produced by two factors")
            if not isinstance(f.child, str):
                if tuple(f.child) != CHANNEL_PAIR or not set(f.parents) <= {"X1", "X2"}:
                    raise PmfError(
                        "pair-child factor must be (Y1,Y2) with parents in {X1,X2}")
                pair_factors += 1
            shape = tuple(sizes[p] for p in f.parents) + tuple(
                sizes[c] for c in f.child_vars)
            table = np.asarray(f.table, dtype=float).reshape(shape)
            if table.min(initial=0.0) < 0:
                raise NonStochasticTable(f"negative entry in table for {f.child!r}")
            naxes = len(f.child_vars)
            rows = table.reshape(table.shape[:len(f.parents)] + (-1,))
            dev = np.abs(rows.sum(axis=-1) - 1.0)
            if dev.size and dev.max() > SUM_TOL:
                raise NonStochasticTable(
                    f"rows of table for {f.child!r} sum off by {dev.max():.3g}")
            object.__setattr__(f, "table", table)
            seen.extend(f.child_vars)
        if pair_factors > 1:
            raise PmfError("more than one (Y1,Y2) channel factor")
        missing = [n for n, _ in self.variables if n not in seen]
        if missing:
            raise MissingChannelFactor(f"no factor produces {missing}")

    def child_order(self) -> list[str]:
        out: list[str] = []
        for f in self.factors:
            out.extend(f.child_vars)
        return out


def build_joint(spec: FactorizationSpec) -> JointPmf:
    """Multiply the conditional factors of ``spec`` into a full joint."""
    sizes = dict(spec.variables)
    order = spec.child_order()
    shape = tuple(sizes[n] for n in order)
    probs = np.ones(shape)
    for f in spec.factors:
        involved = list(f.parents) + list(f.child_vars)
        idx = tuple(
            (slice(None) if n in involved else np.newaxis) for n in order)
        # permute table axes into joint variable order
        perm = sorted(range(len(involved)), key=lambda i: order.index(involved[i]))
        probs = probs * np.transpose(f.table, perm)[idx]
    variables = tuple((n, sizes[n]) for n in order)
    return JointPmf(variables=variables, probs=probs)


def marginalize(pmf: JointPmf, keep) -> JointPmf:
    """Sum out every variable not in ``keep`` (order of ``pmf`` preserved)."""
    keep = set(keep)
    axes = pmf._axes(keep)  # validates names
    drop = tuple(i for i, (n, _) in enumerate(pmf.variables) if n not in keep)
    probs = pmf.probs.sum(axis=drop) if drop else pmf.probs
    variables = tuple(v for v in pmf.variables if v[0] in keep)
    if not variables:
        raise PmfError("cannot marginalize away every variable")
    return JointPmf(variables=variables, probs=probs)


def entropy(pmf: JointPmf, vars) -> float:
    """H(vars) in bits, with the 0*log0 = 0 convention."""
    vars = tuple(vars)
    if not vars:
        return 0.0
    p = marginalize(pmf, vars).probs.ravel()
    nz = p > 0
    return float(-(p[nz] * np.log2(p[nz])).sum())


def cond_mutual_information(pmf: JointPmf, A, B, C=()) -> float:
    """I(A;B|C) in bits, computed as H(AC) + H(BC) - H(ABC) - H(C)."""
    A, B, C = set(A), set(B), set(C)
    if not A or not B:
        raise PmfError("A and B must be nonempty")
    if A & B or A & C or B & C:
        raise OverlappingSets(f"sets overlap: {A}, {B}, {C}")
    v = entropy(pmf, A | C) + entropy(pmf, B | C) - entropy(pmf, A | B | C)
    if C:
        v -= entropy(pmf, C)
    if -CLAMP_TOL < v < 0:
        return 0.0
    return v


@dataclass(frozen=True)
class FactorizationReport:
    """Per-factor conditional-independence deviations."""

    deviations: tuple[tuple[str, float], ...]  # (child label, max deviation)
    tol: float

    @property
    def max_deviation(self) -> float:
        return max((d for _, d in self.deviations), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def worst(self) -> tuple[str, float]:
        return max(self.deviations, key=lambda t: t[1])


def _conditional(joint: np.ndarray, n_cond_axes: int) -> np.ndarray:
    """p(rest | first n_cond_axes), zero where the condition has mass 0."""
    cond = joint.sum(axis=tuple(range(n_cond_axes, joint.ndim)), keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(cond > 0, joint / np.where(cond > 0, cond, 1.0), 0.0)
    return out


def check_factorization(pmf: JointPmf, spec: FactorizationSpec,
                        tol: float) -> FactorizationReport:
    """Measure how far ``pmf`` is from the independence structure of ``spec``.

    For each factor, compares p(child | all earlier children) against
    p(child | parents); the factor's own table entries are not used.
    """
    deviations = []
    earlier: list[str] = []
    for f in spec.factors:
        child = list(f.child_vars)
        preds = [n for n in earlier if n in pmf.names]
        parents = list(f.parents)
        full = marginalize(pmf, preds + child)
        # reorder axes: predecessors first, child last
        names = list(full.names)
        perm = [names.index(n) for n in preds + child]
        jfull = np.transpose(full.probs, perm)
        cond_full = _conditional(jfull, len(preds))
        parents_sorted = [n for n in preds if n in parents]
        par = marginalize(pmf, parents_sorted + child)
        pnames = list(par.names)
        pperm = [pnames.index(n) for n in parents_sorted + child]
        jpar = np.transpose(par.probs, pperm)
        cond_par = _conditional(jpar, len(parents_sorted))
        # broadcast p(child|parents) over all predecessor axes
        bshape = tuple(
            (jfull.shape[i] if preds[i] in parents else 1)
            for i in range(len(preds))) + jfull.shape[len(preds):]
        cond_par_b = cond_par.reshape(bshape)
        pred_mass = jfull.sum(axis=tuple(range(len(preds), jfull.ndim)),
                              keepdims=True)
        diff = np.where(pred_mass > 0, np.abs(cond_full - cond_par_b), 0.0)
        label = ",".join(child)
        deviations.append((label, float(diff.max(initial=0.0))))
        earlier.extend(child)
    return FactorizationReport(deviations=tuple(deviations), tol=tol)
