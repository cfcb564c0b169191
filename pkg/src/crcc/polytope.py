"""Linear inequality systems over named rate variables.

Coefficients are exact rationals (``fractions.Fraction``); right-hand sides
are carried twice, as a float and as an exact rational combination of named
constants, so that derivations stay symbolically traceable while LP tests
run in floating point.

Operations: Fourier-Motzkin elimination, LP-based redundancy removal,
vertex enumeration for small bounded systems, projection, substitution and
mutual-containment comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd

import numpy as np
from scipy.optimize import linprog

LP_TOL = 1e-9
VERTEX_DEDUP_TOL = 1e-8
MAX_VERTEX_VARS = 8


class PolytopeError(ValueError):
    pass


class UnknownVariable(PolytopeError):
    pass


class Unbounded(PolytopeError):
    pass


class TooManyVariables(PolytopeError):
    pass


class SingularSubstitution(PolytopeError):
    pass


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(*x.as_integer_ratio())
    return Fraction(x)


@dataclass(frozen=True)
class Inequality:
    """A single constraint  sum_v coeffs[v] * v  <=  rhs.

    ``sym`` maps constant names (e.g. "A1") to exact rational weights and
    ``sym_scalar`` is an exact rational offset; together they are the
    symbolic form of the right-hand side.
    """

    coeffs: dict[str, Fraction]
    rhs: float
    label: str
    sym: dict[str, Fraction] = field(default_factory=dict)
    sym_scalar: Fraction = Fraction(0)

    def coeff(self, var: str) -> Fraction:
        return self.coeffs.get(var, Fraction(0))

    def sym_value(self, constants: dict[str, float]) -> float:
        v = float(self.sym_scalar)
        for name, w in self.sym.items():
            v += float(w) * constants[name]
        return v

    def sym_text(self) -> str:
        return format_combo(self.sym, self.sym_scalar)

    def is_trivial(self, tol: float = LP_TOL) -> bool:
        return all(c == 0 for c in self.coeffs.values()) and self.rhs >= -tol

    def is_contradiction(self, tol: float = LP_TOL) -> bool:
        return all(c == 0 for c in self.coeffs.values()) and self.rhs < -tol


def format_combo(sym: dict[str, Fraction], scalar: Fraction = Fraction(0)) -> str:
    parts = []
    for name in sorted(sym):
        k = sym[name]
        if k == 0:
            continue
        if k == 1:
            parts.append(name)
        elif k == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{k}*{name}")
    if scalar != 0 or not parts:
        parts.append(str(scalar))
    return " + ".join(parts)


def parse_combo(text: str) -> tuple[dict[str, Fraction], Fraction]:
    sym: dict[str, Fraction] = {}
    scalar = Fraction(0)
    for raw in text.split("+"):
        term = raw.strip()
        if not term:
            continue
        neg = term.startswith("-")
        if neg:
            term = term[1:].strip()
        if "*" in term:
            k_txt, name = term.split("*", 1)
            k, name = Fraction(k_txt.strip()), name.strip()
        else:
            try:
                scalar += -Fraction(term) if neg else Fraction(term)
                continue
            except ValueError:
                k, name = Fraction(1), term
        if neg:
            k = -k
        sym[name] = sym.get(name, Fraction(0)) + k
    return {n: k for n, k in sym.items() if k != 0}, scalar


def _normalize(ineq: Inequality) -> Inequality:
    """Scale to primitive integer coefficients (positive scale)."""
    nz = [c for c in ineq.coeffs.values() if c != 0]
    if not nz:
        return ineq
    lcm = 1
    for c in nz:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in nz]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    scale = Fraction(lcm, g)
    if scale == 1:
        return ineq
    return Inequality(
        coeffs={v: c * scale for v, c in ineq.coeffs.items() if c != 0},
        rhs=ineq.rhs * float(scale),
        label=ineq.label,
        sym={n: k * scale for n, k in ineq.sym.items()},
        sym_scalar=ineq.sym_scalar * scale,
    )


def make_ineq(coeffs, rhs, label, sym=None, sym_scalar=0) -> Inequality:
    return _normalize(Inequality(
        coeffs={v: _as_fraction(c) for v, c in coeffs.items() if c != 0},
        rhs=float(rhs),
        label=label,
        sym={} if sym is None else {n: _as_fraction(k) for n, k in sym.items()
                                    if k != 0},
        sym_scalar=_as_fraction(sym_scalar),
    ))


@dataclass(frozen=True)
class LinearSystem:
    """Conjunction of <=-inequalities over an ordered variable list."""

    variables: tuple[str, ...]
    inequalities: tuple[Inequality, ...]
    constants: dict[str, float] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        declared = set(self.variables)
        for ineq in self.inequalities:
            extra = set(ineq.coeffs) - declared
            if extra:
                raise UnknownVariable(f"{ineq.label}: {sorted(extra)}")

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        A = np.array([[float(iq.coeff(v)) for v in self.variables]
                      for iq in self.inequalities], dtype=float)
        if A.size == 0:
            A = A.reshape(0, len(self.variables))
        b = np.array([iq.rhs for iq in self.inequalities], dtype=float)
        return A, b

    def labels(self) -> list[str]:
        return [iq.label for iq in self.inequalities]

    def check_symbolic(self, tol: float = 1e-10) -> None:
        """Assert rhs floats agree with symbolic forms under ``constants``."""
        for iq in self.inequalities:
            if not iq.sym and iq.sym_scalar == 0 and iq.rhs != 0.0:
                continue  # no symbolic form recorded
            if iq.sym and not set(iq.sym) <= set(self.constants):
                continue
            want = iq.sym_value(self.constants)
            if abs(want - iq.rhs) > tol:
                raise PolytopeError(
                    f"{iq.label}: rhs {iq.rhs} vs symbolic {want}")


def _lp(c, A, b, A_eq=None, b_eq=None, bounds=(None, None)):
    return linprog(c, A_ub=A if len(A) else None, b_ub=b if len(A) else None,
                   A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")


def lp_max(sys: LinearSystem, objective: dict[str, float]):
    """Maximize a linear objective over the system.

    Returns (status, value, point) where status is one of
    "optimal", "unbounded", "infeasible".
    """
    A, b = sys.matrix()
    c = np.array([-float(objective.get(v, 0.0)) for v in sys.variables])
    res = _lp(c, A, b)
    if res.status == 0:
        return "optimal", -res.fun, np.asarray(res.x)
    if res.status == 3:
        return "unbounded", np.inf, None
    return "infeasible", -np.inf, None


def is_feasible(sys: LinearSystem) -> bool:
    if any(iq.is_contradiction() for iq in sys.inequalities):
        return False
    A, b = sys.matrix()
    res = _lp(np.zeros(len(sys.variables)), A, b)
    return res.status == 0


def infeasibility_certificate(sys: LinearSystem):
    """Nonnegative multipliers y with y.A = 0 and y.b < 0, or None."""
    A, b = sys.matrix()
    m = len(b)
    if m == 0:
        return None
    # minimize b.y  s.t.  A^T y = 0, sum(y) = 1, y >= 0
    A_eq = np.vstack([A.T, np.ones((1, m))])
    b_eq = np.concatenate([np.zeros(len(sys.variables)), [1.0]])
    res = _lp(b, np.zeros((0, m)), np.zeros(0), A_eq=A_eq, b_eq=b_eq,
              bounds=(0, None))
    if res.status == 0 and res.fun < -LP_TOL:
        return np.asarray(res.x)
    return None


def _infeasible_marker(sys: LinearSystem) -> LinearSystem:
    cert = infeasibility_certificate(sys)
    notes = ["infeasible"]
    if cert is not None:
        combo = ", ".join(
            f"{y:.6g}*{iq.label}" for y, iq in zip(cert, sys.inequalities)
            if y > LP_TOL)
        notes.append(f"certificate: {combo} gives 0 <= negative")
    marker = make_ineq({}, -1.0, "infeasible")
    return LinearSystem(sys.variables, (marker,), dict(sys.constants),
                        tuple(notes))


def fme_eliminate(sys: LinearSystem, var: str) -> LinearSystem:
    """Eliminate ``var`` by pairing positive against negative coefficients."""
    if var not in sys.variables:
        raise UnknownVariable(var)
    zero, pos, neg = [], [], []
    for iq in sys.inequalities:
        c = iq.coeff(var)
        if c > 0:
            pos.append(iq)
        elif c < 0:
            neg.append(iq)
        else:
            zero.append(iq)
    out = [replace(iq, coeffs={v: c for v, c in iq.coeffs.items() if v != var})
           for iq in zero]
    for p, n in itertools.product(pos, neg):
        a, b = p.coeff(var), n.coeff(var)
        mp, mn = -b, a  # both positive
        coeffs = {}
        for v in set(p.coeffs) | set(n.coeffs):
            if v == var:
                continue
            c = mp * p.coeff(v) + mn * n.coeff(v)
            if c != 0:
                coeffs[v] = c
        sym = {}
        for name in set(p.sym) | set(n.sym):
            k = mp * p.sym.get(name, Fraction(0)) + mn * n.sym.get(name, Fraction(0))
            if k != 0:
                sym[name] = k
        iq = Inequality(
            coeffs=coeffs,
            rhs=float(mp) * p.rhs + float(mn) * n.rhs,
            label=f"{p.label}&{n.label}",
            sym=sym,
            sym_scalar=mp * p.sym_scalar + mn * n.sym_scalar,
        )
        if iq.is_trivial():
            continue
        out.append(_normalize(iq))
    variables = tuple(v for v in sys.variables if v != var)
    return LinearSystem(variables, tuple(out), dict(sys.constants), sys.notes)


def remove_redundant(sys: LinearSystem, tol: float = LP_TOL) -> LinearSystem:
    """Drop inequalities whose removal cannot enlarge the feasible set.

    Scans in listed (label) order; each kept/removed decision is made
    against the inequalities still present.  Infeasible systems collapse to
    a canonical single-contradiction system carrying a Farkas certificate.
    """
    if not is_feasible(sys):
        return _infeasible_marker(sys)
    kept = [iq for iq in sys.inequalities if not iq.is_trivial(tol)]
    i = 0
    while i < len(kept):
        iq = kept[i]
        rest = kept[:i] + kept[i + 1:]
        trial = LinearSystem(sys.variables, tuple(rest), dict(sys.constants))
        status, value, _ = lp_max(trial, {v: float(c)
                                          for v, c in iq.coeffs.items()})
        if status == "optimal" and value <= iq.rhs + tol:
            kept.pop(i)
        else:
            i += 1
    return LinearSystem(sys.variables, tuple(kept), dict(sys.constants),
                        sys.notes)


def redundant_labels(sys: LinearSystem, tol: float = LP_TOL) -> list[str]:
    """Labels removed by ``remove_redundant`` (empty for infeasible input)."""
    reduced = remove_redundant(sys, tol)
    if "infeasible" in reduced.notes:
        return []
    kept = set(id(iq) for iq in reduced.inequalities)
    kept_labels = [iq.label for iq in reduced.inequalities]
    out = []
    counts: dict[str, int] = {}
    for lbl in kept_labels:
        counts[lbl] = counts.get(lbl, 0) + 1
    for iq in sys.inequalities:
        if counts.get(iq.label, 0) > 0:
            counts[iq.label] -= 1
        else:
            out.append(iq.label)
    return out


def _pair_cost(sys: LinearSystem, var: str) -> int:
    pos = sum(1 for iq in sys.inequalities if iq.coeff(var) > 0)
    neg = sum(1 for iq in sys.inequalities if iq.coeff(var) < 0)
    return pos * neg


def project(sys: LinearSystem, keep) -> LinearSystem:
    """Exact shadow of the feasible set on the ``keep`` variables."""
    keep = list(keep)
    for v in keep:
        if v not in sys.variables:
            raise UnknownVariable(v)
    cur = sys
    to_drop = [v for v in sys.variables if v not in keep]
    while to_drop:
        var = min(to_drop, key=lambda v: (_pair_cost(cur, v), to_drop.index(v)))
        to_drop.remove(var)
        cur = fme_eliminate(cur, var)
        cur = remove_redundant(cur)
        if "infeasible" in cur.notes:
            # shadow of an empty set is empty; drop remaining vars directly
            return LinearSystem(tuple(keep), cur.inequalities,
                                dict(cur.constants), cur.notes)
    cur = remove_redundant(cur)
    order = tuple(v for v in cur.variables if v in keep)
    if list(order) != keep:
        cur = LinearSystem(tuple(keep), cur.inequalities, dict(cur.constants),
                           cur.notes)
    return cur


@dataclass(frozen=True)
class VertexSet:
    points: np.ndarray  # (k, d), lexicographically sorted
    dedup_tol: float = VERTEX_DEDUP_TOL


def _sorted_points(points: np.ndarray) -> np.ndarray:
    if len(points) == 0:
        return points
    order = np.lexsort(points.T[::-1])
    return points[order]


def enumerate_vertices(sys: LinearSystem) -> VertexSet:
    """All vertices of a bounded system with <= 8 variables.

    Solves every d-subset of constraints taken tight, keeps feasible
    solutions, dedups at 1e-8.
    """
    d = len(sys.variables)
    if d > MAX_VERTEX_VARS:
        raise TooManyVariables(f"{d} > {MAX_VERTEX_VARS}")
    if not is_feasible(sys):
        return VertexSet(points=np.zeros((0, d)))
    for v in sys.variables:
        for sign in (1.0, -1.0):
            status, _, _ = lp_max(sys, {v: sign})
            if status == "unbounded":
                raise Unbounded(f"variable {v} unbounded")
    A, b = sys.matrix()
    m = len(b)
    combos = np.array(list(itertools.combinations(range(m), d)))
    if len(combos) == 0:
        raise PolytopeError("fewer constraints than dimensions")
    sub_A = A[combos]               # (k, d, d)
    sub_b = b[combos]               # (k, d)
    dets = np.linalg.det(sub_A)
    ok = np.abs(dets) > 1e-12
    points = np.linalg.solve(sub_A[ok], sub_b[ok][..., None])[..., 0]
    slack = b[None, :] - points @ A.T
    feasible = (slack.min(axis=1) >= -LP_TOL) if len(points) else np.zeros(0, bool)
    points = points[feasible]
    verts: list[np.ndarray] = []
    for p in points:
        if not any(np.abs(p - q).max() <= VERTEX_DEDUP_TOL for q in verts):
            verts.append(p)
    arr = np.array(verts) if verts else np.zeros((0, d))
    return VertexSet(points=_sorted_points(arr))


@dataclass(frozen=True)
class RegionReport:
    """Outcome of a mechanical region comparison."""

    verdict: str  # equal | subset_a_in_b | subset_b_in_a | incomparable | empty
    violations: tuple[tuple[str, tuple[float, ...], float], ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return self.verdict in ("equal", "empty")


def _containment_violations(inner: LinearSystem, outer: LinearSystem,
                            tol: float):
    """Inequalities of ``outer`` violated somewhere in ``inner``."""
    out = []
    for iq in outer.inequalities:
        status, value, point = lp_max(
            inner, {v: float(c) for v, c in iq.coeffs.items()})
        if status == "infeasible":
            return []
        if status == "unbounded":
            out.append((iq.label, (), np.inf))
        elif value > iq.rhs + tol:
            out.append((iq.label, tuple(point), value - iq.rhs))
    return out


def systems_equal(a: LinearSystem, b: LinearSystem,
                  tol: float = 1e-8) -> RegionReport:
    """Mutual containment of two systems over the same variables."""
    if tuple(a.variables) != tuple(b.variables):
        raise PolytopeError("variable lists differ")
    fa, fb = is_feasible(a), is_feasible(b)
    if not fa and not fb:
        return RegionReport(verdict="empty", notes=("both systems empty",))
    if not fa or not fb:
        empty, other, which = (a, b, "a") if not fa else (b, a, "b")
        _, _, point = lp_max(other, {})
        return RegionReport(
            verdict="incomparable",
            violations=(("nonempty-vs-empty", tuple(point), np.inf),),
            notes=(f"system {which} is empty, the other is not",))
    # a inside b: every inequality of b holds over a
    viol_ab = _containment_violations(a, b, tol)
    viol_ba = _containment_violations(b, a, tol)
    if not viol_ab and not viol_ba:
        return RegionReport(verdict="equal")
    if not viol_ab:
        return RegionReport(verdict="subset_a_in_b", violations=tuple(viol_ba))
    if not viol_ba:
        return RegionReport(verdict="subset_b_in_a", violations=tuple(viol_ab))
    return RegionReport(verdict="incomparable",
                        violations=tuple(viol_ab + viol_ba))


def substitute(sys: LinearSystem, defs) -> LinearSystem:
    """Rewrite the system in new coordinates.

    ``defs`` is a list of ``(new_name, combo, replaces)`` triples meaning
    new = sum(combo[old] * old); each triple names the old variable it
    replaces.  The map must be invertible over the replaced variables.
    """
    defs = [(new, {v: _as_fraction(c) for v, c in combo.items()}, old)
            for new, combo, old in defs]
    replaced = [old for _, _, old in defs]
    if len(set(replaced)) != len(replaced):
        raise SingularSubstitution("duplicate replaced variable")
    for old in replaced:
        if old not in sys.variables:
            raise UnknownVariable(old)
    kept = [v for v in sys.variables if v not in replaced]
    # solve  new_j = sum_R M[j][r] * r + sum_K N[j][k] * k   for the r's
    n = len(defs)
    M = [[combo.get(r, Fraction(0)) for r in replaced] for _, combo, _ in defs]
    N = [[combo.get(k, Fraction(0)) for k in kept] for _, combo, _ in defs]
    # gaussian elimination with exact fractions: invert M
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise SingularSubstitution("definition matrix is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    Minv = [row[n:] for row in aug]
    new_names = [new for new, _, _ in defs]
    # r_i = sum_j Minv[i][j] * (new_j - sum_k N[j][k] * k)
    expr = {}
    for i, r in enumerate(replaced):
        combo: dict[str, Fraction] = {}
        for j in range(n):
            w = Minv[i][j]
            if w == 0:
                continue
            combo[new_names[j]] = combo.get(new_names[j], Fraction(0)) + w
            for k_idx, k in enumerate(kept):
                if N[j][k_idx] != 0:
                    combo[k] = combo.get(k, Fraction(0)) - w * N[j][k_idx]
        expr[r] = {v: c for v, c in combo.items() if c != 0}
    variables = tuple(
        dict(zip(replaced, new_names))[v] if v in expr else v
        for v in sys.variables)
    out = []
    for iq in sys.inequalities:
        coeffs: dict[str, Fraction] = {}
        for v, c in iq.coeffs.items():
            if v in expr:
                for nv, w in expr[v].items():
                    coeffs[nv] = coeffs.get(nv, Fraction(0)) + c * w
            else:
                coeffs[v] = coeffs.get(v, Fraction(0)) + c
        out.append(_normalize(replace(
            iq, coeffs={v: c for v, c in coeffs.items() if c != 0})))
    return LinearSystem(variables, tuple(out), dict(sys.constants), sys.notes)


def restrict_to_zero(sys: LinearSystem, vars) -> LinearSystem:
    """Intersect with {v = 0 for v in vars} and drop those coordinates."""
    vars = set(vars)
    for v in vars:
        if v not in sys.variables:
            raise UnknownVariable(v)
    out = []
    for iq in sys.inequalities:
        coeffs = {v: c for v, c in iq.coeffs.items() if v not in vars}
        iq2 = replace(iq, coeffs=coeffs)
        if iq2.is_trivial():
            continue
        out.append(iq2)
    variables = tuple(v for v in sys.variables if v not in vars)
    return LinearSystem(variables, tuple(out), dict(sys.constants), sys.notes)


def rename_variables(sys: LinearSystem, mapping: dict[str, str]) -> LinearSystem:
    variables = tuple(mapping.get(v, v) for v in sys.variables)
    out = tuple(replace(iq, coeffs={mapping.get(v, v): c
                                    for v, c in iq.coeffs.items()})
                for iq in sys.inequalities)
    return LinearSystem(variables, out, dict(sys.constants), sys.notes)
