"""Bound constants and inequality systems for the two-receiver region.

The sixteen constants a1..h1, a2..h2 are conditional mutual-information
combinations evaluated on a full nine-variable joint.  From them we build
the five-rate system over (T0, T1, S1, T2, S2) and, from the underlying
joint, the per-receiver pre-binning systems whose elimination reproduces
the corresponding half of that system.
"""

from __future__ import annotations

from dataclasses import dataclass

from .polytope import LinearSystem, make_ineq
from .probability import CANONICAL_ORDER, JointPmf, PmfError, cond_mutual_information

RATE_VARS = ("T0", "T1", "S1", "T2", "S2")

# receiver-2 pre-binning rates and their bin rates
RX2_VARS = ("T0", "T1", "T2", "S2", "t2", "z2")
RX1_VARS = ("T0", "T1", "S1", "T2", "z1", "t2")


@dataclass(frozen=True)
class BoundConstants:
    """The sixteen per-receiver rate-bound constants, in bits.

    Receiver-1 constants are sums of mutual informations and hence
    nonnegative; receiver-2 constants subtract binning penalties and may be
    negative.
    """

    a1: float
    b1: float
    c1: float
    d1: float
    e1: float
    f1: float
    g1: float
    h1: float
    a2: float
    b2: float
    c2: float
    d2: float
    e2: float
    f2: float
    g2: float
    h2: float

    def __post_init__(self):
        for name in ("a1", "b1", "c1", "d1", "e1", "f1", "g1", "h1"):
            if getattr(self, name) < -1e-10:
                raise ValueError(f"{name} = {getattr(self, name)} < 0")

    def as_dict(self) -> dict[str, float]:
        return {n.upper(): getattr(self, n) for n in
                ("a1", "b1", "c1", "d1", "e1", "f1", "g1", "h1",
                 "a2", "b2", "c2", "d2", "e2", "f2", "g2", "h2")}


def _require_full(pmf: JointPmf) -> None:
    missing = [n for n in CANONICAL_ORDER if n not in pmf.names]
    if missing:
        raise PmfError(f"full channel joint required; missing {missing}")


def correction_terms(pmf: JointPmf) -> dict[str, float]:
    """The five cross-correlation terms that vanish under the
    independent-auxiliary factorization."""
    _require_full(pmf)
    I = lambda A, B, C=(): cond_mutual_information(pmf, A, B, C)
    return {
        "I(U1;W1|W0)": I({"U1"}, {"W1"}, {"W0"}),
        "I(W2;W1,U1|W0)": I({"W2"}, {"W1", "U1"}, {"W0"}),
        "I(U2;W2|W0)": I({"U2"}, {"W2"}, {"W0"}),
        "I(W1;W2,U2|W0)": I({"W1"}, {"W2", "U2"}, {"W0"}),
        "I(U2;U1,W1,W2|W0)": I({"U2"}, {"U1", "W1", "W2"}, {"W0"}),
    }


def binning_thresholds(pmf: JointPmf) -> tuple[float, float, float]:
    """Rate costs of the three bin searches, in bits:
    (u1 given w1, w2 given (w1,u1), u2 given (u1,w1,w2)), all under W0."""
    t = correction_terms(pmf)
    return (t["I(U1;W1|W0)"], t["I(W2;W1,U1|W0)"], t["I(U2;U1,W1,W2|W0)"])


def bound_constants(pmf: JointPmf) -> BoundConstants:
    """Evaluate all sixteen constants on a full nine-variable joint."""
    _require_full(pmf)
    I = lambda A, B, C=(): cond_mutual_information(pmf, A, B, C)
    thr_u1 = I({"U1"}, {"W1"}, {"W0"})
    pen_w2 = I({"W2"}, {"W1", "U1"}, {"W0"})
    pen_u2 = I({"U2"}, {"U1", "W1", "W2"}, {"W0"})
    k1 = thr_u1 + pen_w2
    k2 = I({"U2"}, {"W2"}, {"W0"}) + I({"W1"}, {"W2", "U2"}, {"W0"})
    return BoundConstants(
        a1=I({"Y1"}, {"U1"}, {"W0", "W1", "W2"}) + pen_w2,
        b1=I({"Y1"}, {"W1"}, {"W0", "U1", "W2"}) + k1,
        c1=I({"Y1"}, {"W2"}, {"W0", "W1", "U1"}) + thr_u1,
        d1=I({"Y1"}, {"U1", "W1"}, {"W0", "W2"}) + pen_w2,
        e1=I({"Y1"}, {"W2", "U1"}, {"W0", "W1"}),
        f1=I({"Y1"}, {"W1", "W2"}, {"W0", "U1"}) + thr_u1,
        g1=I({"Y1"}, {"W1", "W2", "U1"}, {"W0"}),
        h1=I({"Y1"}, {"W0", "W1", "W2", "U1"}),
        a2=I({"Y2"}, {"U2"}, {"W0", "W1", "W2"}) + k2 - pen_u2,
        b2=I({"Y2"}, {"W2"}, {"W0", "W1", "U2"}) + k2 - pen_w2,
        c2=I({"Y2"}, {"W1"}, {"W0", "W2", "U2"}) + k2,
        d2=I({"Y2"}, {"U2", "W2"}, {"W0", "W1"}) + k2 - pen_w2 - pen_u2,
        e2=I({"Y2"}, {"U2", "W1"}, {"W0", "W2"}) + k2 - pen_u2,
        f2=I({"Y2"}, {"W1", "W2"}, {"U2", "W0"}) + k2 - pen_w2,
        g2=I({"Y2"}, {"W1", "W2", "U2"}, {"W0"}) + k2 - pen_w2 - pen_u2,
        h2=I({"Y2"}, {"W0", "W1", "W2", "U2"}) + k2 - pen_w2 - pen_u2,
    )


# (label, lhs variables, constant name) for the sixteen rate bounds
_T1_ROWS = (
    ("(3-1)", ("S1",), "A1"),
    ("(3-2)", ("T1",), "B1"),
    ("(3-3)", ("T2",), "C1"),
    ("(3-4)", ("S1", "T1"), "D1"),
    ("(3-5)", ("S1", "T2"), "E1"),
    ("(3-6)", ("T1", "T2"), "F1"),
    ("(3-7)", ("S1", "T1", "T2"), "G1"),
    ("(3-8)", ("S1", "T0", "T1", "T2"), "H1"),
    ("(3-9)", ("S2",), "A2"),
    ("(3-10)", ("T2",), "B2"),
    ("(3-11)", ("T1",), "C2"),
    ("(3-12)", ("S2", "T2"), "D2"),
    ("(3-13)", ("S2", "T1"), "E2"),
    ("(3-14)", ("T1", "T2"), "F2"),
    ("(3-15)", ("S2", "T1", "T2"), "G2"),
    ("(3-16)", ("S2", "T0", "T1", "T2"), "H2"),
)


def nonneg_rows(variables) -> list:
    return [make_ineq({v: -1}, 0.0, f"{v}>=0") for v in variables]


def theorem1_system(c: BoundConstants) -> LinearSystem:
    """Sixteen rate bounds plus nonnegativity over (T0, T1, S1, T2, S2)."""
    constants = c.as_dict()
    rows = [make_ineq({v: 1 for v in lhs}, constants[name], label,
                      sym={name: 1})
            for label, lhs, name in _T1_ROWS]
    rows += nonneg_rows(RATE_VARS)
    return LinearSystem(RATE_VARS, tuple(rows), constants)


def theorem1_halves(c: BoundConstants):
    """The receiver-1 rows (3-1)-(3-8) over (T0,T1,S1,T2) and the
    receiver-2 rows (3-9)-(3-16) over (T0,T1,T2,S2), with nonnegativity."""
    constants = c.as_dict()
    rx1_vars = ("T0", "T1", "S1", "T2")
    rx2_vars = ("T0", "T1", "T2", "S2")
    rx1 = [make_ineq({v: 1 for v in lhs}, constants[name], label, sym={name: 1})
           for label, lhs, name in _T1_ROWS[:8]]
    rx2 = [make_ineq({v: 1 for v in lhs}, constants[name], label, sym={name: 1})
           for label, lhs, name in _T1_ROWS[8:]]
    rx1 += nonneg_rows(rx1_vars)
    rx2 += nonneg_rows(rx2_vars)
    return (LinearSystem(rx1_vars, tuple(rx1), constants),
            LinearSystem(rx2_vars, tuple(rx2), constants))


# index-set patterns of the fifteen pre-binning error bounds, in source order
_ERROR_PATTERNS = (
    ("cloud",), ("own",), ("bin1",), ("bin2",),
    ("cloud", "own"), ("cloud", "bin1"), ("cloud", "bin2"),
    ("own", "bin1"), ("own", "bin2"), ("bin1", "bin2"),
    ("cloud", "own", "bin1"), ("cloud", "own", "bin2"),
    ("cloud", "bin1", "bin2"), ("own", "bin1", "bin2"),
    ("cloud", "own", "bin1", "bin2"),
)


def appendix_a_system(pmf: JointPmf, side: str) -> LinearSystem:
    """Pre-binning rate constraints for one receiver.

    ``side`` is "rx2" (derived in the source error analysis) or "rx1"
    (constructed by the documented role-swap convention and labelled as
    inferred).  The system couples the pre-binning rates to the message
    rates through the bin-search conditions and includes nonnegativity.
    """
    _require_full(pmf)
    I = lambda A, B, C=(): cond_mutual_information(pmf, A, B, C)
    thr_u1, thr_w2, thr_u2 = binning_thresholds(pmf)
    if side == "rx2":
        y = "Y2"
        roles = {"cloud": ("T0", "W0"), "own": ("T1", "W1"),
                 "bin1": ("t2", "W2"), "bin2": ("z2", "U2")}
        gain = I({"U2"}, {"W2"}, {"W0"}) + I({"W1"}, {"W2", "U2"}, {"W0"})
        variables = RX2_VARS
        binning = [
            make_ineq({"T2": 1, "t2": -1}, -thr_w2, "bin-w2"),
            make_ineq({"S2": 1, "z2": -1}, -thr_u2, "bin-u2"),
        ]
        prefix = "A-"
        notes = ()
    elif side == "rx1":
        y = "Y1"
        roles = {"cloud": ("T0", "W0"), "own": ("T1", "W1"),
                 "bin1": ("z1", "U1"), "bin2": ("t2", "W2")}
        gain = thr_u1 + thr_w2
        variables = RX1_VARS
        binning = [
            make_ineq({"S1": 1, "z1": -1}, -thr_u1, "bin-u1"),
            make_ineq({"T2": 1, "t2": -1}, -thr_w2, "bin-w2"),
        ]
        prefix = "A'-"
        notes = ("rx1 system is an inferred construction (role swap of the "
                 "rx2 error analysis)",)
    else:
        raise ValueError(f"side must be rx2 or rx1, got {side!r}")
    rows = []
    for i, pattern in enumerate(_ERROR_PATTERNS, start=1):
        lhs = {roles[k][0]: 1 for k in pattern}
        wrong = {roles[k][1] for k in pattern}
        if "cloud" in pattern:
            mi = I({y}, {roles[k][1] for k in roles})
        else:
            right = {roles[k][1] for k in roles if k not in pattern} - {"W0"}
            mi = I({y}, wrong, {"W0"} | right)
        rows.append(make_ineq(lhs, mi + gain, f"{prefix}{i}"))
    rows += binning
    rows += nonneg_rows(variables)
    return LinearSystem(variables, tuple(rows), {}, notes)
