"""Inequality systems: elimination, redundancy, vertices, comparison."""

from fractions import Fraction

import numpy as np
import pytest

from crcc.polytope import (
    LinearSystem,
    SingularSubstitution,
    TooManyVariables,
    Unbounded,
    UnknownVariable,
    enumerate_vertices,
    fme_eliminate,
    format_combo,
    infeasibility_certificate,
    is_feasible,
    lp_max,
    make_ineq,
    parse_combo,
    project,
    redundant_labels,
    remove_redundant,
    substitute,
    systems_equal,
)


def unit_square():
    return LinearSystem(("x", "y"), (
        make_ineq({"x": 1}, 1, "x<=1"),
        make_ineq({"x": -1}, 0, "x>=0"),
        make_ineq({"y": 1}, 1, "y<=1"),
        make_ineq({"y": -1}, 0, "y>=0"),
    ))


def unit_cube():
    rows = []
    for v in ("x", "y", "z"):
        rows.append(make_ineq({v: 1}, 1, f"{v}<=1"))
        rows.append(make_ineq({v: -1}, 0, f"{v}>=0"))
    return LinearSystem(("x", "y", "z"), tuple(rows))


class TestSymbolicCombos:
    def test_round_trip(self):
        sym = {"A1": Fraction(2), "E2": Fraction(1), "F2": Fraction(-1, 2)}
        text = format_combo(sym, Fraction(1, 3))
        back, scalar = parse_combo(text)
        assert back == sym
        assert scalar == Fraction(1, 3)

    def test_symbolic_consistency_enforced(self):
        sys = LinearSystem(("x",), (
            make_ineq({"x": 1}, 2.0, "bad", sym={"A1": 1}),),
            constants={"A1": 1.0})
        with pytest.raises(Exception):
            sys.check_symbolic()


class TestFme:
    def test_textbook_pair(self):
        sys = LinearSystem(("x", "y"), (
            make_ineq({"x": 1}, 3, "a"),
            make_ineq({"x": -1}, -1, "b"),
            make_ineq({"x": 1, "y": 1}, 5, "c"),
        ))
        out = fme_eliminate(sys, "x")
        assert out.variables == ("y",)
        # the only informative row is y <= 4
        status, value, _ = lp_max(out, {"y": 1})
        assert status == "optimal"
        assert value == pytest.approx(4.0)

    def test_unknown_variable(self):
        with pytest.raises(UnknownVariable):
            fme_eliminate(unit_square(), "z")

    def test_soundness_completeness_random(self, rng):
        """Projection membership must equal extension feasibility."""
        for _ in range(12):
            rows = []
            for i in range(10):
                coeffs = {v: int(c) for v, c in
                          zip("xyz", rng.integers(-3, 4, size=3))}
                rows.append(make_ineq(coeffs, float(rng.uniform(0.2, 3)),
                                      f"r{i}"))
            for v in "xyz":
                rows.append(make_ineq({v: -1}, 0.5, f"{v}lb"))
                rows.append(make_ineq({v: 1}, 4.0, f"{v}ub"))
            sys = LinearSystem(("x", "y", "z"), tuple(rows))
            proj = fme_eliminate(sys, "z")
            A, b = sys.matrix()
            Ap, bp = proj.matrix()
            pts = rng.uniform(-1.5, 4.5, size=(800, 2))
            in_proj = (pts @ Ap.T <= bp + 1e-9).all(axis=1)
            for p, claimed in zip(pts, in_proj):
                # extension oracle: z-interval from the original rows
                lo, hi = -np.inf, np.inf
                feasible = True
                for row, rhs in zip(A, b):
                    rem = rhs - row[0] * p[0] - row[1] * p[1]
                    if row[2] > 0:
                        hi = min(hi, rem / row[2])
                    elif row[2] < 0:
                        lo = max(lo, rem / row[2])
                    elif rem < -1e-9:
                        feasible = False
                exists = feasible and lo <= hi + 1e-9
                assert bool(claimed) == exists


class TestRemoveRedundant:
    def test_dominated_bound(self):
        sys = LinearSystem(("x",), (
            make_ineq({"x": 1}, 1, "tight"),
            make_ineq({"x": 1}, 2, "loose"),
            make_ineq({"x": -1}, 0, "lb"),
        ))
        out = remove_redundant(sys)
        assert out.labels() == ["tight", "lb"]
        assert redundant_labels(sys) == ["loose"]

    def test_feasible_set_preserved(self, rng):
        for _ in range(10):
            rows = [make_ineq(
                {v: int(c) for v, c in zip("xy", rng.integers(-2, 3, 2))},
                float(rng.uniform(0.5, 2.0)), f"r{i}")
                for i in range(8)]
            rows += [make_ineq({v: -1}, 1.0, f"{v}lb") for v in "xy"]
            sys = LinearSystem(("x", "y"), tuple(rows))
            if not is_feasible(sys):
                continue
            out = remove_redundant(sys)
            assert systems_equal(sys, out, tol=1e-9).passed

    def test_infeasible_input_certified(self):
        sys = LinearSystem(("x",), (
            make_ineq({"x": 1}, 0, "a"),
            make_ineq({"x": -1}, -1, "b"),
        ))
        out = remove_redundant(sys)
        assert not is_feasible(out)
        assert any("certificate" in note for note in out.notes)
        assert infeasibility_certificate(sys) is not None


class TestVertices:
    def test_unit_square(self):
        vs = enumerate_vertices(unit_square())
        expect = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
        assert np.allclose(vs.points, expect)

    def test_origin_only(self):
        rows = [make_ineq({v: 1}, 0, f"{v}ub") for v in "xy"]
        rows += [make_ineq({v: -1}, 0, f"{v}lb") for v in "xy"]
        vs = enumerate_vertices(LinearSystem(("x", "y"), tuple(rows)))
        assert np.allclose(vs.points, np.zeros((1, 2)))

    def test_unbounded_detected(self):
        sys = LinearSystem(("x", "y"), (
            make_ineq({"x": -1}, 0, "lb"),
            make_ineq({"y": 1}, 1, "yub"),
            make_ineq({"y": -1}, 0, "ylb"),
        ))
        with pytest.raises(Unbounded):
            enumerate_vertices(sys)

    def test_too_many_variables(self):
        names = tuple(f"v{i}" for i in range(9))
        rows = tuple(make_ineq({n: 1}, 1, n) for n in names)
        with pytest.raises(TooManyVariables):
            enumerate_vertices(LinearSystem(names, rows))

    def test_random_vertices_tight_and_feasible(self, rng):
        for _ in range(6):
            rows = [make_ineq(
                {v: int(c) for v, c in zip("xyz", rng.integers(-2, 3, 3))},
                float(rng.uniform(0.5, 2.0)), f"r{i}")
                for i in range(7)]
            rows += [make_ineq({v: -1}, 1.0, f"{v}lb") for v in "xyz"]
            rows += [make_ineq({v: 1}, 3.0, f"{v}ub") for v in "xyz"]
            sys = LinearSystem(("x", "y", "z"), tuple(rows))
            A, b = sys.matrix()
            for p in enumerate_vertices(sys).points:
                slack = b - A @ p
                assert slack.min() >= -1e-9
                assert (np.abs(slack) < 1e-7).sum() >= 3

    def test_midpoint_convexity(self, rng):
        sys = unit_cube()
        pts = enumerate_vertices(sys).points
        A, b = sys.matrix()
        idx = rng.integers(0, len(pts), size=(50, 2))
        mids = 0.5 * (pts[idx[:, 0]] + pts[idx[:, 1]])
        assert (mids @ A.T <= b + 1e-9).all()


class TestProject:
    def test_identity_projection(self):
        out = project(unit_square(), ("x", "y"))
        assert systems_equal(out, unit_square()).passed

    def test_cube_to_square(self):
        out = project(unit_cube(), ("x", "y"))
        assert sorted(out.variables) == ["x", "y"]
        assert systems_equal(out, unit_square()).passed

    def test_empty_propagates(self):
        sys = LinearSystem(("x", "y"), (
            make_ineq({"x": 1}, 0, "a"),
            make_ineq({"x": -1}, -1, "b"),
        ))
        out = project(sys, ("y",))
        assert not is_feasible(out)


class TestSystemsEqual:
    def test_self(self):
        assert systems_equal(unit_square(), unit_square()).verdict == "equal"

    def test_redundant_append_still_equal(self):
        extra = LinearSystem(
            ("x", "y"),
            unit_square().inequalities + (make_ineq({"x": 1}, 2, "x<=2"),))
        assert systems_equal(unit_square(), extra).verdict == "equal"

    def test_scaled_copy_detected(self):
        small = LinearSystem(("x", "y"), (
            make_ineq({"x": 1}, 0.9, "x<=0.9"),
            make_ineq({"x": -1}, 0, "xlb"),
            make_ineq({"y": 1}, 0.9, "y<=0.9"),
            make_ineq({"y": -1}, 0, "ylb"),
        ))
        report = systems_equal(unit_square(), small)
        assert report.verdict == "subset_b_in_a"
        label, witness, magnitude = report.violations[0]
        assert magnitude == pytest.approx(0.1, abs=1e-6)
        assert max(witness) == pytest.approx(1.0, abs=1e-6)

    def test_both_empty(self):
        empty = LinearSystem(("x",), (
            make_ineq({"x": 1}, 0, "a"), make_ineq({"x": -1}, -1, "b")))
        assert systems_equal(empty, empty).verdict == "empty"


class TestSubstitute:
    def test_identity(self):
        out = substitute(unit_square(), [("u", {"x": 1}, "x")])
        assert out.variables == ("u", "y")
        renamed = LinearSystem(("u", "y"), tuple(
            make_ineq({("u" if v == "x" else v): c for v, c in
                       iq.coeffs.items()}, iq.rhs, iq.label)
            for iq in unit_square().inequalities))
        assert systems_equal(out, renamed).passed

    def test_sum_rewrite(self):
        sys = LinearSystem(("S1", "T1"), (
            make_ineq({"S1": 1}, 2, "a"),
            make_ineq({"T1": 1}, 3, "b"),
        ))
        out = substitute(sys, [("R1", {"S1": 1, "T1": 1}, "S1")])
        assert set(out.variables) == {"R1", "T1"}
        row_a = next(iq for iq in out.inequalities if iq.label == "a")
        assert row_a.coeffs == {"R1": Fraction(1), "T1": Fraction(-1)}

    def test_singular_rejected(self):
        with pytest.raises(SingularSubstitution):
            substitute(unit_square(), [("u", {"y": 0}, "x")])
