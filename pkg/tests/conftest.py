"""Shared constructions for the test suite."""

import numpy as np
import pytest

from crcc.probability import (
    CANONICAL_ORDER,
    Factor,
    FactorizationSpec,
    build_joint,
)

IDENT = np.eye(2)
ONE = np.ones((1,))


def full_sizes(**overrides):
    sizes = {n: 2 for n in CANONICAL_ORDER}
    sizes.update(overrides)
    return sizes


def make_full_joint(factors, sizes):
    variables = tuple((n, sizes[n]) for n in CANONICAL_ORDER)
    return build_joint(FactorizationSpec(variables=variables,
                                         factors=tuple(factors)))


def independent_pmf():
    """All nine variables independent uniform bits; every MI term is zero."""
    half = np.full(2, 0.5)
    chan = np.full((2, 2, 2, 2), 0.25)
    factors = [Factor(n, (), half)
               for n in ("W0", "W1", "U1", "W2", "U2", "X1", "X2")]
    factors.append(Factor(("Y1", "Y2"), ("X1", "X2"), chan))
    return make_full_joint(factors, full_sizes())


def noiseless_rx2_pmf():
    """W2 uniform; U2 copies W2; X2 = W2; Y2 = X2; everything else trivial.

    Receiver 2 sees its own layer perfectly; receiver 1 sees nothing.
    """
    sizes = full_sizes(W0=1, W1=1, U1=1, X1=1, Y1=1)
    chan = np.zeros((1, 2, 1, 2))
    chan[0, 0, 0, 0] = chan[0, 1, 0, 1] = 1.0
    factors = (
        Factor("W0", (), ONE),
        Factor("W1", (), ONE),
        Factor("U1", (), ONE),
        Factor("W2", (), np.full(2, 0.5)),
        Factor("U2", ("W2",), IDENT),
        Factor("X1", (), ONE),
        Factor("X2", ("W2",), IDENT),
        Factor(("Y1", "Y2"), ("X1", "X2"), chan),
    )
    return make_full_joint(factors, sizes)


def noiseless_both_rx_pmf():
    """Like noiseless_rx2_pmf but both receivers observe X2 perfectly, so
    the interference-decoding bound at receiver 1 does not pin T2 to 0."""
    sizes = full_sizes(W0=1, W1=1, U1=1, X1=1)
    chan = np.zeros((1, 2, 2, 2))
    chan[0, 0, 0, 0] = chan[0, 1, 1, 1] = 1.0
    factors = (
        Factor("W0", (), ONE),
        Factor("W1", (), ONE),
        Factor("U1", (), ONE),
        Factor("W2", (), np.full(2, 0.5)),
        Factor("U2", ("W2",), IDENT),
        Factor("X1", (), ONE),
        Factor("X2", ("W2",), IDENT),
        Factor(("Y1", "Y2"), ("X1", "X2"), chan),
    )
    return make_full_joint(factors, sizes)


def bsc_chain_pmf(q=0.105):
    """W1 uniform; W2 = W1 through a binary symmetric flip; noiseless
    identity channel.  The w2 covering threshold is 1 - h2(q)."""
    sizes = full_sizes(W0=1, U1=1, U2=1)
    bsc = np.array([[1 - q, q], [q, 1 - q]])
    chan = np.einsum("ac,bd->abcd", IDENT, IDENT)
    factors = (
        Factor("W0", (), ONE),
        Factor("W1", ("W0",), np.full((1, 2), 0.5)),
        Factor("U1", (), ONE),
        Factor("W2", ("W1",), bsc),
        Factor("U2", (), ONE),
        Factor("X1", ("W1",), IDENT),
        Factor("X2", ("W2",), IDENT),
        Factor(("Y1", "Y2"), ("X1", "X2"), chan),
    )
    return make_full_joint(factors, sizes)


def _pair_view_table(a, b):
    """p(y|x1,x2) with y = (flip_a(x1), flip_b(x2)) packed into 4 symbols."""
    t = np.zeros((2, 2, 4))
    for x1 in range(2):
        for x2 in range(2):
            for j1 in range(2):
                for j2 in range(2):
                    p = ((1 - a if j1 == x1 else a)
                         * (1 - b if j2 == x2 else b))
                    t[x1, x2, 2 * j1 + j2] = p
    return t


def cross_observation_pmf(a1, b1, a2, b2):
    """Form-(5) joint where Y1 sees (X1 through flip a1, X2 through flip b1)
    and Y2 sees (X1 through a2, X2 through b2), as 4-ary outputs."""
    sizes = full_sizes(U1=1, U2=1, Y1=4, Y2=4)
    t1 = _pair_view_table(a1, b1)
    t2 = _pair_view_table(a2, b2)
    chan = np.einsum("abc,abd->abcd", t1, t2)
    factors = (
        Factor("W0", (), np.full(2, 0.5)),
        Factor("W1", ("W0",), np.array([[0.6, 0.4], [0.3, 0.7]])),
        Factor("U1", (), ONE),
        Factor("W2", ("W0",), np.array([[0.55, 0.45], [0.35, 0.65]])),
        Factor("U2", (), ONE),
        Factor("X1", ("W0", "W1"), np.stack([IDENT, IDENT])),
        Factor("X2", ("W0", "W2"), np.stack([IDENT, IDENT])),
        Factor(("Y1", "Y2"), ("X1", "X2"), chan),
    )
    return make_full_joint(factors, sizes)


def sicc_passing_pmf():
    # each cross link is cleaner than the direct link
    return cross_observation_pmf(0.3, 0.05, 0.05, 0.3)


def sicc_failing_pmf():
    return cross_observation_pmf(0.05, 0.3, 0.3, 0.05)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260825)
