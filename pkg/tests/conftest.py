import numpy as np
import pytest
from hypothesis import strategies as st

from npt_split import (
    make_binomial,
    make_fock,
    make_mixture,
    make_poisson,
    make_thermal,
    make_vacuum_two_mixture,
    validate_pnd,
)


def random_pnd(rng, n_max=None, sparsity=0.3):
    """Dirichlet-distributed exact PND; some entries zeroed to exercise the zero-moment path."""
    if n_max is None:
        n_max = int(rng.integers(1, 12))
    w = rng.dirichlet(np.full(n_max + 1, 0.7))
    w[rng.random(n_max + 1) < sparsity] = 0.0
    if w.sum() == 0.0:
        w[rng.integers(0, n_max + 1)] = 1.0
    return validate_pnd(w / w.sum())


def random_antibunched_pnd(rng):
    while True:
        pnd = random_pnd(rng)
        n = np.arange(pnd.n_max + 1)
        mean = n @ pnd.probs
        if (n * (n - 1)) @ pnd.probs - mean**2 < -1e-6:
            return pnd


def random_poisson_mixture(rng, max_components=5):
    k = int(rng.integers(1, max_components + 1))
    mus = rng.uniform(0.05, 6.0, size=k)
    weights = rng.dirichlet(np.ones(k))
    weights[-1] = 1.0 - weights[:-1].sum()
    return make_mixture([make_poisson(m) for m in mus], weights)


@st.composite
def pnds(draw, max_n=10):
    """Hypothesis strategy: exact PNDs with n_max <= max_n."""
    n_max = draw(st.integers(1, max_n))
    raw = draw(
        st.lists(
            st.one_of(st.just(0.0), st.floats(1e-6, 1.0)),
            min_size=n_max + 1,
            max_size=n_max + 1,
        ).filter(lambda xs: sum(xs) > 0)
    )
    total = sum(raw)
    return validate_pnd([x / total for x in raw])


def named_fixtures():
    """Named PNDs used across modules."""
    return {
        "vacuum": validate_pnd([1.0]),
        "fock1": make_fock(1),
        "fock2": make_fock(2),
        "fock3": make_fock(3),
        "binomial_2_05": make_binomial(2, 0.5),
        "binomial_5_03": make_binomial(5, 0.3),
        "v2m_025": make_vacuum_two_mixture(0.25),
        "v2m_05": make_vacuum_two_mixture(0.5),
        "poisson_05": make_poisson(0.5),
        "poisson_1": make_poisson(1.0),
        "thermal_05": make_thermal(0.5),
        "thermal_1": make_thermal(1.0),
        "fock1_vac": make_mixture([make_fock(1), validate_pnd([1.0])], [0.5, 0.5]),
        "two_poisson": make_mixture([make_poisson(0.5), make_poisson(2.0)], [0.5, 0.5]),
    }


@pytest.fixture(scope="session")
def fixtures():
    return named_fixtures()


@pytest.fixture
def rng():
    return np.random.default_rng(20060403)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
