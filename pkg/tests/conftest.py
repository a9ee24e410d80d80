import pytest

from ldpcbound.degree_distributions import EnsembleSpec
from ldpcbound.thresholds import table1_ensemble, table1_patterns, table1_reference


@pytest.fixture(scope="session")
def reg36():
    return EnsembleSpec.from_terms([(3, 1.0)], [(6, 1.0)])


@pytest.fixture(scope="session")
def t1_ensemble():
    return table1_ensemble()


@pytest.fixture(scope="session")
def t1_patterns():
    return table1_patterns()


@pytest.fixture(scope="session")
def t1_reference():
    return table1_reference()


@pytest.fixture(scope="session")
def ml_table(t1_ensemble, t1_patterns):
    """Table 1 rows without the density-evolution column (about a minute)."""
    from ldpcbound.thresholds import table1

    return table1(t1_ensemble, t1_patterns, include_it=False, workers=1)
