import pytest

from vaidman import noise, qss


@pytest.fixture(scope="session")
def noise_report():
    return noise.verify_noise_formulas(21)


@pytest.fixture(scope="session")
def basic_session():
    return qss.run_basic_qss(100_000, seed=7)


@pytest.fixture(scope="session")
def w_session():
    return qss.run_facilitated(qss.SessionConfig(100_000, "W", seed=7))


@pytest.fixture(scope="session")
def ghz_session():
    return qss.run_facilitated(qss.SessionConfig(20_000, "GHZ", seed=7))
