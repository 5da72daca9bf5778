import pytest

from femtocache import ChannelParams, zipf


def db(x):
    return 10.0 ** (x / 10.0)


@pytest.fixture
def default_channel():
    """rho_bar = 15 dB, beta = 5 dB."""
    return ChannelParams.from_beta(db(15.0), db(5.0))


@pytest.fixture
def default_popularity():
    return zipf(20, 0.6)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int(k.split(".")[0]), k)):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"criterion {key:<5} {'PASS' if ok else 'FAIL'}  {detail}")
