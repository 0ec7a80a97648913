import pytest

from capped_lsmc import MarketParams

ACCEPTANCE_LINES = []


@pytest.fixture
def gbm():
    return MarketParams(s0=100.0, s_bar=105.0, strike=110.0, maturity=1.0, rate=0.1,
                        sigma=0.4)


@pytest.fixture
def levy():
    return MarketParams(s0=100.0, s_bar=105.0, strike=110.0, maturity=1.0, rate=0.1,
                        sigma=0.5, jump_intensity=0.0675, jump_rate=0.5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
