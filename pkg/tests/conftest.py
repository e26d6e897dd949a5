import pytest

from ellpsp.curve import Curve

# Per prime: a curve with #E(F_p) = p whose group mod p^2 is split, one
# where it is cyclic, and an ordinary non-anomalous curve.
STRUCTURE_CURVES = {
    5: [Curve(3, 2), Curve(3, 3), Curve(1, 1)],
    7: [Curve(0, 5), Curve(3, 5), Curve(1, 1)],
}

AXIOM_CURVES = [Curve(1, 1), Curve(-1, 0), Curve(1, 0), Curve(2, 1)]


def pytest_report_header(config):
    return "ellpsp exhaustive suites run at desk scale (N <= 245)"


@pytest.fixture
def cli_run(capsys):
    from ellpsp.cli import main

    def run(*argv):
        code = main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
