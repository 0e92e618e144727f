import pytest

from fracham import ExampleProblem, FractionalOrder, Grid, solve


@pytest.fixture(scope="session")
def report_075_n1024():
    """Model-problem solve at alpha=0.5, beta=0.75, n=1024 (shared, ~seconds)."""
    return solve(ExampleProblem(FractionalOrder(0.5), 0.75, Grid(0.0, 1.0, 1024)))


@pytest.fixture(scope="session")
def report_beta1_n1024():
    """Model-problem solve at alpha=0.5, beta=1, n=1024 (smooth minimizer)."""
    return solve(ExampleProblem(FractionalOrder(0.5), 1.0, Grid(0.0, 1.0, 1024)))
