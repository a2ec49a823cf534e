import pytest

from bottleneck_flow.slowfast import canard_data
from bottleneck_flow.width import WidthProfile, validate, validate_default

# (alpha, beta) -> region, one pair per region on the cosine profile
REGION_PAIRS = {
    (0.1, 0.4): 1,
    (0.1, 0.9): 2,
    (0.3, 0.6): 3,
    (0.3, 0.8): 4,
    (0.9, 0.6): 5,
    (0.9, 0.8): 6,
    (0.7, 0.2): 7,
    (0.9, 0.2): 8,
}


@pytest.fixture(scope="session")
def cosine():
    return WidthProfile.cosine(0.3, 1.5)


@pytest.fixture(scope="session")
def cosine_info(cosine):
    return validate(cosine)


@pytest.fixture(scope="session")
def cosine_canard(cosine, cosine_info):
    return canard_data(cosine, cosine_info)


def supergauss(wm):
    return WidthProfile.supergaussian(1.0, wm, 0.2, 0.6)


@pytest.fixture(scope="session")
def sg_canards():
    out = {}
    for wm in (0.9, 0.5):
        p = supergauss(wm)
        info = validate_default(p)
        out[wm] = (p, info, canard_data(p, info))
    return out


@pytest.fixture(scope="session")
def region_solutions(cosine):
    """eps = 1e-3 solutions of every reference pair from both initial guesses."""
    from bottleneck_flow.bvp import SolverOptions, solve

    out = {}
    for pair in REGION_PAIRS:
        out[pair] = (
            solve(cosine, *pair, 1e-3, SolverOptions(initial_guess="singular")),
            solve(cosine, *pair, 1e-3, SolverOptions(initial_guess="constant")),
        )
    return out
