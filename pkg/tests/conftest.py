import pytest
from hypothesis import settings

from mirrorflag.rootdata import build_root_system, parabolic_data

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")


def pd_of(rank, levi=()):
    return parabolic_data(build_root_system("A", rank), levi)


@pytest.fixture(scope="session")
def pds():
    return {
        "P1": pd_of(1),
        "P2": pd_of(2, (2,)),
        "SL3_B": pd_of(2),
        "A3_B": pd_of(3),
        "A3_13": pd_of(3, (1, 3)),
        "A4_24": pd_of(4, (2, 4)),
    }
