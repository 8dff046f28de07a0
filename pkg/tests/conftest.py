import numpy as np
import pytest

from diracsoliton import (
    FourierCutoff,
    NLDParams,
    ParityClass,
    PeriodicPotential,
    certify_dirac_point,
    integrate_homoclinic,
)

DEFAULT_V = {2: 20.0}
DEFAULT_W = {1: 1.0}


@pytest.fixture(scope="session")
def pot_v():
    return PeriodicPotential(DEFAULT_V, ParityClass.EVEN_INDEX)


@pytest.fixture(scope="session")
def pot_w():
    return PeriodicPotential(DEFAULT_W, ParityClass.ODD_INDEX)


@pytest.fixture(scope="session")
def pot_free():
    return PeriodicPotential({}, ParityClass.EVEN_INDEX)


@pytest.fixture(scope="session")
def cut64():
    return FourierCutoff(64)


@pytest.fixture(scope="session")
def free_dirac(pot_free, pot_w, cut64):
    return certify_dirac_point(pot_free, pot_w, cut64)


@pytest.fixture(scope="session")
def default_dirac(pot_v, pot_w, cut64):
    return certify_dirac_point(pot_v, pot_w, cut64)


@pytest.fixture(scope="session")
def default_params(default_dirac):
    return NLDParams(
        c_sharp=default_dirac.c_sharp,
        theta_sharp=default_dirac.theta_sharp,
        mu_sharp=0.0,
        beta1=default_dirac.beta1,
        beta2=default_dirac.beta2,
    )


@pytest.fixture(scope="session")
def default_profile(default_params):
    return integrate_homoclinic(default_params)


@pytest.fixture(scope="session")
def canonical_params():
    """Unit-coefficient parameters: c# = theta# = 1, a = b = 3/4."""
    return NLDParams(c_sharp=1.0, theta_sharp=1.0, mu_sharp=0.0, beta1=1.0, beta2=0.0)


@pytest.fixture(scope="session")
def canonical_profile(canonical_params):
    return integrate_homoclinic(canonical_params, y_max=20.0)


@pytest.fixture(scope="session")
def free_params(free_dirac):
    return NLDParams(
        c_sharp=free_dirac.c_sharp,
        theta_sharp=free_dirac.theta_sharp,
        mu_sharp=0.0,
        beta1=free_dirac.beta1,
        beta2=free_dirac.beta2,
    )


@pytest.fixture(scope="session")
def free_profile(free_params):
    return integrate_homoclinic(free_params)


def l2(h, w):
    return float(np.sqrt(h * np.sum(np.abs(w) ** 2)))
