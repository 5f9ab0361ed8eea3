import pytest

from tsr_sim import InterferometerParams, MirrorSpec, TSR


@pytest.fixture(scope="session")
def params():
    return InterferometerParams(
        wavelength=1.064e-6,
        power_at_bs=10e3,
        mirror_mass=5.6,
        arm_length=1200.0,
        michelson_reflectivity=MirrorSpec.from_reflectivity(0.99995),
    )


@pytest.fixture(scope="session")
def canonical_tsr(params):
    return TSR.designed(params, f_sp=1000.0, l1=1200.0, l2=1200.0)
