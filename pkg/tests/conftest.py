import math

import pytest

from jxsim.combinatorics import ModeOccupation
from jxsim.config import load_config
from jxsim.source import ChannelWiring, SourceParams
from jxsim.spectral import build_gaussian_jsa, fwhm_nm_to_angular, grid_for_filters

PUMP_FWHM_NM = 0.4
FILTER_FWHM_NM = 3.0
CENTER_NM = 795.0

R1 = ModeOccupation.of([2, 0, 0, 0, 0, 0, 2])
R2 = ModeOccupation.of([1, 0, 1, 0, 1, 0, 1])
R3 = ModeOccupation.of([0, 0, 2, 0, 2, 0, 0])


@pytest.fixture(scope="session")
def paper_cfg():
    return load_config("paper-reference")


@pytest.fixture(scope="session")
def distinguishing_delay():
    return 20.0 / fwhm_nm_to_angular(FILTER_FWHM_NM, CENTER_NM)


@pytest.fixture(scope="session")
def symmetric_source():
    """Calibrated widths but no filter offsets: photons of one pair are
    exactly exchange symmetric."""
    grid = grid_for_filters(FILTER_FWHM_NM, (0.0,), CENTER_NM, size=17, span_fwhm=4.0)
    jsa = build_gaussian_jsa(PUMP_FWHM_NM, FILTER_FWHM_NM, 0.0, 0.0, CENTER_NM, grid)
    return SourceParams(p_ab=0.026, p_cd=0.0326, jsa_ab=jsa, jsa_cd=jsa, max_photons=6)


@pytest.fixture(scope="session")
def default_wiring():
    return ChannelWiring()


@pytest.fixture(scope="session")
def fine_symmetric_source():
    """Same as symmetric_source on a fine grid, for delay scans that must
    resolve phases well beyond the coarse grid's sampling limit."""
    grid = grid_for_filters(FILTER_FWHM_NM, (0.0,), CENTER_NM, size=129, span_fwhm=4.0)
    jsa = build_gaussian_jsa(PUMP_FWHM_NM, FILTER_FWHM_NM, 0.0, 0.0, CENTER_NM, grid)
    return SourceParams(p_ab=0.026, p_cd=0.0326, jsa_ab=jsa, jsa_cd=jsa, max_photons=6)
