import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fhspec.disorder import BULK, RUNAWAY_I, RUNAWAY_II, archetypes
from fhspec.errors import DomainError
from fhspec.localization import (
    ALGEBRAIC_INTERIOR, EXPONENTIAL_BOUNDARY, SUPER_EXPONENTIAL_BOUNDARY, UNCLASSIFIED,
    decay_profile, ipr, profiles_to_csv, shannon_entropy,
)
from fhspec.symbol import SymbolParams, asymptotic_right_eigenvector

W = SymbolParams(1 / 3, -0.5)


def test_delta_and_uniform():
    e = np.zeros(64)
    e[3] = 1
    u = np.ones(64) / 8
    assert shannon_entropy(e) == 0 and ipr(e) == 1
    assert shannon_entropy(u) == pytest.approx(6) and ipr(u) == pytest.approx(1 / 64)
    two = np.zeros(10)
    two[[2, 7]] = 1 / math.sqrt(2)
    assert ipr(two) == pytest.approx(0.5)


def test_normalisation_required():
    with pytest.raises(DomainError):
        ipr(np.ones(4))
    with pytest.raises(DomainError):
        shannon_entropy(np.ones(4))


def _unit_geometric(n):
    v = asymptotic_right_eigenvector(W, n, 40)
    return v / np.linalg.norm(v)


def test_geometric_entropy_and_ipr_closed_forms():
    n = 160
    gamma = (5 / 3) * math.log(n) / n
    q = math.exp(-2 * gamma)
    j = np.arange(n)
    w = q ** j * (1 - q) / (1 - q ** n)
    H = -sum(x * math.log2(x) for x in w)
    P = (1 - q) ** 2 / (1 - q ** n) ** 2 * (1 - q ** (2 * n)) / (1 - q ** 2)
    v = _unit_geometric(n)
    assert shannon_entropy(v) == pytest.approx(H, abs=1e-10)
    assert ipr(v) == pytest.approx(P, abs=1e-10)


def test_geometric_profile_is_exponential_boundary():
    n = 160
    prof = decay_profile(_unit_geometric(n))
    assert prof.decay_class == EXPONENTIAL_BOUNDARY
    assert prof.argmax_index == 0
    assert prof.exp_rate == pytest.approx((5 / 3) * math.log(n) / n, rel=1e-8)


def test_super_exponential_and_algebraic_synthetic():
    j = np.arange(200)
    g = np.exp(-0.002 * j ** 2 - 0.01 * j)
    assert decay_profile(g / np.linalg.norm(g)).decay_class == SUPER_EXPONENTIAL_BOUNDARY
    a = (np.abs(j - 100) + 1.0) ** -2.0
    assert decay_profile(a / np.linalg.norm(a)).decay_class == ALGEBRAIC_INTERIOR


def test_short_vectors():
    with pytest.raises(DomainError):
        decay_profile(np.ones(8) / math.sqrt(8))
    v = np.zeros(16)
    v[8] = 1
    with pytest.warns(RuntimeWarning):
        assert decay_profile(v).decay_class == UNCLASSIFIED


@settings(max_examples=50)
@given(st.integers(2, 200), st.integers(0, 2**31))
def test_bounds_random(n, seed):
    g = np.random.default_rng(seed)
    v = g.standard_normal(n) + 1j * g.standard_normal(n)
    v /= np.linalg.norm(v)
    H, P = shannon_entropy(v), ipr(v)
    assert -1e-12 <= H <= math.log2(n) + 1e-12
    assert 1 / n - 1e-12 <= P <= 1 + 1e-12


def test_entropy_symmetric_under_conjugate_pairing(spec160):
    E = spec160.eigenvalues
    H = np.array([shannon_entropy(spec160.right[:, l]) for l in range(160)])
    for l in range(160):
        j = int(np.argmin(np.abs(E - np.conj(E[l]))))
        assert H[l] == pytest.approx(H[j], abs=1e-8)


def test_working_sweep_archetype_classes(working_sweep):
    tr = working_sweep.trajectories
    R = tr.right_vectors(len(tr.sigma_grid) - 1)
    arch = archetypes(working_sweep)
    assert decay_profile(R[:, arch[BULK]]).decay_class == EXPONENTIAL_BOUNDARY
    one = decay_profile(R[:, arch[RUNAWAY_I]])
    assert one.decay_class == ALGEBRAIC_INTERIOR and 16 <= one.argmax_index <= 144


def test_kappa_ipr_rank_correlation(working_sweep):
    from scipy.stats import spearmanr
    tr = working_sweep.trajectories
    R = tr.right_vectors(len(tr.sigma_grid) - 1)
    P = [ipr(R[:, l]) for l in range(160)]
    assert spearmanr(tr.kappa[-1], P).statistic > 0


def test_profile_csv(tmp_path):
    v = _unit_geometric(64)
    path = tmp_path / "p.csv"
    profiles_to_csv(path, [decay_profile(v)])
    assert path.read_text().splitlines()[1].split(",")[4] == EXPONENTIAL_BOUNDARY
