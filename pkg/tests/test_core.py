from itertools import combinations
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ofdm_im_dither.core import (
    SystemConfig,
    amp_floor,
    pattern_to_sap_index,
    qam_constellation,
    qam_demap,
    qam_map,
    sap_codebook,
    sap_index_to_pattern,
)
from ofdm_im_dither.errors import (
    InvalidConfigError,
    InvalidIndexError,
    InvalidInputError,
    InvalidPatternError,
    InvalidSymbolError,
)


def test_paper_dimensions(cfg):
    assert (cfg.g, cfg.p1, cfg.p2, cfg.p, cfg.m) == (32, 2, 8, 10, 320)


@pytest.mark.parametrize("kwargs", [
    dict(N=130), dict(k=0), dict(k=4), dict(M=8), dict(M=32), dict(oversample=0),
    dict(taps=0), dict(taps=129), dict(clip_ratio=0.0), dict(scheme="slm"),
    dict(icf_iterations=-1), dict(R_levels=(-0.1,)),
])
def test_config_rejects(kwargs):
    with pytest.raises(InvalidConfigError):
        SystemConfig(**kwargs)


def test_constellation_16qam():
    c = qam_constellation(16)
    expected = {complex(a, b) for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)}
    assert set(c.points.tolist()) == expected
    np.testing.assert_allclose(c.amplitude_levels, [sqrt(2), sqrt(10), sqrt(18)])
    # (4*2 + 8*10 + 4*18) / 16
    assert c.mean_energy == pytest.approx(10.0, abs=1e-12)


@pytest.mark.parametrize("M", [4, 16, 64])
def test_gray_neighbours_differ_by_one_bit(M):
    c = qam_constellation(M)
    for a in range(M):
        for b in range(M):
            if abs(c.points[a] - c.points[b]) == pytest.approx(2.0):
                assert np.sum(c.bit_map[a] != c.bit_map[b]) == 1


def _lex_oracle(n, k):
    return list(combinations(range(n), k))


@pytest.mark.parametrize("idx, n, k, expected", [
    (0, 4, 2, (0, 1)),
    (3, 4, 2, (1, 2)),
    (1, 2, 1, (1,)),
])
def test_sap_index_to_pattern_examples(idx, n, k, expected):
    assert sap_index_to_pattern(idx, n, k) == expected


@pytest.mark.parametrize("n, k", [(4, 2), (4, 1), (6, 3), (8, 4), (5, 2), (2, 1)])
def test_sap_unranking_matches_enumeration(n, k):
    oracle = _lex_oracle(n, k)
    size = len(sap_codebook(n, k))
    assert size & (size - 1) == 0 and size <= len(oracle) < 2 * size
    for idx in range(size):
        assert sap_index_to_pattern(idx, n, k) == oracle[idx]
        assert pattern_to_sap_index(oracle[idx], n, k) == idx
    for pat in oracle[size:]:
        assert pattern_to_sap_index(pat, n, k) is None


def test_pattern_to_sap_examples():
    assert pattern_to_sap_index((0, 1), 4, 2) == 0
    assert pattern_to_sap_index((2, 3), 4, 2) is None
    assert pattern_to_sap_index((1,), 2, 1) == 1


def test_sap_errors():
    with pytest.raises(InvalidIndexError):
        sap_index_to_pattern(4, 4, 2)
    with pytest.raises(InvalidPatternError):
        pattern_to_sap_index((0,), 4, 2)
    with pytest.raises(InvalidPatternError):
        pattern_to_sap_index((1, 1), 4, 2)


def test_qam_map_examples():
    assert qam_map([0, 0, 0, 0]) == -3 - 3j
    points = {qam_map([(v >> s) & 1 for s in (3, 2, 1, 0)]) for v in range(16)}
    assert len(points) == 16
    np.testing.assert_array_equal(qam_demap(qam_map([1, 1, 0, 1])), [1, 1, 0, 1])
    np.testing.assert_array_equal(qam_demap(-3 - 3j), [0, 0, 0, 0])
    with pytest.raises(InvalidSymbolError):
        qam_demap(0j)
    with pytest.raises(InvalidInputError):
        qam_map([0, 1, 0])


def test_axis_gray_levels():
    # I bits first: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
    assert qam_map([0, 1, 0, 0]) == -1 - 3j
    assert qam_map([1, 1, 0, 0]) == 1 - 3j
    assert qam_map([1, 0, 1, 0]) == 3 + 3j


@given(st.lists(st.integers(0, 1), min_size=6, max_size=6))
def test_qam64_round_trip(bits):
    np.testing.assert_array_equal(qam_demap(qam_map(bits, 64), 64), bits)


@pytest.mark.parametrize("symbols, expected", [
    ([1 + 1j, 3 + 3j], sqrt(2)),
    ([3 + 1j, 1 + 3j], sqrt(10)),
    ([3 + 3j, 3 + 3j], sqrt(18)),
])
def test_amp_floor(symbols, expected):
    assert amp_floor(symbols) == pytest.approx(expected, abs=1e-15)


def test_amp_floor_empty():
    with pytest.raises(InvalidInputError):
        amp_floor([])
