import itertools
import json

import numpy as np
import pytest

from trellis_isac.constellation import (
    MultidimGroup, PartitionedConstellation, bits_to_int, get_constellation, int_to_bits,
    load_constellation, map_multidim, map_signbit, qam16_signbit, qam256_shells,
)
from trellis_isac.errors import ConfigError, InvalidArgumentError


@pytest.fixture(scope="module")
def q16():
    return qam16_signbit()


def test_bit_conversion_roundtrip():
    v = np.arange(64)
    assert np.array_equal(bits_to_int(int_to_bits(v, 6)), v)
    assert list(int_to_bits(2, 2)) == [1, 0]


def test_signbit_examples(q16):
    assert map_signbit([0, 0], [0, 0], q16) == pytest.approx((1 + 1j) / np.sqrt(10))
    for lsb in itertools.product((0, 1), repeat=2):
        assert abs(map_signbit([0, 0], lsb, q16)) ** 2 == pytest.approx(0.2)
        assert abs(map_signbit([1, 1], lsb, q16)) ** 2 == pytest.approx(1.8)
        assert abs(map_signbit([0, 1], lsb, q16)) ** 2 == pytest.approx(1.0)
        assert abs(map_signbit([1, 0], lsb, q16)) ** 2 == pytest.approx(1.0)


def test_signbit_partition_invariants(q16):
    assert np.mean(abs(q16.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    power = abs(q16.points.reshape(4, 4)) ** 2
    assert np.ptp(power, axis=1).max() < 1e-12
    np.testing.assert_allclose(q16.subset_power, [0.2, 1.0, 1.0, 1.8])
    # four subsets of four points, grid of +-1, +-3
    grid = {complex(a, b) for a in (-3, -1, 1, 3) for b in (-3, -1, 1, 3)}
    assert {complex(np.round(p * np.sqrt(10), 9)) for p in q16.points} == grid


def test_lsb_gray_quadrants(q16):
    for msb in range(4):
        quad = [(np.sign(p.real), np.sign(p.imag)) for p in q16.map(msb, np.arange(4))]
        assert quad == [(1, 1), (-1, 1), (1, -1), (-1, -1)]  # lsb 00, 01, 10, 11


def test_demap_roundtrip_and_ties(q16):
    m, l = np.divmod(np.arange(16), 4)
    dm, dl = q16.demap_exact(q16.map(m, l))
    assert np.array_equal(dm, m) and np.array_equal(dl, l)
    # 0 is equidistant from the four inner points; the lowest label wins
    assert q16.demap_nearest(0j) == (0, 0)
    # midway between labels 0 (1+1j) and 1 (-1+1j)
    assert q16.demap_nearest(1j / np.sqrt(10)) == (0, 0)


def test_noisy_demap_error_rate(q16):
    rng = np.random.default_rng(7)
    labels = rng.integers(0, 16, 100_000)
    noise = np.sqrt(10 ** (-3) / 2) * (rng.standard_normal(labels.size) + 1j * rng.standard_normal(labels.size))
    rx = q16.points[labels] + noise
    m, l = q16.demap_nearest(rx)
    # exhaustive nearest-point oracle
    oracle = np.argmin(abs(rx[:, None] - q16.points[None, :]), axis=1)
    assert np.array_equal((m << 2) | l, oracle)
    assert np.mean(oracle != labels) < 1e-3


def test_qam256_shells():
    c = qam256_shells()
    assert c.points.size == 256 and c.n_msb == 2 and c.n_lsb == 6
    assert np.mean(abs(c.points) ** 2) == pytest.approx(1.0, abs=1e-12)
    power = abs(c.points.reshape(4, 64)) ** 2
    # shells are concentric: every point of shell i is no stronger than every point of shell i+1
    assert np.all(power.max(axis=1)[:-1] <= power.min(axis=1)[1:] + 1e-12)
    assert np.all(np.diff(c.subset_power) > 0)
    m, l = c.demap_nearest(c.points)
    assert np.array_equal((m << 6) | l, np.arange(256))


def test_unequal_power_subsets_rejected_when_declared_equal():
    pts = qam256_shells().points
    with pytest.raises(ConfigError):
        PartitionedConstellation("bad", pts, 2, 6)
    with pytest.raises(ConfigError):
        PartitionedConstellation("bad", qam16_signbit().points * 2, 2, 2)


def test_constellation_file_roundtrip(tmp_path, q16):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(q16.to_dict()))
    loaded = get_constellation(str(path))
    np.testing.assert_array_equal(loaded.points, q16.points)
    data = q16.to_dict()
    data["msb"][0] = 3
    with pytest.raises(ConfigError):
        load_constellation(data)
    with pytest.raises(ConfigError):
        get_constellation("64apsk")


def test_multidim_degenerate_group(q16, rng):
    g = MultidimGroup(q16, 1)
    msb, lsb = rng.integers(0, 4, 32), rng.integers(0, 4, 32)
    np.testing.assert_array_equal(g.map(msb, lsb), q16.map(msb, lsb))
    mb, lb = int_to_bits(msb, 2), int_to_bits(lsb, 2)
    np.testing.assert_array_equal(map_multidim(mb, lb, g), map_signbit(mb, lb, q16))


def test_multidim_composite_power(q16):
    amps = np.array([[0.4, 0.9, 1.0, 1.3], [0.5, 0.8, 1.1, 1.2]])
    g = MultidimGroup(q16, 2, amps)
    pts = g.map([0, 0], [0, 0])
    assert np.sum(abs(pts) ** 2) == pytest.approx(amps[0, 0] ** 2 + amps[1, 0] ** 2)
    table = g.composite_power_table()
    for m0, m1 in itertools.product(range(4), repeat=2):
        brute = sum(abs(g.map_at(i, m, 0)) ** 2 for i, m in enumerate((m0, m1)))
        assert table[m0, m1] == pytest.approx(brute)
        assert table[m0, m1] == pytest.approx(amps[0, m0] ** 2 + amps[1, m1] ** 2)
    default = MultidimGroup(q16, 2)
    assert default.composite_power_table()[0, 0] == pytest.approx(2 * 0.2)


def test_multidim_rejects_misaligned(q16):
    g = MultidimGroup(q16, 2)
    with pytest.raises(InvalidArgumentError):
        g.map(np.zeros(3, int), np.zeros(3, int))
    with pytest.raises(ConfigError):
        MultidimGroup(q16, 2, np.ones((3, 4)))


def test_multidim_demap_roundtrip(q16, rng):
    g = MultidimGroup(q16, 2, [[0.4, 0.9, 1.0, 1.3], [0.5, 0.8, 1.1, 1.2]])
    msb, lsb = rng.integers(0, 4, 64), rng.integers(0, 4, 64)
    m, l = g.demap_nearest(g.map(msb, lsb))
    assert np.array_equal(m, msb) and np.array_equal(l, lsb)
