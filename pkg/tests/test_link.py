import numpy as np
import pytest

from trellis_isac import ofdm
from trellis_isac.constellation import int_to_bits
from trellis_isac.gf2 import syndrome
from trellis_isac.link import (
    BER_COLUMNS, ChannelConfig, awgn, ber_experiment, bpsk_theory, q_function, recover_info,
)
from trellis_isac.report import read_csv
from trellis_isac.shaper import ShapingConfig, random_payload, shape_batch


def test_awgn_identity_at_infinite_snr(rng):
    x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    y = awgn(x, ChannelConfig(np.inf))
    np.testing.assert_array_equal(y, x)
    assert y is not x


def test_awgn_noise_variance():
    x = np.ones(1_000_000, dtype=complex)
    n = awgn(x, ChannelConfig(10.0, seed=3)) - x
    assert np.var(n) == pytest.approx(0.1, rel=0.01)
    # circular: equal power in both rails, uncorrelated
    assert np.var(n.real) == pytest.approx(np.var(n.imag), rel=0.02)
    assert abs(np.mean(n * n)) < 1e-3


def test_awgn_deterministic(rng):
    x = rng.standard_normal(64) + 0j
    np.testing.assert_array_equal(awgn(x, ChannelConfig(5.0, seed=9)), awgn(x, ChannelConfig(5.0, seed=9)))
    assert not np.array_equal(awgn(x, ChannelConfig(5.0, seed=9)), awgn(x, ChannelConfig(5.0, seed=10)))


@pytest.mark.parametrize("kw", [dict(), dict(m_s=2), dict(constellation="256qam"), dict(code="6,7")])
def test_noiseless_roundtrip(kw):
    cfg = ShapingConfig(32, **kw)
    p = random_payload(cfg, np.random.default_rng(1), 300)
    X = shape_batch(p, cfg).X
    rec = recover_info(ofdm.analyze_freq(ofdm.synthesize_time(X)), cfg)
    np.testing.assert_array_equal(rec.s, p.s)
    np.testing.assert_array_equal(rec.b, int_to_bits(p.lsb, cfg.constellation.n_lsb))
    np.testing.assert_array_equal(rec.raw_msb, int_to_bits(p.raw_msb, cfg.constellation.n_msb))


def test_single_flip_error_spread():
    cfg = ShapingConfig(32)
    p = random_payload(cfg, np.random.default_rng(2), 1)
    res = shape_batch(p, cfg)
    c = cfg.constellation
    weights = [h[0].weight for h in cfg.code.syndrome_former]  # 3 for 1+D+D^2, 2 for 1+D^2
    assert weights == [3, 2]
    for k in range(cfg.n_subcarriers):
        for bit in range(2):
            msb = res.msb[0].copy()
            msb[k] ^= 1 << (1 - bit)
            rec = recover_info(c.map(msb, res.lsb[0]), cfg)
            errors = np.count_nonzero(rec.s[:, 0] != p.s[0, :, 0])
            # the flip hits column `bit` of H^T, truncated at the end of the symbol
            assert errors <= weights[bit]
            if k + 2 < cfg.n_subcarriers:
                assert errors == weights[bit]


def test_zero_received_symbol():
    cfg = ShapingConfig(16)
    rec = recover_info(np.zeros(16), cfg)
    msb, _ = cfg.constellation.demap_nearest(np.zeros(16))
    np.testing.assert_array_equal(rec.s, syndrome(int_to_bits(msb, 2), cfg.code))


def test_q_function_values():
    assert q_function(0.0) == pytest.approx(0.5)
    assert q_function(1.0) == pytest.approx(0.15865525393145707)
    assert bpsk_theory(0.0) == pytest.approx(0.07864960352514257)


def test_ber_experiment_shape_and_reference(tmp_path):
    cfg = ShapingConfig(32)
    curve = ber_experiment(cfg, [0, 4, 8, 40], 600, seed=4)
    assert curve.n_bits == 600 * 32
    assert np.all((curve.ber_s >= 0) & (curve.ber_s <= 1))
    assert curve.ber_s[-1] == 0 and curve.ber_lsb[-1] == 0
    theory = bpsk_theory(curve.snr_db)
    ok = theory >= 1e-3
    assert np.all(abs(curve.ber_bpsk_ref - theory)[ok] <= 3 * curve.std_error(theory)[ok])
    assert np.all(curve.ber_s[ok] > curve.ber_bpsk_ref[ok])
    assert np.all(np.diff(curve.ber_s) <= 3 * curve.std_error(curve.ber_s[:-1]))
    again = ber_experiment(cfg, [0, 4, 8, 40], 600, seed=4, chunk=250)
    for f in ("ber_s", "ber_lsb", "ber_bpsk_ref"):
        np.testing.assert_array_equal(getattr(curve, f), getattr(again, f))
    meta, cols = read_csv(curve.to_csv(tmp_path / "ber.csv"))
    assert list(cols) == BER_COLUMNS
    assert meta["seed"] == 4 and meta["config_hash"] == cfg.digest()
    np.testing.assert_array_equal(cols["ber_s"], curve.ber_s)


def test_high_snr_zero_errors():
    cfg = ShapingConfig(64)
    curve = ber_experiment(cfg, [40.0], 1600, seed=0)
    assert curve.n_bits >= 1e5
    assert curve.ber_s[0] == 0 and curve.ber_lsb[0] == 0
