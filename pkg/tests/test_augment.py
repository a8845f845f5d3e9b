import json

import numpy as np
import pytest
from scipy.signal import welch

from auscult.augment import (
    ECG_STAGES,
    PCG_STAGES,
    AugmentConfig,
    ConfigurationError,
    ExternalNoiseBank,
    add_gaussian_noise,
    amplitude_modulate,
    apply_amplitude_modulation,
    apply_baseline_wander,
    apply_external_noise,
    apply_gaussian_noise,
    apply_parametric_eq,
    apply_plan,
    augment_pair,
    baseline_wander,
    draw_eq_bands,
    draw_plan,
    mix_external_noise,
    noise_segment,
    parametric_eq,
    scaled_noise,
    stretch_factor,
    time_stretch,
)
from auscult.dsp import Signal, normalize
from auscult.rng import RandomStream

from .conftest import tone

FS = 2000.0


def sig(x):
    return Signal(np.asarray(x, dtype=float), FS)


def forced(**gates):
    """A config with every gate off except the ones given."""
    return AugmentConfig(**{**AugmentConfig.disabled().to_dict(), **gates})


# -- config -----------------------------------------------------------------

def test_default_gates():
    c = AugmentConfig()
    assert (c.pcg_hpss, c.pcg_noise, c.pcg_stretch, c.pcg_am, c.pcg_eq, c.pcg_ext_noise) == \
        (0.75, 0.075, 0.75, 0.75, 0.25, 0.5)
    assert (c.ecg_noise, c.ecg_wander, c.ecg_stretch, c.ecg_eq, c.ecg_ext_noise) == \
        (0.075, 0.30, 0.25, 0.25, 0.5)
    assert c.eq_bands == 5


def test_config_validation_and_roundtrip():
    c = AugmentConfig()
    assert AugmentConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c
    with pytest.raises(ConfigurationError):
        AugmentConfig(pcg_hpss=1.5)
    with pytest.raises(ConfigurationError):
        AugmentConfig(am_depth=(0.3, 0.1))
    with pytest.raises(ConfigurationError):
        AugmentConfig.from_dict({"pcg_hpss": 0.5, "typo": 1})
    with pytest.raises(ConfigurationError):
        AugmentConfig(stretch_rule="both")


# -- gaussian noise ---------------------------------------------------------

def test_zero_noise_is_identity():
    x = np.random.default_rng(0).normal(size=100)
    assert np.array_equal(apply_gaussian_noise(sig(x), 0.0, 0.0, 1).samples, x)


def test_noise_mean_within_law_of_large_numbers():
    n = 20000
    out = apply_gaussian_noise(sig(np.zeros(n)), 0.01, 0.05, 3).samples
    assert abs(out.mean() - 0.05) <= 3 * 0.01 / np.sqrt(n)


def test_noise_is_deterministic_and_drawn_from_allowed_values():
    x = sig(np.zeros(1000))
    a = add_gaussian_noise(x, RandomStream(4))
    b = add_gaussian_noise(x, RandomStream(4))
    assert np.array_equal(a.samples, b.samples)
    for s in range(100):
        p = draw_plan(forced(pcg_noise=1.0), RandomStream(s))["pcg"][1]["params"]
        assert p["sigma"] in (0.01, 0.001, 0.0001) and 0 <= p["mu"] <= 0.1


# -- stretch ----------------------------------------------------------------

def test_stretch_identity_and_length():
    x = np.random.default_rng(0).normal(size=1000)
    assert np.array_equal(time_stretch(sig(x), 1.0).samples, x)
    assert len(time_stretch(sig(x), 1.006)) == 1006


def test_stretch_shifts_tone_frequency():
    y = time_stretch(sig(tone(50, FS, 20)), 1.004).samples
    inner = y[2000:-2000]
    n = 16 * inner.size
    spec = np.abs(np.fft.rfft(inner * np.hanning(inner.size), n=n))
    peak = np.fft.rfftfreq(n, 1 / FS)[np.argmax(spec)]
    assert abs(peak - 50 / 1.004) / (50 / 1.004) < 2e-3


@pytest.mark.parametrize("factor", [0.99, 1.2])
def test_stretch_rejects_out_of_range(factor):
    with pytest.raises(ValueError):
        time_stretch(sig(np.zeros(10)), factor)


# -- modulation and wander --------------------------------------------------

def test_amplitude_modulation_examples():
    x = np.random.default_rng(0).normal(size=500)
    assert np.array_equal(apply_amplitude_modulation(sig(x), 0, 0.3, 0.1, 0, 0.01, 0.2).samples, x)
    assert not np.any(amplitude_modulate(sig(np.zeros(500)), RandomStream(1)).samples)
    out = apply_amplitude_modulation(sig(np.ones(2000)), 0.25, 0.5, 0.0, 0.0, 0.01, 0.0).samples
    assert out[1000] == pytest.approx(1.25, abs=1e-12)


def test_baseline_wander_examples():
    x = np.random.default_rng(0).normal(size=500)
    assert np.array_equal(apply_baseline_wander(sig(x), 0, 0.3, 0.1, 0, 0.01, 0.2).samples, x)
    out = apply_baseline_wander(sig(np.zeros(6000)), 0.2, 0.1, 0.0, 0.0, 0.01, 0.0).samples
    assert out[5000] == pytest.approx(0.2, abs=1e-12)
    y = baseline_wander(sig(x), RandomStream(2)).samples - x
    z = baseline_wander(sig(np.zeros(500)), RandomStream(2)).samples
    np.testing.assert_allclose(y, z, atol=1e-15)


def test_modulation_parameter_ranges():
    for s in range(200):
        plan = draw_plan(forced(pcg_am=1.0, ecg_wander=1.0), RandomStream(s))
        am, wander = plan["pcg"][3]["params"], plan["ecg"][1]["params"]
        assert 0.01 <= am["b1"] <= 0.25 and 0.01 <= am["b2"] <= 0.25
        assert 0.01 <= wander["b1"] <= 0.2 and 0.01 <= wander["b2"] <= 0.2
        for p in (am, wander):
            assert 0.05 <= p["c1"] <= 0.5 and 0.001 <= p["c2"] <= 0.05
            assert 0 <= p["d1"] <= 1 and 0 <= p["d2"] <= 1


# -- equaliser --------------------------------------------------------------

def test_eq_zero_signal_and_zero_gain():
    assert not np.any(parametric_eq(sig(np.zeros(3000)), 2, 500, RandomStream(0)).samples)
    x = np.random.default_rng(1).normal(size=3000)
    out = apply_parametric_eq(sig(x), [[100, 200, 0.0], [300, 400, 0.0]])
    assert np.array_equal(out.samples, normalize(sig(x)).samples)


def test_eq_band_draws_stay_inside_range():
    for s in range(100):
        for lo, hi, gain in draw_eq_bands(2, 500, RandomStream(s)):
            assert 2 <= lo < hi <= 500
            assert 0.05 * 498 - 1e-9 <= hi - lo <= 0.2 * 498 + 1e-9
            assert 0 <= gain <= 1


def test_eq_boosts_chosen_bands_in_white_noise():
    x = np.random.default_rng(2).normal(size=60000)
    bands = [[100, 150, 1.0], [300, 340, 0.8]]
    boosted = apply_parametric_eq(sig(x), bands).samples
    flat = apply_parametric_eq(sig(x), [[b[0], b[1], 0.0] for b in bands]).samples
    f, p_boost = welch(boosted, FS, nperseg=1024)
    _, p_flat = welch(flat, FS, nperseg=1024)
    ratio = p_boost / p_flat
    inside = ((f > 110) & (f < 140)) | ((f > 310) & (f < 330))
    outside = (f > 700) & (f < 950)  # beyond every band's stop edge at 2 * hi
    assert ratio[inside].min() > ratio[outside].max()


# -- external noise ---------------------------------------------------------

def test_external_noise_silent_clip_and_infinite_snr():
    x = sig(tone(30, FS, 1) + 0.2)
    zero = Signal(np.zeros(500), FS)
    noisy = Signal(np.random.default_rng(0).normal(size=500), FS)
    assert np.array_equal(apply_external_noise(x, zero, 0.3, 10).samples, normalize(x).samples)
    assert np.array_equal(apply_external_noise(x, noisy, 0.3, np.inf).samples, normalize(x).samples)


def test_external_noise_snr_sets_noise_power():
    t = np.arange(20000) / FS
    x = sig(np.sqrt(2) * np.sin(2 * np.pi * 40 * t))
    clip = Signal(3.0 * np.random.default_rng(1).normal(size=7000), 4000.0)
    z = scaled_noise(x, clip, 0.25, 10.0)
    assert np.mean(x.samples**2) == pytest.approx(1.0, rel=1e-3)
    assert np.mean(z**2) == pytest.approx(0.1, rel=0.05)


def test_noise_segment_loops_and_resamples():
    clip = Signal(np.arange(10, dtype=float), FS)
    np.testing.assert_array_equal(noise_segment(clip, 15, FS, 0.5), [5, 6, 7, 8, 9, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9])
    assert noise_segment(Signal(np.ones(400), 4000.0), 300, FS, 0.0).size == 300


def test_mix_external_noise_requires_clips():
    with pytest.raises(ConfigurationError):
        mix_external_noise(sig(np.ones(10)), ExternalNoiseBank({}), "pcg", RandomStream(0))
    bank = ExternalNoiseBank({"pcg": [Signal(np.random.default_rng(0).normal(size=3000), FS)]})
    out = mix_external_noise(sig(tone(20, FS, 1)), bank, "pcg", RandomStream(0))
    assert np.max(np.abs(out.samples)) == 1.0
    with pytest.raises(ConfigurationError):
        ExternalNoiseBank({"ecg": [Signal(np.zeros(0), FS)]})


# -- plan and pair ----------------------------------------------------------

def test_plan_lists_stages_in_chain_order():
    plan = draw_plan(AugmentConfig(), RandomStream(0))
    assert tuple(s["stage"] for s in plan["pcg"]) == PCG_STAGES
    assert tuple(s["stage"] for s in plan["ecg"]) == ECG_STAGES
    json.dumps(plan)


def test_all_gates_off_is_identity(fixture_records):
    rec = fixture_records[0]
    out = augment_pair(rec, AugmentConfig.disabled(), RandomStream(1))
    assert np.array_equal(out.pcg.samples, rec.pcg.samples)
    assert np.array_equal(out.ecg.samples, rec.ecg.samples)
    assert np.array_equal(out.cycles.indices, rec.cycles.indices)
    assert out.label == rec.label


def test_forced_stretch_is_shared(fixture_records):
    rec = fixture_records[1]
    cfg = forced(pcg_stretch=1.0, pcg_stretch_factors=(1.006,))
    out = augment_pair(rec, cfg, RandomStream(2))
    assert len(out.pcg) == round(len(rec.pcg) * 1.006)
    assert len(out.ecg) == round(len(rec.ecg) * 1.006)
    np.testing.assert_array_equal(out.cycles.indices, np.round(rec.cycles.indices * 1.006).astype(int))


def test_ecg_stretch_rule_uses_continuous_range():
    cfg = forced(ecg_stretch=1.0, stretch_rule="ecg")
    factors = [stretch_factor(draw_plan(cfg, RandomStream(s))) for s in range(50)]
    assert all(1.0 <= f <= 1.06 for f in factors) and len(set(factors)) == 50


def test_seed_7_twice_is_bit_identical_and_synchronised(fixture_records):
    rec = fixture_records[2]
    bank = ExternalNoiseBank({"pcg": [Signal(np.random.default_rng(0).normal(size=5000), FS)],
                              "ecg": [Signal(np.random.default_rng(1).normal(size=5000), FS)]})
    cfg = AugmentConfig(pcg_hpss=1.0, pcg_stretch=1.0, pcg_ext_noise=1.0, ecg_ext_noise=1.0)
    a = augment_pair(rec, cfg, RandomStream(7), bank)
    b = augment_pair(rec, cfg, RandomStream(7), bank)
    assert np.array_equal(a.pcg.samples, b.pcg.samples)
    assert np.array_equal(a.ecg.samples, b.ecg.samples)
    assert abs(a.pcg.duration - a.ecg.duration) < 1 / FS
    assert np.all(np.isfinite(a.pcg.samples)) and np.all(np.isfinite(a.ecg.samples))


def test_plan_replays_without_rng(fixture_records):
    rec = fixture_records[3]
    plan = draw_plan(AugmentConfig(pcg_eq=1.0, ecg_eq=1.0), RandomStream(9))
    replay = json.loads(json.dumps(plan))
    a, log_a = apply_plan(rec, plan)
    b, log_b = apply_plan(rec, replay)
    assert np.array_equal(a.pcg.samples, b.pcg.samples) and log_a == log_b


def test_external_noise_stage_skipped_without_bank(fixture_records):
    rec = fixture_records[0]
    plan = draw_plan(forced(pcg_ext_noise=1.0, ecg_ext_noise=1.0), RandomStream(0))
    out, log = apply_plan(rec, plan, None)
    assert log == {"pcg": [], "ecg": []}
    assert np.array_equal(out.pcg.samples, rec.pcg.samples)
