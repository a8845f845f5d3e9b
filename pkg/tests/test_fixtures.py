import hashlib

import numpy as np
from scipy.signal import welch

from auscult.fixtures import chirp_tagged_cycles, make_fixture_records, make_fixtures
from auscult.io import load_manifest, load_record


def band_db(x, fs, lo, hi):
    f, p = welch(x, fs, nperseg=1024)
    return 10 * np.log10(np.sum(p[(f >= lo) & (f <= hi)]) / np.sum(p))


def test_written_fixture_set_loads(tmp_path):
    manifest = make_fixtures(tmp_path, seed=1, count=10)
    rows = load_manifest(manifest)
    assert len(rows) == 10
    for row in rows:
        rec = load_record(row)
        assert len(rec.pcg) == len(rec.ecg)
        assert rec.cycles.indices[-1] <= len(rec.pcg)
        assert rec.label in ("normal", "abnormal")
    assert sorted(p.name for p in (tmp_path / "noise").iterdir()) == [
        "ecg_00.wav", "ecg_01.wav", "pcg_00.wav", "pcg_01.wav"]


def test_abnormal_records_carry_murmur_energy():
    recs = make_fixture_records(seed=1, count=10)
    normal = np.mean([band_db(r.pcg.samples, 2000, 150, 400) for r in recs if r.label == "normal"])
    abnormal = np.mean([band_db(r.pcg.samples, 2000, 150, 400) for r in recs if r.label == "abnormal"])
    assert abnormal - normal >= 6.0


def test_cycle_boundaries_precede_qrs():
    rec = make_fixture_records(seed=3, count=1)[0]
    ecg = rec.ecg.samples
    for a, b in zip(rec.cycles.indices[:-1], rec.cycles.indices[1:]):
        peak = a + int(np.argmax(ecg[a:b]))
        assert 0 < (peak - a) / 2000 < 0.1


def test_same_seed_gives_byte_identical_files(tmp_path):
    def digest(root):
        return {p.relative_to(root).as_posix(): hashlib.sha256(p.read_bytes()).hexdigest()
                for p in sorted(root.rglob("*")) if p.is_file() and p.suffix != ".csv" or p.parent.name == "cycles"}

    make_fixtures(tmp_path / "a", seed=5, count=3)
    make_fixtures(tmp_path / "b", seed=5, count=3)
    make_fixtures(tmp_path / "c", seed=6, count=3)
    assert digest(tmp_path / "a") == digest(tmp_path / "b")
    assert digest(tmp_path / "a") != digest(tmp_path / "c")


def test_chirp_tagged_cycles_are_distinct():
    sig, bounds = chirp_tagged_cycles(3)
    assert bounds.n_cycles == 3 and bounds.indices[-1] == len(sig)
    peaks = []
    for a, b in zip(bounds.indices[:-1], bounds.indices[1:]):
        spec = np.abs(np.fft.rfft(sig.samples[a:b], n=4096))
        peaks.append(np.fft.rfftfreq(4096, 1 / 2000)[np.argmax(spec)])
    assert peaks == sorted(peaks) and peaks[2] - peaks[0] > 150
