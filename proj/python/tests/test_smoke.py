import numpy as np
import pytest

import soundtex


RATE = soundtex.WORKING_RATE


def tone(hz, seconds=soundtex.CLIP_SECONDS, amp=0.5):
    t = np.arange(int(seconds * RATE)) / RATE
    return amp * np.cos(2 * np.pi * hz * t)


def test_cochlear_bank_squared_gains_sum_to_one():
    bank = soundtex.cochlear_bank(RATE, 4096)
    assert len(bank) == 32
    freqs = np.fft.rfftfreq(4096, 1 / RATE)
    power = (bank.gains**2).sum(axis=0)
    inside = (freqs >= 20) & (freqs <= 8000)
    assert np.max(np.abs(power[inside] - 1)) < 1e-6


def test_analytic_signal_of_cosine_has_unit_magnitude():
    x = np.cos(2 * np.pi * 440 * np.arange(RATE) / RATE)
    z = soundtex.analytic_signal(x)
    assert np.allclose(np.abs(z[100:-100]), 1.0, atol=1e-2)
    assert np.allclose(z.real, x)


def test_texture_vector_shape_and_bounds():
    rng = np.random.default_rng(0)
    v = soundtex.texture_vector(rng.uniform(-0.5, 0.5, RATE * 2), RATE)
    assert v.shape == (soundtex.TEXTURE_DIM,)
    assert np.all(np.isfinite(v))
    rho = v[64:181]
    assert np.all((rho >= -1) & (rho <= 1))


def test_texture_from_envelopes_matches_numpy():
    rng = np.random.default_rng(1)
    env = rng.uniform(0, 2, (32, 400))
    mbank = soundtex.modulation_bank(signal_length=400)
    tv = soundtex.texture_from_envelopes(env, mbank)
    assert np.allclose(tv["mu"], env.mean(axis=1), rtol=1e-9)
    assert np.allclose(tv["sigma_norm"], env.std(axis=1) / env.mean(axis=1), rtol=1e-9)
    assert np.isclose(tv["rho"][0], np.corrcoef(env[0], env[1])[0, 1], rtol=1e-9)


def test_mfcc_dct_matches_formula():
    coeffs, log_energies = soundtex.mfcc(tone(1000), RATE)
    assert coeffs.shape == (20, 291)
    k = np.arange(1, 21)
    basis = np.cos(np.outer(np.arange(1, 21), (k - 0.5) * np.pi / 20))
    assert np.allclose(basis @ log_energies, coeffs, atol=1e-9)
    assert soundtex.mfcc_vector(tone(1000), RATE).shape == (5820,)


def test_kmeans_recovers_two_blobs():
    rng = np.random.default_rng(2)
    rows = np.vstack([rng.normal(0, 1, (40, 3)), rng.normal(10, 1, (40, 3))])
    fit = soundtex.kmeans_fit(rows, k=2, seed=3)
    labels = fit["labels"]
    assert len(set(labels[:40])) == 1 and len(set(labels[40:])) == 1
    assert labels[0] != labels[-1]
    assert np.all(np.diff(fit["inertia_trace"]) <= 1e-9 * fit["inertia_trace"][:-1])
    assert np.array_equal(soundtex.assign_nearest(fit["centroids"], rows), labels)
    with pytest.raises(soundtex.ParameterError):
        soundtex.kmeans_fit(rows[:3], k=5)


def test_standardize_moments():
    rng = np.random.default_rng(4)
    rows = rng.normal(5, 3, (100, 7))
    z, mean, scale = soundtex.standardize(rows)
    assert np.allclose(z.mean(axis=0), 0, atol=1e-9)
    assert np.allclose(z.std(axis=0), 1, atol=1e-9)
    assert np.allclose(z * scale + mean, rows)


def test_feature_store_round_trip_and_corruption(tmp_path):
    rows = np.arange(12, dtype=np.float64).reshape(3, 4) / 4
    soundtex.write_features(tmp_path / "f.bin", ["a", "b", "c"], rows, "mfcc")
    ids, back, kind = soundtex.read_features(tmp_path / "f.bin")
    assert ids == ["a", "b", "c"] and kind == "mfcc"
    assert np.array_equal(back, rows)
    data = (tmp_path / "f.bin").read_bytes()
    (tmp_path / "cut.bin").write_bytes(data[:-1])
    with pytest.raises(soundtex.CorruptionError):
        soundtex.read_features(tmp_path / "cut.bin")
    (tmp_path / "magic.bin").write_bytes(b"X" + data[1:])
    with pytest.raises(soundtex.FormatError, match="SNDTEX01"):
        soundtex.read_features(tmp_path / "magic.bin")


def test_extract_and_cluster_tones_versus_noise(tmp_path):
    rng = np.random.default_rng(5)
    (tmp_path / "audio").mkdir()
    lines = ["clip_id,audio_path,frame_path,offset_s,duration_s"]
    for i in range(4):
        soundtex.write_wav(tmp_path / f"audio/tone{i}.wav", tone(300 + 160 * i), RATE)
        soundtex.write_wav(tmp_path / f"audio/noise{i}.wav", rng.uniform(-0.3, 0.3, 60000), RATE, "float32")
        lines += [f"tone{i},audio/tone{i}.wav,f/tone{i}.jpg,0,3.75", f"noise{i},audio/noise{i}.wav,f/noise{i}.jpg,0,3.75"]
    (tmp_path / "manifest.csv").write_text("\n".join(lines) + "\n")

    report = soundtex.extract(tmp_path / "manifest.csv", tmp_path / "out")
    assert report["extracted"] == 8 and report["failures"] == []
    result = soundtex.cluster(report["store_path"], tmp_path / "out", clusters=2)
    assert sorted(result["cluster_sizes"]) == [4, 4]

    labels = soundtex.read_labels(result["labels_path"])
    assert labels["k"] == 2
    by_kind = {}
    for clip_id, frame_path, label in labels["records"]:
        assert frame_path == f"f/{clip_id}.jpg"
        by_kind.setdefault(clip_id.rstrip("0123456789"), set()).add(label)
    assert by_kind["tone"] | by_kind["noise"] == {0, 1}
    assert len(by_kind["tone"]) == 1 and len(by_kind["noise"]) == 1
    assert "count: 8" in soundtex.inspect(report["store_path"])
