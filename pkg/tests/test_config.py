import json

import pytest

from auscult.augment import AugmentConfig, ConfigurationError
from auscult.config import PipelineConfig, RearrangeConfig, load_config, save_config


def test_defaults_roundtrip(tmp_path):
    cfg = PipelineConfig()
    save_config(tmp_path / "c.json", cfg)
    assert load_config(tmp_path / "c.json") == cfg


def test_full_document_roundtrip(tmp_path):
    doc = {
        "version": 1, "seed": 9, "out_dir": "out", "copies": 3,
        "augment": {"pcg_eq": 0.5, "stretch_rule": "ecg"},
        "train": {"steps": 10, "preset": "wavegrad"},
        "rearrange": {"enabled": True, "mode": "halves"},
        "noise_bank": {"pcg": ["noise/a.wav"], "ecg": ["/abs/b.wav"]},
    }
    (tmp_path / "c.json").write_text(json.dumps(doc))
    cfg = load_config(tmp_path / "c.json")
    assert cfg.augment.pcg_eq == 0.5 and cfg.augment.stretch_rule == "ecg"
    assert cfg.train.preset == "wavegrad" and cfg.rearrange == RearrangeConfig(True, 0.75, "halves")
    assert cfg.noise_bank == {"pcg": [str(tmp_path / "noise/a.wav")], "ecg": ["/abs/b.wav"]}
    assert PipelineConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


@pytest.mark.parametrize("doc, match", [
    ({}, "version"),
    ({"version": 2}, "version"),
    ({"version": 1, "colour": 1}, "colour"),
    ({"version": 1, "augment": {"pcg_eqq": 0.2}}, "pcg_eqq"),
    ({"version": 1, "augment": {"pcg_eq": 1.5}}, "pcg_eq"),
    ({"version": 1, "train": {"lr": 1}}, "lr"),
    ({"version": 1, "train": {"preset": "other"}}, "preset"),
    ({"version": 1, "rearrange": {"mode": "spiral"}}, "mode"),
    ({"version": 1, "rearrange": {"extra": 1}}, "extra"),
    ({"version": 1, "copies": 0}, "copies"),
    ({"version": 1, "seed": -1}, "seed"),
    ({"version": 1, "noise_bank": {"emg": []}}, "noise_bank"),
    ({"version": 1, "noise_bank": {"pcg": "a.wav"}}, "list"),
    ([], "object"),
])
def test_invalid_documents_rejected(doc, match):
    with pytest.raises(ConfigurationError, match=match):
        PipelineConfig.from_dict(doc)


def test_invalid_json_names_file(tmp_path):
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigurationError, match="bad.json"):
        load_config(tmp_path / "bad.json")


def test_disabled_augment_has_all_gates_zero():
    cfg = AugmentConfig.disabled()
    assert all(getattr(cfg, g) == 0.0 for g in AugmentConfig.gate_names())
    assert len(AugmentConfig.gate_names()) == 11
