import json

from sealab.server.config import ServerConfig


def test_defaults():
    cfg = ServerConfig.load(None)
    assert cfg.port == 8000
    assert cfg.scheduler.duration_minutes == 120
    assert cfg.scheduler.cooldown_minutes == 30
    assert cfg.stream.decimate_hz == 20.0


def test_document_load(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({
        "port": 9001,
        "data_dir": "/srv/lab",
        "scheduler": {"cooldown_minutes": 45},
        "stream": {"pace": 1.0},
    }))
    cfg = ServerConfig.load(path)
    assert cfg.port == 9001
    assert cfg.data_dir == "/srv/lab"
    assert cfg.scheduler.cooldown_minutes == 45
    assert cfg.scheduler.duration_minutes == 120  # untouched default
    assert cfg.stream.pace == 1.0


def test_env_overrides(tmp_path, monkeypatch):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"port": 9001, "data_dir": "/srv/lab"}))
    monkeypatch.setenv("SEALAB_PORT", "7777")
    monkeypatch.setenv("SEALAB_DATA_DIR", str(tmp_path / "override"))
    cfg = ServerConfig.load(path)
    assert cfg.port == 7777
    assert cfg.data_dir == str(tmp_path / "override")
