import json
import subprocess
import sys
import io

import pytest

from guidesim.cli import main
from guidesim.config import default_config, packaged_default_path, serialize
from guidesim.server import create_app, stdio_loop


@pytest.fixture()
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(serialize(default_config()))
    return str(path)


def test_validate_ok(config_path, capsys):
    assert main(["validate", "--config", config_path]) == 0


def test_validate_reports_errors(tmp_path, capsys):
    doc = json.loads(serialize(default_config()))
    doc["protocols"][0]["priority"] = -2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["validate", "--config", str(bad)]) == 1
    errors = json.loads(capsys.readouterr().err)
    assert errors[0]["code"] == "BadValue"


def test_run_writes_metrics_and_log(config_path, tmp_path):
    out = tmp_path / "metrics.json"
    log = tmp_path / "log.ndjson"
    code = main(
        [
            "run",
            "--config",
            config_path,
            "--script",
            str(packaged_default_path()).replace("default_config", "golden_script"),
            "--out",
            str(out),
            "--log",
            str(log),
        ]
    )
    assert code == 0
    metrics = json.loads(out.read_text())
    assert metrics["success"] is True
    assert metrics["regions_taught"] == 3
    lines = [json.loads(line) for line in log.read_text().splitlines()]
    assert lines[0]["kind"] == "init"
    assert lines[-1]["data"]["type"] == "session_ended"


def test_paths_prints_packaged_default(capsys):
    assert main(["paths"]) == 0
    assert capsys.readouterr().out.strip() == packaged_default_path()


def test_run_as_subprocess(tmp_path, config_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps({"entries": []}))
    doc = json.loads(serialize(default_config()))
    doc["apartment"]["time_limit_s"] = 2.0
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(doc))
    out = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "guidesim.cli", "run", "--config", str(cfg), "--script", str(script), "--out", str(out)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["success"] is False


def test_stdio_loop_session():
    lines = [
        json.dumps({"type": "move_avatar", "x": 3.0, "y": 2.0}),
        json.dumps({"type": "chat", "text": "learn the region kitchen"}),
        json.dumps({"type": "tick", "n": 15}),
        json.dumps({"type": "get_snapshot"}),
    ]
    fin = io.StringIO("\n".join(lines) + "\n")
    fout = io.StringIO()
    stdio_loop(default_config(), in_stream=fin, out_stream=fout)
    outputs = [json.loads(line) for line in fout.getvalue().splitlines()]
    assert outputs[0]["type"] == "snapshot"
    assert any(m["type"] == "avatar_moved" for m in outputs)
    final = [m for m in outputs if m["type"] == "snapshot"][-1]
    assert final["executing"] == ["teach_region", "start_following"]


def test_websocket_session_smoke():
    from fastapi.testclient import TestClient

    app = create_app(default_config(), realtime=False)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            snapshot = json.loads(ws.receive_text())
            assert snapshot["type"] == "snapshot"
            ws.send_text(json.dumps({"type": "chat", "text": "hello"}))
            ack = json.loads(ws.receive_text())
            assert ack["type"] == "chat_ack" and ack["intent"] == "greet"
            ws.send_text(json.dumps({"type": "move_avatar", "x": 3.0, "y": 2.0}))
            moved = json.loads(ws.receive_text())
            assert moved["type"] == "avatar_moved"
            ws.send_text(json.dumps({"type": "tick", "n": 1}))
            first = json.loads(ws.receive_text())
            assert first["type"] in ("event", "robot_say")


def test_websocket_respects_max_sessions():
    from fastapi.testclient import TestClient

    app = create_app(default_config(), realtime=False, max_sessions=1)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as first:
            json.loads(first.receive_text())
            with client.websocket_connect("/ws") as second:
                refusal = json.loads(second.receive_text())
                assert refusal["type"] == "protocol_error"
