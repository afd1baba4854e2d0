import json

import pytest

from semloc.cli import EXIT_DATA, EXIT_NO_SOLUTION, EXIT_OK, EXIT_USAGE, main


def _synth(tmp_path, *extra):
    out = tmp_path / "scene"
    rc = main(["synth", "--out", str(out), "--landmarks", "24", "--seed", "5", *extra])
    assert rc == EXIT_OK
    return out


def test_synth_writes_scene_files(tmp_path):
    out = _synth(tmp_path)
    for name in ("map.json", "observation.json", "embeddings.json", "embeddings.bin"):
        assert (out / name).exists()


def test_synth_multi_scene_layout(tmp_path):
    out = tmp_path / "scenes"
    rc = main(["synth", "--out", str(out), "--landmarks", "12", "--scenes", "3"])
    assert rc == EXIT_OK
    assert sorted(p.name for p in out.iterdir()) == ["scene_000", "scene_001", "scene_002"]


def test_localize_roundtrip(tmp_path, capsys):
    out = _synth(tmp_path)
    result = tmp_path / "result.json"
    rc = main([
        "localize", str(out / "map.json"), str(out / "observation.json"),
        "--embeddings", str(out / "embeddings.json"),
        "--out", str(result),
    ])
    assert rc == EXIT_OK
    doc = json.loads(result.read_text())
    assert set(doc) >= {"poses", "diagnostics", "inliers"}
    assert "latency" not in json.dumps(doc)
    assert len(doc["poses"]) >= 1
    # ground truth travels with the synth observation, so a report appears
    assert doc["report"]["translation_error"] < 1e-6


def test_localize_exit_codes(tmp_path):
    out = _synth(tmp_path)
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    args = ["localize", str(bad), str(out / "observation.json"),
            "--embeddings", str(out / "embeddings.json")]
    assert main(args) == EXIT_DATA

    missing = ["localize", str(tmp_path / "nope.json"), str(out / "observation.json"),
               "--embeddings", str(out / "embeddings.json")]
    assert main(missing) == EXIT_DATA


def test_localize_no_solution(tmp_path):
    out = _synth(tmp_path)
    # stretch observation coordinates so no pairwise distance can ever
    # agree with the map and every hypothesis dies
    obs_path = out / "observation.json"
    doc = json.loads(obs_path.read_text())
    for o in doc["objects"]:
        o["position"] = [1000.0 * v for v in o["position"]]
    obs_path.write_text(json.dumps(doc))
    rc = main([
        "localize", str(out / "map.json"), str(obs_path),
        "--embeddings", str(out / "embeddings.json"),
    ])
    assert rc == EXIT_NO_SOLUTION


def test_usage_errors():
    assert main([]) == EXIT_USAGE
    assert main(["localize"]) == EXIT_USAGE
    assert main(["synth", "--out"]) == EXIT_USAGE
    assert main(["frobnicate"]) == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert main(["--help"]) == EXIT_OK
    assert main(["localize", "--help"]) == EXIT_OK
    capsys.readouterr()


def test_ablate_writes_csv(tmp_path, capsys):
    csv_path = tmp_path / "sweep.csv"
    rc = main([
        "ablate", "--axis", "weights", "--scenes", "2", "--landmarks", "15",
        "--partial", "0.3", "--out", str(csv_path),
    ])
    assert rc == EXIT_OK
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0].startswith("weights,")  # swept axis is the first column
    assert len(rows) == 5  # header + none/sim/com/both
    capsys.readouterr()


def test_bench_runs_available_backends(tmp_path, capsys):
    rc = main(["bench", "--sizes", "40,80", "--repeats", "2", "--backend", "both"])
    assert rc == EXIT_OK
    text = capsys.readouterr().out
    assert "python" in text


def test_bench_rejects_missing_backend(monkeypatch, capsys):
    import semloc._kernels as kernels

    monkeypatch.setattr(kernels, "available_backends", lambda: ("python",))
    rc = main(["bench", "--sizes", "40", "--repeats", "1", "--backend", "native"])
    assert rc == EXIT_USAGE
    capsys.readouterr()
