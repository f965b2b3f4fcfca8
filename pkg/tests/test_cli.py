import json
import subprocess
import sys

import numpy as np
import pytest

from bgbench.bgmodels import MogParams
from bgbench.cli import main
from bgbench.imaging import Frame, write_pnm


@pytest.fixture
def synth_dir(tmp_path):
    out = tmp_path / "data"
    assert main(["synth", "--frames", "30", "--seed", "7", "--outdir", str(out)]) == 0
    return out


def test_synth_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["synth", "--frames", "10", "--seed", "7", "--outdir", str(a)])
    main(["synth", "--frames", "10", "--seed", "7", "--outdir", str(b)])
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b and len(files_a) == 12
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes()


def test_synth_zero_cars(tmp_path):
    main(["synth", "--frames", "8", "--cars", "0..0", "--outdir", str(tmp_path)])
    rows = (tmp_path / "cam0_truth.csv").read_text().splitlines()
    assert rows[0] == "image,count"
    assert all(r.endswith(",0") for r in rows[1:]) and len(rows) == 9


def test_synth_multiple_sequences(tmp_path, capsys):
    main(["synth", "--frames", "4", "--sequences", "3", "--outdir", str(tmp_path)])
    out = capsys.readouterr().out.split()
    assert [p.rsplit("/", 1)[-1] for p in out] == ["cam000.json", "cam001.json", "cam002.json"]


def _manifest(tmp_path, n):
    frames = []
    for i in range(n):
        name = f"f{i}.pgm"
        write_pnm(Frame(np.full((16, 16), 100, np.uint8), name), tmp_path / name)
        frames.append(name)
    p = tmp_path / "m.json"
    p.write_text(json.dumps({"camera_id": "c", "interval_seconds": 60, "width": 16,
                             "height": 16, "frames": frames}))
    return p


def test_run_two_frames(tmp_path, capsys):
    assert main(["run", str(_manifest(tmp_path, 2)), "--algo", "mog"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "image,algorithm,density,elapsed_us"
    assert len(lines) == 3
    assert [ln.split(",")[2] for ln in lines[1:]] == ["0.0", "0.0"]


def test_run_reproducible(synth_dir, tmp_path):
    args = ["run", str(synth_dir / "cam0.json"), "--algo", "mog", "--no-timing"]
    main(args + ["--out", str(tmp_path / "1.csv")])
    main(args + ["--out", str(tmp_path / "2.csv")])
    assert (tmp_path / "1.csv").read_bytes() == (tmp_path / "2.csv").read_bytes()


def test_run_params_file(synth_dir, tmp_path):
    params = tmp_path / "p.json"
    params.write_text(MogParams(K=3, alpha=0.01).to_json())
    assert main(["run", str(synth_dir / "cam0.json"), "--params", str(params),
                 "--out", str(tmp_path / "o.csv")]) == 0


def test_run_missing_frame(tmp_path, capsys):
    m = _manifest(tmp_path, 2)
    (tmp_path / "f1.pgm").write_bytes(b"P5\n16 16\n255\n" + bytes(10))
    assert main(["run", str(m)]) == 1
    assert "f1.pgm" in capsys.readouterr().err


def test_compare(synth_dir, tmp_path, capsys):
    csvs = []
    for algo in ("framediff", "staticbg", "mog"):
        out = tmp_path / f"{algo}.csv"
        main(["run", str(synth_dir / "cam0.json"), "--algo", algo, "--out", str(out)])
        csvs.append(str(out))
    capsys.readouterr()
    rep = tmp_path / "acc.json"
    assert main(["compare", *csvs, "--ground-truth", str(synth_dir / "cam0_truth.csv"),
                 "--out", str(rep)]) == 0
    table = capsys.readouterr().out.splitlines()
    assert len(table) == 4
    assert {json.loads(rep.read_text())[i]["algorithm"] for i in range(3)} == {"framediff", "staticbg", "mog"}


def test_compare_perfect(tmp_path, capsys):
    (tmp_path / "d.csv").write_text("image,algorithm,density,elapsed_us\na,mog,0.1,0\nb,mog,0.2,0\nc,mog,0.4,0\n")
    (tmp_path / "t.csv").write_text("image,count\na,1\nb,2\nc,4\n")
    assert main(["compare", str(tmp_path / "d.csv"), "--ground-truth", str(tmp_path / "t.csv")]) == 0
    assert "1.000" in capsys.readouterr().out


def test_compare_missing_truth(tmp_path, capsys):
    (tmp_path / "d.csv").write_text("image,algorithm,density,elapsed_us\n")
    missing = tmp_path / "nope.csv"
    assert main(["compare", str(tmp_path / "d.csv"), "--ground-truth", str(missing)]) == 1
    assert "nope.csv" in capsys.readouterr().err


def test_compare_no_overlap(tmp_path):
    (tmp_path / "d.csv").write_text("image,algorithm,density,elapsed_us\na,mog,0.1,0\nb,mog,0.2,0\n")
    (tmp_path / "t.csv").write_text("image,count\nx,1\ny,2\n")
    assert main(["compare", str(tmp_path / "d.csv"), "--ground-truth", str(tmp_path / "t.csv")]) == 1


def test_bench(synth_dir, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["bench", str(synth_dir / "cam0.json"), "--workers", "1", "--repeats", "1",
                 "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [a["algorithm"] for a in rep["algorithms"]] == ["framediff", "staticbg", "mog"]
    assert all(list(a["fps"]) == ["1"] for a in rep["algorithms"])
    assert out.with_suffix(".tsv").exists()


def test_bench_repeats_do_not_change_accuracy(synth_dir, tmp_path):
    base = ["bench", str(synth_dir / "cam0.json"), "--algo", "mog",
            "--ground-truth", str(synth_dir / "cam0_truth.csv")]
    main(base + ["--repeats", "1", "--out", str(tmp_path / "a.json")])
    main(base + ["--repeats", "5", "--out", str(tmp_path / "b.json")])
    acc = [json.loads((tmp_path / n).read_text())["algorithms"][0]["accuracy"] for n in ("a.json", "b.json")]
    assert acc[0] == acc[1] and acc[0]["pearson_r"] > 0.9


def test_bench_insufficient_sequences(synth_dir, tmp_path):
    assert main(["bench", str(synth_dir / "cam0.json"), "--workers", "1,2",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_bench_env_workers(synth_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("BGBENCH_THREADS", "1")
    out = tmp_path / "r.json"
    assert main(["bench", str(synth_dir / "cam0.json"), "--algo", "framediff", "--repeats", "1",
                 "--out", str(out)]) == 0
    assert list(json.loads(out.read_text())["algorithms"][0]["fps"]) == ["1"]


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["run"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--outdir", "x", "--bogus"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "bgbench", "synth", "--frames", "3",
                           "--outdir", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("cam0.json")
    proc = subprocess.run([sys.executable, "-m", "bgbench", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2 and proc.stdout == ""
