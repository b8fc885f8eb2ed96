import json

import pytest

from rdpair.cli import RunConfig, main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def load(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_fixtures(tmp_path, capsys):
    assert run(tmp_path, "fixtures") == 0
    doc = load(tmp_path, "fixtures.json")
    assert doc["schema"] == "rdpair.fixtures/1"
    assert any(r["id"] == "bs-a" and r["rd"] is False for r in doc["fixtures"])


def test_ball_counts(tmp_path, capsys):
    assert run(tmp_path, "ball", "--fixture", "z2-zline", "-R", "2", "--counts") == 0
    assert capsys.readouterr().out.strip() == "1,4,8"
    assert load(tmp_path, "ball.json")["ballSizes"] == [1, 5, 13]


def test_ball_growth_and_plot(tmp_path):
    assert run(tmp_path, "ball", "--fixture", "f2-free", "-R", "9", "--plot") == 0
    assert load(tmp_path, "ball.json")["growth"]["classification"] == "exponential"
    assert (tmp_path / "ball.growth.dat").exists()
    assert (tmp_path / "growth.csv").read_text().startswith("# schema=rdpair.ball/1")


def test_schreier(tmp_path, capsys):
    assert run(tmp_path, "schreier", "--fixture", "bs-t", "--schreier-radius", "9") == 0
    doc = load(tmp_path, "schreier.json")
    assert doc["growth"]["classification"] == "exponential"
    assert "exponential" in capsys.readouterr().out


def test_norms_and_conv(tmp_path):
    assert run(tmp_path, "norms", "--fixture", "f2-a", "-R", "3", "--seed", "4") == 0
    doc = load(tmp_path, "norms.json")
    assert doc["chainHolds"] and "/" in doc["norms"]["l21"]["squared"]
    assert run(tmp_path, "conv", "--fixture", "bs-a", "-R", "2", "--float") == 0
    assert load(tmp_path, "conv.json")["l1Submultiplicative"]


def test_opnorm_and_spectral(tmp_path):
    assert run(tmp_path, "opnorm", "--fixture", "z2-zline", "--truncation", "10") == 0
    br = load(tmp_path, "opnorm.json")["bracket"]
    assert 0.9 < br["lower"] <= br["upper"] == 1.0
    assert run(tmp_path, "spectral", "--fixture", "s4-d8", "--kind", "rhoH", "-n", "10") == 0
    est = load(tmp_path, "spectral.json")["estimate"]
    assert est["kind"] == "rhoH" and len(est["sequence"]) == 10


def test_walk(tmp_path, capsys):
    assert run(tmp_path, "walk", "--fixture", "z2-zline", "-n", "4", "--plot") == 0
    lines = (tmp_path / "walk.csv").read_text().splitlines()
    assert lines[0].startswith("# schema=rdpair.walk/1")
    assert lines[2].startswith("1,0.375,3/8,")
    assert all(r["equal"] for r in load(tmp_path, "walk.json")["identity"])
    assert (tmp_path / "walk.walk.dat").exists()


def test_rdfit(tmp_path):
    assert run(tmp_path, "rdfit", "--fixture", "bs-a", "--window", "3:8", "--plot") == 0
    doc = load(tmp_path, "rdfit.json")
    assert doc["fit"]["verdict"] == "exponential-consistent"
    assert doc["expectation"]["rd"] is False
    assert (tmp_path / "rdfit.rdfit.fit.dat").exists()


def test_suite(tmp_path, capsys):
    assert run(tmp_path, "suite", "--fixture", "d8-flip", "--trials", "20") == 0
    rep = load(tmp_path, "suite.json")["report"]
    assert rep["passed"]
    names = [c["name"] for c in rep["checks"]]
    assert "return-identity" in names and "normal-quotient" not in names


def test_yaml_config_and_override(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("fixture: f2-free\nradius: 5\n")
    assert run(tmp_path, "ball", "--config", str(cfg), "-R", "1") == 0
    doc = load(tmp_path, "ball.json")
    assert doc["group"] == "F2" and doc["radius"] == 1
    assert doc["config"]["radius"] == 1


def test_config_roundtrip():
    cfg = RunConfig(fixture="bs-a", bs_n=3, window=[3, 9])
    assert RunConfig.from_dict(cfg.to_dict()) == cfg
    assert "out" not in cfg.digest_view()


@pytest.mark.parametrize("args", [
    ("ball", "--fixture", "nope"),
    ("ball", "--fixture", "bs-a", "--bs-n", "1"),
    ("frobnicate",),
    ("walk", "--kind", "rho9"),
])
def test_usage_errors(tmp_path, args):
    assert run(tmp_path, *args) == 2


def test_cap_exceeded_writes_partial(tmp_path):
    assert run(tmp_path, "ball", "--fixture", "f2-free", "-R", "12", "--ball-cap", "1000") == 3
    doc = load(tmp_path, "ball.partial.json")
    assert doc["error"] == "BallTooLarge" and doc["completed"] >= 4


def test_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("RDPAIR_CACHE_DIR", str(tmp_path / "cache"))
    assert run(tmp_path, "ball", "--fixture", "heisenberg-center", "-R", "3") == 0
    assert list((tmp_path / "cache").iterdir())
    assert run(tmp_path, "ball", "--fixture", "heisenberg-center", "-R", "3") == 0
