import json

import pytest

from relhyp.cli import EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, run


def write(tmp_path, configs, text, name="run.yaml"):
    p = tmp_path / name
    p.write_text(text.replace("GROUPS", str(configs / "groups")))
    return str(p)


def test_delta_tree(configs, tmp_path):
    out = tmp_path / "delta.json"
    assert run(["delta", "--config", str(configs / "tree.yaml"), "--out", str(out)]) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["results"]["domain"]["delta"] == 0 and rep["passed"]
    assert rep["config"]["name"] == "tree"
    assert set(rep["constants"]) >= {"delta", "C1", "C4", "C5", "T1", "L", "D", "lambda", "K", "C", "A", "B"}


def test_deterministic(configs, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(["shadows", "--config", str(configs / "tree.yaml"), "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_seed_override(configs, tmp_path):
    out = tmp_path / "s.json"
    run(["delta", "--config", str(configs / "tree.yaml"), "--seed", "99", "--out", str(out)])
    assert json.loads(out.read_text())["config"]["seed"] == 99


def test_build_golden(configs, tmp_path):
    assert run(["build", "--config", str(configs / "f2_rel_a.yaml"), "--out", str(tmp_path)]) == EXIT_OK
    rep = json.loads((tmp_path / "build.json").read_text())["results"]["domain"]
    assert (rep["vertices"], rep["edges"], rep["group_vertices"], rep["horoballs"]) == (18948, 43740, 4373, 729)
    assert (tmp_path / "domain.graph").exists()
    reg = (tmp_path / "domain.registry").read_text().splitlines()
    assert len(reg) == 1 + 729


def test_z_two_ends_shadows(configs, tmp_path):
    out = tmp_path / "z.json"
    assert run(["shadows", "--config", str(configs / "z_two_ends.yaml"), "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["results"]["classes"] == 2


def test_svg(configs, tmp_path):
    out = tmp_path / "a.svg"
    assert run(["svg", "--config", str(configs / "tree.yaml"), "--out", str(out)]) == EXIT_OK
    assert out.read_text().startswith("<svg")


def test_report_merge(configs, tmp_path):
    a = tmp_path / "delta.json"
    run(["delta", "--config", str(configs / "tree.yaml"), "--out", str(a)])
    bad = json.loads(a.read_text())
    bad["command"], bad["passed"] = "fake", False
    b = tmp_path / "fake.json"
    b.write_text(json.dumps(bad))
    out = tmp_path / "merged.json"
    assert run(["report", str(a), "--out", str(out)]) == EXIT_OK
    assert run(["report", str(a), str(b), "--out", str(out)]) == EXIT_FAIL
    assert set(json.loads(out.read_text())["parts"]) == {"delta", "fake"}


def test_config_error(configs, tmp_path, capsys):
    p = write(tmp_path, configs, "seed: 1\ndomain:\n  group: GROUPS/f2.yaml\n  radius: 4\n  depth: 1\n  rho: 1\n  tau: 0.3\n")
    assert run(["delta", "--config", p]) == EXIT_CONFIG
    assert "domain.tau" in capsys.readouterr().err
    assert run(["delta", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG


def test_radius_error(configs, tmp_path):
    # 6-cycle-like space with delta > 0 and a shadow radius too small for it
    p = write(tmp_path, configs, "seed: 1\nshadow_radius: 1\ndelta: {mode: sampled, samples: 200}\n"
              "domain:\n  group: GROUPS/f2_rel_a.yaml\n  radius: 5\n  depth: 3\n  rho: 2\n  tau: 1.5\n")
    assert run(["shadows", "--config", p]) == EXIT_CONFIG


def test_budget_error(configs, tmp_path, capsys):
    p = write(tmp_path, configs, "seed: 1\nbudget: 1000\n"
              "domain:\n  group: GROUPS/f2.yaml\n  radius: 9\n  depth: 1\n  rho: 1\n  tau: 1\n  anchor: {kind: horizon}\n")
    assert run(["build", "--config", p, "--out", str(tmp_path / "b")]) == EXIT_BUDGET
    assert "projected" in capsys.readouterr().err


def test_usage():
    with pytest.raises(SystemExit):
        run(["frobnicate"])
