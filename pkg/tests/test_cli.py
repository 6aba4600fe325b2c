import json

from jitower.cli import main


def write_config(path, **overrides):
    base = {
        "d": 2,
        "primes": "2,3,5",
        "epsilon": "1/10",
        "budget_scale": 16,
        "budget_base": 8,
        "depth": 2,
        "mode": "strict",
    }
    base.update(overrides)
    path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return str(path)


def test_build_verify_report_flow(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg")
    tower = str(tmp_path / "t.twr")
    report = str(tmp_path / "t.json")
    assert main(["build", "--config", cfg, "--out", tower,
                 "--report", report]) == 0
    out = capsys.readouterr().out
    assert "overall: pass" in out
    doc = json.loads(open(report).read())
    assert doc["overall"] == "pass"
    assert any(c["check"] == "level2.kernel-dim" for c in doc["checks"])

    assert main(["verify", "--tower", tower]) == 0
    out = capsys.readouterr().out
    assert "load.invariants" in out and "overall: pass" in out

    assert main(["report", "--tower", tower]) == 0
    out = capsys.readouterr().out
    assert "G_2: order 324" in out


def test_invalid_epsilon_exits_two(tmp_path, capsys):
    cfg = write_config(tmp_path / "bad.cfg", epsilon="1/3")
    assert main(["build", "--config", cfg, "--out", str(tmp_path / "x.twr")]) == 2
    assert "epsilon" in capsys.readouterr().err


def test_missing_tower_exits_two(tmp_path, capsys):
    assert main(["verify", "--tower", str(tmp_path / "nope.twr")]) == 2
    capsys.readouterr()


def test_unknown_check_group_exits_two(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg")
    tower = str(tmp_path / "t.twr")
    main(["build", "--config", cfg, "--out", tower])
    capsys.readouterr()
    assert main(["verify", "--tower", tower, "--checks", "bogus"]) == 2
    capsys.readouterr()


def test_normals_table_output(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg")
    tower = str(tmp_path / "t.twr")
    main(["build", "--config", cfg, "--out", tower])
    capsys.readouterr()
    assert main(["normals", "--tower", tower, "--level", "2"]) == 0
    out = capsys.readouterr().out
    assert "index count cumulative" in out
    assert "6 6 12" in out
    assert "total normal subgroups: 30" in out

    assert main(["normals", "--tower", tower, "--level", "2",
                 "--max-index", "6"]) == 0
    out = capsys.readouterr().out
    assert "6 6 12" in out and "324" not in out.split("total")[0]


def test_checks_selection_single_section(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg")
    tower = str(tmp_path / "t.twr")
    main(["build", "--config", cfg, "--out", tower])
    capsys.readouterr()
    assert main(["verify", "--tower", tower, "--checks", "betti"]) == 0
    out = capsys.readouterr().out
    assert "betti-ratio" in out
    assert "torsion" not in out


def test_reports_are_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg")
    towers = [str(tmp_path / f"t{i}.twr") for i in (1, 2)]
    reports = [str(tmp_path / f"r{i}.json") for i in (1, 2)]
    for t, r in zip(towers, reports):
        assert main(["build", "--config", cfg, "--out", t, "--report", r]) == 0
    capsys.readouterr()
    assert open(towers[0], "rb").read() == open(towers[1], "rb").read()
    assert open(reports[0], "rb").read() == open(reports[1], "rb").read()


def test_extend_adds_levels(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg", depth=2, primes="2,3,5")
    tower = str(tmp_path / "t.twr")
    main(["build", "--config", cfg, "--out", tower])
    capsys.readouterr()
    assert main(["extend", "--tower", tower, "--depth", "3"]) == 0
    out = capsys.readouterr().out
    assert "depth 3" in out
    assert main(["report", "--tower", tower]) == 0
    out = capsys.readouterr().out
    assert "G_3" in out and "dim V=324" in out


def test_flag_overrides(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg", depth=3)
    tower = str(tmp_path / "t.twr")
    assert main(["build", "--config", cfg, "--out", tower, "--depth", "1"]) == 0
    out = capsys.readouterr().out
    assert "depth 1" in out


def test_normals_at_seed_level(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg", depth=1)
    tower = str(tmp_path / "t.twr")
    main(["build", "--config", cfg, "--out", tower])
    capsys.readouterr()
    assert main(["normals", "--tower", tower, "--level", "0"]) == 0
    out = capsys.readouterr().out
    assert "1 1 1" in out and "total normal subgroups: 1" in out


def test_build_truncates_at_enum_cap(tmp_path, capsys):
    cfg = write_config(tmp_path / "t.cfg", depth=3, enum_cap=100)
    tower = str(tmp_path / "t.twr")
    assert main(["build", "--config", cfg, "--out", tower]) == 0
    out = capsys.readouterr().out
    assert "truncated" in out
    assert "depth 2" in out
