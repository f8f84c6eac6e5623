"""CLI surface: subcommands, exit codes, file outputs."""

import json
import os

from entrostream.cli import main


def test_run_writes_outputs(tmp_path, capsys):
    out = str(tmp_path / "exp")
    code = main(
        [
            "run",
            "--estimator",
            "simple",
            "--dist",
            "zipf:s=1",
            "--k",
            "8",
            "--eps",
            "0.25",
            "--trials",
            "2",
            "--seed",
            "3",
            "--override",
            "m=25",
            "--out",
            out,
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["trials"] == 2
    assert os.path.exists(os.path.join(out, "run.csv"))


def test_run_rejects_bad_estimator(capsys):
    assert main(["run", "--estimator", "magic", "--k", "4"]) == 1
    assert "error:" in capsys.readouterr().err


def test_run_k_comes_from_dist_file(tmp_path, capsys):
    spec = tmp_path / "d.json"
    spec.write_text(json.dumps({"family": "zipf", "k": 6, "params": {"s": 1.0}}))
    code = main(
        ["run", "--dist", str(spec), "--eps", "0.3", "--override", "m=10"]
    )
    assert code == 0
    assert json.loads(capsys.readouterr().out)["config"]["k"] == 6


def test_run_k_mismatch_with_dist_file(tmp_path, capsys):
    spec = tmp_path / "d.json"
    spec.write_text(json.dumps({"family": "uniform", "k": 6}))
    code = main(["run", "--dist", str(spec), "--k", "9", "--override", "m=5"])
    assert code == 1
    assert "alphabet size" in capsys.readouterr().err


def test_run_rejects_bad_override(capsys):
    code = main(["run", "--k", "4", "--override", "bogus=1"])
    assert code == 1


def test_sweep_smoke(tmp_path, capsys):
    out = str(tmp_path / "sw")
    code = main(
        [
            "sweep",
            "--estimator",
            "bucketed",
            "--k",
            "16",
            "--eps",
            "0.4,0.2",
            "--trials",
            "1",
            "--override",
            "rep_multiplier=0.05",
            "--out",
            out,
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert "bucketed,k=16" in summary["inv_eps_exponent"]
    assert os.path.exists(os.path.join(out, "sweep.csv"))


def test_audit_exit_code(capsys):
    assert main(["audit", "--eps", "0.2"]) == 0
    assert "registers=" in capsys.readouterr().out


def test_validate_list(capsys):
    assert main(["validate", "--list"]) == 0
    names = capsys.readouterr().out.split()
    assert "acceptance.a01_correction_closed_forms" in names


def test_validate_single_check(capsys):
    code = main(["validate", "--only", "acceptance.a01"])
    out = capsys.readouterr().out
    assert code == 0
    assert out.startswith("PASS acceptance.a01")


def test_oracle_expected_log(capsys):
    assert main(["oracle", "expected-log", "--t", "1", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "value 0.73264948" in out
    assert "enclosure" in out


def test_oracle_missing_flag(capsys):
    assert main(["oracle", "expected-log", "--t", "1"]) == 1


def test_oracle_bucket_stats(capsys):
    code = main(
        ["oracle", "bucket-stats", "--t", "16", "--k", "8", "--eps", "0.2", "--dist", "uniform"]
    )
    assert code == 0
    assert "interval 1:" in capsys.readouterr().out


def test_poly_dump(tmp_path, capsys):
    path = str(tmp_path / "coeffs.txt")
    assert main(["poly", "--t", "16", "--r", "2", "--base", "nats", "--out", path]) == 0
    text = open(path).read()
    assert text.splitlines()[0] == "t=16 r=2 base=nats"
    assert "c0 -1/32" in text


def test_poly_rejects_bad_regime(capsys):
    assert main(["poly", "--t", "8", "--r", "3"]) == 1


def test_hardpair_smoke(tmp_path, capsys):
    out = str(tmp_path / "hp")
    code = main(
        ["hardpair", "--k", "32", "--eps", "0.2", "--trials", "3", "--seed", "1", "--out", out]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["trials"] == 3
    assert os.path.exists(os.path.join(out, "hardpair.csv"))


def test_replay_via_cli(tmp_path, capsys):
    from entrostream.distribution import make_family
    from entrostream.sampling import SampleSource, generate_symbols

    d = make_family("uniform", 4)
    syms = generate_symbols(SampleSource(d, 2), 50_000)
    stream = tmp_path / "stream.txt"
    stream.write_text("".join(f"{s + 1}\n" for s in syms))
    code = main(
        [
            "run",
            "--replay",
            str(stream),
            "--k",
            "4",
            "--eps",
            "0.3",
            "--override",
            "m=10",
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["fail_fraction"] == 0.0
