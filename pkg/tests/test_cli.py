"""Command-line surface: subcommands, config files, exit codes, determinism."""

import pytest

from polywalk.cli import main, parse_walk_spec
from polywalk.walks import Walk


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_fleeing_true(capsys):
    code, out, _ = run(capsys, "check-fleeing", "--poly", "n, n^2")
    assert code == 0
    assert out.strip() == "fleeing: true"


def test_check_fleeing_false(capsys):
    code, out, _ = run(capsys, "check-fleeing", "--poly", "n, 2*n + 3")
    assert code == 0
    assert out.strip() == "fleeing: false"


def test_preserves_example(capsys):
    code, out, _ = run(capsys, "preserves", "--form", "x*y - z^2",
                       "--walk-from", "xyP:z^2:1")
    assert code == 0
    assert out.strip() == "preserved: true"


def test_preserves_negative(capsys):
    code, out, _ = run(capsys, "preserves", "--form", "x + y",
                       "--walk-from", "bogolubov:y^2")
    assert code == 0
    assert out.strip() == "preserved: false"


def test_walk_apply(capsys):
    code, out, _ = run(capsys, "walk-apply", "--walk-from", "bogolubov:y^2",
                       "--n", "3", "--v", "3,3")
    assert code == 0
    assert out.strip() == "30 6"


def test_walk_apply_validate_only(capsys):
    code, out, _ = run(capsys, "walk-apply", "--walk-from", "bogolubov:y^2",
                       "--n", "3", "--v", "3,3", "--validate-only")
    assert code == 0
    assert out.strip() == "ok"


def test_bad_expression_is_usage_error(capsys):
    code, _, err = run(capsys, "check-fleeing", "--poly", "n ^ n")
    assert code == 1
    assert "error" in err


def test_construct_walk_certificate(capsys):
    code, out, _ = run(capsys, "construct-walk", "--gen", "xyP:z^2:1",
                       "--gen", "xyP:z^2:2", "--v", "1,0,0")
    assert code == 0
    assert "depth 2" in out
    assert "exponents 3 9" in out


def test_construct_walk_exhausted(capsys):
    code, out, _ = run(capsys, "construct-walk", "--gen", "identity:2",
                       "--v", "1,1", "--N-max", "3")
    assert code == 2
    assert "construction failed" in out


def test_weyl_numeric(capsys):
    code, out, _ = run(capsys, "weyl", "--p", "n^2", "--theta", "sqrt2",
                       "--N", "20000")
    assert code == 0
    modulus = float(out.splitlines()[1].split("=")[1])
    assert modulus < 0.05


def test_weyl_exact(capsys):
    code, out, _ = run(capsys, "weyl", "--p", "n", "--theta", "1/3",
                       "--N", "30000", "--exact")
    assert code == 0
    assert "exactly_zero = true" in out


def test_weyl_dimension_mismatch(capsys):
    code, _, err = run(capsys, "weyl", "--p", "n, n^2", "--theta", "sqrt2",
                       "--N", "10")
    assert code == 1
    assert "frequencies" in err


def test_gen_walk_record_parses_back(capsys):
    code, out, _ = run(capsys, "gen", "--family", "bogolubov", "--P", "y^3")
    assert code == 0
    walk = Walk.from_text(out)
    assert walk.dim == 2


def test_gen_signature_lists_matrices(capsys):
    code, out, _ = run(capsys, "gen", "--family", "signature", "--p", "1", "--q", "2")
    assert code == 0
    assert "matrix 3,-2,2,2,-1,2,2,-2,1" in out


def test_parse_walk_spec_kinds():
    assert parse_walk_spec("identity:3").dim == 3
    assert parse_walk_spec("unipotent:1,1,0,1").dim == 2
    assert parse_walk_spec("adjoint:1,1,0,1").dim == 3
    assert parse_walk_spec("signature:1,2:1").dim == 3
    with pytest.raises(Exception):
        parse_walk_spec("mystery:1")


MAGYAR_CONFIG = """

# desk-scale difference search
model = bohr
dim = 3
freq_1 = sqrt2, sqrt3, sqrt5
radius_1 = 1/5
P = z^2
k = 1
targets = 1, -1, 2
N_max = 100000
seed = 11
"""


def _strip_timing(text: str) -> str:
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))


def test_magyar_from_config(tmp_path, capsys):
    cfg = tmp_path / "magyar.cfg"
    cfg.write_text(MAGYAR_CONFIG, encoding="utf-8")
    csv_path = tmp_path / "report.csv"
    code, out, _ = run(capsys, "magyar", "--config", str(cfg), "--csv", str(csv_path))
    assert code == 0
    assert "target 1: found" in out
    header = csv_path.read_text().splitlines()[0]
    assert header == "target,status,n,w1,w2,w3,f_value,millis"


def test_magyar_output_deterministic(tmp_path, capsys):
    cfg = tmp_path / "magyar.cfg"
    cfg.write_text(MAGYAR_CONFIG, encoding="utf-8")
    _, first, _ = run(capsys, "magyar", "--config", str(cfg))
    _, second, _ = run(capsys, "magyar", "--config", str(cfg))
    assert _strip_timing(first) == _strip_timing(second)


def test_magyar_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "magyar.cfg"
    cfg.write_text(MAGYAR_CONFIG, encoding="utf-8")
    code, out, _ = run(capsys, "magyar", "--config", str(cfg), "--targets", "4")
    assert code == 0
    assert "target 4: found" in out
    assert "target 1:" not in out


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(MAGYAR_CONFIG + "mystery = 1\n", encoding="utf-8")
    code, _, err = run(capsys, "magyar", "--config", str(cfg))
    assert code == 1
    assert "mystery" in err


def test_bogolubov_cli_window_model(tmp_path, capsys):
    cfg = tmp_path / "bog.cfg"
    cfg.write_text(
        "model = window\ndim = 2\nside = 30\ndensity = 1.0\n"
        "P = y^2\ntargets = 4\nN_max = 10\nseed = 3\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "bogolubov", "--config", str(cfg))
    assert code == 0
    assert "target 4: found" in out


def test_bogolubov_exhausted_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bog.cfg"
    cfg.write_text(
        "model = window\ndim = 2\nside = 3\ndensity = 0.0\n"
        "P = y^2\ntargets = 2\nN_max = 4\nseed = 3\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "bogolubov", "--config", str(cfg))
    assert code == 2
    assert "exhausted" in out


def test_ergodic_avg_cli(tmp_path, capsys):
    cfg = tmp_path / "avg.cfg"
    cfg.write_text(
        "row_1 = 1/3\nobservable = trig\ncomp_1 = 1 : 1.0 : 0.0\n"
        "p = 3*n\nN = 300\n",
        encoding="utf-8",
    )
    csv_path = tmp_path / "avg.csv"
    code, out, _ = run(capsys, "ergodic-avg", "--config", str(cfg),
                       "--csv", str(csv_path))
    assert code == 0
    assert "abs_error = 0" in out
    assert csv_path.read_text().startswith("experiment,N,")


def test_correlate_cli(tmp_path, capsys):
    cfg = tmp_path / "corr.cfg"
    cfg.write_text(
        "row_1 = sqrt2, sqrt3\ncenter_1 = 0\nradius_1 = 3/20\n"
        "orbit_1 = n^6, n^3\nN_1 = 150\norbit_2 = n^6, n^3\nN_2 = 150\n"
        "samples = 128\nreplicates = 3\nseed = 2\neps = 0.02\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, "correlate", "--config", str(cfg))
    assert code == 0
    assert "k = 1" in out
    estimate = float(next(l for l in out.splitlines() if l.startswith("estimate")).split("=")[1])
    assert estimate > 0.027 - 0.02


def test_out_file_written(tmp_path, capsys):
    out_path = tmp_path / "walk.txt"
    code, out, _ = run(capsys, "gen", "--family", "xyP", "--P", "z^2",
                       "--out", str(out_path))
    assert code == 0
    assert out_path.read_text() == out


def test_usage_error_exit_code(capsys):
    assert main(["walk-apply", "--n", "1"]) == 1
    capsys.readouterr()
