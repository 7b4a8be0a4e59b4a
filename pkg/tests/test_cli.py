import json

import pytest

from cantormap.analysis import p_threshold
from cantormap.cli import main
from cantormap.construction import ConstructionParams


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_construct_csv_row_counts(capsys):
    code, out, _ = run_cli(["construct", "--depth", "3"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "level,ax0_path,ax1_path,cx,cy,side"
    assert len(lines) == 1 + 64
    first = lines[1].split(",")
    assert first[0] == "3" and first[1] == "0" and first[2] == "0"

    code, out, _ = run_cli(["construct", "--depth", "4"], capsys)
    assert len(out.strip().split("\n")) == 1 + 256


def test_construct_json_document(capsys):
    code, out, _ = run_cli(["construct", "--depth", "3", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"params", "results", "checks"}
    assert doc["params"]["sigma"] == 0.45
    assert doc["params"]["command"] == "construct"
    assert doc["results"]["count"] == 64
    cell = doc["results"]["cells"][0]
    assert set(cell) == {"level", "ax0_path", "ax1_path", "pre_center", "image_center"}
    assert doc["checks"][0]["name"] == "geometry_invariants"
    assert doc["checks"][0]["status"] == "pass"


def test_construct_cap_exit(capsys):
    code, out, err = run_cli(["construct", "--depth", "5", "--cap", "256"], capsys)
    assert code == 2
    assert out == ""
    assert err.startswith("error:") and "cap" in err


def test_invalid_sigma_exit(capsys):
    code, _, err = run_cli(["construct", "--sigma", "0.6"], capsys)
    assert code == 2
    assert "error:" in err


def test_map_points_file(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y\n0.5,0.5\n0.123,0.456\n")
    code, out, _ = run_cli(["map", str(pts)], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "x,y,fx,fy,dnorm,jac,K,skeleton"
    assert len(lines) == 3
    skel_row = lines[1].split(",")
    # (0.5, 0.5) sits on a level-3 frame boundary: fields are blanked
    assert skel_row[-1] == "1"
    assert skel_row[4] == "" and skel_row[5] == "" and skel_row[6] == ""
    plain_row = lines[2].split(",")
    assert plain_row[-1] == "0"
    assert float(plain_row[6]) >= 1.0


def test_map_json_nulls_on_skeleton(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("0.5,0.5\n")
    code, out, _ = run_cli(["map", str(pts), "--format", "json"], capsys)
    assert code == 0
    row = json.loads(out)["results"]["rows"][0]
    assert row["skeleton"] is True
    assert row["dnorm"] is None and row["jac"] is None and row["K"] is None
    assert isinstance(row["level"], int)


def test_map_default_sampling_deterministic(capsys):
    code, out1, _ = run_cli(["map", "--samples", "100"], capsys)
    assert code == 0
    assert len(out1.strip().split("\n")) == 101
    _, out2, _ = run_cli(["map", "--samples", "100"], capsys)
    assert out1 == out2


def test_map_bad_points_file(tmp_path, capsys):
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y\n0.5\n")
    code, _, err = run_cli(["map", str(pts)], capsys)
    assert code == 2 and "error:" in err


def test_series_csv_and_verdict_flip(capsys):
    p0 = p_threshold(ConstructionParams(0.45, 2.0))
    code, out, _ = run_cli(["series", "subexp", "--p", str(0.9 * p0)], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "k,log_term,ratio,verdict"
    assert len(lines) >= 20
    assert lines[1].split(",")[-1] == "convergent"

    _, out, _ = run_cli(["series", "subexp", "--p", str(1.1 * p0)], capsys)
    assert out.strip().split("\n")[1].split(",")[-1] == "divergent"


def test_series_json_schema(capsys):
    code, out, _ = run_cli(["series", "tv", "--format", "json"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    assert set(res) == {
        "kind", "p", "margin", "p_threshold", "limit_ratio", "verdict", "terms"
    }
    assert res["kind"] == "tv" and res["p"] is None
    assert res["verdict"] == "convergent"
    term = res["terms"][0]
    assert set(term) == {"k", "count_log2", "log_per_frame", "log_term", "ratio"}


def test_measure_json_schema(capsys):
    code, out, _ = run_cli(["measure"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert set(doc["results"]) == {"m", "at_k", "lower_bound", "first_admissible_k"}
    assert doc["results"]["at_k"] == 3
    assert len(doc["checks"]) == 3
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_measure_csv(capsys):
    code, out, _ = run_cli(["measure", "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "beta_prime,k,log_sum,verdict"
    # three gauge exponents, four decade levels each
    assert len(lines) == 1 + 3 * 4


def test_measure_flags_unexpected_trend(capsys):
    code, out, _ = run_cli(
        ["measure", "--gauge-beta", "2.0", "--k-min", "3", "--k-max", "30"], capsys
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["checks"][0]["status"] == "fail"


def test_verify_json_single_documented_failure(capsys):
    code, out, _ = run_cli(["verify"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["results"]["passed"] is False
    assert doc["results"]["failed"] == 1
    failing = [c for c in doc["checks"] if c["status"] == "fail"]
    assert len(failing) == 1
    assert failing[0]["name"] == "gain_ratio_limit[sigma=0.25,beta=2.0,p=2.0]"


def test_verify_output_reproducible(capsys):
    _, out1, _ = run_cli(["verify"], capsys)
    _, out2, _ = run_cli(["verify"], capsys)
    assert out1 == out2


def test_render_svg_output(tmp_path, capsys):
    target = tmp_path / "map.svg"
    code, out, _ = run_cli(
        ["render", "--depth", "3", "--samples", "4", "--out", str(target)], capsys
    )
    assert code == 0
    assert out == ""
    text = target.read_text()
    assert text.startswith("<svg ") and text.endswith("</svg>\n")
    _, stdout, _ = run_cli(["render", "--depth", "3", "--samples", "4"], capsys)
    assert stdout == text


def test_unknown_flag_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["construct", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["unknowncmd"])
