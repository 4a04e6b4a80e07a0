import json

from fsiegel.cli import main, strip_volatile


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out) if out.strip().startswith("{") else None


def test_census_3_1(capsys):
    code, payload = run_json(capsys, "census", "--q", "3", "--n", "1")
    assert code == 0
    cell = payload["checks"][0]
    assert cell["status"] == "pass"
    data = cell["data"]
    assert data["total"] == 10
    by_r = {row["r"]: row for row in data["strata"]}
    assert (by_r[0]["h_count"], by_r[1]["h_count"]) == (4, 6)
    assert (by_r[0]["o_count"], by_r[1]["o_count"]) == (4, 6)
    assert payload["schema_version"] == "fsiegel-report/1"
    assert payload["field_params"]["3"]["eps"] == 2


def test_census_3_2_total(capsys):
    code, payload = run_json(capsys, "census", "--q", "3", "--n", "2")
    assert code == 0
    assert payload["checks"][0]["data"]["total"] == 820


def test_census_rejects_non_prime(capsys):
    code = main(["census", "--q", "4", "--n", "1"])
    err = capsys.readouterr().err
    assert code == 2
    assert "usage error" in err


def test_unknown_check_id(capsys):
    code = main(["verify", "--checks", "nonsense", "--q", "3", "--n", "1"])
    assert code == 2


def test_verify_single_check(capsys):
    code, payload = run_json(capsys, "verify", "--checks", "lemma4", "--q", "3,5", "--n", "1")
    assert code == 0
    assert [r["status"] for r in payload["checks"]] == ["pass", "pass"]
    assert payload["counts"]["fail"] == 0


def test_verify_detects_failures_at_rank_two(capsys):
    code, payload = run_json(capsys, "verify", "--checks", "stabilizers", "--q", "3", "--n", "2")
    assert code == 1
    assert payload["checks"][0]["status"] == "fail"


def test_verify_skips_over_cap(capsys):
    code, payload = run_json(
        capsys, "verify", "--checks", "theorem1", "--q", "7", "--n", "2", "--cap-points", "1000"
    )
    assert code == 3  # the only cell was resource-skipped
    assert payload["checks"][0]["status"] == "skipped-resource"


def test_env_cap_override(capsys, monkeypatch):
    monkeypatch.setenv("FSIEGEL_CAP_POINTS", "5")
    code, payload = run_json(capsys, "census", "--q", "3", "--n", "1")
    assert code == 3
    assert payload["config"]["caps"]["points"] == 5


def test_orbits_output(capsys):
    code, payload = run_json(capsys, "orbits", "--q", "3", "--n", "1", "--group", "sp0")
    assert code == 0
    orbs = payload["checks"][0]["data"]["orbits"]
    assert sorted(o["size"] for o in orbs) == [4, 6]
    assert all("representative" in o for o in orbs)


def test_group_enumerate(capsys):
    code, payload = run_json(
        capsys, "group", "--q", "3", "--n", "1", "--group", "spf", "--enumerate"
    )
    assert code == 0
    data = payload["checks"][0]["data"]
    assert data["order"] == 24 and data["closure_size"] == 24
    assert data["generator_count"] == 2


def test_group_enumeration_cap_skip(capsys):
    code, payload = run_json(
        capsys,
        "group", "--q", "5", "--n", "2", "--group", "spf", "--enumerate", "--cap", "1000000",
    )
    assert code == 3
    assert payload["checks"][0]["status"] == "skipped-resource"


def test_witness_3_2(capsys):
    code, payload = run_json(capsys, "witness", "--q", "3", "--n", "2")
    assert code == 0
    names = {w["name"]: w for w in payload["checks"][0]["data"]["witnesses"]}
    assert names["even_null_nonimage"]["status"] == "verified"
    assert names["coordinate_span_k1"]["in_image"] is False
    assert names["coordinate_span_k1_transported"]["in_image"] is True


def test_witness_3_3_odd(capsys):
    code, payload = run_json(capsys, "witness", "--q", "3", "--n", "3")
    assert code == 0
    names = {w["name"]: w for w in payload["checks"][0]["data"]["witnesses"]}
    assert names["odd_null_nonimage"]["status"] == "verified"
    assert names["odd_null_nonimage"]["params"] == {"c": "1", "d": "1"}


def test_witness_5_2_reports_unavailable_on_odd_only_cells(capsys):
    code, payload = run_json(capsys, "witness", "--q", "5", "--n", "3")
    assert code == 0
    names = {w["name"]: w for w in payload["checks"][0]["data"]["witnesses"]}
    assert names["odd_null_nonimage"]["status"] == "unavailable"


def test_csv_and_md_formats(capsys):
    code, out = run_cli(capsys, "census", "--q", "3", "--n", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "check,q,n,status,wall_ms"
    code, out = run_cli(capsys, "census", "--q", "3", "--n", "1", "--format", "md")
    assert code == 0
    assert out.splitlines()[0].startswith("| check |")


def test_out_file(tmp_path, capsys):
    path = tmp_path / "report.json"
    code = main(["census", "--q", "3", "--n", "1", "--out", str(path)])
    assert code == 0
    payload = json.loads(path.read_text())
    assert payload["command"] == "census"


def test_reports_deterministic_small_grid(capsys):
    argv = ["verify", "--checks", "siegel-criterion,lemma4", "--q", "3,5", "--n", "1"]
    code1, payload1 = run_json(capsys, *argv)
    code2, payload2 = run_json(capsys, *argv)
    assert code1 == code2 == 0
    a = json.dumps(strip_volatile(payload1), sort_keys=True)
    b = json.dumps(strip_volatile(payload2), sort_keys=True)
    assert a == b


def test_jobs_parallel_matches_serial(capsys):
    argv = ["verify", "--checks", "lemma4,strata-map", "--q", "3,5", "--n", "1"]
    _, serial = run_json(capsys, *argv)
    _, parallel = run_json(capsys, *argv, "--jobs", "4")
    a = json.dumps(strip_volatile(serial), sort_keys=True)
    b = json.dumps(
        strip_volatile({**parallel, "config": {**parallel["config"], "jobs": 1}}), sort_keys=True
    )
    assert a == b
