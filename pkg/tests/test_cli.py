import json

import numpy as np
import pytest

from asymq.cli import main
from asymq.states import BipartiteState, load_state, save_state


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_example_files_round_trip(tmp_path, capsys):
    for name in ("mix01-bell", "mix-2x4", "bell", "product"):
        path = tmp_path / f"{name}.json"
        code, _, _ = run(capsys, "example", name, "--out", str(path))
        assert code == 0
        load_state(path)
    code, out, _ = run(capsys, "example", "mix01-bell", "--p", "0.5", "--json")
    assert json.loads(out)["kind"] == "mixed"


def test_unknown_example_and_campaign_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["example", "ghz"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_unknown_flag_rejected(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "lemma2", "--bogus"])
    assert exc.value.code == 2


def test_seed_must_be_u64(capsys):
    with pytest.raises(SystemExit):
        main(["verify", "lemma2", "--seed", str(2**64)])
    with pytest.raises(SystemExit):
        main(["verify", "lemma2", "--seed", "-1"])


def test_analyze_bell(tmp_path, capsys, report_validator):
    path = tmp_path / "bell.json"
    main(["example", "bell", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "analyze", str(path), "--json")
    assert code == 0
    rep = json.loads(out)
    report_validator.validate(rep)
    assert np.isclose(rep["g_upper"]["value"], 1)
    assert rep["bracket"]["s_lower"] == 1.0
    assert rep["verdict"] == "lu_swapable"
    assert rep["schmidt"]["rank"] == 2 and "wootters" in rep
    code, out, _ = run(capsys, "analyze", str(path))
    assert "lu_swapable" in out


def test_analyze_sigma_star(tmp_path, capsys, report_validator):
    path = tmp_path / "s.json"
    main(["example", "mix01-bell", "--p", "0.5", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "analyze", str(path), "--json", "--restarts", "2",
                       "--ansatz", "product_unitary_mixture", "--ansatz-restarts", "1")
    assert code == 0
    rep = json.loads(out)
    report_validator.validate(rep)
    assert rep["g_upper"]["value"] > 0
    assert rep["verdict"] in ("lu_swapable", "not_lu_swapable", "inconclusive")


def test_malformed_and_invalid_files(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "asymq-state/1", "dA"')
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2 and "error" in err
    missing = tmp_path / "missing.json"
    assert run(capsys, "analyze", str(missing))[0] == 2
    st = BipartiteState.mixed(np.eye(4) / 4, 2, 2)
    path = tmp_path / "t.json"
    save_state(st, path)
    obj = json.loads(path.read_text())
    obj["data"] = [[0.9 * re, im] for re, im in obj["data"]]
    path.write_text(json.dumps(obj))
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 3 and "trace" in err


def test_verify_exit_codes_and_schema(tmp_path, capsys, report_validator):
    code, out, _ = run(capsys, "verify", "lemma2", "--samples", "50", "--json")
    assert code == 0
    report_validator.validate(json.loads(out))
    code, out, _ = run(capsys, "verify", "lemma1", "--samples", "0", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["samples"] == 0


def test_verify_human_output_and_out_file(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "g_identity", "--samples", "20", "--dim", "3",
                       "--out", str(path))
    assert code == 0 and "PASS" in out
    assert json.loads(path.read_text())["campaign"] == "g_identity"


def test_env_seed_overrides_default(monkeypatch, capsys):
    monkeypatch.setenv("ASYMQ_SEED", "77")
    code, out, _ = run(capsys, "verify", "lemma2", "--samples", "3", "--json")
    assert json.loads(out)["seed"] == 77
    code, out, _ = run(capsys, "verify", "lemma2", "--samples", "3", "--json", "--seed", "5")
    assert json.loads(out)["seed"] == 5


def test_swapcheck_2x4(tmp_path, capsys, report_validator):
    path = tmp_path / "m.json"
    main(["example", "mix-2x4", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "swapcheck", str(path), "--json")
    assert code == 0
    rep = json.loads(out)
    report_validator.validate(rep)
    assert rep["report"]["full_rank_criterion"] == "inapplicable"
    assert rep["report"]["locc_swapable"] is True


def test_swapcheck_swap_invariant_and_ansatz(tmp_path, capsys, report_validator):
    path = tmp_path / "b.json"
    main(["example", "bell", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "swapcheck", str(path), "--json", "--ansatz", "one_way_AB")
    rep = json.loads(out)
    report_validator.validate(rep)
    assert code == 0 and rep["verdict"] == "lu_swapable" and rep["asymmetry"]["value"] < 1e-12


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    path = tmp_path / "s.json"
    main(["example", "mix01-bell", "--out", str(path)])
    capsys.readouterr()
    args = ["analyze", str(path), "--json", "--restarts", "2", "--ansatz",
            "product_unitary_mixture", "--ansatz-restarts", "1", "--seed", "3"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_schema_rejects_malformed_reports(report_validator):
    from jsonschema import ValidationError
    with pytest.raises(ValidationError):
        report_validator.validate({"format": "asymq-report/1", "kind": "campaign", "passed": "yes"})
    with pytest.raises(ValidationError):
        report_validator.validate({"format": "asymq-report/2", "kind": "analyze"})
