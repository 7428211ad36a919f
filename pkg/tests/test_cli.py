import json

import pytest

from pcog.files import InstanceFile, dump_instance, load_instance
from pcog.reductions import worked_example

EXAMPLE_1G1 = {
    "goal": "vertex-cover",
    "vertices": ["v1", "v2", "v3", "v4"],
    "edges": [["v1", "v2"], ["v2", "v3"], ["v3", "v4"], ["v1", "v3"]],
    "ownership": {"1": ["v1-v2"], "2": ["v2-v3", "v3-v4"], "3": ["v1-v3"]},
}

EXAMPLE_1G2 = {
    "goal": "vertex-cover",
    "vertices": ["v1", "v2", "v3"],
    "edges": [["v1", "v2"], ["v2", "v3"], ["v1", "v3"]],
    "ownership": {"1": ["v1-v2"], "2": ["v2-v3"], "3": ["v1-v3"]},
}

EXAMPLE_3 = {
    "goal": "spanning-tree",
    "vertices": ["s", "v1", "v2", "w1"],
    "edges": [["s", "v1", "2"], ["s", "v2", 2], ["s", "w1", "4/2"], ["v1", "v2", "1"], ["v1", "w1", "1"],
              ["v2", "w1", "1"]],
    "ownership": {"1": ["v1", "v2"], "2": ["w1"]},
    "supply": "s",
}

C4_ONE_EACH = {
    "goal": "dominating-set",
    "vertices": ["a", "b", "c", "d"],
    "edges": [["a", "b"], ["b", "c"], ["c", "d"], ["a", "d"]],
    "ownership": {"a": ["a"], "b": ["b"], "c": ["c"], "d": ["d"]},
}


# =====================================================================
# (1) REPORTS
# =====================================================================

def test_verify_stable(run_cli, write_json):
    inst = write_json("example1g1.json", EXAMPLE_1G1)
    alloc = write_json("alloc_110.json", {"1": "1", "2": 1, "3": "0"})
    result, report = run_cli("verify", inst, alloc)
    assert result.exit_code == 0, result.output
    assert report["verdict"] == "CORE_STABLE"
    assert report["grand_value"] == "2"
    assert "blocking" not in report


def test_verify_blocked_shows_evidence(run_cli, write_json):
    inst = write_json("example1g1.json", EXAMPLE_1G1)
    alloc = write_json("alloc_101.json", {"1": "1", "2": "0", "3": "1"})
    result, report = run_cli("verify", inst, alloc)
    assert result.exit_code == 0
    assert report["verdict"] == "BLOCKED"
    assert report["blocking"] == "1,3"
    assert (report["blocking_value"], report["blocking_payoff"]) == ("1", "2")
    assert report["blocking_witness"] == "v1"


def test_core_empty_with_certificate(run_cli, write_json, tmp_path):
    inst = write_json("example1g2.json", EXAMPLE_1G2)
    cert_path = tmp_path / "cert.json"
    result, report = run_cli("core", inst, "--certificate-out", cert_path)
    assert result.exit_code == 0, result.output
    assert report["verdict"] == "CORE_EMPTY"
    assert json.loads(report["certificate"])["grand_value"] == "2"

    result, report = run_cli("check-cert", inst, cert_path)
    assert result.exit_code == 0
    assert report["valid"] == "true"

    forged = json.loads(cert_path.read_text())
    forged["grand_value"] = "3"
    result, report = run_cli("check-cert", inst, write_json("forged.json", forged))
    assert report["valid"] == "false"


@pytest.mark.parametrize("document", [EXAMPLE_1G1, EXAMPLE_1G2, EXAMPLE_3, C4_ONE_EACH])
def test_core_methods_print_same_verdict(run_cli, write_json, document):
    inst = write_json("inst.json", document)
    _, full = run_cli("core", inst, "--method", "full")
    _, cut = run_cli("core", inst, "--method", "cut", "--most-violated")
    assert full["verdict"] == cut["verdict"]
    assert cut["method"] == "cut"


def test_value_of_a_coalition(run_cli, write_json):
    inst = write_json("example3.json", EXAMPLE_3)
    result, report = run_cli("value", inst, "--coalition", "1")
    assert result.exit_code == 0
    assert report["value"] == "3"
    assert report["coalition"] == "1"
    _, report = run_cli("value", inst)
    assert report["value"] == "4"
    _, report = run_cli("value", inst, "--coalition", "")
    assert report["value"] == "0"


def test_bird_and_ir(run_cli, write_json):
    inst = write_json("example3.json", EXAMPLE_3)
    _, report = run_cli("bird", inst)
    assert json.loads(report["allocation"]) == {"1": "3", "2": "1"}
    _, report = run_cli("ir", write_json("example1g1.json", EXAMPLE_1G1))
    assert json.loads(report["allocation"]) == {"1": "2/3", "2": "2/3", "3": "2/3"}
    assert report["total"] == "2"


def test_fractional_ds(run_cli, write_json):
    _, report = run_cli("fractional-ds", write_json("c4.json", C4_ONE_EACH))
    assert report["fractional_value"] == "4/3"
    assert report["integer_value"] == "2"
    assert report["equal"] == "false"
    assert report["core_exists"] == "false"


# =====================================================================
# (2) EXIT CODES
# =====================================================================

def test_unknown_subcommand(run_cli):
    result, _ = run_cli("frobnicate")
    assert result.exit_code == 2


def test_malformed_files_exit_2(run_cli, write_json, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    result, _ = run_cli("core", broken)
    assert result.exit_code == 2

    inst = write_json("example1g1.json", EXAMPLE_1G1)
    result, _ = run_cli("verify", inst, write_json("alloc.json", {"1": 0.5, "2": "3/2", "3": "0"}))
    assert result.exit_code == 2, "floats are not exact payoffs"

    bad_weight = dict(EXAMPLE_3, edges=[["s", "v1", "two"]])
    result, _ = run_cli("bird", write_json("bad.json", bad_weight))
    assert result.exit_code == 2

    cnf = tmp_path / "f.cnf"
    cnf.write_text("p cnf 1 1\n1 1 0\n", encoding="utf-8")
    result, _ = run_cli("gen", "sat-unsat", cnf, cnf)
    assert result.exit_code == 3, "a two-literal clause is a precondition failure, not a parse error"
    cnf.write_text("p cnf 1 1\n1 1 1\n", encoding="utf-8")
    result, _ = run_cli("gen", "sat-unsat", cnf, cnf)
    assert result.exit_code == 2
    assert "line 2" in result.output


def test_preconditions_exit_3(run_cli, write_json):
    unowned = dict(EXAMPLE_1G1, ownership={"1": ["v1-v2"]})
    result, _ = run_cli("core", write_json("unowned.json", unowned))
    assert result.exit_code == 3
    assert "edge unowned" in result.output

    inst = write_json("example1g1.json", EXAMPLE_1G1)
    result, _ = run_cli("verify", inst, write_json("short.json", {"1": "1", "2": "1"}))
    assert result.exit_code == 3

    result, _ = run_cli("bird", inst)
    assert result.exit_code == 3

    result, _ = run_cli("value", inst, "--coalition", "1,9")
    assert result.exit_code == 3


# =====================================================================
# (3) GENERATORS AND FILES
# =====================================================================

def test_gen_example_round_trip(run_cli, tmp_path):
    out = tmp_path / "example.json"
    result, report = run_cli("gen", "example", "2g1", "-o", out)
    assert result.exit_code == 0
    assert report["expected"] == "true"
    text = out.read_text(encoding="utf-8")
    assert text == dump_instance(worked_example("2g1").instance)
    assert dump_instance(load_instance(text)) == text, "canonical files must survive a round trip byte for byte"
    assert json.loads(report["instance"]) == json.loads(text)


def test_canonical_form_normalizes_rationals():
    inst = InstanceFile.model_validate(EXAMPLE_3).to_instance()
    canonical = json.loads(dump_instance(inst))
    assert ["s", "w1", "2"] in canonical["edges"]
    assert canonical["agents"] == ["1", "2"]


def test_gen_sat_unsat(run_cli, tmp_path):
    f1, f2 = tmp_path / "f1.cnf", tmp_path / "f2.cnf"
    f1.write_text("p cnf 1 1\n1 1 1 0\n", encoding="utf-8")
    f2.write_text("c unsatisfiable\np cnf 1 2\n1 1 1 0\n-1 -1 -1 0\n", encoding="utf-8")
    alloc_out, inst_out = tmp_path / "alloc.json", tmp_path / "inst.json"
    result, report = run_cli("gen", "sat-unsat", f1, f2, "-o", inst_out, "--allocation-out", alloc_out)
    assert result.exit_code == 0, result.output
    assert report["expected"] == "true"
    assert json.loads(report["allocation"]) == {"1": "5"}
    _, verified = run_cli("verify", inst_out, alloc_out)
    assert verified["verdict"] == "CORE_STABLE"


def test_gen_member_refuses_reserved_names(run_cli, write_json):
    graph = write_json("g.json", {"vertices": ["__aux_u1", "b"], "edges": [["__aux_u1", "b"]]})
    result, _ = run_cli("gen", "vc-member", graph, "b")
    assert result.exit_code == 3


def test_gen_members(run_cli, write_json):
    graph = write_json("star.json", {"vertices": ["hub", "l1", "l2"], "edges": [["hub", "l1"], ["hub", "l2"]]})
    _, report = run_cli("gen", "vc-member", graph, "hub")
    assert report["expected"] == "true"
    assert report["agents"] == "4"
    _, report = run_cli("gen", "ds-member", graph, "l1")
    assert report["expected"] == "false"
    assert "allocation" not in report
    _, report = run_cli("gen", "ds-member", graph, "hub", "--literal-cross-edges")
    assert "as-written" in report["provenance"]


def test_gen_random_is_seeded(run_cli):
    _, first = run_cli("gen", "random", "--goal", "matching", "--seed", "7")
    _, second = run_cli("gen", "random", "--goal", "matching", "--seed", "7")
    assert first["instance"] == second["instance"]
    load_instance(first["instance"])


def test_reduce_vc_to_ds(run_cli, write_json, tmp_path):
    out = tmp_path / "reduced.json"
    result, report = run_cli("reduce", "vc-to-ds", write_json("example1g1.json", EXAMPLE_1G1), "-o", out)
    assert result.exit_code == 0
    assert report["agents"] == "7"
    _, core = run_cli("core", out)
    assert core["verdict"] == "CORE_NONEMPTY"
