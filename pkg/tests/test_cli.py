import json

import pytest

from sbo.cli import (
    DEFAULT_EPSILON,
    EXIT_IO,
    EXIT_OK,
    EXIT_SIZE,
    EXIT_VALIDATION,
    SCHEMA_VERSION,
    dumps_document,
    instance_from_document,
    instance_to_document,
    main,
)
from sbo.generate import (
    format_graph,
    gen_gap_example,
    gen_nonprefix_example,
    gen_random,
    Graph,
)

TRIANGLE = Graph(3, ((1, 2), (2, 3), (1, 3)))
FOUR_CYCLE = Graph(4, ((1, 2), (2, 3), (3, 4), (1, 4)))


def write_instance(tmp_path, instance, name="inst.json"):
    path = tmp_path / name
    path.write_text(dumps_document(instance_to_document(instance)))
    return str(path)


def write_bids(tmp_path, bids, name="bids.json"):
    path = tmp_path / name
    path.write_text(json.dumps({"schemaVersion": SCHEMA_VERSION, "bids": list(bids)}))
    return str(path)


class TestDocuments:
    @pytest.mark.parametrize("kind", ["fixed", "proportional", "independent", "scenario"])
    def test_parse_write_identity(self, kind):
        inst = gen_random(kind, 4, 17)
        doc = instance_to_document(inst)
        assert instance_from_document(doc) == inst

    def test_write_parse_byte_identical(self, tmp_path):
        inst = gen_nonprefix_example()
        text = dumps_document(instance_to_document(inst))
        again = dumps_document(instance_to_document(instance_from_document(json.loads(text))))
        assert again == text

    def test_rejects_wrong_schema_version(self):
        doc = instance_to_document(gen_nonprefix_example())
        doc["schemaVersion"] = 99
        from sbo.errors import ValidationError

        with pytest.raises(ValidationError):
            instance_from_document(doc)

    def test_rejects_unknown_model_tag(self):
        doc = instance_to_document(gen_nonprefix_example())
        doc["model"] = "mystery"
        from sbo.errors import ValidationError

        with pytest.raises(ValidationError):
            instance_from_document(doc)


class TestEvaluateCommand:
    def test_counterexample_exact(self, tmp_path, capsys):
        inst_path = write_instance(tmp_path, gen_nonprefix_example())
        bids_path = write_bids(tmp_path, [1.0, 1.0, 1.0])
        code = main(
            ["evaluate", "--instance", inst_path, "--bids", bids_path, "--method", "exact"]
        )
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["report"]["value"] == pytest.approx(1.75, abs=1e-12)
        assert out["method"] == "exact"
        assert out["epsilon"] == DEFAULT_EPSILON

    def test_mc_on_fixed_is_exact_with_zero_width(self, tmp_path, capsys):
        inst = gen_random("fixed", 3, 5)
        inst_path = write_instance(tmp_path, inst)
        bids_path = write_bids(tmp_path, [1.0, 1.0, 1.0])
        code = main(
            ["evaluate", "--instance", inst_path, "--bids", bids_path,
             "--method", "mc", "--samples", "50", "--seed", "9"]
        )
        assert code == EXIT_OK
        rep = json.loads(capsys.readouterr().out)["report"]
        assert rep["upper"] - rep["lower"] == 0.0

    def test_malformed_pmf_exits_2(self, tmp_path, capsys):
        doc = instance_to_document(gen_nonprefix_example())
        doc["pmfs"][1] = [{"value": 0.0, "prob": 0.4}, {"value": 1.0, "prob": 0.4}]
        inst_path = tmp_path / "bad.json"
        inst_path.write_text(json.dumps(doc))
        bids_path = write_bids(tmp_path, [1.0, 1.0, 1.0])
        code = main(["evaluate", "--instance", str(inst_path), "--bids", bids_path])
        assert code == EXIT_VALIDATION

    def test_ptas_invalid_for_scenario(self, tmp_path):
        inst_path = write_instance(tmp_path, gen_gap_example(2, 10.0, 1.0))
        bids_path = write_bids(tmp_path, [1.0, 0.0, 1.0, 0.0])
        code = main(
            ["evaluate", "--instance", inst_path, "--bids", bids_path, "--method", "ptas"]
        )
        assert code == EXIT_VALIDATION

    def test_missing_file_exits_4(self, tmp_path):
        bids_path = write_bids(tmp_path, [1.0])
        code = main(["evaluate", "--instance", str(tmp_path / "nope.json"), "--bids", bids_path])
        assert code == EXIT_IO

    def test_bids_permuted_with_canonical_order(self, tmp_path, capsys):
        # keywords listed out of cpc order; bids follow the listed order
        doc = {
            "schemaVersion": SCHEMA_VERSION,
            "model": "fixed",
            "budget": 15.0,
            "keywords": [{"id": "pricey", "cpc": 2.0}, {"id": "cheap", "cpc": 1.0}],
            "clicks": [10.0, 10.0],
        }
        inst_path = tmp_path / "perm.json"
        inst_path.write_text(json.dumps(doc))
        bids_path = write_bids(tmp_path, [0.25, 1.0])
        code = main(
            ["evaluate", "--instance", str(inst_path), "--bids", bids_path, "--method", "exact"]
        )
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["report"]["value"] == pytest.approx(12.5)


class TestOptimizeCommand:
    def test_fixed_auto(self, tmp_path, capsys):
        doc = {
            "schemaVersion": SCHEMA_VERSION,
            "model": "fixed",
            "budget": 15.0,
            "keywords": [{"id": "a", "cpc": 1.0}, {"id": "b", "cpc": 2.0}],
            "clicks": [10.0, 10.0],
        }
        inst_path = tmp_path / "fixed.json"
        inst_path.write_text(json.dumps(doc))
        code = main(["optimize", "--instance", str(inst_path)])
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["bids"] == [1.0, 0.25]
        assert out["report"]["value"] == pytest.approx(12.5)
        assert out["guarantee"] == "exact"

    def test_gap_auto_picks_odd_keywords(self, tmp_path, capsys):
        inst_path = write_instance(tmp_path, gen_gap_example(2, 10.0, 1.0))
        code = main(["optimize", "--instance", inst_path])
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["bids"] == [1.0, 0.0, 1.0, 0.0]
        assert out["report"]["value"] == pytest.approx(2 / 1010, rel=1e-12)

    def test_bruteforce_invalid_for_independent(self, tmp_path):
        inst_path = write_instance(tmp_path, gen_nonprefix_example())
        code = main(["optimize", "--instance", inst_path, "--method", "bruteforce"])
        assert code == EXIT_VALIDATION

    def test_bruteforce_above_cap_exits_3(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SBO_BRUTEFORCE_CAP", "3")
        inst_path = write_instance(tmp_path, gen_gap_example(2, 10.0, 1.0))
        code = main(["optimize", "--instance", inst_path, "--method", "bruteforce"])
        assert code == EXIT_SIZE

    def test_report_echoes_parameters(self, tmp_path, capsys):
        inst_path = write_instance(tmp_path, gen_random("proportional", 3, 1))
        code = main(["optimize", "--instance", inst_path, "--method", "ptas",
                     "--epsilon", "0.2"])
        assert code == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out["epsilon"] == 0.2
        assert out["method"] == "ptas"
        assert "bruteforceCap" in out


class TestGenerateCommand:
    def test_nonprefix_roundtrip(self, tmp_path, capsys):
        out_path = tmp_path / "np.json"
        assert main(["generate", "--kind", "nonprefix", "--out", str(out_path)]) == EXIT_OK
        bids_path = write_bids(tmp_path, [1.0, 1.0, 1.0])
        code = main(["evaluate", "--instance", str(out_path), "--bids", bids_path,
                     "--method", "exact"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["report"]["value"] == pytest.approx(1.75)

    def test_gap_structure(self, tmp_path):
        out_path = tmp_path / "gap.json"
        code = main(["generate", "--kind", "gap", "--n", "2", "--c", "10",
                     "--budget", "1", "--out", str(out_path)])
        assert code == EXIT_OK
        doc = json.loads(out_path.read_text())
        assert len(doc["keywords"]) == 4
        assert len(doc["scenarios"]) == 2
        probs = sorted(s["prob"] for s in doc["scenarios"])
        assert probs == pytest.approx([10 / 1010, 1000 / 1010])

    def test_clique_writes_sidecar(self, tmp_path):
        graph_path = tmp_path / "g.txt"
        graph_path.write_text(format_graph(TRIANGLE))
        out_path = tmp_path / "clique.json"
        code = main(["generate", "--kind", "clique", "--graph", str(graph_path),
                     "--k", "3", "--out", str(out_path)])
        assert code == EXIT_OK
        sidecar = json.loads((tmp_path / "clique.json.params.json").read_text())
        delta = sidecar["params"]["delta"]
        assert sidecar["targetValue"] == pytest.approx(3 * (1 - delta))

    def test_random_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            code = main(["generate", "--kind", "random", "--model", "scenario",
                         "--n", "4", "--seed", "7", "--out", str(path)])
            assert code == EXIT_OK
        assert a.read_text() == b.read_text()

    def test_missing_params_exit_2(self, tmp_path):
        code = main(["generate", "--kind", "gap", "--out", str(tmp_path / "x.json")])
        assert code == EXIT_VALIDATION


class TestVerifyReductionCommand:
    def test_triangle_yes(self, tmp_path, capsys):
        graph_path = tmp_path / "g.txt"
        graph_path.write_text(format_graph(TRIANGLE))
        code = main(["verify-reduction", "--graph", str(graph_path), "--k", "3"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "CLIQUE-YES"

    def test_four_cycle_no(self, tmp_path, capsys):
        graph_path = tmp_path / "g.txt"
        graph_path.write_text(format_graph(FOUR_CYCLE))
        code = main(["verify-reduction", "--graph", str(graph_path), "--k", "3"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "CLIQUE-NO"

    def test_single_edge_k2_yes(self, tmp_path, capsys):
        graph_path = tmp_path / "g.txt"
        graph_path.write_text(format_graph(Graph(2, ((1, 2),))))
        code = main(["verify-reduction", "--graph", str(graph_path), "--k", "2"])
        assert code == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "CLIQUE-YES"

    def test_too_large_graph_exits_3(self, tmp_path, monkeypatch):
        monkeypatch.setenv("SBO_BRUTEFORCE_CAP", "5")
        graph_path = tmp_path / "g.txt"
        graph_path.write_text(format_graph(FOUR_CYCLE))
        code = main(["verify-reduction", "--graph", str(graph_path), "--k", "3"])
        assert code == EXIT_SIZE


class TestStdio:
    def test_stdin_instance(self, tmp_path, capsys, monkeypatch):
        import io

        text = dumps_document(instance_to_document(gen_nonprefix_example()))
        bids_path = write_bids(tmp_path, [1.0, 0.0, 1.0])
        monkeypatch.setattr("sys.stdin", io.StringIO(text))
        code = main(["evaluate", "--instance", "-", "--bids", bids_path,
                     "--method", "exact"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["report"]["value"] == pytest.approx(2.0)

    def test_stdout_generate(self, capsys):
        code = main(["generate", "--kind", "nonprefix", "--out", "-"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["model"] == "independent"
