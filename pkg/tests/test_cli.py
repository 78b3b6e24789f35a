import json
import os

import jsonschema
import pytest

from crnbound.cli import main


@pytest.fixture
def exchange_file(tmp_path):
    path = tmp_path / "exchange.crn"
    path.write_text("S1 <-> S2\n")
    return str(path)


@pytest.fixture
def growth_file(tmp_path):
    path = tmp_path / "growth.crn"
    path.write_text("A -> 2 A | k=1\n")
    return str(path)


def _schema(name: str) -> dict:
    import importlib.resources as resources

    return json.loads(resources.files("crnbound.schemas").joinpath(name).read_text())


class TestAnalyze:
    def test_exchange_report(self, exchange_file, capsys):
        assert main(["analyze", exchange_file]) == 0
        out = capsys.readouterr().out
        assert "linkage classes: 1" in out
        assert "weakly reversible: yes" in out
        assert "stoichiometric dimension: 1" in out
        assert "(1, 1)" in out

    def test_irreversible_example(self, tmp_path, capsys):
        path = tmp_path / "s.crn"
        path.write_text("2 S1 + S2 -> S3 | k=1\n")
        assert main(["analyze", str(path)]) == 0
        out = capsys.readouterr().out
        assert "weakly reversible: no" in out

    def test_json_format(self, exchange_file, capsys):
        assert main(["analyze", exchange_file, "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        jsonschema.validate(data, _schema("analyze-v1.json"))
        assert data["weakly_reversible"] is True
        assert data["conservation_relations"][0]["vector"] == [1, 1]

    def test_missing_file_exit_1(self, tmp_path, capsys):
        assert main(["analyze", str(tmp_path / "nope.crn")]) == 1
        assert "nope.crn" in capsys.readouterr().err

    def test_parse_error_exit_1(self, tmp_path, capsys):
        path = tmp_path / "bad.crn"
        path.write_text("A -> -1 B\n")
        assert main(["analyze", str(path)]) == 1
        err = capsys.readouterr().err
        assert f"{path}:1:" in err

    def test_validation_error_exit_2(self, tmp_path, capsys):
        path = tmp_path / "loop.crn"
        path.write_text("A + B -> B + A\n")
        assert main(["analyze", str(path)]) == 2


class TestSimulate:
    def test_writes_csv_and_summary(self, exchange_file, tmp_path, capsys):
        out = str(tmp_path / "results")
        assert main([
            "simulate", exchange_file, "--x0", "2,0.5", "--t-end", "20", "--out", out,
        ]) == 0
        csv_path = os.path.join(out, "exchange_trajectory.csv")
        json_path = os.path.join(out, "exchange_summary.json")
        assert os.path.exists(csv_path)
        with open(csv_path) as fh:
            header = fh.readline().strip()
        assert header == "t,x1,x2,V1,descent"
        summary = json.load(open(json_path))
        jsonschema.validate(summary, _schema("summary-v1.json"))
        assert summary["final_state"] == pytest.approx([1.25, 1.25], abs=1e-4)

    def test_v1_column_eventually_nonincreasing(self, exchange_file, tmp_path):
        out = str(tmp_path / "r2")
        main(["simulate", exchange_file, "--x0", "2,0.5", "--t-end", "20", "--out", out])
        import csv as csvmod

        with open(os.path.join(out, "exchange_trajectory.csv")) as fh:
            rows = list(csvmod.DictReader(fh))
        v1 = [float(r["V1"]) for r in rows]
        assert all(b <= a + 1e-9 for a, b in zip(v1, v1[1:]))

    def test_zero_x0_exit_2(self, exchange_file, tmp_path):
        assert main([
            "simulate", exchange_file, "--x0", "2,0", "--out", str(tmp_path / "x"),
        ]) == 2

    def test_wrong_dimension_exit_2(self, exchange_file, tmp_path):
        assert main([
            "simulate", exchange_file, "--x0", "1,2,3", "--out", str(tmp_path / "x"),
        ]) == 2

    def test_out_directory_created(self, exchange_file, tmp_path):
        out = str(tmp_path / "a" / "b")
        assert main(["simulate", exchange_file, "--x0", "1,1", "--out", out]) == 0
        assert os.path.isdir(out)

    def test_format_restriction(self, exchange_file, tmp_path):
        out = str(tmp_path / "csv_only")
        assert main([
            "simulate", exchange_file, "--x0", "1,1", "--out", out, "--format", "csv",
        ]) == 0
        assert os.path.exists(os.path.join(out, "exchange_trajectory.csv"))
        assert not os.path.exists(os.path.join(out, "exchange_summary.json"))


class TestCertify:
    ARGS = ["--trials", "2", "--t-end", "15", "--seed", "5"]

    def test_exchange_exit_0(self, exchange_file, capsys):
        assert main(["certify", exchange_file] + self.ARGS) == 0
        report = json.loads(capsys.readouterr().out)
        jsonschema.validate(report, _schema("report-v1.json"))
        assert report["conclusion"] == "CertifiedHypotheses+EmpiricallyBounded"

    def test_two_linkage_classes_exit_4(self, tmp_path, capsys):
        path = tmp_path / "two.crn"
        path.write_text("A <-> B\nC <-> D\n")
        assert main(["certify", str(path)] + self.ARGS) == 4

    def test_growth_exit_4_with_violations(self, growth_file, capsys):
        assert main(["certify", growth_file] + self.ARGS) == 4
        report = json.loads(capsys.readouterr().out)
        assert report["hypotheses"]["weakly_reversible"] is False
        assert len(report["descent_violations"]) > 0

    def test_deterministic_output(self, exchange_file, capsys):
        main(["certify", exchange_file] + self.ARGS)
        first = capsys.readouterr().out
        main(["certify", exchange_file] + self.ARGS)
        second = capsys.readouterr().out
        assert first == second

    def test_permanence_section(self, exchange_file, capsys):
        assert main([
            "certify", exchange_file, "--trials", "1", "--t-end", "15",
            "--permanence-delta", "0.1",
        ]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["permanence"]["delta"] == 0.1
        assert report["permanence"]["rho_hat"] is not None

    def test_negative_delta_exit_2(self, exchange_file):
        assert main([
            "certify", exchange_file, "--trials", "1", "--permanence-delta", "-1",
        ]) == 2

    def test_out_file(self, exchange_file, tmp_path, capsys):
        out = str(tmp_path / "cert")
        assert main(["certify", exchange_file, "--trials", "1", "--out", out] + ["--seed", "3"]) == 0
        path = capsys.readouterr().out.strip()
        assert os.path.exists(path)
        json.load(open(path))


class TestCampaign:
    SPEC = '{"N": 2, "num_complexes": 3, "max_coeff": 2, "extra_edges": 1}'

    def test_small_campaign(self, capsys):
        assert main([
            "campaign", "--random-spec", self.SPEC, "--count", "3",
            "--trials", "1", "--t-end", "10", "--seed", "2",
        ]) == 0
        data = json.loads(capsys.readouterr().out)
        jsonschema.validate(data, _schema("campaign-v1.json"))
        assert data["aggregate"]["networks"] == 3
        assert len(data["reports"]) == 3

    def test_count_zero(self, capsys):
        assert main([
            "campaign", "--random-spec", self.SPEC, "--count", "0",
        ]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["aggregate"]["networks"] == 0

    def test_bad_spec_exit_1(self, capsys):
        assert main(["campaign", "--random-spec", '{"N": 2}', "--count", "1"]) == 1
        assert main(["campaign", "--random-spec", "not json", "--count", "1"]) == 1

    def test_infeasible_spec_exit_1(self, capsys):
        spec = '{"N": 1, "num_complexes": 9, "max_coeff": 1}'
        assert main(["campaign", "--random-spec", spec, "--count", "1"]) == 1

    def test_same_seed_identical_output(self, capsys):
        args = [
            "campaign", "--random-spec", self.SPEC, "--count", "2",
            "--trials", "1", "--t-end", "10", "--seed", "77",
        ]
        main(args)
        first = capsys.readouterr().out
        main(args)
        second = capsys.readouterr().out
        assert first == second
