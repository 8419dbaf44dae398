import json

import numpy as np

from oqspectra import analysis, campaign, superop
from oqspectra.cli import main
from oqspectra.constructions import (
    phase_damping_channel,
    saturating_hamiltonian_generator,
    unitary_channel,
)


class TestAnalysisPipeline:
    def test_phase_damping_report(self):
        rep = analysis.analyze_channel(phase_damping_channel(3))
        assert rep.classification == "non-unitary"
        assert rep.summary.l0_or_m0 == rep.fixed_dim == 5
        assert rep.attractor_dim == 5
        assert rep.bounds_satisfied and not rep.rechecked

    def test_generator_report_includes_commutant(self):
        rep = analysis.analyze_generator(saturating_hamiltonian_generator(3))
        # {H}' for the two-level Hamiltonian is the saturating commutant
        assert rep.commutant_dim == 5
        assert rep.classification == "hamiltonian"

    def test_json_schema(self):
        rep = analysis.analyze_channel(phase_damping_channel(2))
        obj = analysis.report_to_json(rep)
        assert obj["schema"] == "oqs/1"
        assert obj["subspaces"]["fixed_dim"] == 2
        json.dumps(obj)  # serializable

    def test_table_and_json_agree(self):
        rep = analysis.analyze_channel(phase_damping_channel(3))
        obj = analysis.report_to_json(rep)
        table = analysis.report_to_table(rep)
        assert f"l0/m0           {obj['summary']['l0_or_m0']}" in table
        assert f"lP/mP           {obj['summary']['lP_or_mP']}" in table
        assert obj["classification"] in table

    def test_recheck_protocol_rescues_smeared_cluster(self, rng):
        # an almost-degenerate unitary first merges at the default tolerance,
        # then separates at the 10x tighter recheck
        u = np.diag([1.0, np.exp(2e-8j)])
        rep = analysis.analyze_channel(unitary_channel(u))
        assert rep.rechecked
        assert rep.bounds_satisfied
        assert rep.summary.l0_or_m0 == 2


class TestCliAnalyze:
    def test_channel_file_table(self, tmp_path, capsys):
        path = tmp_path / "pd.json"
        path.write_text(json.dumps(superop.channel_to_json(phase_damping_channel(3))))
        assert main(["analyze", str(path)]) == 0
        out = capsys.readouterr().out
        assert "classification  non-unitary" in out

    def test_channel_file_json(self, tmp_path, capsys):
        path = tmp_path / "pd.json"
        path.write_text(json.dumps(superop.channel_to_json(phase_damping_channel(3))))
        assert main(["analyze", str(path), "--json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["schema"] == "oqs/1"
        assert obj["summary"]["l0_or_m0"] == 5

    def test_generator_kind_inferred(self, tmp_path, capsys):
        from oqspectra import gkls
        path = tmp_path / "gen.json"
        path.write_text(json.dumps(
            gkls.generator_to_json(saturating_hamiltonian_generator(3))))
        assert main(["analyze", str(path), "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["kind"] == "generator"

    def test_parse_error_exit_2(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["analyze", str(path)]) == 2
        assert "error:" in capsys.readouterr().err

    def test_validation_error_exit_2(self, tmp_path, capsys):
        # non-trace-preserving Kraus list
        bad = {"dim": 2, "kraus": [
            {"rows": 2, "cols": 2, "entries": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}
        ]}
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        assert main(["analyze", str(path)]) == 2

    def test_surviving_violation_exit_3(self, tmp_path, capsys):
        # adversarial near-degenerate unitary: the chain 1 ~ e^{i delta}
        # survives even the 10x tighter recheck, so the recorded l0 = 4
        # exceeds the unitary ceiling 2 and the CLI reports a violation
        delta = 9.9e-9
        ch = unitary_channel(np.diag([1.0, np.exp(1j * delta)]))
        path = tmp_path / "adv.json"
        path.write_text(json.dumps(superop.channel_to_json(ch)))
        assert main(["analyze", str(path)]) == 3

    def test_missing_file_exit_2(self):
        assert main(["analyze", "/nonexistent/file.json"]) == 2


class TestCliVerify:
    def test_small_campaign(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main(["verify", "--dims", "2..3", "--per-dim", "5",
                     "--seed", "11", "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert text.startswith("source,dim,index,seed")
        # constructors rows + 5 per ensemble per dim
        assert len(text.splitlines()) == 1 + 2 * 4 + 2 * 5 * 5

    def test_campaign_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["verify", "--dims", "2", "--per-dim", "4",
                         "--seed", "3", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_constructors_only(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["verify", "--dims", "2..4", "--per-dim", "1",
                     "--ensembles", "constructors", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 3 * 4
        # every saturation margin exactly 0
        for line in lines[1:]:
            cells = line.split(",")
            assert cells[8] == "0" and cells[9] == "0"

    def test_dims_list_syntax(self, tmp_path):
        out = tmp_path / "d.csv"
        assert main(["verify", "--dims", "2,3", "--per-dim", "2",
                     "--ensembles", "haar-unitary", "--out", str(out)]) == 0
        dims = {line.split(",")[1] for line in out.read_text().splitlines()[1:]}
        assert dims == {"2", "3"}

    def test_unknown_ensemble_exit_2(self, capsys):
        assert main(["verify", "--ensembles", "bogus"]) == 2


class TestCliConstructAndSample:
    def test_construct_phase_damping_reanalyzed(self, tmp_path, capsys):
        path = tmp_path / "pd4.json"
        assert main(["construct", "phase-damping", "--dim", "4",
                     "--out", str(path)]) == 0
        assert main(["analyze", str(path), "--json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["summary"]["l0_or_m0"] == 10

    def test_construct_hamiltonian(self, tmp_path, capsys):
        path = tmp_path / "h.json"
        assert main(["construct", "hamiltonian", "--dim", "3", "--h", "0,1",
                     "--out", str(path)]) == 0
        assert main(["analyze", str(path), "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["summary"]["l0_or_m0"] == 5

    def test_construct_dissipative_d2(self, tmp_path, capsys):
        path = tmp_path / "diss.json"
        assert main(["construct", "dissipative", "--dim", "2",
                     "--eigenpairs", "1,0", "--out", str(path)]) == 0
        assert main(["analyze", str(path), "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["summary"]["l0_or_m0"] == 2

    def test_construct_invalid_params_exit_2(self, capsys):
        assert main(["construct", "hamiltonian", "--dim", "3", "--h", "1,1"]) == 2

    def test_sample_single_json(self, tmp_path):
        path = tmp_path / "s.json"
        assert main(["sample", "--ensemble", "cptp-stinespring", "--dim", "2",
                     "--seed", "9", "--out", str(path)]) == 0
        obj = json.loads(path.read_text())
        ch = superop.channel_from_json(obj)
        assert ch.dim == 2

    def test_sample_jsonl_deterministic(self, tmp_path):
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (a, b):
            assert main(["sample", "--ensemble", "gkls-unital", "--dim", "2",
                         "--count", "3", "--seed", "4", "--out", str(out)]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 3

    def test_sampled_generator_analyzable(self, tmp_path, capsys):
        path = tmp_path / "g.json"
        assert main(["sample", "--ensemble", "gkls-generic", "--dim", "3",
                     "--seed", "13", "--out", str(path)]) == 0
        assert main(["analyze", str(path), "--json"]) == 0
        obj = json.loads(capsys.readouterr().out)
        assert obj["kind"] == "generator"
        assert obj["summary"]["l0_or_m0"] == 1  # generic kernel is simple


class TestThreadedCampaign:
    def test_threads_do_not_change_bytes(self, tmp_path, monkeypatch):
        cfg = campaign.CampaignConfig(dims=(2,), per_dim=6, seed=5)
        seq = campaign.rows_to_csv(campaign.run_campaign(cfg).rows)
        monkeypatch.setenv("OQS_THREADS", "4")
        par = campaign.rows_to_csv(campaign.run_campaign(cfg).rows)
        assert seq == par
