import json

from esdsim.cli import run


def read(path):
    return path.read_text(encoding="utf-8")


class TestKeyrateCommand:
    def test_table_row_count(self, tmp_path, capsys):
        out = tmp_path / "rates.csv"
        assert run(["keyrate", "--d", "2,3", "--q-max", "0.05", "--q-step", "0.01", "--out", str(out)]) == 0
        lines = read(out).strip().splitlines()
        assert lines[0] == "d,Q,r_sifted,R_total"
        assert len(lines) == 1 + 12

    def test_thresholds_mode(self, tmp_path):
        out = tmp_path / "thr.csv"
        assert run(["keyrate", "thresholds", "--d-max", "5", "--out", str(out)]) == 0
        lines = read(out).strip().splitlines()
        assert lines[0] == "d,eta_threshold"
        assert len(lines) == 1 + 4
        d3 = float(lines[2].split(",")[1])
        assert abs(d3 - 0.6933612743506347) < 1e-12

    def test_eta_column(self, tmp_path):
        out = tmp_path / "rates.csv"
        run(["keyrate", "--d", "3", "--q-max", "0.01", "--q-step", "0.01", "--eta", "0.9", "--out", str(out)])
        lines = read(out).strip().splitlines()
        assert lines[0] == "d,Q,r_sifted,R_total,eta"


class TestDiscriminateCommand:
    def test_conclusive_report(self, tmp_path):
        out = tmp_path / "report.json"
        code = run(
            ["discriminate", "--d", "3", "--state", "psi1", "--trials", "1000",
             "--eta", "1", "--seed", "7", "--out", str(out)]
        )
        assert code == 0
        report = json.loads(read(out))
        assert sum(report["counts"].values()) == 1000
        assert report["counts"] == {"conclusive(1)": 1000}
        assert abs(report["analytic"]["conclusive(1)"] - 1.0) < 1e-9

    def test_phi_state_other_dimension(self, tmp_path):
        out = tmp_path / "report.json"
        assert run(["discriminate", "--d", "2", "--state", "phi1", "--trials", "50",
                    "--seed", "1", "--out", str(out)]) == 0
        report = json.loads(read(out))
        assert report["counts"] == {"conclusive(1)": 50}

    def test_unknown_state_is_config_error(self, capsys):
        assert run(["discriminate", "--state", "nope", "--trials", "10"]) == 2


class TestTeleportCommand:
    def test_report(self, tmp_path):
        out = tmp_path / "tele.json"
        assert run(["teleport", "--trials", "500", "--seed", "1", "--out", str(out)]) == 0
        report = json.loads(read(out))
        assert abs(report["mean_conclusive_fidelity"] - 1.0) < 1e-9
        assert abs(report["conclusive_fraction"] - 1 / 3) < 0.07  # 3 sigma at n=500


class TestMdiqkdCommand:
    def test_records_csv(self, tmp_path, capsys):
        out = tmp_path / "records.csv"
        assert run(["mdiqkd", "--trials", "400", "--eta", "0.9", "--seed", "5", "--out", str(out)]) == 0
        lines = read(out).strip().splitlines()
        assert lines[0] == (
            "trial,alice_basis,alice_value,bob_basis,bob_value,outcome,sifted,alice_symbol,bob_symbol"
        )
        assert len(lines) == 1 + 400
        summary = json.loads(capsys.readouterr().out)
        assert summary["qber"] == 0.0
        sifted_lines = [l for l in lines[1:] if l.split(",")[6] == "1"]
        for line in sifted_lines:
            cols = line.split(",")
            assert cols[7] == cols[8]  # symbols agree without noise


class TestListStatesCommand:
    def test_prints_families_and_dumps_json(self, tmp_path, capsys):
        dump = tmp_path / "states.json"
        assert run(["list-states", "--d", "3", "--dump-state", str(dump)]) == 0
        text = capsys.readouterr().out
        assert text.count("psi") == 9 and text.count("phi") == 3
        doc = json.loads(read(dump))
        assert set(doc) == {f"psi{i}" for i in range(9)} | {f"phi{i}" for i in range(3)}
        term = doc["psi0"][0]
        assert set(term) == {"modes", "re", "im"}


class TestDescribeTritterCommand:
    def test_json_shape(self, tmp_path):
        out = tmp_path / "net.json"
        assert run(["describe-tritter", "--d", "3", "--out", str(out)]) == 0
        doc = json.loads(read(out))
        assert doc["dim"] == 3
        splitter_ts = sorted(
            el["transmissivity"] for el in doc["elements"] if el["type"] == "beam_splitter"
        )
        assert len(splitter_ts) == 3
        assert abs(splitter_ts[2] - 2 / 3) < 1e-9


class TestDeterminism:
    def test_byte_identical_outputs(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            run(["mdiqkd", "--trials", "150", "--eta", "0.8", "--noise", "0.05",
                 "--seed", "11", "--out", str(path)])
        assert read(a) == read(b)

        c, d = tmp_path / "c.json", tmp_path / "d.json"
        for path in (c, d):
            run(["discriminate", "--state", "psi2", "--trials", "200", "--seed", "3",
                 "--out", str(path)])
        assert read(c) == read(d)


class TestErrorPaths:
    def test_usage_error_exit_code(self):
        assert run(["no-such-command"]) == 2

    def test_bad_eta(self):
        assert run(["mdiqkd", "--trials", "5", "--eta", "2.0"]) == 2

    def test_bad_trials(self):
        assert run(["teleport", "--trials", "0"]) == 2
