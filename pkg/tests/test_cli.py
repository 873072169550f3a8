import json

from moranlab.cli import main
from moranlab import load_graph


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenerate:
    def test_incubator(self, tmp_path, capsys):
        out = tmp_path / "inc.json"
        code, text, _ = run(["generate", "incubator", "--r", "2", "--k", "1",
                             "--b", "1", "--seed", "7", "-o", str(out)], capsys)
        assert code == 0
        assert "n=126 m=5481" in text
        assert "not applicable" in text      # sandwich bounds need b >= beta/r
        G = load_graph(out)
        assert G.labels and len(G.labels["V3"]) == 104

    def test_star(self, tmp_path, capsys):
        out = tmp_path / "star.json"
        code, text, _ = run(["generate", "star", "--n", "201",
                             "-o", str(out)], capsys)
        assert code == 0 and "n=201 m=200" in text

    def test_regular_with_certificate(self, tmp_path, capsys):
        out = tmp_path / "reg.json"
        code, text, _ = run(["generate", "regular", "--n", "10", "--d", "3",
                             "--seed", "1", "--certify", "brute_force",
                             "-o", str(out)], capsys)
        assert code == 0
        assert "certificate mode=brute_force" in text
        assert load_graph(out).out_degrees().max() == 3

    def test_bad_family_args(self, tmp_path, capsys):
        code, _, err = run(["generate", "incubator", "--r", "2", "--k", "4",
                            "--b", "9", "-o", str(tmp_path / "x.json")], capsys)
        assert code == 2 and "error" in err

    def test_outdir_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("MORANLAB_OUTDIR", str(tmp_path))
        code, text, _ = run(["generate", "cycle", "--n", "5"], capsys)
        assert code == 0
        assert (tmp_path / "cycle.json").exists()


class TestEstimate:
    def test_edge_graph_near_exact(self, tmp_path, capsys):
        gpath = tmp_path / "edge.json"
        run(["generate", "path", "--n", "2", "-o", str(gpath)], capsys)
        out = tmp_path / "est.csv"
        code, text, _ = run(["estimate", "--graph", str(gpath), "--r", "2",
                             "--replicates", "20000", "--seed", "3",
                             "-o", str(out)], capsys)
        assert code == 0
        rows = out.read_text().strip().splitlines()
        header = rows[0].split(",")
        vals = dict(zip(header, rows[1].split(",")))
        assert abs(float(vals["estimate"]) - 1.0 / 3.0) < 0.02
        assert vals["ci_contains_exact"] == "1"
        assert abs(float(vals["exact"]) - 1.0 / 3.0) < 1e-9

    def test_deterministic_rows(self, tmp_path, capsys):
        gpath = tmp_path / "k4.json"
        run(["generate", "complete", "--n", "4", "-o", str(gpath)], capsys)
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            code, _, _ = run(["estimate", "--graph", str(gpath), "--r", "2",
                              "--replicates", "2000", "--seed", "9",
                              "-o", str(out)], capsys)
            assert code == 0
            outs.append(out.read_text())
        assert outs[0] == outs[1]

    def test_step_cap_multiplier_flag(self, tmp_path, capsys):
        gpath = tmp_path / "k5.json"
        run(["generate", "complete", "--n", "5", "-o", str(gpath)], capsys)
        out = tmp_path / "capped.csv"
        code, _, _ = run(["estimate", "--graph", str(gpath), "--r", "2",
                          "--replicates", "300", "--seed", "2",
                          "--step-cap-multiplier", "0.00001",
                          "-o", str(out)], capsys)
        rows = out.read_text().strip().splitlines()
        vals = dict(zip(rows[0].split(","), rows[1].split(",")))
        assert int(vals["censored"]) > 0      # tiny cap censors runs
        assert vals["flagged"] == "1"

    def test_disconnected_rejected(self, tmp_path, capsys):
        gpath = tmp_path / "bad.json"
        gpath.write_text(json.dumps(
            {"n": 4, "directed": False, "edges": [[0, 1], [2, 3]]}))
        code, _, err = run(["estimate", "--graph", str(gpath), "--r", "2",
                            "-o", str(tmp_path / "o.csv")], capsys)
        assert code == 2 and "strongly connected" in err


class TestExact:
    def test_json_output(self, tmp_path, capsys):
        gpath = tmp_path / "k3.json"
        run(["generate", "complete", "--n", "3", "-o", str(gpath)], capsys)
        out = tmp_path / "exact.json"
        code, _, _ = run(["exact", "--graph", str(gpath), "--r", "2",
                          "-o", str(out)], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        res = doc["results"]["2.0"]
        assert abs(res["mean_extinction"] - 3.0 / 7.0) < 1e-9
        assert set(res["extinction_by_vertex"]) == {"0", "1", "2"}


class TestVerify:
    def test_chains_suite(self, tmp_path, capsys):
        out = tmp_path / "chains.json"
        code, text, _ = run(["verify", "chains", "--r", "2", "--b", "120",
                             "--k", "14400", "-o", str(out)], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["failures"] == 0
        names = [c["name"] for c in doc["checks"]]
        assert any("hit probability floor" in n for n in names)

    def test_bounds_suite_small(self, tmp_path, capsys):
        out = tmp_path / "bounds.json"
        code, _, _ = run(["verify", "bounds", "--max-n", "4", "--r", "2",
                          "--digraphs", "10", "-o", str(out)], capsys)
        assert code == 0
        assert json.loads(out.read_text())["failures"] == 0

    def test_lemmas_suite_small(self, tmp_path, capsys):
        out = tmp_path / "lem.json"
        code, _, _ = run(["verify", "lemmas", "--max-n", "4", "--r", "2",
                          "-o", str(out)], capsys)
        assert code == 0
        doc = json.loads(out.read_text())
        assert "vacuous cases" in doc["checks"][-1]["detail"]

    def test_kernels_suite_small(self, tmp_path, capsys):
        out = tmp_path / "ker.json"
        code, _, _ = run(["verify", "kernels", "--max-n", "3",
                          "--replicates", "4000", "-o", str(out)], capsys)
        assert code == 0


class TestAmplifySweep:
    def test_empty_family(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(["amplify-sweep", "-o", str(out)], capsys)
        assert code == 0
        assert out.read_text().strip().splitlines()[0].startswith("graph_id")

    def test_star_trend(self, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code, _, _ = run(["amplify-sweep", "--member", "star:n=9",
                          "--member", "complete:n=9", "--r", "2",
                          "--replicates", "4000", "--seed", "1",
                          "-o", str(out)], capsys)
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert len(lines) == 3
        assert lines[1].startswith("star:n=9,9,8,")
