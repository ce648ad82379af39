import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

from graphgan import export_embeddings, import_embeddings
from graphgan.cli import main

DATA = Path(__file__).parent / "data"
COMMUNITIES = str(DATA / "communities.txt")
LABELS = str(DATA / "communities_labels.txt")
RATINGS = str(DATA / "ratings.dat")
TINY = ["--iterations", "2", "--g-steps", "2", "--d-steps", "2", "--samples-s", "3"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def triangle_file(tmp_path):
    p = tmp_path / "triangle.txt"
    p.write_text("a b\nb c\nc a\n")
    return str(p)


class TestTrain:
    def test_outputs_and_resolved_defaults(self, triangle_file, tmp_path):
        out = tmp_path / "run"
        assert main(["-q", "train", "--edges", triangle_file, "--iterations", "2",
                     "--g-steps", "1", "--d-steps", "1", "--out-dir", str(out)]) == 0
        for name in ("generator.emb", "discriminator.emb", "metrics.csv", "manifest.json"):
            assert (out / name).is_file()
        manifest = json.loads((out / "manifest.json").read_text())
        cfg = manifest["config"]
        assert (cfg["gen_samples"], cfg["learning_rate"], cfg["dim"]) == (20, 0.001, 20)
        assert manifest["inputs"]["edges"]["sha256"]
        table, labels = import_embeddings(out / "generator.emb")
        assert table.shape == (3, 20) and labels == ["a", "b", "c"]
        assert len(read_csv(out / "metrics.csv")) == 2

    def test_repeat_is_byte_identical(self, triangle_file, tmp_path):
        for name in ("a", "b"):
            assert main(["-q", "train", "--edges", triangle_file, *TINY, "--seed", "3",
                         "--out-dir", str(tmp_path / name)]) == 0
        for f in ("generator.emb", "discriminator.emb", "metrics.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_missing_edge_file(self, tmp_path, capsys):
        out = tmp_path / "never"
        assert main(["train", "--edges", str(tmp_path / "nope.txt"), "--out-dir", str(out)]) != 0
        assert "not found" in capsys.readouterr().err
        assert not out.exists()

    def test_malformed_edge_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.txt"
        bad.write_text("a b\nc\n")
        assert main(["train", "--edges", str(bad), "--out-dir", str(tmp_path / "o")]) != 0
        assert "line 2" in capsys.readouterr().err
        assert not (tmp_path / "o").exists()

    def test_bad_flag(self, triangle_file):
        with pytest.raises(SystemExit) as exc:
            main(["train", "--edges", triangle_file, "--dim", "many"])
        assert exc.value.code != 0

    def test_invalid_value(self, triangle_file, tmp_path, capsys):
        assert main(["train", "--edges", triangle_file, "--lr", "-1", "--out-dir", str(tmp_path)]) != 0
        assert "learning_rate" in capsys.readouterr().err

    def test_config_file_and_flag_precedence(self, triangle_file, tmp_path):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("# tiny run\ndim = 3\nsamples-s = 2\niterations=1  # one pass\nlr = 0.01\n")
        main(["-q", "train", "--edges", triangle_file, "--config", str(cfg), "--out-dir", str(tmp_path / "f")])
        main(["-q", "train", "--edges", triangle_file, "--config", str(cfg), "--dim", "5",
              "--out-dir", str(tmp_path / "g")])
        f = json.loads((tmp_path / "f" / "manifest.json").read_text())["config"]
        g = json.loads((tmp_path / "g" / "manifest.json").read_text())["config"]
        assert (f["dim"], f["gen_samples"], f["max_iterations"], f["learning_rate"]) == (3, 2, 1, 0.01)
        assert g["dim"] == 5 and g["gen_samples"] == 2

    def test_unknown_config_key(self, triangle_file, tmp_path, capsys):
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("temperature = 2\n")
        assert main(["train", "--edges", triangle_file, "--config", str(cfg), "--out-dir", str(tmp_path / "o")]) != 0
        assert "temperature" in capsys.readouterr().err

    def test_replay_from_manifest(self, triangle_file, tmp_path):
        main(["-q", "train", "--edges", triangle_file, *TINY, "--seed", "8", "--out-dir", str(tmp_path / "a")])
        main(["-q", "train", "--from-manifest", str(tmp_path / "a" / "manifest.json"),
              "--out-dir", str(tmp_path / "b")])
        for f in ("generator.emb", "metrics.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_checkpoints(self, triangle_file, tmp_path):
        main(["-q", "train", "--edges", triangle_file, *TINY, "--checkpoint-every", "1",
              "--out-dir", str(tmp_path)])
        names = sorted(os.listdir(tmp_path / "checkpoints"))
        assert names == ["discriminator_0001.emb", "discriminator_0002.emb",
                         "generator_0001.emb", "generator_0002.emb"]
        assert (tmp_path / "checkpoints" / "generator_0002.emb").read_bytes() == \
            (tmp_path / "generator.emb").read_bytes()

    def test_timing_kept_out_of_metrics(self, triangle_file, tmp_path):
        main(["-q", "train", "--edges", triangle_file, *TINY, "--out-dir", str(tmp_path)])
        assert list(read_csv(tmp_path / "metrics.csv")[0]) == ["iteration", "value_estimate",
                                                               "d_loss", "g_reward_mean"]
        assert list(read_csv(tmp_path / "timing.csv")[0]) == ["iteration", "wall_time"]


def two_cliques(tmp_path):
    edges = [(u, v) for c in (0, 10) for u in range(c, c + 10) for v in range(u + 1, c + 10)]
    path = tmp_path / "cliques.txt"
    path.write_text("".join(f"v{u} v{v}\n" for u, v in edges))
    emb = np.repeat([[1.0], [-1.0]], 10, axis=0)
    emb_path = tmp_path / "oracle.emb"
    export_embeddings(emb, [f"v{i}" for i in range(20)], emb_path)
    return str(path), str(emb_path)


class TestEval:
    def test_link_with_oracle_embeddings(self, tmp_path, capsys):
        edges, emb = two_cliques(tmp_path)
        assert main(["eval", "link", "--edges", edges, "--embeddings", emb, "--out-dir", str(tmp_path)]) == 0
        assert "accuracy=1.000000" in capsys.readouterr().out
        assert float(read_csv(tmp_path / "link_metrics.csv")[0]["accuracy"]) == 1.0

    def test_vertex_mismatch(self, tmp_path, capsys):
        _, emb = two_cliques(tmp_path)
        assert main(["eval", "link", "--edges", COMMUNITIES, "--embeddings", emb,
                     "--out-dir", str(tmp_path / "o")]) != 0
        assert "no embedding" in capsys.readouterr().err
        assert not (tmp_path / "o").exists()

    def test_rec_k_list(self, tmp_path):
        main(["-q", "pipeline", "--task", "rec", "--ratings", RATINGS, "--delimiter", "::", *TINY,
              "--out-dir", str(tmp_path / "p")])
        assert main(["eval", "rec", "--ratings", RATINGS, "--delimiter", "::", "--k-list", "10,20",
                     "--embeddings", str(tmp_path / "p" / "generator.emb"),
                     "--out-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "rec_metrics.csv")
        assert [r["k"] for r in rows] == ["10", "20"]

    def test_dist_study(self, tmp_path, capsys):
        assert main(["eval", "dist-study", "--edges", COMMUNITIES, "--pairs", "5000",
                     "--min-bucket", "10", "--out-dir", str(tmp_path)]) == 0
        table = read_csv(tmp_path / "dist_table.csv")
        assert sum(int(r["pairs"]) for r in table) <= 5000
        fit = read_csv(tmp_path / "dist_fit.csv")[0]
        assert float(fit["slope"]) < 0
        assert "slope=" in capsys.readouterr().out

    def test_nodeclass(self, tmp_path, capsys):
        main(["-q", "train", "--edges", COMMUNITIES, *TINY, "--out-dir", str(tmp_path)])
        assert main(["eval", "nodeclass", "--edges", COMMUNITIES, "--labels", LABELS,
                     "--embeddings", str(tmp_path / "generator.emb"), "--out-dir", str(tmp_path)]) == 0
        acc = float(read_csv(tmp_path / "nodeclass_metrics.csv")[0]["accuracy"])
        assert 0.0 <= acc <= 1.0

    def test_labels_required(self, tmp_path, capsys):
        main(["-q", "train", "--edges", COMMUNITIES, *TINY, "--out-dir", str(tmp_path)])
        assert main(["eval", "nodeclass", "--edges", COMMUNITIES,
                     "--embeddings", str(tmp_path / "generator.emb")]) != 0
        assert "--labels" in capsys.readouterr().err


class TestPipeline:
    def test_link_pipeline(self, tmp_path, capsys):
        assert main(["-q", "pipeline", "--task", "link", "--edges", COMMUNITIES, "--iterations", "5",
                     "--out-dir", str(tmp_path)]) == 0
        acc = float(read_csv(tmp_path / "link_metrics.csv")[0]["accuracy"])
        assert acc >= 0.5
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["command"] == "pipeline" and manifest["options"]["task"] == "link"
        assert set(manifest["artifacts"]) >= {"generator_embeddings", "metrics", "task_metrics"}

    def test_replay_gives_identical_outputs(self, tmp_path):
        main(["-q", "pipeline", "--task", "link", "--edges", COMMUNITIES, *TINY, "--seed", "2",
              "--out-dir", str(tmp_path / "a")])
        main(["-q", "pipeline", "--from-manifest", str(tmp_path / "a" / "manifest.json"),
              "--out-dir", str(tmp_path / "b")])
        for f in ("generator.emb", "discriminator.emb", "metrics.csv", "link_metrics.csv"):
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_rec_threshold_applied_before_split(self, tmp_path):
        main(["-q", "pipeline", "--task", "rec", "--ratings", RATINGS, "--delimiter", "::", *TINY,
              "--out-dir", str(tmp_path)])
        kept = set()
        for line in open(RATINGS):
            u, m, r, _ = line.strip().split("::")
            if int(r) >= 4:
                kept.update({f"u:{u}", f"i:{m}"})
        _, labels = import_embeddings(tmp_path / "generator.emb")
        assert set(labels) == kept
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["options"]["min_rating"] == 4.0

    def test_nodeclass_pipeline(self, tmp_path):
        assert main(["-q", "pipeline", "--task", "nodeclass", "--edges", COMMUNITIES, "--labels", LABELS,
                     *TINY, "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "nodeclass_metrics.csv").is_file()

    def test_task_required(self, tmp_path, capsys):
        assert main(["pipeline", "--edges", COMMUNITIES, "--out-dir", str(tmp_path / "o")]) != 0
        assert "--task" in capsys.readouterr().err
