from pathlib import Path

import numpy as np
import pytest

from anchortrack.bench import SynthSpec, generate, save_frames, save_gt
from anchortrack.cli import main


def make_sequence(tmp_path, n=12, noise=1.0):
    spec = SynthSpec(
        frame_size=(160, 120), object_size=(40.0, 40.0), start_center=(50.0, 60.0),
        seed=5,
        translations=((0.0, 0.0),) + ((2.0, 0.0),) * (n - 1),
        scales=(1.0,) * n, occluders=(None,) * n, gains=(1.0,) * n,
        noise_sigma=noise,
    )
    frames, gt = generate(spec)
    seq_dir = tmp_path / "seq"
    save_frames(seq_dir, frames)
    save_gt(seq_dir / "groundtruth.txt", gt)
    x0, y0, w, h = gt[0].corner_form()
    init = f"{x0 + 1.0},{y0 + 1.0},{w},{h}"
    return seq_dir, init, gt


class TestTrack:
    def test_happy_path(self, tmp_path, capsys):
        seq_dir, init, gt = make_sequence(tmp_path)
        out = tmp_path / "out"
        code = main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out)])
        assert code == 0
        lines = (out / "results.csv").read_text().strip().splitlines()
        assert len(lines) == len(gt) + 1  # header + one row per frame
        assert lines[0].startswith("frame_index,")

    def test_missing_init_is_usage_error(self, tmp_path, capsys):
        code = main(["track", "--seq", str(tmp_path), "--out", str(tmp_path / "o")])
        assert code == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_unknown_subcommand_is_usage_error(self, capsys):
        assert main(["wibble"]) == 1

    def test_missing_sequence_is_data_error(self, tmp_path, capsys):
        code = main(["track", "--seq", str(tmp_path / "nope"), "--init", "1,1,10,10",
                     "--out", str(tmp_path / "o")])
        assert code == 2
        assert "MissingFrames" in capsys.readouterr().err

    def test_bad_config_is_data_error(self, tmp_path, capsys):
        seq_dir, init, _ = make_sequence(tmp_path)
        cfg_path = tmp_path / "bad.cfg"
        cfg_path.write_text("made_up_key = 3\n")
        code = main(["track", "--seq", str(seq_dir), "--init", init,
                     "--config", str(cfg_path), "--out", str(tmp_path / "o")])
        assert code == 2

    def test_byte_identical_outputs(self, tmp_path):
        seq_dir, init, _ = make_sequence(tmp_path)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        assert main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out_a)]) == 0
        assert main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out_b)]) == 0
        assert (out_a / "results.csv").read_bytes() == (out_b / "results.csv").read_bytes()

    def test_optional_dumps(self, tmp_path):
        seq_dir, init, gt = make_sequence(tmp_path, n=4)
        out = tmp_path / "out"
        code = main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out),
                     "--dump-heatmaps", "--annotate", "--dump-gate"])
        assert code == 0
        assert len(list((out / "heatmaps").glob("*.png"))) == len(gt) - 1
        assert len(list((out / "annotated").glob("*.png"))) == len(gt)
        gate_lines = (out / "gate.csv").read_text().strip().splitlines()
        assert gate_lines[0] == "frame_index,lbsp_similarity,hist_distance"
        assert len(gate_lines) == len(gt) + 1

    def test_no_temp_files_left_behind(self, tmp_path):
        seq_dir, init, _ = make_sequence(tmp_path, n=4)
        out = tmp_path / "out"
        assert main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out)]) == 0
        assert not list(out.rglob("*.tmp"))


class TestEval:
    def test_happy_path(self, tmp_path, capsys):
        seq_dir, init, gt = make_sequence(tmp_path)
        out = tmp_path / "out"
        main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out)])
        code = main(["eval", "--results", str(out / "results.csv"),
                     "--gt", str(seq_dir / "groundtruth.txt"),
                     "--out", str(tmp_path / "metrics.csv")])
        assert code == 0
        text = (tmp_path / "metrics.csv").read_text()
        assert "precision_at_20" in text and "auc" in text

    def test_length_mismatch_is_data_error(self, tmp_path, capsys):
        seq_dir, init, gt = make_sequence(tmp_path)
        out = tmp_path / "out"
        main(["track", "--seq", str(seq_dir), "--init", init, "--out", str(out)])
        short_gt = tmp_path / "short.txt"
        short_gt.write_text("1,1,10,10\n")
        code = main(["eval", "--results", str(out / "results.csv"),
                     "--gt", str(short_gt), "--out", str(tmp_path / "m.csv")])
        assert code == 2
        assert "LengthMismatch" in capsys.readouterr().err
        assert not (tmp_path / "m.csv").exists()


class TestSynth:
    def test_preset_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "seq"
        code = main(["synth", "--preset", "translation", "--out", str(out)])
        assert code == 0
        assert (out / "groundtruth.txt").exists()
        assert len(list(out.glob("*.png"))) == 100
        stdout = capsys.readouterr().out
        assert "init box" in stdout

    def test_synth_track_eval_pipeline(self, tmp_path, capsys):
        seq = tmp_path / "seq"
        assert main(["synth", "--preset", "blur", "--out", str(seq)]) == 0
        gt_line = (seq / "groundtruth.txt").read_text().splitlines()[0]
        out = tmp_path / "out"
        assert main(["track", "--seq", str(seq), "--init", gt_line, "--out", str(out)]) == 0
        assert main(["eval", "--results", str(out / "results.csv"),
                     "--gt", str(seq / "groundtruth.txt"),
                     "--out", str(tmp_path / "metrics.csv")]) == 0

    def test_spec_file(self, tmp_path):
        spec_path = tmp_path / "mini.spec"
        spec_path.write_text(
            "frames = 5\nframe_width = 160\nframe_height = 120\n"
            "object_width = 40\nobject_height = 40\n"
            "start_x = 60\nstart_y = 60\ndx = 1.5\nnoise_sigma = 0.5\n"
        )
        out = tmp_path / "seq"
        assert main(["synth", "--spec", str(spec_path), "--out", str(out)]) == 0
        assert len(list(out.glob("*.png"))) == 5

    def test_bad_spec_key_is_data_error(self, tmp_path, capsys):
        spec_path = tmp_path / "mini.spec"
        spec_path.write_text("wibble = 3\n")
        assert main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "s")]) == 2

    def test_preset_and_spec_conflict(self, tmp_path, capsys):
        code = main(["synth", "--preset", "translation", "--spec", "x", "--out", "y"])
        assert code == 1
