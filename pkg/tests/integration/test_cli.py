#!/usr/bin/env python3
"""
Command-line integration tests
"""

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from cli import cli
from data import MANIFEST_NAME, read_manifest, write_words
from imaging import GrayImage, save_png

WORDS = ["актау", "алматы", "астана", "семей", "тараз", "минск"]


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Generated dataset plus a one-epoch small checkpoint, shared by the module"""
    root = tmp_path_factory.mktemp("cli")
    words = root / "words.txt"
    write_words(words, WORDS)
    runner = CliRunner()
    gen = runner.invoke(
        cli, ["gen", "--words", str(words), "--per-word", "4", "--out", str(root / "ds"), "--seed", "7"],
    )
    assert gen.exit_code == 0, gen.output
    ckpt = root / "model.htr"
    trained = runner.invoke(
        cli,
        ["train", "--model", "simple_htr", "--variant", "small", "--data", str(root / "ds"),
         "--out", str(ckpt), "--epochs", "1"],
    )
    assert trained.exit_code == 0, trained.output
    return {"root": root, "words": words, "data": root / "ds", "ckpt": ckpt, "gen": gen, "train": trained}


def first_image(data_dir):
    return str(data_dir / read_manifest(data_dir / MANIFEST_NAME)[0].path)


def recognition_line(output):
    """The 'text<TAB>score' line of recognize output"""
    (line,) = [line for line in output.splitlines() if "\t" in line]
    return line.split("\t")


@pytest.mark.integration
class TestGenAndTrain:
    """gen and train commands"""

    def test_gen_reports_split(self, workspace):
        """Test gen writes the manifest and prints split sizes"""
        assert "Generated 24 images" in workspace["gen"].output
        assert "train=14" in workspace["gen"].output
        assert len(read_manifest(workspace["data"] / MANIFEST_NAME)) == 24

    def test_train_writes_outputs(self, workspace):
        """Test train leaves a checkpoint, a resumable checkpoint and a history"""
        ckpt = workspace["ckpt"]
        assert ckpt.is_file()
        assert ckpt.with_name("model.htr.last").is_file()
        history = pd.read_csv(ckpt.with_suffix(".history.csv"))
        assert list(history["epoch"]) == [1]
        assert "Trained 1 epochs" in workspace["train"].output

    def test_train_reads_command_config(self, workspace, tmp_path):
        """Test train --config takes epochs and batch size from the settings file"""
        config = tmp_path / "htr.ini"
        config.write_text("[train]\nmax_epochs = 2\nbatch_size = 8\nseed = 3\n", encoding="utf-8")
        ckpt = tmp_path / "configured.htr"
        result = CliRunner().invoke(
            cli,
            ["train", "--model", "simple_htr", "--variant", "small", "--data", str(workspace["data"]),
             "--config", str(config), "--out", str(ckpt)],
        )
        assert result.exit_code == 0, result.output
        assert "Trained 2 epochs" in result.output
        assert list(pd.read_csv(ckpt.with_suffix(".history.csv"))["epoch"]) == [1, 2]

    def test_train_rejects_bad_command_config(self, workspace, tmp_path):
        """Test an unknown settings key given to train --config exits with code 2"""
        config = tmp_path / "bad.ini"
        config.write_text("[train]\nlearning_rate = 1\n", encoding="utf-8")
        result = CliRunner().invoke(
            cli,
            ["train", "--model", "simple_htr", "--data", str(workspace["data"]),
             "--config", str(config), "--out", str(tmp_path / "m.htr")],
        )
        assert result.exit_code == 2
        assert "learning_rate" in result.output

    def test_unknown_model(self, workspace):
        """Test an unknown model name is a usage error"""
        result = CliRunner().invoke(
            cli, ["train", "--model", "resnet", "--data", str(workspace["data"]), "--out", "x.htr"],
        )
        assert result.exit_code == 2

    def test_missing_dataset(self, tmp_path):
        """Test a directory without a manifest exits with code 2"""
        result = CliRunner().invoke(
            cli, ["train", "--model", "simple_htr", "--data", str(tmp_path), "--out", str(tmp_path / "m.htr")],
        )
        assert result.exit_code == 2
        assert "manifest.tsv" in result.output


@pytest.mark.integration
class TestRecognizeAndEval:
    """recognize and eval commands"""

    def test_recognize_prints_text_and_score(self, workspace):
        """Test one line of 'text<TAB>score%' output"""
        result = CliRunner().invoke(
            cli, ["recognize", "--ckpt", str(workspace["ckpt"]), "--image", first_image(workspace["data"])],
        )
        assert result.exit_code == 0, result.output
        _, score = recognition_line(result.output)
        assert score.endswith("%")

    def test_word_beam_output_is_dictionary_word(self, workspace):
        """Test word beam search returns a dictionary word or nothing"""
        result = CliRunner().invoke(
            cli,
            ["recognize", "--ckpt", str(workspace["ckpt"]), "--image", first_image(workspace["data"]),
             "--decoder", "wordbeamsearch", "--dict", str(workspace["words"]), "--beam-width", "5"],
        )
        assert result.exit_code == 0, result.output
        text = recognition_line(result.output)[0]
        assert all(word in WORDS for word in text.split())

    def test_word_beam_needs_dictionary(self, workspace):
        """Test wordbeamsearch without --dict is a usage error"""
        result = CliRunner().invoke(
            cli,
            ["recognize", "--ckpt", str(workspace["ckpt"]), "--image", first_image(workspace["data"]),
             "--decoder", "wordbeamsearch"],
        )
        assert result.exit_code == 2

    def test_corrupt_checkpoint(self, workspace, tmp_path):
        """Test an unreadable checkpoint is a runtime failure"""
        bad = tmp_path / "bad.htr"
        bad.write_bytes(b"not a checkpoint")
        result = CliRunner().invoke(cli, ["recognize", "--ckpt", str(bad), "--image", first_image(workspace["data"])])
        assert result.exit_code == 1
        assert "❌" in result.output

    def test_eval_writes_report(self, workspace, tmp_path):
        """Test eval prints the summary and writes the report CSV"""
        report = tmp_path / "report.csv"
        result = CliRunner().invoke(
            cli,
            ["eval", "--ckpt", str(workspace["ckpt"]), "--data", str(workspace["data"]), "--split", "val",
             "--decoder", "beamsearch", "--beam-width", "4", "--out", str(report)],
        )
        assert result.exit_code == 0, result.output
        assert "beamsearch val: CER" in result.output
        frame = pd.read_csv(report)
        assert frame.iloc[0]["key"] == "cer_micro"

    def test_eval_unwritable_report(self, workspace, tmp_path):
        """Test a report path that cannot be created exits with code 1"""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        result = CliRunner().invoke(
            cli,
            ["eval", "--ckpt", str(workspace["ckpt"]), "--data", str(workspace["data"]), "--split", "val",
             "--decoder", "bestpath", "--out", str(blocker / "report.csv")],
        )
        assert result.exit_code == 1
        assert "Cannot write report" in result.output


@pytest.mark.integration
class TestSegmentCommand:
    """segment command"""

    def test_boxes_csv(self, tmp_path):
        """Test two lines with three words are written as CSV rows"""
        pixels = np.ones((60, 100))
        pixels[10:20, 10:40] = 0.0
        pixels[10:20, 60:90] = 0.0
        pixels[40:50, 10:40] = 0.0
        image = tmp_path / "page.png"
        save_png(GrayImage(pixels), image)
        out = tmp_path / "boxes.csv"
        result = CliRunner().invoke(cli, ["segment", "--image", str(image), "--out", str(out)])
        assert result.exit_code == 0, result.output
        frame = pd.read_csv(out)
        assert list(frame.columns) == ["x", "y", "w", "h", "level", "line"]
        assert frame["level"].value_counts().to_dict() == {"word": 3, "line": 2}
        assert frame.iloc[0][["x", "y", "w", "h"]].tolist() == [10, 10, 80, 10]

    def test_missing_image(self, tmp_path):
        """Test a missing image is a usage error"""
        result = CliRunner().invoke(cli, ["segment", "--image", str(tmp_path / "none.png"), "--out", "x.csv"])
        assert result.exit_code == 2


@pytest.mark.integration
@pytest.mark.slow
class TestReproducibility:
    """Same seed, same bytes"""

    def run_twice(self, tmp_path, words):
        runner = CliRunner()
        roots = []
        for name in ("first", "second"):
            root = tmp_path / name
            gen = runner.invoke(
                cli, ["gen", "--words", str(words), "--per-word", "3", "--out", str(root / "ds"), "--seed", "5"],
            )
            assert gen.exit_code == 0, gen.output
            trained = runner.invoke(
                cli,
                ["train", "--model", "simple_htr", "--variant", "small", "--data", str(root / "ds"),
                 "--out", str(root / "model.htr"), "--epochs", "1"],
            )
            assert trained.exit_code == 0, trained.output
            roots.append(root)
        return roots

    def test_outputs_are_byte_identical(self, tmp_path, workspace):
        """Test manifest, images, history and checkpoints match across two seeded runs"""
        first, second = self.run_twice(tmp_path, workspace["words"])
        names = [
            f"ds/{MANIFEST_NAME}",
            "model.htr",
            "model.htr.last",
            "model.history.csv",
        ]
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name
        images = sorted(p.relative_to(first) for p in (first / "ds").rglob("*.pgm"))
        assert images
        for image in images:
            assert (first / image).read_bytes() == (second / image).read_bytes()
