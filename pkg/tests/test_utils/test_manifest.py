"""
Tests for manifest.py - Run manifest persistence and output digests.
"""

import json
import tempfile
import unittest
from pathlib import Path

from src import __version__
from src.utils.manifest import (
    MANIFEST_NAME, ManifestManager, build_manifest, compare_outputs, file_digest,
)
from src.utils.validation import ConfigError


class TestBuildManifest(unittest.TestCase):
    """Test manifest assembly."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.root = Path(self.temp_dir.name)
        self.input = self.root / "model.yaml"
        self.input.write_text("channel: {capacity: 1}\n", encoding="utf-8")
        self.output = self.root / "prediction.csv"
        self.output.write_text("label\na\n", encoding="utf-8")

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_contents(self):
        manifest = build_manifest(
            "predict", {"x": 1}, [3, 4],
            inputs={"config": self.input},
            outputs={"prediction.csv": self.output},
            arguments=["predict", "model.yaml"],
        )
        self.assertEqual(manifest["command"], "predict")
        self.assertEqual(manifest["tool_version"], __version__)
        self.assertEqual(manifest["seeds"], [3, 4])
        self.assertEqual(manifest["arguments"], ["predict", "model.yaml"])
        self.assertEqual(manifest["inputs"]["config"]["sha256"], file_digest(self.input))
        self.assertEqual(manifest["outputs"]["prediction.csv"], file_digest(self.output))
        self.assertEqual(len(file_digest(self.input)), 64)

    def test_no_timestamps(self):
        """Test building twice gives identical manifests."""
        a = build_manifest("plan", {}, [], outputs={"p": self.output})
        b = build_manifest("plan", {}, [], outputs={"p": self.output})
        self.assertEqual(json.dumps(a, sort_keys=True), json.dumps(b, sort_keys=True))


class TestManifestManager(unittest.TestCase):
    """Test saving, backup and recovery."""

    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.out_dir = Path(self.temp_dir.name) / "run"
        self.manager = ManifestManager(self.out_dir)

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_creates_directory(self):
        self.assertTrue(self.out_dir.is_dir())
        self.assertEqual(self.manager.storage_path, self.out_dir / MANIFEST_NAME)

    def test_save_and_load(self):
        self.manager.save({"command": "plan", "seeds": []})
        self.assertEqual(self.manager.load()["command"], "plan")
        self.assertTrue(self.manager.storage_path.read_text().endswith("}\n"))

    def test_backup_on_overwrite(self):
        """Test the previous manifest is kept as a backup and used when the file is corrupt."""
        self.manager.save({"command": "first"})
        self.manager.save({"command": "second"})
        self.manager.storage_path.write_text("{not json", encoding="utf-8")
        self.assertEqual(self.manager.load()["command"], "first")

    def test_missing_manifest(self):
        with self.assertRaises(ConfigError):
            self.manager.load()

    def test_from_path(self):
        self.manager.save({"command": "x"})
        self.assertEqual(ManifestManager.from_path(self.out_dir).load()["command"], "x")
        by_file = ManifestManager.from_path(self.out_dir / MANIFEST_NAME)
        self.assertEqual(by_file.load()["command"], "x")


class TestCompareOutputs(unittest.TestCase):

    def test_mismatches(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            root = Path(temp_dir)
            (root / "a.csv").write_text("1\n")
            (root / "b.csv").write_text("2\n")
            expected = {
                "a.csv": file_digest(root / "a.csv"),
                "b.csv": "0" * 64,
                "c.csv": "0" * 64,
            }
            self.assertEqual(compare_outputs(expected, root), ["b.csv", "c.csv"])


if __name__ == '__main__':
    unittest.main()
