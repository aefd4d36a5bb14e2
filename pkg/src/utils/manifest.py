"""
Run Manifest
Persists and recovers the manifest written beside every command's outputs.

A manifest holds the command name, the fully resolved configuration, the
seeds, the tool version and SHA-256 digests of inputs and outputs. It has no
timestamps, so re-running the same command yields a byte-identical manifest.
"""
import hashlib
import json
import shutil
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional
import logging

from src import __version__
from src.utils.validation import ConfigError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_digest(path: Path) -> str:
    """SHA-256 hex digest of a file's bytes."""
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            sha.update(chunk)
    return sha.hexdigest()


def build_manifest(
    command: str,
    config: Dict[str, Any],
    seeds: Iterable[int],
    inputs: Optional[Dict[str, Path]] = None,
    outputs: Optional[Dict[str, Path]] = None,
    arguments: Optional[List[str]] = None,
) -> Dict[str, Any]:
    """
    Assemble a manifest document.

    Args:
        command: CLI subcommand name
        config: Resolved configuration (JSON-serializable, canonical units)
        seeds: Seeds used by the run
        inputs: Logical input name -> file path
        outputs: Output file name -> file path
        arguments: Command-line arguments that reproduce the run, without --out

    Returns:
        Manifest dictionary
    """
    return {
        "command": command,
        "arguments": list(arguments or []),
        "tool_version": __version__,
        "config": config,
        "seeds": [int(s) for s in seeds],
        "inputs": {
            name: {"path": str(path), "sha256": file_digest(Path(path))}
            for name, path in sorted((inputs or {}).items())
        },
        "outputs": {
            name: file_digest(Path(path))
            for name, path in sorted((outputs or {}).items())
        },
    }


class ManifestManager:
    """Persist and recover a run manifest."""

    def __init__(self, out_dir: Path):
        self.storage_path = Path(out_dir) / MANIFEST_NAME
        self.storage_path.parent.mkdir(parents=True, exist_ok=True)

    def save(self, manifest: Dict[str, Any]) -> Path:
        """Write the manifest, keeping the previous one as a backup."""
        backup_path = self.storage_path.with_suffix('.json.bak')
        if self.storage_path.exists():
            shutil.copy(self.storage_path, backup_path)

        with open(self.storage_path, 'w', encoding="utf-8", newline="\n") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"Wrote manifest to {self.storage_path}")
        return self.storage_path

    def load(self) -> Dict[str, Any]:
        """Load the manifest with fallback to the backup."""
        if self.storage_path.exists():
            try:
                with open(self.storage_path, 'r', encoding="utf-8") as f:
                    logger.info(f"Loading manifest from {self.storage_path}")
                    return json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning(f"Failed to load manifest: {e}. Trying backup.")

        backup_path = self.storage_path.with_suffix('.json.bak')
        if backup_path.exists():
            try:
                with open(backup_path, 'r', encoding="utf-8") as f:
                    logger.warning(f"Loading manifest from backup file {backup_path}")
                    return json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Failed to load backup manifest: {e}")

        raise ConfigError(f"No readable manifest at {self.storage_path}")

    @classmethod
    def from_path(cls, path: Path) -> "ManifestManager":
        """Manager for a manifest file or for the directory holding one."""
        path = Path(path)
        if path.is_dir():
            return cls(path)
        manager = cls(path.parent)
        manager.storage_path = path
        return manager


def compare_outputs(expected: Dict[str, str], out_dir: Path) -> List[str]:
    """
    Names of outputs whose digest differs from ``expected`` (or are missing).
    """
    mismatches = []
    for name, digest in sorted(expected.items()):
        path = Path(out_dir) / name
        if not path.exists():
            mismatches.append(name)
        elif file_digest(path) != digest:
            mismatches.append(name)
    return mismatches
