"""Tests for scripts directory (CLI commands)."""
