"""Run manifests: enough key=value state to reproduce a run byte-for-byte."""

from __future__ import annotations

import hashlib

from . import __version__
from .config import write_kv


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(subcommand: str, params: dict, inputs, outputs) -> dict:
    """Assemble the manifest mapping: subcommand, tool version, every
    parameter, and per-file paths with checksums."""
    manifest: dict[str, object] = {
        "subcommand": subcommand,
        "tool_version": __version__,
    }
    for key in sorted(params):
        manifest[f"param.{key}"] = params[key]
    for i, path in enumerate(inputs):
        manifest[f"input.{i}.path"] = str(path)
        manifest[f"input.{i}.sha256"] = file_sha256(path)
    for i, path in enumerate(outputs):
        manifest[f"output.{i}.path"] = str(path)
        manifest[f"output.{i}.sha256"] = file_sha256(path)
    return manifest


def write_manifest(path, manifest: dict) -> None:
    write_kv(path, manifest)
