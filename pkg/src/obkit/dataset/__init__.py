"""Benchmark manifests and directory conventions."""

from .manifest import (
    BenchmarkManifest,
    ManifestSample,
    import_pairs,
    load_benchmark,
    sha256_file,
    write_manifest,
)

__all__ = [
    "BenchmarkManifest",
    "ManifestSample",
    "import_pairs",
    "load_benchmark",
    "sha256_file",
    "write_manifest",
]
