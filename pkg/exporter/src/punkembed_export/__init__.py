"""Embedding exporter: runs an encoder over a corpus and writes PUNKEMB1 files."""

__version__ = "0.1.0"
