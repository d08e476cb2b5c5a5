"""Understanding long probability word problems: corpus tools, concept
classifiers, a heterogeneous problem graph, and sentence-level unknown
extraction, plus an annotation service."""

__version__ = "0.1.0"
