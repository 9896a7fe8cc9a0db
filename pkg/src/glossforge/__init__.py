"""glossforge: a linked glossary of undergraduate mathematics concepts.

Pipeline stages: LaTeX-aware tokenization of mathematical English into
CoNLL-U skeletons, term extraction from dependency-annotated sentences,
entity linking against a local Wikipedia-title-to-QID index, multi-corpus
knowledge-graph assembly, deterministic static-site emission, and a
human-in-the-loop curation service.
"""

__version__ = "0.1.0"
