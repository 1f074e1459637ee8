"""AMR positional-encoding toolkit.

Parses Penman-notation AMR graphs, linearizes them breadth-first with
pointer tokens, transforms the result into a directed edge-unlabeled graph,
and derives per-token positional encodings from the magnetic Laplacian of
that graph, ready to add onto language-model token embeddings. Also ships
BLEU/chrF++ scoring with depth-stratified delta reports.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
