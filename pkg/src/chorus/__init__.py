"""chorus: a model-multiplicity workbench for MNIST digit classifiers.

Trains many deliberately varied classifiers, identifies Rashomon sets of
equally accurate models, encodes each model's configuration as a
Chernoff-Bot glyph, and serves a comparison dashboard.
"""

__version__ = "0.1.0"
