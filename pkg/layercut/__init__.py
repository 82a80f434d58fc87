"""Approximation schemes for vertex and edge energies on graphs.

The energy of a labeling sums one potential per vertex and one per edge.
:mod:`layercut.dp` optimizes it exactly on a tree decomposition, and the
shifting schemes of :mod:`layercut.shifting`, :mod:`layercut.geometry` and
:mod:`layercut.crossing` reduce planar, geometric and nearly planar graphs
to pieces of bounded width.
"""
