"""Live data-exploration engine.

A small command language (let bindings plus member-call chains over
external libraries), evaluated three ways that always agree: a reference
evaluator, demand-driven previews over a dependency graph with
node-level caching across edits, and a graph-based type checker.  See
README.md for the tour.
"""

__version__ = "0.1.0"
