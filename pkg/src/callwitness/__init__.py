"""Execution-verified call-graph benchmarks for small single-file programs.

The toolkit instruments Python, JavaScript and Java sources with entry
probes, runs them to witness the ground-truth edge set, validates the
witnessed graph, and scores predicted call graphs edge by edge.
"""

__version__ = "0.1.0"
