"""Single-file Python call tracer speaking the callwitness trace protocol."""

from .tracer import (
    TOPLEVEL,
    TRACE_ENV_VAR,
    TRACE_HEADER,
    definition_map,
    main,
    run_target,
    run_traced_python,
)

__all__ = [
    "TOPLEVEL",
    "TRACE_ENV_VAR",
    "TRACE_HEADER",
    "definition_map",
    "main",
    "run_target",
    "run_traced_python",
]
