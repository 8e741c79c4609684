"""View modules for specialized visualizers."""

from views.trace_view import TraceVisualizer

__all__ = ["TraceVisualizer"]
