"""Viewer themes and signal palettes."""

from .colors import (
    Theme,
    get_theme,
    trace_colors,
    DARK_THEME,
    LIGHT_THEME,
    HIGH_CONTRAST_THEME,
    TRACE_COLORS,
    LIGHT_TRACE_COLORS,
)

__all__ = [
    "Theme",
    "get_theme",
    "trace_colors",
    "DARK_THEME",
    "LIGHT_THEME",
    "HIGH_CONTRAST_THEME",
    "TRACE_COLORS",
    "LIGHT_TRACE_COLORS",
]
