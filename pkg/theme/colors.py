"""Viewer themes and the signal palettes drawn on top of them."""

import logging
from dataclasses import dataclass, asdict, fields
from typing import Dict

from matplotlib.colors import to_rgb

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Theme:
    """Colors of the figure, panels and widgets.

    Attributes:
    -----------
    background : str
        Figure background
    axes_bg : str
        Panel background
    text : str
        Titles, labels and tick labels
    grid : str
        Grid lines and spines
    accent : str
        Highlight color
    widget_bg : str
        Slider and button background
    widget_active : str
        Slider fill and button hover color
    """

    background: str
    axes_bg: str
    text: str
    grid: str
    accent: str
    widget_bg: str
    widget_active: str

    def to_dict(self) -> Dict[str, str]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, str]) -> "Theme":
        """Build a theme from a color mapping; extra keys are ignored.

        Raises:
        -------
        KeyError
            If a color is missing
        """
        missing = [f.name for f in fields(cls) if f.name not in data]
        if missing:
            raise KeyError(f"Missing required color key: {missing[0]}")
        return cls(**{f.name: data[f.name] for f in fields(cls)})

    @property
    def is_light(self) -> bool:
        """True when the panel background is closer to white than to black."""
        r, g, b = to_rgb(self.axes_bg)
        return 0.2126 * r + 0.7152 * g + 0.0722 * b > 0.5


DARK_THEME = Theme(
    background="#1e1e1e",
    axes_bg="#2d2d2d",
    text="#e0e0e0",
    grid="#404040",
    accent="#569cd6",
    widget_bg="#3c3c3c",
    widget_active="#569cd6",
)

LIGHT_THEME = Theme(
    background="#ffffff",
    axes_bg="#f5f5f5",
    text="#333333",
    grid="#cccccc",
    accent="#0066cc",
    widget_bg="#e0e0e0",
    widget_active="#0066cc",
)

HIGH_CONTRAST_THEME = Theme(
    background="#000000",
    axes_bg="#000000",
    text="#ffffff",
    grid="#666666",
    accent="#ffff00",
    widget_bg="#333333",
    widget_active="#ffff00",
)

THEMES: Dict[str, Theme] = {
    "dark": DARK_THEME,
    "light": LIGHT_THEME,
    "high_contrast": HIGH_CONTRAST_THEME,
}

# True values warm, estimates cool; one entry per signal role of the trace viewer.
TRACE_COLORS: Dict[str, str] = {
    "true": "#ff8a65",
    "estimate": "#4fc3f7",
    "reference": "#ffd54f",
    "x": "#66bb6a",
    "y": "#ba68c8",
    "L_bar": "#4fc3f7",
    "L_raw": "#90a4ae",
    "L_true": "#ef5350",
    "marker_1": "#81c784",
    "marker_2": "#f06292",
}

# Same roles, darker tones for light panels.
LIGHT_TRACE_COLORS: Dict[str, str] = {
    "true": "#d84315",
    "estimate": "#0277bd",
    "reference": "#b8860b",
    "x": "#2e7d32",
    "y": "#6a1b9a",
    "L_bar": "#0277bd",
    "L_raw": "#546e7a",
    "L_true": "#c62828",
    "marker_1": "#388e3c",
    "marker_2": "#ad1457",
}


def get_theme(name: str) -> Theme:
    """Look a theme up by name.

    Names are case-insensitive and '-' matches '_'. "default" is the dark
    theme, and an unknown name falls back to it with a warning.
    """
    key = name.lower().replace("-", "_")
    if key == "default":
        return DARK_THEME
    if key in THEMES:
        return THEMES[key]
    logger.warning("Unknown theme %r, using dark", name)
    return DARK_THEME


def trace_colors(theme: Theme) -> Dict[str, str]:
    """Signal palette readable on the theme's panel background."""
    return dict(LIGHT_TRACE_COLORS if theme.is_light else TRACE_COLORS)
