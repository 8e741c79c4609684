"""Widgets of the trace viewer: sliders and buttons."""

from .slider_panel import SliderPanel, SliderConfig
from .button_panel import ButtonPanel

__all__ = [
    "SliderPanel",
    "SliderConfig",
    "ButtonPanel",
]
