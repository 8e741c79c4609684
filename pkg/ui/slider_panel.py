"""Slider panel module for UI components."""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from matplotlib.widgets import Slider

logger = logging.getLogger(__name__)


@dataclass
class SliderConfig:
    """Configuration for a slider widget.

    Parameters:
    -----------
    name : str
        Unique identifier for the slider
    label : str
        Display label for the slider
    valmin : float
        Minimum value
    valmax : float
        Maximum value
    valinit : float
        Initial value
    valstep : float, optional
        Step size for values. Default: 1
    """

    name: str
    label: str
    valmin: float
    valmax: float
    valinit: float
    valstep: Optional[float] = 1

    def __post_init__(self):
        if self.valmax < self.valmin:
            raise ValueError(f"slider {self.name}: valmax below valmin")
        if not self.valmin <= self.valinit <= self.valmax:
            raise ValueError(f"slider {self.name}: valinit outside [valmin, valmax]")

    def clamp(self, value: float) -> float:
        return max(self.valmin, min(self.valmax, value))


class SliderPanel:
    """Sliders stacked under the panels of a figure.

    Parameters:
    -----------
    fig : matplotlib.figure.Figure
        The figure to add the sliders to
    configs : list of SliderConfig
        Configuration for each slider
    colors : dict
        Theme colors; uses 'text', 'widget_bg' and 'widget_active'
    """

    def __init__(
        self,
        fig,
        configs: List[SliderConfig],
        colors: Dict[str, str],
    ):
        self.fig = fig
        self.configs = {config.name: config for config in configs}
        self.colors = colors

        self.sliders: Dict[str, Slider] = {}
        self.slider_values: Dict[str, float] = {
            config.name: config.valinit for config in configs
        }
        self._callbacks: List[Callable[[str, float], None]] = []

        self._create_widgets()

    def _create_widgets(self):
        for idx, config in enumerate(self.configs.values()):
            pos = [0.20, 0.04 + idx * 0.038, 0.55, 0.022]
            ax_slider = self.fig.add_axes(pos, facecolor=self.colors["widget_bg"])
            slider = Slider(
                ax=ax_slider,
                label=config.label,
                valmin=config.valmin,
                valmax=config.valmax,
                valinit=config.valinit,
                valstep=config.valstep,
                color=self.colors["widget_active"],
            )
            slider.label.set_color(self.colors["text"])
            slider.valtext.set_color(self.colors["text"])
            slider.on_changed(lambda val, name=config.name: self._on_change(name, val))
            self.sliders[config.name] = slider

    def _on_change(self, slider_name: str, value: float):
        self.slider_values[slider_name] = value
        for callback in self._callbacks:
            try:
                callback(slider_name, value)
            except Exception:
                logger.exception("Slider callback failed for %s = %s", slider_name, value)

    def on_change(self, callback: Callable[[str, float], None]):
        """Register a callback for slider value changes.

        Parameters:
        -----------
        callback : callable
            Function called when a slider value changes.
            Signature: callback(name: str, value: float) -> None
        """
        self._callbacks.append(callback)

    def get_value(self, name: str) -> Optional[float]:
        return self.slider_values.get(name)

    def set_value(self, name: str, value: float) -> bool:
        """Move a slider, clamping to its range.

        Returns:
        --------
        bool
            True if the slider exists
        """
        if name not in self.sliders:
            return False
        value = self.configs[name].clamp(value)
        self.slider_values[name] = value
        self.sliders[name].set_val(value)
        return True

    def step_by(self, name: str, steps: int) -> bool:
        """Move a slider by a whole number of its steps."""
        config = self.configs.get(name)
        if config is None:
            return False
        step = config.valstep or (config.valmax - config.valmin) / 100.0
        return self.set_value(name, self.slider_values[name] + steps * step)

    def get_all_values(self) -> Dict[str, float]:
        return self.slider_values.copy()

    def reset(self, name: Optional[str] = None):
        """Reset one slider, or all of them, to the initial value."""
        names = [name] if name is not None else list(self.sliders)
        for key in names:
            if key in self.sliders:
                self.sliders[key].reset()
                self.slider_values[key] = self.configs[key].valinit
