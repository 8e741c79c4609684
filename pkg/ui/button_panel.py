"""Button panel module for UI components."""

import logging
from typing import Callable, Dict, List, Optional, Tuple

from matplotlib.widgets import Button

logger = logging.getLogger(__name__)


class ButtonPanel:
    """A single action button, by default the dashboard's reset.

    Parameters:
    -----------
    fig : matplotlib.figure.Figure
        The figure to add the button to
    colors : dict
        Theme colors; uses 'text', 'widget_bg' and 'widget_active'
    label : str, optional
        Button text. Default: "Reset"
    position : tuple, optional
        Position [left, bottom, width, height] for the button
    """

    def __init__(
        self,
        fig,
        colors: Dict[str, str],
        label: str = "Reset",
        position: Tuple[float, float, float, float] = (0.84, 0.03, 0.10, 0.04),
    ):
        self.fig = fig
        self.colors = colors
        self.position = position

        self.button: Optional[Button] = None
        self._callbacks: List[Callable[[], None]] = []
        self._create_widget(label)

    def _create_widget(self, label: str):
        button_ax = self.fig.add_axes(list(self.position))
        button_ax.set_facecolor(self.colors["widget_bg"])
        self.button = Button(
            button_ax,
            label,
            color=self.colors["widget_bg"],
            hovercolor=self.colors["widget_active"],
        )
        self.button.label.set_color(self.colors["text"])
        self.button.on_clicked(self._on_click)

    def _on_click(self, event):
        for callback in self._callbacks:
            try:
                callback()
            except Exception:
                logger.exception("Button callback failed")

    def on_click(self, callback: Callable[[], None]):
        """Register a callback for button clicks.

        Parameters:
        -----------
        callback : callable
            Signature: callback() -> None
        """
        self._callbacks.append(callback)

    @property
    def label(self) -> str:
        return self.button.label.get_text() if self.button else ""

    def set_label(self, label: str):
        if self.button:
            self.button.label.set_text(label)
