"""Interactive multi-panel dashboard for recorded crane runs.

A small framework on top of matplotlib: a grid of panels described by
PlotConfig, one or more sliders, and a reset button. Subclasses decide
what each panel shows for the current slider values by overriding
``_get_plot_data``.
"""

import logging

import matplotlib
import matplotlib.pyplot as plt
import numpy as np

from matplotlib.gridspec import GridSpec
from typing import Any, Dict, List, Optional, Tuple
from dataclasses import dataclass

from theme import Theme, DARK_THEME
from ui import SliderPanel, SliderConfig, ButtonPanel

logger = logging.getLogger(__name__)

INTERACTIVE_BACKENDS = ("Qt5Agg", "TkAgg", "GTK3Agg", "WXAgg")
PLOT_TYPES = ("line", "semilogy")


def setup_backend() -> Optional[str]:
    """
    Switch matplotlib to the first interactive backend that works.

    Returns:
    --------
    str or None
        The backend in use, or None if only non-interactive ones are left
    """
    for backend in INTERACTIVE_BACKENDS:
        try:
            matplotlib.use(backend, force=True)
            fig = plt.figure()
            plt.close(fig)
            logger.info("Using matplotlib backend %s", backend)
            return backend
        except (ImportError, ModuleNotFoundError, RuntimeError):
            continue
    logger.warning("No interactive matplotlib backend available")
    return None


@dataclass
class PlotConfig:
    """Configuration for a single panel."""

    data_key: str  # passed to _get_plot_data
    title: str
    xlabel: str
    ylabel: str
    plot_type: str = "line"  # 'line' or 'semilogy'
    colors: Optional[List[str]] = None
    linestyles: Optional[List[str]] = None
    labels: Optional[List[str]] = None
    grid: bool = True
    legend: bool = True

    def __post_init__(self):
        if self.plot_type not in PLOT_TYPES:
            raise ValueError(f"panel {self.data_key!r}: plot_type must be one of {PLOT_TYPES}")


class GeneralizedVisualizer:
    """
    Grid of themed panels redrawn whenever a slider moves.

    Panels are drawn from ``_get_plot_data(data_key)``, which returns
    None (nothing to show) or a dict of series ``{name: {"x": ..., "y": ...}}``.
    """

    def __init__(
        self,
        data_dict: Dict[str, Any],
        plot_configs: List[PlotConfig],
        slider_configs: List[SliderConfig],
        layout: Tuple[int, int] = (2, 2),
        figsize: Tuple[int, int] = (14, 10),
        main_title: str = "Crane Run",
        hide_empty_plots: bool = True,
        theme: Optional[Theme] = None,
    ):
        """
        Build the figure, panels and widgets.

        Parameters:
        -----------
        data_dict : dict
          Static data looked up by the default ``_get_plot_data``
        plot_configs : list of PlotConfig
          One entry per panel, filled row by row
        slider_configs : list of SliderConfig
          Sliders shown under the panels
        layout : tuple
          (rows, cols) of the panel grid
        figsize : tuple
          Figure size (width, height)
        main_title : str
          Figure title
        hide_empty_plots : bool
          Hide panels without any series
        theme : Theme, optional
          Color theme. Defaults to DARK_THEME.
        """
        if len(plot_configs) > layout[0] * layout[1]:
            raise ValueError(f"{len(plot_configs)} panels do not fit a {layout} grid")
        self.data_dict = data_dict
        self.plot_configs = plot_configs
        self.slider_configs = slider_configs
        self.layout = layout
        self.main_title = main_title
        self.hide_empty_plots = hide_empty_plots
        self.theme = theme if theme is not None else DARK_THEME
        self.colors = self.theme.to_dict()

        self.slider_values = {config.name: config.valinit for config in slider_configs}

        self.fig = plt.figure(figsize=figsize, facecolor=self.colors["background"])
        self.fig.suptitle(
            main_title,
            fontsize=16,
            fontweight="bold",
            color=self.colors["text"],
        )
        bottom_margin = 0.08 + (len(slider_configs) * 0.045)
        self.fig.subplots_adjust(
            left=0.06,
            right=0.97,
            top=0.92,
            bottom=bottom_margin,
            hspace=0.55,
            wspace=0.25,
        )

        self.axes = []
        self.lines: Dict[int, list] = {}
        gs = GridSpec(layout[0], layout[1], figure=self.fig)
        for idx, config in enumerate(plot_configs):
            ax = self.fig.add_subplot(gs[idx // layout[1], idx % layout[1]])
            self.axes.append(ax)
            self._setup_plot(ax, config, idx)

        self._create_ui_components()

    def _create_ui_components(self):
        self.slider_panel = SliderPanel(self.fig, self.slider_configs, self.colors)
        self.slider_panel.on_change(self._on_slider_change)

        self.button_panel = ButtonPanel(self.fig, self.colors)
        self.button_panel.on_click(self._on_reset)

    def _on_slider_change(self, slider_name: str, value: float):
        self.slider_values[slider_name] = value
        self.redraw()

    def _on_reset(self):
        self.slider_panel.reset()

    def redraw(self):
        """Refresh every panel for the current slider values."""
        for idx, (ax, config) in enumerate(zip(self.axes, self.plot_configs)):
            self._update_plot(ax, config, idx)
        self.fig.canvas.draw_idle()

    def _setup_plot(self, ax, config: PlotConfig, plot_idx: int):
        ax.set_facecolor(self.colors["axes_bg"])
        ax.set_title(
            config.title, fontweight="bold", color=self.colors["text"], fontsize=11
        )
        ax.set_xlabel(config.xlabel, color=self.colors["text"], fontsize=10)
        ax.set_ylabel(config.ylabel, color=self.colors["text"], fontsize=10)
        ax.tick_params(colors=self.colors["text"], labelsize=9)
        for spine in ax.spines.values():
            spine.set_color(self.colors["grid"])
        if config.grid:
            ax.grid(True, alpha=0.3, color=self.colors["grid"])
        if config.plot_type == "semilogy":
            ax.set_yscale("log")

        self.lines[plot_idx] = []
        self._update_plot(ax, config, plot_idx)
        if config.legend and self.lines[plot_idx]:
            ax.legend(fontsize=8, loc="upper right", facecolor=self.colors["axes_bg"],
                      labelcolor=self.colors["text"], edgecolor=self.colors["grid"])

    def _update_plot(self, ax, config: PlotConfig, plot_idx: int):
        """
        Redraw the series of one panel.

        Parameters:
        -----------
        ax : matplotlib axis
          The panel
        config : PlotConfig
          Its configuration
        plot_idx : int
          Its index in ``self.axes``
        """
        for line in self.lines[plot_idx]:
            line.remove()
        self.lines[plot_idx] = []

        data = self._get_plot_data(config.data_key)
        if data:
            for idx, (key, series) in enumerate(data.items()):
                self._plot_series(ax, key, series, config, idx, plot_idx)
            ax.relim()
            ax.autoscale_view()

        if self.hide_empty_plots:
            ax.set_visible(bool(self.lines[plot_idx]))

    def _plot_series(self, ax, key, series, config: PlotConfig, idx: int, plot_idx: int):
        if isinstance(series, dict):
            y_data = np.asarray(series["y"], dtype=float)
            x_data = series.get("x", np.arange(len(y_data)))
        else:
            y_data = np.asarray(series, dtype=float)
            x_data = np.arange(len(y_data))
        if config.plot_type == "semilogy":
            y_data = np.maximum(y_data, 1e-16)

        color = config.colors[idx] if config.colors and idx < len(config.colors) else None
        linestyle = (
            config.linestyles[idx]
            if config.linestyles and idx < len(config.linestyles)
            else "-"
        )
        label = config.labels[idx] if config.labels and idx < len(config.labels) else str(key)
        (line,) = ax.plot(x_data, y_data, color=color, linestyle=linestyle, label=label, lw=1.5)
        self.lines[plot_idx].append(line)

    def _get_plot_data(self, data_key: str) -> Optional[Dict[str, Any]]:
        """
        Series of one panel for the current slider values.

        The default looks ``data_key`` up in ``data_dict``; dotted keys
        walk nested dicts.
        """
        data: Any = self.data_dict
        for key in data_key.split("."):
            if not isinstance(data, dict) or key not in data:
                return None
            data = data[key]
        return data

    def show(self):
        """Display the interactive figure."""
        plt.show()
