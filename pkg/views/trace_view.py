"""Trace viewer: a recorded crane run, scrubbed with a time slider."""

import numpy as np

from typing import Dict, List, Optional

from visualizer import GeneralizedVisualizer, PlotConfig
from ui import SliderConfig
from theme import Theme, DARK_THEME, trace_colors
from scenarios.trace import Trace


class TraceVisualizer(GeneralizedVisualizer):
  """
  Eight panels of one run, each drawn up to the slider time.

  Shows true against estimated cable angles and rates, tip position
  against reference, the length estimates against L*, the velocity-loop
  states, the realized tip acceleration, sigma_4 of both markers and the
  estimated measurement biases.
  """

  def __init__(self, trace: Trace, theme: Optional[Theme] = None):
    if len(trace) == 0:
      raise ValueError("cannot view an empty trace")
    self.trace = trace
    self.cols = trace.columns()
    t = self.cols["t"]
    step = float(t[1] - t[0]) if t.size > 1 else 1.0

    slider_configs = [
      SliderConfig(
        name="time",
        label="Time [s]",
        valmin=float(t[0]),
        valmax=float(t[-1]),
        valinit=float(t[-1]),
        valstep=step,
      ),
    ]

    super().__init__(
      data_dict={},
      plot_configs=self._create_plot_configs(trace_colors(theme or DARK_THEME)),
      slider_configs=slider_configs,
      layout=(4, 2),
      figsize=(18, 14),
      main_title=f"{trace.scenario_id} (seed {trace.seed})",
      hide_empty_plots=False,
      theme=theme,
    )
    self.fig.canvas.mpl_connect("key_press_event", self._on_key)

  @staticmethod
  def _create_plot_configs(c: Dict[str, str]) -> List[PlotConfig]:
    return [
      PlotConfig(
        data_key="angles",
        title="Cable Angles",
        xlabel="t [s]",
        ylabel="angle [deg]",
        colors=[c["true"], c["estimate"], c["true"], c["estimate"]],
        linestyles=["-", "--", "-", "--"],
        labels=["phi_x", "phi_x est", "phi_y", "phi_y est"],
      ),
      PlotConfig(
        data_key="rates",
        title="Cable Rates",
        xlabel="t [s]",
        ylabel="rate [deg/s]",
        colors=[c["true"], c["estimate"], c["true"], c["estimate"]],
        linestyles=["-", "--", "-", "--"],
        labels=["phidot_x", "phidot_x est", "phidot_y", "phidot_y est"],
      ),
      PlotConfig(
        data_key="tip",
        title="Tip Position",
        xlabel="t [s]",
        ylabel="position [m]",
        colors=[c["x"], c["reference"], c["y"], c["reference"]],
        linestyles=["-", ":", "-", ":"],
        labels=["x5", "x_d", "y5", "y_d"],
      ),
      PlotConfig(
        data_key="length",
        title="Cable Length",
        xlabel="t [s]",
        ylabel="L [m]",
        colors=[c["L_raw"], c["L_bar"], c["L_true"]],
        linestyles=["-", "-", "--"],
        labels=["1/eta", "L_bar", "L*"],
      ),
      PlotConfig(
        data_key="velocity_loop",
        title="Velocity Loop",
        xlabel="t [s]",
        ylabel="[m/s]",
        colors=[c["x"], c["x"], c["y"], c["y"]],
        linestyles=["-", ":", "-", ":"],
        labels=["v_x", "w_x", "v_y", "w_y"],
      ),
      PlotConfig(
        data_key="accel",
        title="Tip Acceleration",
        xlabel="t [s]",
        ylabel="[m/s^2]",
        colors=[c["x"], c["y"]],
        labels=["vdot_x", "vdot_y"],
      ),
      PlotConfig(
        data_key="sigma4",
        title="Triangulation Residual",
        xlabel="t [s]",
        ylabel="sigma_4",
        plot_type="semilogy",
        colors=[c["marker_1"], c["marker_2"]],
        labels=["marker 1", "marker 2"],
      ),
      PlotConfig(
        data_key="bias",
        title="Measurement Bias",
        xlabel="t [s]",
        ylabel="bias [deg]",
        colors=[c["x"], c["y"]],
        labels=["n_x", "n_y"],
      ),
    ]

  # key -> ticks; home and end jump to the ends of the run
  SCRUB_KEYS = {"left": -1, "right": 1, "shift+left": -20, "shift+right": 20, "home": None, "end": None}

  def _on_key(self, event):
    if event.key not in self.SCRUB_KEYS:
      return
    steps = self.SCRUB_KEYS[event.key]
    if steps is not None:
      self.slider_panel.step_by("time", steps)
    elif event.key == "home":
      self.slider_panel.set_value("time", float(self.cols["t"][0]))
    else:
      self.slider_panel.set_value("time", float(self.cols["t"][-1]))

  def _series(self, names: List[str], scale: float = 1.0) -> Dict[str, dict]:
    mask = self.cols["t"] <= self.slider_values["time"] + 1e-9
    t = self.cols["t"][mask]
    return {name: {"x": t, "y": self.cols[name][mask] * scale} for name in names}

  def _get_plot_data(self, data_key: str):
    """Series of a panel up to the current slider time."""
    deg = np.degrees(1.0)
    if data_key == "angles":
      return self._series(["phi_x", "phi_hat_x", "phi_y", "phi_hat_y"], deg)
    elif data_key == "rates":
      return self._series(["phidot_x", "phidot_hat_x", "phidot_y", "phidot_hat_y"], deg)
    elif data_key == "tip":
      return self._series(["x5", "x_d", "y5", "y_d"])
    elif data_key == "length":
      data = self._series(["L", "L_bar"])
      t = data["L"]["x"]
      data["L_true"] = {"x": t, "y": np.full(t.shape, self.trace.L_true)}
      return data
    elif data_key == "velocity_loop":
      return self._series(["v_x", "w_x", "v_y", "w_y"])
    elif data_key == "accel":
      return self._series(["vdot_x", "vdot_y"])
    elif data_key == "sigma4":
      return self._series(["sigma4_1", "sigma4_2"])
    elif data_key == "bias":
      return self._series(["n_hat_x", "n_hat_y"], deg)
    return None
