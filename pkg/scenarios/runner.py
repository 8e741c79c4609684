"""Closed-loop simulation of one scenario.

Physics runs at ``physics_dt`` and everything else once per control
period, in this order: the cameras see the current ground truth, the EKF
predicts with the previous tick's tip acceleration and corrects with the
new measurement, the length estimator steps on the filtered angle, the
controller computes new joint-rate commands, the tick is recorded, and
the crane and payload are advanced to the next tick.
"""

import logging
import math
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional, Union

import numpy as np

from controller import control_tick, tip_state
from errors import (
    CoincidentMarkers,
    ConeSingularity,
    DegenerateGeometry,
    IllConditionedInnovation,
    InsufficientViews,
    OutOfReach,
    ScenarioConfigError,
    SimulationAborted,
    SingularConfiguration,
)
from estimation import ekf_predict, ekf_update, estimator_step, filter_signals
from kinematics import JointState, inverse_kinematics
from pendulum import PendulumState, SimState, physics_steps_per_tick, step_ground_truth
from scenarios.config import ScenarioConfig
from scenarios.trace import Trace, TraceRecord, trace_filename
from vision import measure_from_observations, synthesize_observations

logger = logging.getLogger(__name__)

ABORTING_ERRORS = (
    ConeSingularity,
    SingularConfiguration,
    OutOfReach,
    IllConditionedInnovation,
)
MEASUREMENT_ERRORS = (InsufficientViews, DegenerateGeometry, CoincidentMarkers)


def initial_state(cfg: ScenarioConfig) -> SimState:
    """Ground truth at t = 0: crane at rest, cable at the configured swing."""
    init = cfg.initial
    if init.q is not None:
        joints = JointState(np.array(init.q, dtype=float))
    else:
        joints = inverse_kinematics(np.array(init.tip, dtype=float), cfg.geometry)
    pendulum = PendulumState(
        math.radians(init.phi_x_deg),
        math.radians(init.phi_y_deg),
        init.phidot_x,
        init.phidot_y,
    )
    return SimState(t=0.0, joints=joints, pendulum=pendulum)


def run_scenario(
    cfg: ScenarioConfig, out_dir: Optional[Union[str, Path]] = None
) -> Trace:
    """Run one scenario to completion.

    Parameters:
    -----------
    cfg : ScenarioConfig
        The scenario; identical configs (seed included) give identical traces
    out_dir : path, optional
        Directory for the ``<id>_seed<n>.csv`` trace; nothing is written if None

    Returns:
    --------
    Trace
        One record per control tick, t = 0 to duration inclusive

    Raises:
    -------
    ScenarioConfigError
        If the config violates an invariant
    SimulationAborted
        On a cone or Jacobian singularity, an unreachable pose or an
        ill-conditioned filter update; the partial trace is flushed first
    """
    cfg.validate()
    settings = cfg.scenario
    dt = settings.control_period
    try:
        physics_steps_per_tick(dt, settings.physics_dt)
    except ValueError as exc:
        raise ScenarioConfigError(str(exc)) from exc

    payload, geom, events = cfg.payload, cfg.geometry, cfg.events
    g = payload.g
    rng = np.random.default_rng(settings.seed)
    trace = Trace(scenario_id=settings.id, seed=settings.seed, L_true=payload.L_true, g=g)
    csv_path = Path(out_dir) / trace_filename(settings.id, settings.seed) if out_dir else None

    n_ticks = int(round(settings.duration / dt))
    logger.info(
        "Starting scenario %s (seed %d, %.1f s, %d ticks)",
        settings.id, settings.seed, settings.duration, n_ticks,
    )
    started = time.perf_counter()

    try:
        sim = initial_state(cfg)
        start_xy = tip_state(sim.joints, geom)[:2]
        ekf = cfg.ekf.initial_state(dt)
        est = cfg.estimator.initial_state()
        a_prev = np.zeros(2)
        was_damping = was_frozen = False

        for k in range(n_ticks + 1):
            t = k * dt
            damping_on = events.damping_active(t)
            frozen = events.estimate_frozen(t)
            if damping_on != was_damping:
                logger.info("Swing damping %s at t = %.2f s", "on" if damping_on else "off", t)
            if frozen and not was_frozen:
                logger.info("Length estimate frozen at L_bar = %.4f m (t = %.2f s)", est.L_bar, t)
            was_damping, was_frozen = damping_on, frozen

            obs = synthesize_observations(sim, cfg.rig, geom, rng)
            try:
                meas = measure_from_observations(obs)
            except MEASUREMENT_ERRORS as exc:
                logger.debug("No measurement at t = %.2f s: %s", t, exc)
                meas = None

            L_model = payload.L_true if cfg.ekf.length_source == "true" else est.L_bar
            if k > 0:
                ekf = ekf_predict(ekf, a_prev, L_model, g)
            if meas is not None:
                ekf = ekf_update(ekf, meas.y)

            if not frozen:
                z, psi, est = filter_signals(ekf.z_hat[0], ekf.z_hat[2], a_prev[1], est, dt, g)
                est = estimator_step(est, z, psi, dt)

            tip = tip_state(sim.joints, geom)
            desired = cfg.reference.desired(t, start_xy)
            out = control_tick(
                ekf.z_hat, est.L_bar, tip, desired, cfg.controller,
                sim.velocity_loop, sim.joints, geom, dt, g, damping_on,
            )

            trace.append(_record(t, sim, ekf.z_hat, meas, tip, desired, out, est, damping_on, frozen))
            if k == n_ticks:
                break

            sim = replace(sim, velocity_loop=out.velocity_loop)
            sim = step_ground_truth(
                sim, out.qdot_cmd, dt, geom, payload,
                physics_dt=settings.physics_dt, actuator_tau=settings.actuator_tau,
                cone_eps=cfg.ekf.cone_eps,
            )
            sim = replace(sim, t=(k + 1) * dt)
            a_prev = out.vdot
    except ABORTING_ERRORS as exc:
        t_fail = trace.records[-1].t if trace.records else 0.0
        logger.error("Scenario %s aborted after t = %.2f s: %s", settings.id, t_fail, exc)
        written = str(trace.write_csv(csv_path)) if csv_path is not None else None
        raise SimulationAborted(
            f"{type(exc).__name__}: {exc}", trace=trace, cause=exc, csv_path=written
        ) from exc

    if csv_path is not None:
        trace.write_csv(csv_path)
    logger.info(
        "Finished scenario %s in %.2f s wall time", settings.id, time.perf_counter() - started
    )
    return trace


def _record(t, sim, z_hat, meas, tip, desired, out, est, damping_on, frozen) -> TraceRecord:
    p = sim.pendulum
    y = meas.y if meas is not None else (math.nan, math.nan)
    sigma4 = meas.sigma4 if meas is not None else (math.nan, math.nan)
    vls = out.velocity_loop
    return TraceRecord(
        t=t,
        phi_x=p.phi_x,
        phi_y=p.phi_y,
        phidot_x=p.phidot_x,
        phidot_y=p.phidot_y,
        phi_hat_x=float(z_hat[0]),
        phi_hat_y=float(z_hat[1]),
        phidot_hat_x=float(z_hat[2]),
        phidot_hat_y=float(z_hat[3]),
        n_hat_x=float(z_hat[4]),
        n_hat_y=float(z_hat[5]),
        y1=float(y[0]),
        y2=float(y[1]),
        sigma4_1=float(sigma4[0]),
        sigma4_2=float(sigma4[1]),
        x5=float(tip[0]),
        y5=float(tip[1]),
        x_d=float(desired[0]),
        y_d=float(desired[1]),
        v_x=float(vls.v[0]),
        v_y=float(vls.v[1]),
        w_x=float(vls.w[0]),
        w_y=float(vls.w[1]),
        vdot_x=float(out.vdot[0]),
        vdot_y=float(out.vdot[1]),
        eta=est.eta,
        gamma=est.gamma,
        L=est.L_hat,
        L_bar=est.L_bar,
        damping_on=damping_on,
        estimator_frozen=frozen,
        measurement_valid=meas is not None,
    )
