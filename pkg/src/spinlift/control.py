"""Runtime control law: feedforward plus LQR feedback in the rotating frame.

Each control tick maps the measured inertial state into the control frame,
forms the deviation from the stored equilibrium, applies u = u_bar - K ds,
rotates the two thrust vectors back to the inertial frame, and applies
magnitude saturation (direction preserving) followed by a nonnegative
vertical-component clamp. Zero-order hold between ticks is the simulator's
responsibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory
from .lqr import GainSet, equilibrium_c_state
from .model import (ControlCommand, EquilibriumSpec, SystemParams, SystemState,
                    rotation_c_to_e, vec3)

__all__ = [
    "SpinProfile",
    "spin_profile",
    "ControllerConfig",
    "control_step",
    "make_controller",
    "command_log_to_csv",
]


@dataclass(frozen=True)
class SpinProfile:
    """Piecewise-linear spin-rate schedule with an exact analytic angle.

    Phases in order: static hold (omega = 0), linear ramp up to
    ``omega_target``, constant hover, linear ramp down, then zero again.
    ``theta`` integrates the profile in closed form (piecewise quadratic)
    rather than accumulating numerically.
    """

    omega_target: float      # [rad/s]
    t_static: float = 0.0    # [s] pre-spin hold
    t_ramp_up: float = 0.0   # [s]
    t_hover: float = 0.0     # [s] at omega_target
    t_ramp_down: float = 0.0  # [s]

    def __post_init__(self):
        for name in ("t_static", "t_ramp_up", "t_hover", "t_ramp_down"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if self.omega_target < 0.0:
            raise ValueError("omega_target must be nonnegative")

    def omega(self, t: float) -> float:
        w = self.omega_target
        t1 = self.t_static
        t2 = t1 + self.t_ramp_up
        t3 = t2 + self.t_hover
        t4 = t3 + self.t_ramp_down
        if t < t1:
            return 0.0
        if t < t2:
            return w * (t - t1) / self.t_ramp_up
        if t < t3:
            return w
        if t < t4:
            return w * (t4 - t) / self.t_ramp_down
        return 0.0

    def theta(self, t: float) -> float:
        w = self.omega_target
        t1 = self.t_static
        t2 = t1 + self.t_ramp_up
        t3 = t2 + self.t_hover
        t4 = t3 + self.t_ramp_down
        if t <= t1:
            return 0.0
        # area under the ramp-up triangle, hover rectangle, ramp-down triangle
        if t <= t2:
            dt = t - t1
            return 0.5 * w * dt * dt / self.t_ramp_up
        total = 0.5 * w * self.t_ramp_up
        if t <= t3:
            return total + w * (t - t2)
        total += w * self.t_hover
        if t <= t4:
            remaining = t4 - t
            return total + 0.5 * w * self.t_ramp_down \
                - 0.5 * w * remaining * remaining / self.t_ramp_down
        return total + 0.5 * w * self.t_ramp_down

    @property
    def end_of_spin(self) -> float:
        return self.t_static + self.t_ramp_up + self.t_hover + self.t_ramp_down


def spin_profile(t: float, profile: SpinProfile) -> tuple[float, float]:
    """(omega_C, theta) of the schedule at time t."""
    return profile.omega(t), profile.theta(t)


@dataclass(frozen=True, eq=False)
class ControllerConfig:
    """Everything one control loop needs for a fixed operating point."""

    gain: GainSet
    eq: EquilibriumSpec
    params: SystemParams
    profile: SpinProfile
    origin: np.ndarray = field(default_factory=lambda: vec3(0.0, 0.0, 1.5))
    T_max: float | None = None   # [N]; default 4*m_q*g
    hold: float | None = None    # [s]; default 1/f_ctrl

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        if self.T_max is None:
            object.__setattr__(self, "T_max", 4.0 * self.params.m_q * self.params.g)
        if self.hold is None:
            object.__setattr__(self, "hold", self.params.ctrl_period)
        if not self.hold > 0.0:
            raise ValueError("hold period must be positive")
        if self.T_max <= self.eq.thrust_magnitude:
            raise ValueError(
                f"T_max={self.T_max:.3f} N does not exceed the equilibrium "
                f"thrust {self.eq.thrust_magnitude:.3f} N; operating point unreachable")
        s_bar, u_bar = equilibrium_c_state(self.eq, self.params)
        object.__setattr__(self, "_s_bar", s_bar)
        object.__setattr__(self, "_u_bar", u_bar)
        # feedforward pieces as a function of the instantaneous spin rate:
        # horizontal component = h0 - h2 * omega^2 (outward positive, vehicle 1)
        ell_s = self.params.ell + self.eq.F_bar / self.params.k_T
        sin_b = math.sin(self.eq.beta)
        object.__setattr__(self, "_ff_h0", sin_b * self.eq.F_bar)
        object.__setattr__(self, "_ff_h2", self.params.m_q * ell_s * sin_b)
        object.__setattr__(self, "_ff_vertical", float(self.eq.T_bar_1[2]))

    def feedforward(self, omega_c: float) -> np.ndarray:
        """Equilibrium thrust pair (C frame) holding the formation at the
        configured tether angle while spinning at ``omega_c``.

        The formation geometry is spin-rate independent, so scheduling the
        feedforward with the instantaneous spin rate keeps the loop on the
        analyzed equilibrium branch through ramps; at the operating point's
        own rate this reduces exactly to the stored equilibrium thrusts.
        """
        horizontal = self._ff_h0 - self._ff_h2 * omega_c * omega_c
        v = self._ff_vertical
        return np.array([horizontal, 0.0, v, -horizontal, 0.0, v])


def _to_frame(R_t: np.ndarray, omega_c: float, x_e: np.ndarray, v_e: np.ndarray,
              origin: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inertial position/velocity -> control-frame components relative to the
    frame origin, with the rotating-frame velocity correction."""
    x_c = R_t @ (x_e - origin)
    v_c = R_t @ v_e - np.array([-omega_c * x_c[1], omega_c * x_c[0], 0.0])
    return x_c, v_c


def _saturate(T: np.ndarray, T_max: float) -> np.ndarray:
    norm = float(np.linalg.norm(T))
    if norm > T_max:
        T = T * (T_max / norm)
    if T[2] < 0.0:
        T = T.copy()
        T[2] = 0.0
    return T


def control_step(state: SystemState, cfg: ControllerConfig, t: float) -> ControlCommand:
    """One outer-loop evaluation at time ``t``."""
    omega_c, theta = cfg.profile.omega(t), cfg.profile.theta(t)
    R = rotation_c_to_e(theta)
    R_t = R.T

    xp_c, vp_c = _to_frame(R_t, omega_c, state.x_p, state.v_p, cfg.origin)
    x1_c, v1_c = _to_frame(R_t, omega_c, state.x_1, state.v_1, cfg.origin)
    x2_c, v2_c = _to_frame(R_t, omega_c, state.x_2, state.v_2, cfg.origin)
    s = np.concatenate([xp_c, vp_c, x1_c, v1_c, x2_c, v2_c])

    u = cfg.feedforward(omega_c) - cfg.gain.K @ (s - cfg._s_bar)
    T1 = _saturate(R @ u[0:3], cfg.T_max)
    T2 = _saturate(R @ u[3:6], cfg.T_max)
    return ControlCommand(T_cmd_1=T1, T_cmd_2=T2)


def make_controller(cfg: ControllerConfig):
    """Callback for :func:`spinlift.dynamics.simulate` bound to one config."""
    def controller(state: SystemState) -> ControlCommand:
        return control_step(state, cfg, state.t)
    return controller


_LOG_HEADER = ("t,T_cmd_1_x,T_cmd_1_y,T_cmd_1_z,"
               "T_cmd_2_x,T_cmd_2_y,T_cmd_2_z,saturated")


def command_log_to_csv(traj: Trajectory, T_max: float) -> str:
    """Command log aligned with trajectory samples; ``saturated`` flags ticks
    whose commanded magnitude sits at the saturation limit."""
    lines = [_LOG_HEADER]
    for i in range(len(traj)):
        u = traj.commands[i]
        n1 = math.hypot(u[0], u[1], u[2])
        n2 = math.hypot(u[3], u[4], u[5])
        saturated = int(n1 >= T_max - 1e-9 or n2 >= T_max - 1e-9)
        vals = ",".join(repr(float(v)) for v in (traj.t[i], *u))
        lines.append(f"{vals},{saturated}")
    return "\n".join(lines) + "\n"
