"""Equilibrium operating points and the momentum-theory power model.

For a tether angle beta and control-frame spin rate omega_C, the planar force
balance of one vehicle (tension F pulling it toward the payload, thrust T at
tilt phi from vertical, circular motion at radius ell*sin(beta)) gives

    F         = m_p * g / (2 cos beta)
    T cos phi = m_p * g / 2 + m_q * g
    T sin phi = sin(beta) * (F - m_q * omega_C^2 * ell)

The spin rate that zeroes the horizontal thrust component is

    omega_star = sqrt(m_p * g / (2 m_q * ell * cos beta))

at which the thrust is purely vertical and independent of beta. Hover power
per vehicle follows the actuator-disk relation P = T^{3/2} / (r_p *
sqrt(2 pi rho N_p)) with thrust shared equally by the N_p propellers; this
relation strictly applies to a non-translating rotor and is extended here
unchanged to the slowly translating rotating case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ControlCommand, EquilibriumSpec, SystemParams, SystemState, vec3

__all__ = [
    "SingularityError",
    "PowerReport",
    "SweepResult",
    "tension_at_equilibrium",
    "thrust_magnitude",
    "omega_star",
    "tilt_angle",
    "power",
    "build_equilibrium",
    "sweep_beta",
    "sweep_omega",
    "sweep_to_csv",
    "DEFAULT_PAYLOAD_POSITION",
]

DEFAULT_PAYLOAD_POSITION = (0.0, 0.0, 1.5)


class SingularityError(ValueError):
    """Tether angle at or beyond 90 degrees: equilibrium tension diverges."""


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not (0.0 <= beta < math.pi / 2):
        raise SingularityError(
            f"beta must be in [0, pi/2) rad, got {beta!r} (tension diverges at pi/2)")
    return beta


def tension_at_equilibrium(beta: float, params: SystemParams) -> float:
    """Equilibrium tether tension m_p*g / (2 cos beta) [N]."""
    beta = _check_beta(beta)
    return params.m_p * params.g / (2.0 * math.cos(beta))


def omega_star(beta: float, params: SystemParams) -> float:
    """Spin rate making the required thrust purely vertical [rad/s].

    Well-defined at beta = 0 too, where the horizontal term already vanishes
    for every spin rate.
    """
    beta = _check_beta(beta)
    return math.sqrt(params.m_p * params.g / (2.0 * params.m_q * params.ell * math.cos(beta)))


def _thrust_components(beta: float, omega_c: float, params: SystemParams) -> tuple[float, float]:
    """(horizontal, vertical) components of the required thrust [N]."""
    beta = _check_beta(beta)
    if omega_c < 0.0:
        raise ValueError(f"omega_C must be nonnegative, got {omega_c}")
    tension = params.m_p * params.g / (2.0 * math.cos(beta))
    horizontal = math.sin(beta) * (tension - params.m_q * omega_c ** 2 * params.ell)
    vertical = params.m_p * params.g / 2.0 + params.m_q * params.g
    return horizontal, vertical


def thrust_magnitude(beta: float, omega_c: float, params: SystemParams) -> float:
    """Thrust magnitude per vehicle required to hold the operating point [N]."""
    horizontal, vertical = _thrust_components(beta, omega_c, params)
    return math.hypot(vertical, horizontal)


def tilt_angle(beta: float, omega_c: float, params: SystemParams) -> float:
    """Thrust tilt from vertical [rad]; positive tilts outward, away from the
    spin axis. Zero at omega_star, negative (inward) beyond it."""
    horizontal, vertical = _thrust_components(beta, omega_c, params)
    return math.atan2(horizontal, vertical)


@dataclass(frozen=True)
class PowerReport:
    """Hover power at one operating point (both vehicles identical)."""

    T_per_vehicle: float  # [N]
    P_per_vehicle: float  # [W]
    P_total: float        # [W], both vehicles
    beta: float           # [rad]
    omega_C: float        # [rad/s]


def power(T_per_vehicle: float, params: SystemParams,
          beta: float = math.nan, omega_c: float = math.nan) -> PowerReport:
    """Actuator-disk hover power for one vehicle's thrust, and the pair total.

    ``beta``/``omega_c`` are carried through for reporting; they do not enter
    the power relation.
    """
    T = float(T_per_vehicle)
    if not T >= 0.0:
        raise ValueError(f"thrust must be nonnegative, got {T}")
    denom = params.r_p * math.sqrt(2.0 * math.pi * params.rho * params.N_p)
    p_vehicle = T ** 1.5 / denom
    return PowerReport(T_per_vehicle=T, P_per_vehicle=p_vehicle,
                       P_total=2.0 * p_vehicle, beta=beta, omega_C=omega_c)


def build_equilibrium(beta: float, omega_c: float, params: SystemParams,
                      payload_position=DEFAULT_PAYLOAD_POSITION,
                      ) -> tuple[EquilibriumSpec, SystemState, ControlCommand]:
    """Construct the full equilibrium triple for one operating point.

    The spin axis is vertical through ``payload_position`` (the control-frame
    origin). Vehicles sit at the stretched tether length ell + F/k_T so the
    spring carries exactly the equilibrium tension, and the feedforward
    thrust uses the centripetal term at that stretched radius, making the
    returned state an exact fixed point of the truth dynamics (the rigid
    rest-length value differs by ~0.15% at default stiffness). theta = 0, so
    control-frame and earth-frame components coincide.
    """
    beta = _check_beta(beta)
    if omega_c < 0.0:
        raise ValueError(f"omega_C must be nonnegative, got {omega_c}")
    tension = params.m_p * params.g / (2.0 * math.cos(beta))
    ell_stretched = params.ell + tension / params.k_T
    sin_b, cos_b = math.sin(beta), math.cos(beta)

    horizontal = sin_b * (tension - params.m_q * omega_c ** 2 * ell_stretched)
    vertical = params.m_p * params.g / 2.0 + params.m_q * params.g
    T1 = vec3(horizontal, 0.0, vertical)
    T2 = vec3(-horizontal, 0.0, vertical)

    spec = EquilibriumSpec(
        beta=beta,
        omega_C=float(omega_c),
        F_bar=tension,
        T_bar_1=T1,
        T_bar_2=T2,
        tilt=tilt_angle(beta, omega_c, params),
        v_tangential=omega_c * params.ell * sin_b,
    )

    origin = vec3(*payload_position)
    offset = vec3(ell_stretched * sin_b, 0.0, ell_stretched * cos_b)
    x_1 = origin + offset
    x_2 = origin + vec3(-offset[0], 0.0, offset[2])
    # circular motion about the vertical axis: v = omega x r
    v_1 = vec3(0.0, omega_c * offset[0], 0.0)
    v_2 = -v_1

    state = SystemState(
        x_p=origin, v_p=vec3(0.0, 0.0, 0.0),
        x_1=x_1, v_1=v_1, x_2=x_2, v_2=v_2,
        T_act_1=T1.copy(), T_act_2=T2.copy(),
        theta=0.0, t=0.0,
    )
    cmd = ControlCommand(T_cmd_1=T1.copy(), T_cmd_2=T2.copy())
    return spec, state, cmd


@dataclass(frozen=True)
class SweepResult:
    """Per-point power reports plus any per-point failures (value, message)."""

    reports: list[PowerReport]
    failures: list[tuple[float, str]]


def sweep_beta(beta_grid, mode: str, params: SystemParams) -> SweepResult:
    """Evaluate the power model over a tether-angle grid.

    ``mode`` is ``"static"`` (omega_C = 0) or ``"rotating_opt"`` (omega_C =
    omega_star(beta)). Singular grid points are recorded as failures and the
    sweep continues.
    """
    if mode not in ("static", "rotating_opt"):
        raise ValueError(f"mode must be 'static' or 'rotating_opt', got {mode!r}")
    reports: list[PowerReport] = []
    failures: list[tuple[float, str]] = []
    for beta in beta_grid:
        try:
            w = 0.0 if mode == "static" else omega_star(beta, params)
            T = thrust_magnitude(beta, w, params)
            reports.append(power(T, params, beta=float(beta), omega_c=w))
        except (SingularityError, ValueError) as exc:
            failures.append((float(beta), str(exc)))
    return SweepResult(reports=reports, failures=failures)


def sweep_omega(beta: float, omega_grid, params: SystemParams) -> SweepResult:
    """Evaluate the power model over a spin-rate grid at fixed tether angle."""
    reports: list[PowerReport] = []
    failures: list[tuple[float, str]] = []
    for w in omega_grid:
        try:
            T = thrust_magnitude(beta, float(w), params)
            reports.append(power(T, params, beta=float(beta), omega_c=float(w)))
        except (SingularityError, ValueError) as exc:
            failures.append((float(w), str(exc)))
    return SweepResult(reports=reports, failures=failures)


_SWEEP_HEADER = "beta_deg,omega_rad_s,T_vehicle_N,P_vehicle_W,P_total_W,tilt_deg,tension_N"


def sweep_to_csv(result: SweepResult, params: SystemParams) -> str:
    """CSV for sweep output, one row per successful grid point."""
    lines = [_SWEEP_HEADER]
    for rep in result.reports:
        tilt = tilt_angle(rep.beta, rep.omega_C, params)
        tension = tension_at_equilibrium(rep.beta, params)
        row = (math.degrees(rep.beta), rep.omega_C, rep.T_per_vehicle,
               rep.P_per_vehicle, rep.P_total, math.degrees(tilt), tension)
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
