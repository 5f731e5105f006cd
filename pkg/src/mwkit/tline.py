"""Transmission-line primitives: propagation constants, terminated-line
impedances, standing-wave quantities, quarter-wave design, lossy power flow,
parallel-plate parameters and Smith-chart mappings.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import C0, EPS0, ETA0, MU0, DomainError

#: Marker for an ideal open circuit / infinite impedance.
OPEN_CIRCUIT = complex(math.inf, 0.0)


def is_open(z) -> bool:
    """True when z is the infinite-impedance (ideal open) marker."""
    zc = complex(z)
    return math.isinf(zc.real) or math.isinf(zc.imag)


@dataclass(frozen=True)
class TLineSpec:
    """A line given either per-unit-length RLGC or as (gamma, z0).

    Exactly one parameterization must be supplied. ``length`` is optional and
    only used by operations that need a physical length default.
    """

    r: float | None = None      # ohm/m
    l: float | None = None      # H/m
    g: float | None = None      # S/m
    c: float | None = None      # F/m
    gamma: complex | None = None  # 1/m
    z0: complex | None = None     # ohm
    length: float | None = None   # m

    @property
    def is_rlgc(self) -> bool:
        return self.l is not None

    def __post_init__(self):
        if self.is_rlgc:
            if self.l is None or self.c is None or self.l <= 0 or self.c <= 0:
                raise DomainError("RLGC line needs L > 0 and C > 0")
            if (self.r or 0.0) < 0 or (self.g or 0.0) < 0:
                raise DomainError("R and G must be >= 0")
        else:
            if self.gamma is None or self.z0 is None:
                raise DomainError("line needs either RLGC or (gamma, z0)")
            if self.gamma.real < 0 or complex(self.z0).real <= 0:
                raise DomainError("need Re(gamma) >= 0 and Re(z0) > 0")

    def modal(self, freq: float | None = None):
        """Return (gamma, z0), deriving them from RLGC at ``freq`` if needed."""
        if not self.is_rlgc:
            return complex(self.gamma), complex(self.z0)
        if freq is None:
            raise DomainError("RLGC line needs a frequency to derive (gamma, z0)")
        res = propagation_from_rlgc(self, freq)
        return res["gamma"], res["z0"]


@dataclass(frozen=True)
class Termination:
    """Load impedance; use OPEN_CIRCUIT for an ideal open."""

    z_load: complex

    def __post_init__(self):
        if not is_open(self.z_load) and complex(self.z_load).real < 0:
            raise DomainError("passive load needs Re(z_load) >= 0")


@dataclass(frozen=True)
class SmithPoint:
    """Reflection coefficient and the matching normalized impedance."""

    gamma: complex
    z_norm: complex


def propagation_from_rlgc(spec: TLineSpec, freq: float) -> dict:
    """gamma = sqrt((R+jwL)(G+jwC)) on the Im(gamma) > 0 branch, plus Z0,
    wavelength and phase velocity."""
    if not spec.is_rlgc:
        raise DomainError("propagation_from_rlgc needs an RLGC spec")
    if freq <= 0:
        raise DomainError("frequency must be > 0")
    w = 2 * math.pi * freq
    zs = (spec.r or 0.0) + 1j * w * spec.l
    yp = (spec.g or 0.0) + 1j * w * spec.c
    gamma = cmath.sqrt(zs * yp)
    if gamma.imag < 0:
        gamma = -gamma
    if spec.r in (None, 0.0) and spec.g in (None, 0.0):
        # exact lossless values, avoiding a stray tiny real part
        beta = w * math.sqrt(spec.l * spec.c)
        gamma = 1j * beta
        z0 = complex(math.sqrt(spec.l / spec.c))
    else:
        z0 = zs / gamma
    beta = gamma.imag
    return {
        "gamma": gamma,
        "z0": z0,
        "wavelength": 2 * math.pi / beta,
        "phase_velocity": w / beta,
    }


def input_impedance(spec: TLineSpec, term: Termination, length: float,
                    freq: float | None = None) -> complex:
    """Input impedance of a terminated line of the given length.

    Uses Z0 (ZL + Z0 tanh(gamma l)) / (Z0 + ZL tanh(gamma l)); for a lossless
    line tanh(j beta l) = j tan(beta l) so this reduces to the familiar form.
    An exact quarter-wave short (tan pole) returns the OPEN_CIRCUIT marker.
    """
    if length < 0:
        raise DomainError("line length must be >= 0")
    gamma, z0 = spec.modal(freq)
    th = gamma * length
    zl = term.z_load
    if gamma.real == 0.0:
        # lossless: handle the tan(beta l) pole exactly
        t = math.tan(th.imag)
        if is_open(zl):
            if abs(t) < 1e-15:
                return OPEN_CIRCUIT
            return z0 / (1j * t)
        if abs(t) > 1e15:
            if abs(zl) < 1e-12 * abs(z0):
                return OPEN_CIRCUIT
            return z0 * z0 / zl
        num = zl + 1j * z0 * t
        den = z0 + 1j * zl * t
    else:
        t = cmath.tanh(th)
        if is_open(zl):
            num, den = 1.0 + 0j, t
        else:
            num = zl + z0 * t
            den = z0 + zl * t
    if abs(den) == 0.0:
        return OPEN_CIRCUIT
    return z0 * num / den


def reflection_quantities(z_in: complex, z_ref: complex) -> dict:
    """Reflection coefficient plus VSWR, return loss, transmission coefficient
    and insertion loss of the transition z_ref -> z_in."""
    z_ref = complex(z_ref)
    if z_ref.real <= 0:
        raise DomainError("reference impedance needs Re > 0")
    if is_open(z_in):
        gamma = 1.0 + 0j
        t = 2.0 + 0j
    else:
        gamma = (z_in - z_ref) / (z_in + z_ref)
        t = 2 * z_in / (z_in + z_ref)
    ag = abs(gamma)
    vswr = math.inf if ag >= 1.0 - 1e-15 else (1 + ag) / (1 - ag)
    rl_db = math.inf if ag == 0.0 else -20 * math.log10(ag)
    if abs(t) == 0.0 or is_open(z_in) or complex(z_in).real <= 0:
        il_db = math.inf if abs(t) == 0.0 else math.nan
    else:
        il_db = -20 * math.log10(abs(t)) + \
            10 * (math.log10(complex(z_in).real) - math.log10(z_ref.real))
    return {
        "gamma": gamma,
        "vswr": vswr,
        "return_loss_db": rl_db,
        "transmission_t": t,
        "insertion_loss_db": il_db,
    }


def gamma_at_distance(gamma_load: complex, gamma_prop: complex, length: float) -> complex:
    """Reflection coefficient seen a distance l in front of the load:
    Gamma(-l) = Gamma_L exp(-2 gamma l)."""
    if length < 0:
        raise DomainError("distance must be >= 0")
    return gamma_load * cmath.exp(-2.0 * gamma_prop * length)


def quarter_wave_design(r_load: float, z0_system: float) -> dict:
    """Quarter-wave transformer Z1 = sqrt(Z0 R_L) with its |Gamma|(f/f0) sweep."""
    if isinstance(r_load, complex) and r_load.imag != 0:
        raise DomainError("quarter-wave transformer handles resistive loads only; "
                          "pre-match complex loads first")
    r_load = float(r_load if not isinstance(r_load, complex) else r_load.real)
    if r_load <= 0 or z0_system <= 0:
        raise DomainError("impedances must be > 0")
    z1 = math.sqrt(z0_system * r_load)

    def gamma_mag(f_norm: float) -> float:
        bl = 0.5 * math.pi * f_norm
        t = math.tan(bl)
        if abs(t) > 1e15:
            z_in = z1 * z1 / r_load
        else:
            z_in = z1 * (r_load + 1j * z1 * t) / (z1 + 1j * r_load * t)
        return abs((z_in - z0_system) / (z_in + z0_system))

    return {"z1": z1, "gamma_vs_freq": gamma_mag}


def lossy_power_flow(spec: TLineSpec, term: Termination, length: float,
                     v0_plus: float, freq: float | None = None) -> dict:
    """Powers on a lossy terminated line (Z0 treated as real, low-loss form):
    P_in at z=-l, P_load at z=0 and P_loss = P_in - P_load."""
    gamma, z0 = spec.modal(freq)
    z0r = z0.real
    alpha = gamma.real
    if is_open(term.z_load):
        refl = 1.0
    else:
        refl = abs((term.z_load - z0r) / (term.z_load + z0r))
    scale = abs(v0_plus) ** 2 / (2 * z0r)
    p_in = scale * (math.exp(2 * alpha * length) - refl**2 * math.exp(-2 * alpha * length))
    p_load = scale * (1 - refl**2)
    return {"p_in": p_in, "p_load": p_load, "p_loss": p_in - p_load}


def parallel_plate_params(width_w: float, height_d: float, eps_r: float, freq: float) -> dict:
    """Parallel-plate line: Z0 = eta d / w, per-unit-length L and C, beta and
    the field amplitudes for a given line voltage V0."""
    if width_w <= 0 or height_d <= 0 or eps_r <= 0 or freq <= 0:
        raise DomainError("dimensions, permittivity and frequency must be > 0")
    if width_w < 10 * height_d:
        warnings.warn("parallel-plate model assumes w >> d; w < 10 d here",
                      stacklevel=2)
    eps = eps_r * EPS0
    eta = math.sqrt(MU0 / eps)
    w = 2 * math.pi * freq
    lpul = MU0 * height_d / width_w
    cpul = eps * width_w / height_d
    return {
        "z0": eta * height_d / width_w,
        "l_per_m": lpul,
        "c_per_m": cpul,
        "beta": w * math.sqrt(eps * MU0),
        "phase_velocity": 1.0 / math.sqrt(lpul * cpul),
        "e_field": lambda v0: v0 / height_d,
        "h_field": lambda v0: v0 / (eta * height_d),
    }


def smith_map(z: complex | None = None, gamma: complex | None = None,
              z_ref: complex = 50.0) -> SmithPoint:
    """Map an impedance to the Gamma plane (or back) at the given reference."""
    z_ref = complex(z_ref)
    if z_ref.real <= 0:
        raise DomainError("reference impedance needs Re > 0")
    if (z is None) == (gamma is None):
        raise DomainError("give exactly one of z or gamma")
    if z is not None:
        if is_open(z):
            return SmithPoint(1.0 + 0j, OPEN_CIRCUIT)
        zn = z / z_ref
        return SmithPoint((zn - 1) / (zn + 1), zn)
    if abs(1 - gamma) < 1e-300:
        return SmithPoint(gamma, OPEN_CIRCUIT)
    return SmithPoint(gamma, (1 + gamma) / (1 - gamma))


def constant_circle(kind: str, value: float) -> dict:
    """Constant-resistance/-reactance/-VSWR circle in the Gamma plane."""
    if kind == "resistance":
        if value < 0:
            raise DomainError("resistance circles need r >= 0")
        return {"center": complex(value / (1 + value), 0.0), "radius": 1.0 / (1 + value)}
    if kind == "reactance":
        if value == 0:
            # degenerate: the real axis
            return {"center": complex(1.0, math.inf), "radius": math.inf}
        return {"center": complex(1.0, 1.0 / value), "radius": abs(1.0 / value)}
    if kind == "vswr":
        if value < 1:
            raise DomainError("VSWR circles need s >= 1")
        return {"center": 0j, "radius": (value - 1) / (value + 1)}
    raise DomainError(f"unknown circle kind {kind!r}")


def wavelength(freq: float, eps_r: float = 1.0) -> float:
    """Free-space (or dielectric-filled) wavelength."""
    if freq <= 0:
        raise DomainError("frequency must be > 0")
    return C0 / (freq * math.sqrt(eps_r))
