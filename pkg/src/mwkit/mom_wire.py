"""Method-of-Moments solver for a center-fed cylindrical wire dipole:
Pocklington kernel with piece-wise constant sub-domain bases, delta-gap
excitation, Toeplitz impedance-matrix fill, solve, input impedance and far
fields from the solved current.

Expansion currents live on the wire surface (rho = a); testing happens on the
axis (rho = 0), which keeps the kernel regular without self-term extraction.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import (C0, ETA0, DomainError, ConvergenceError, QuadratureSpec,
                       integrate_adaptive, solve_complex_dense)
from .radiator import FarFieldSample


@dataclass(frozen=True)
class WireProblem:
    half_length_l: float
    radius_a: float
    freq: float
    n_segments: int
    feed_segment_index: int | None = None  # default: center segment
    v_gap: complex = 1.0 + 0j
    collocation: bool = False  # True: 1-point testing instead of sub-domain integration

    def __post_init__(self):
        if self.half_length_l <= 0 or self.radius_a <= 0 or self.freq <= 0:
            raise DomainError("dimensions and frequency must be > 0")
        if self.n_segments < 3 or self.n_segments % 2 == 0:
            raise DomainError("n_segments must be odd and >= 3 so a segment "
                              "center sits at the feed (z = 0)")
        lam = C0 / self.freq
        if 2 * self.radius_a > lam / 100.0:
            warnings.warn("thin-wire kernel assumes diameter < lambda0/100",
                          stacklevel=2)

    @property
    def wavelength(self) -> float:
        return C0 / self.freq

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def feed_index(self) -> int:
        return self.n_segments // 2 if self.feed_segment_index is None \
            else self.feed_segment_index


@dataclass(frozen=True)
class WireMesh:
    boundaries: np.ndarray
    centers: np.ndarray

    @property
    def delta(self) -> float:
        return float(self.boundaries[1] - self.boundaries[0])


@dataclass(frozen=True)
class MoMSolution:
    problem: WireProblem
    currents: np.ndarray       # mode coefficients I_n [A]
    z_in: complex              # V_gap / I_feed [ohm]
    segment_centers: np.ndarray


def segment_wire(problem: WireProblem) -> WireMesh:
    """Uniform mesh of n_segments over [-l, l]."""
    bounds = np.linspace(-problem.half_length_l, problem.half_length_l,
                         problem.n_segments + 1)
    centers = 0.5 * (bounds[:-1] + bounds[1:])
    return WireMesh(boundaries=bounds, centers=centers)


def _kernel(u: np.ndarray, a: float, k0: float) -> np.ndarray:
    """Pocklington integrand: -j eta/(4 pi k0) e^{-jk0R}
    [(1+jk0R)(2R^2-3a^2) + (k0 a R)^2] / R^5 with R = sqrt(a^2 + u^2).

    The double z-derivative of the Green function has been carried out
    analytically; u = z - z0.
    """
    r = np.sqrt(a * a + u * u)
    return (-1j * ETA0 / (4 * math.pi * k0)) * np.exp(-1j * k0 * r) * \
        ((1 + 1j * k0 * r) * (2 * r * r - 3 * a * a) + (k0 * a * r) ** 2) / r**5


def _entry(problem: WireProblem, mesh: WireMesh, offset: int,
           spec: QuadratureSpec) -> complex:
    """One Toeplitz entry Z_{m,n} for |m - n| = offset."""
    d = mesh.delta
    a, k0 = problem.radius_a, problem.k0
    zc = offset * d  # test-center to source-center distance

    def source_integral(z_test: float) -> complex:
        lo = zc - 0.5 * d - z_test
        hi = zc + 0.5 * d - z_test
        val, _ = integrate_adaptive(lambda u: _kernel(np.asarray(u), a, k0),
                                    lo, hi, spec)
        return val

    if problem.collocation:
        return source_integral(0.0) * d
    val, _ = integrate_adaptive(source_integral, -0.5 * d, 0.5 * d, spec)
    return val


def fill_impedance_matrix(problem: WireProblem, mesh: WireMesh,
                          spec: QuadratureSpec | None = None) -> np.ndarray:
    """Symmetric Toeplitz MoM matrix; only the first row is computed."""
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-9, max_subdivisions=2000)
    n = problem.n_segments
    row = np.empty(n, dtype=complex)
    for off in range(n):
        try:
            row[off] = _entry(problem, mesh, off, spec)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"matrix fill failed to converge at offset {off} "
                f"(entries (m, n) with |m-n| = {off})",
                estimate=exc.estimate, error=exc.error) from exc
    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    return row[idx]


def excitation_vector(problem: WireProblem, mesh: WireMesh) -> np.ndarray:
    """Delta-gap excitation: a single nonzero entry v_gap at the feed segment."""
    n = problem.n_segments
    i = problem.feed_index
    if not (0 <= i < n):
        raise DomainError(f"feed index {i} outside 0..{n - 1}")
    v = np.zeros(n, dtype=complex)
    v[i] = problem.v_gap
    return v


def solve_currents(problem: WireProblem, spec: QuadratureSpec | None = None) -> MoMSolution:
    """Assemble and solve [Z][I] + [V] = 0; input impedance is V_gap/I_feed."""
    mesh = segment_wire(problem)
    z = fill_impedance_matrix(problem, mesh, spec)
    v = excitation_vector(problem, mesh)
    currents = solve_complex_dense(z, -v)
    i_feed = currents[problem.feed_index]
    return MoMSolution(problem=problem, currents=currents,
                       z_in=problem.v_gap / i_feed,
                       segment_centers=mesh.centers)


def mom_far_field(solution: MoMSolution, theta) -> FarFieldSample:
    """E_theta angular factor radiated by the solved PWC current (z-directed).

    Each segment contributes delta * sinc(k0 delta cos(theta)/2)
    * exp(j k0 z_n cos(theta)).
    """
    prob = solution.problem
    k0 = prob.k0
    theta = np.asarray(theta, dtype=float)
    mesh_delta = solution.segment_centers[1] - solution.segment_centers[0] \
        if len(solution.segment_centers) > 1 else 2 * prob.half_length_l
    ct = np.cos(theta)
    arg = 0.5 * k0 * mesh_delta * ct
    seg = mesh_delta * np.sinc(arg / math.pi)
    phases = np.exp(1j * k0 * np.multiply.outer(ct, solution.segment_centers))
    total = phases @ solution.currents * seg
    e_theta = 1j * k0 * ETA0 / (4 * math.pi) * np.sin(theta) * total
    return FarFieldSample(e_theta=e_theta, e_phi=np.zeros_like(np.asarray(e_theta)))


def radiated_power(solution: MoMSolution, n_theta: int = 721) -> float:
    """Total power radiated by the solved current, from the far field."""
    th = np.linspace(0.0, math.pi, n_theta)
    e = mom_far_field(solution, th).e_theta
    integrand = np.abs(e) ** 2 * np.sin(th)
    return 2 * math.pi * np.trapezoid(integrand, th) / (2 * ETA0)


def input_power(solution: MoMSolution) -> float:
    """Power accepted at the delta gap, Re(V I*)/2."""
    i_feed = solution.currents[solution.problem.feed_index]
    return 0.5 * (solution.problem.v_gap * np.conj(i_feed)).real


def convergence_report(problem: WireProblem, n_sequence) -> list:
    """z_in versus segment count for an ascending odd-N sequence."""
    ns = list(n_sequence)
    if any(n % 2 == 0 for n in ns) or ns != sorted(ns):
        raise DomainError("n_sequence must be ascending odd integers")
    rows = []
    prev = None
    for n in ns:
        p = WireProblem(half_length_l=problem.half_length_l,
                        radius_a=problem.radius_a, freq=problem.freq,
                        n_segments=n, v_gap=problem.v_gap,
                        collocation=problem.collocation)
        sol = solve_currents(p)
        delta = None if prev is None else abs(sol.z_in - prev)
        rows.append({"n_segments": n, "z_in": sol.z_in, "delta_z_in": delta})
        prev = sol.z_in
    return rows
