"""CLFN / DLFN simulation.

Continuous time integrates ``x' = -L_B x + delta*u0`` with fixed-step RK4;
discrete time iterates ``x(k+1) = P x(k) + q u0``.  Both run internally on the
deviation ``e = x - u0*1``.  Under a homogeneous input ``L_B 1 = delta`` and
``P 1 + q = 1``, so the deviation obeys ``e' = -L_B e`` (resp.
``e(k+1) = P e(k)``) and the recorded rates keep full relative precision
long after the states themselves round to ``u0``.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .graph import DirectedNetwork, LeaderProfile, LeaderSchedule, NetworkError
from .spectral import build_perturbed_laplacian, build_perturbed_stochastic

DEFAULT_SEED = 2021
DEFAULT_H = 0.01
STABILITY_LIMIT = 0.5


def default_x0(n: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Uniform random initial state in [0, 1]^n."""
    return np.random.default_rng(seed).uniform(0.0, 1.0, size=n)


def rk4_step(f, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_propagator(A: np.ndarray, h: float) -> np.ndarray:
    """Matrix R with ``rk4_step(lambda y: A @ y, y, h) == R @ y`` (4th-order Taylor of exp(hA))."""
    hA = h * A
    I = np.eye(A.shape[0])
    return I + hA @ (I + hA @ (I / 2 + hA @ (I / 6 + hA / 24)))


@dataclass
class Trajectory:
    """Sampled states and rates.  Discrete rates at k = 0 are NaN."""

    times: np.ndarray
    states: np.ndarray
    rates: np.ndarray
    segment: np.ndarray
    schedule: LeaderSchedule
    mode: str

    @property
    def n(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def profile(self, index: int) -> LeaderProfile:
        return self.schedule.segments[int(self.segment[index])][2]

    def deviation(self) -> np.ndarray:
        """max_i |x_i - u0| per sample, against the active input level."""
        u = np.array([self.schedule.segments[s][2].input_value for s in self.segment])
        return np.max(np.abs(self.states - u[:, None]), axis=1)

    def to_csv(self, path: str | os.PathLike) -> None:
        n = self.n
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{i}" for i in range(1, n + 1)] + [f"dx{i}" for i in range(1, n + 1)])
            for t, x, r in zip(self.times, self.states, self.rates):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in x] + [repr(float(v)) for v in r])


class ClfnStepper:
    """Fixed-step RK4 on one leader profile at a time; state carries across switches."""

    def __init__(self, net: DirectedNetwork, profile: LeaderProfile, x0, h: float = DEFAULT_H):
        if not h > 0:
            raise NetworkError("step size must be positive")
        self.net = net
        self.h = float(h)
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (net.n,):
            raise NetworkError(f"x0 has shape {x0.shape}, expected ({net.n},)")
        self.k = 0
        self._e = None
        self.switch(profile, x0)

    def switch(self, profile: LeaderProfile, x=None, net: DirectedNetwork | None = None) -> None:
        x = self.x if x is None else x
        self.net = self.net if net is None else net
        LB = build_perturbed_laplacian(self.net, profile, strict=False).matrix
        if self.h * np.max(np.diag(LB)) > STABILITY_LIMIT:
            raise NetworkError(
                f"step h={self.h} too large: h*max diag(L_B) = {self.h * np.max(np.diag(LB)):.3g} > {STABILITY_LIMIT}"
            )
        self.profile = profile
        self.u0 = profile.input_value
        self.LB = LB
        self._R = rk4_propagator(-LB, self.h)
        self._e = x - self.u0

    @property
    def x(self) -> np.ndarray:
        return self._e + self.u0

    @property
    def rate(self) -> np.ndarray:
        return -self.LB @ self._e

    @property
    def t(self) -> float:
        return self.k * self.h

    def step(self) -> None:
        self._e = self._R @ self._e
        self.k += 1


class DlfnStepper:
    """Exact DLFN iteration; ``dx`` is x(k) - x(k-1), undefined (NaN) at k = 0."""

    def __init__(self, net: DirectedNetwork, profile: LeaderProfile, x0):
        self.net = net
        x0 = np.asarray(x0, dtype=float)
        if x0.shape != (net.n,):
            raise NetworkError(f"x0 has shape {x0.shape}, expected ({net.n},)")
        self.k = 0
        self.dx = np.full(net.n, np.nan)
        self._fresh = True
        self._e = None
        self.switch(profile, x0)

    def switch(self, profile: LeaderProfile, x=None, net: DirectedNetwork | None = None) -> None:
        x = self.x if x is None else x
        self.net = self.net if net is None else net
        self.P = build_perturbed_stochastic(self.net, profile, strict=False).matrix
        self.profile = profile
        self.u0 = profile.input_value
        self._e = x - self.u0
        self._fresh = True

    @property
    def x(self) -> np.ndarray:
        return self._e + self.u0

    def step(self) -> None:
        e_next = self.P @ self._e
        if self._fresh:
            self.dx = e_next - self._e
            self._fresh = False
        else:
            # dx(k+1) = P dx(k) while the profile is fixed; avoids cancellation
            self.dx = self.P @ self.dx
        self._e = e_next
        self.k += 1


def _grid_steps(a: float, b: float, h: float) -> int:
    steps = (b - a) / h
    k = int(round(steps))
    if abs(steps - k) > 1e-6:
        raise NetworkError(f"segment [{a}, {b}] is not a whole number of steps of size {h}")
    return k


def _segment_networks(net, networks, count: int) -> list[DirectedNetwork]:
    if networks is None:
        return [net] * count
    networks = list(networks)
    if len(networks) != count:
        raise NetworkError(f"got {len(networks)} networks for {count} schedule segments")
    return networks


def simulate_clfn(
    net: DirectedNetwork,
    schedule: LeaderSchedule | LeaderProfile,
    x0=None,
    h: float = DEFAULT_H,
    t_end: float | None = None,
    networks=None,
) -> Trajectory:
    """``networks`` optionally gives one network per schedule segment (e.g. per-segment FSNs)."""
    if isinstance(schedule, LeaderProfile):
        if t_end is None:
            raise NetworkError("t_end required with a single leader profile")
        schedule = LeaderSchedule.constant(schedule, t_end)
    t_end = schedule.t_end if t_end is None else float(t_end)
    if not schedule.covers(schedule.t_start, t_end) or t_end <= schedule.t_start:
        raise NetworkError(f"schedule does not cover [{schedule.t_start}, {t_end}]")
    if x0 is None:
        x0 = default_x0(net.n)
    segs = schedule.segments
    nets = _segment_networks(net, networks, len(segs))
    stepper = ClfnStepper(nets[0], segs[0][2], x0, h)
    t0 = schedule.t_start
    total = _grid_steps(t0, t_end, h)
    bounds = [_grid_steps(t0, b, h) for _, b, _ in segs]

    times = t0 + h * np.arange(total + 1)
    states = np.empty((total + 1, net.n))
    rates = np.empty((total + 1, net.n))
    segment = np.empty(total + 1, dtype=int)
    seg = 0
    for k in range(total + 1):
        # a boundary sample belongs to the later segment
        while seg + 1 < len(segs) and k >= bounds[seg]:
            seg += 1
            stepper.switch(segs[seg][2], net=nets[seg])
        states[k] = stepper.x
        rates[k] = stepper.rate
        segment[k] = seg
        if k < total:
            stepper.step()
    return Trajectory(times, states, rates, segment, schedule, "continuous")


def simulate_dlfn(
    net: DirectedNetwork,
    schedule: LeaderSchedule | LeaderProfile,
    x0=None,
    k_end: int | None = None,
    auto_self_loops: bool = False,
    networks=None,
) -> Trajectory:
    if auto_self_loops:
        net = net.with_self_loops()
        if networks is not None:
            networks = [g.with_self_loops() for g in networks]
    if isinstance(schedule, LeaderProfile):
        if k_end is None:
            raise NetworkError("k_end required with a single leader profile")
        schedule = LeaderSchedule.constant(schedule, k_end)
    k_end = int(schedule.t_end if k_end is None else k_end)
    for a, b, _ in schedule.segments:
        if a != int(a) or b != int(b):
            raise NetworkError("discrete schedule boundaries must be integers")
    if not schedule.covers(schedule.t_start, k_end):
        raise NetworkError(f"schedule does not cover [{schedule.t_start}, {k_end}]")
    if x0 is None:
        x0 = default_x0(net.n)
    segs = schedule.segments
    nets = _segment_networks(net, networks, len(segs))
    k0 = int(schedule.t_start)
    stepper = DlfnStepper(nets[0], segs[0][2], x0)
    total = k_end - k0
    times = np.arange(k0, k_end + 1, dtype=float)
    states = np.empty((total + 1, net.n))
    rates = np.empty((total + 1, net.n))
    segment = np.empty(total + 1, dtype=int)
    seg = 0
    states[0], rates[0], segment[0] = stepper.x, stepper.dx, 0
    for k in range(1, total + 1):
        # x(k) is produced by the profile active on step k-1 -> k
        stepper.step()
        states[k], rates[k], segment[k] = stepper.x, stepper.dx, seg
        while seg + 1 < len(segs) and k0 + k >= segs[seg][1]:
            seg += 1
            stepper.switch(segs[seg][2], net=nets[seg])
            segment[k] = seg
    return Trajectory(times, states, rates, segment, schedule, "discrete")


def settling_index(traj: Trajectory, band: float = 1e-3) -> int | None:
    """First sample from which max_i |x_i - u0| stays below ``band``."""
    inside = traj.deviation() < band
    if not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    return 0 if outside.size == 0 else int(outside[-1]) + 1


def settling_time(traj: Trajectory, band: float = 1e-3) -> float | None:
    idx = settling_index(traj, band)
    return None if idx is None else float(traj.times[idx])
