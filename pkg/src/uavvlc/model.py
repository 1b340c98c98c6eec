"""Domain types and the VLC link budget for the two-UAV network.

All link functions broadcast over numpy arrays, so a single call can
evaluate one UAV against every user at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class NetworkParams:
    """Physical and model constants of the network.

    Angles are stored in degrees so configs round-trip exactly; the
    ``phi_half`` / ``psi_c`` properties give radians.
    """

    area_width: float = 200.0
    area_height: float = 200.0
    uav_height: float = 100.0
    led_power: float = 2e5
    dimming: float = 1.0
    noise_sigma: float = 0.1
    detector_area: float = 10.0
    refractive_index: float = 1.5
    half_power_angle_deg: float = 60.0
    fov_half_angle_deg: float = 60.0
    illum_threshold: float = 0.4
    d2d_range: float = 10.0
    capacity: int = 8
    weight_rate: float = 2.0 / 3.0
    weight_d2d: float = 1.0 / 3.0

    def __post_init__(self):
        positive = (
            "area_width", "area_height", "uav_height", "led_power", "dimming",
            "noise_sigma", "detector_area", "illum_threshold", "d2d_range",
        )
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if self.dimming > 1:
            raise ValueError(f"dimming must lie in (0, 1], got {self.dimming!r}")
        if not self.refractive_index > 1:
            raise ValueError(f"refractive_index must be > 1, got {self.refractive_index!r}")
        for name in ("half_power_angle_deg", "fov_half_angle_deg"):
            value = getattr(self, name)
            if not 0 < value < 90:
                raise ValueError(f"{name} must lie strictly inside (0, 90), got {value!r}")
        if isinstance(self.capacity, bool) or int(self.capacity) != self.capacity or self.capacity < 1:
            raise ValueError(f"capacity must be a positive integer, got {self.capacity!r}")
        for name in ("weight_rate", "weight_d2d"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if abs(self.weight_rate + self.weight_d2d - 1) > 1e-12:
            raise ValueError(
                f"weights must sum to 1, got a={self.weight_rate!r} b={self.weight_d2d!r}"
            )

    @property
    def phi_half(self) -> float:
        return math.radians(self.half_power_angle_deg)

    @property
    def psi_c(self) -> float:
        return math.radians(self.fov_half_angle_deg)

    @property
    def m(self) -> float:
        return lambertian_order(self.phi_half)


@dataclass(frozen=True)
class Placement:
    uav1: Point2
    uav2: Point2

    def __post_init__(self):
        object.__setattr__(self, "uav1", Point2(float(self.uav1[0]), float(self.uav1[1])))
        object.__setattr__(self, "uav2", Point2(float(self.uav2[0]), float(self.uav2[1])))
        if not all(math.isfinite(c) for c in (*self.uav1, *self.uav2)):
            raise ValueError(f"non-finite UAV position in {self}")

    def __getitem__(self, uav: int) -> Point2:
        """UAV position by 1-based index."""
        if uav == 1:
            return self.uav1
        if uav == 2:
            return self.uav2
        raise IndexError(f"UAV index must be 1 or 2, got {uav!r}")

    def replace(self, uav: int, pos) -> Placement:
        if uav == 1:
            return Placement(pos, self.uav2)
        if uav == 2:
            return Placement(self.uav1, pos)
        raise IndexError(f"UAV index must be 1 or 2, got {uav!r}")

    @classmethod
    def corner(cls) -> Placement:
        return cls(Point2(0.0, 0.0), Point2(0.0, 0.0))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Ground users plus the parameters governing them.

    ``users`` is an (N, 2) float array; row index is the user id.
    """

    users: np.ndarray
    params: NetworkParams = field(default_factory=NetworkParams)
    seed: int = 0
    start: Placement = field(default_factory=Placement.corner)

    def __post_init__(self):
        users = np.array(self.users, dtype=float).reshape(-1, 2)
        if len(users) < 1:
            raise ValueError("a scenario needs at least one user")
        if not np.all(np.isfinite(users)):
            raise ValueError("user positions must be finite")
        p = self.params
        inside = (
            (users[:, 0] >= 0) & (users[:, 0] <= p.area_width)
            & (users[:, 1] >= 0) & (users[:, 1] <= p.area_height)
        )
        if not inside.all():
            bad = np.flatnonzero(~inside).tolist()
            raise ValueError(f"users {bad} lie outside the {p.area_width}x{p.area_height} area")
        users.setflags(write=False)
        object.__setattr__(self, "users", users)

    def __len__(self) -> int:
        return len(self.users)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            self.params == other.params and self.seed == other.seed
            and self.start == other.start and np.array_equal(self.users, other.users)
        )

    __hash__ = object.__hash__

    @cached_property
    def distances(self) -> np.ndarray:
        """Pairwise horizontal user-to-user distances."""
        diff = self.users[:, None, :] - self.users[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    @cached_property
    def d2d_neighbors(self) -> np.ndarray:
        """Boolean (N, N) matrix: a D2D link between the pair is in range."""
        near = self.distances < self.params.d2d_range
        np.fill_diagonal(near, False)
        return near


NO_PARENT = -1


@dataclass(frozen=True)
class Association:
    """Per-user serving decision.

    ``uav[n]`` is 1 or 2 when user n is a centroid served by that UAV and 0
    otherwise; ``parent[n]`` is the serving centroid of a D2D user, or -1.
    A well-formed association never sets both for the same user.
    """

    uav: tuple[int, ...]
    parent: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "uav", tuple(int(u) for u in self.uav))
        object.__setattr__(self, "parent", tuple(int(k) for k in self.parent))
        if len(self.uav) != len(self.parent):
            raise ValueError("uav and parent vectors differ in length")

    def __len__(self) -> int:
        return len(self.uav)

    @classmethod
    def empty(cls, n: int) -> Association:
        return cls((0,) * n, (NO_PARENT,) * n)

    def served_by(self, uav: int) -> list[int]:
        return [n for n, u in enumerate(self.uav) if u == uav]

    @property
    def centroids(self) -> list[int]:
        return [n for n, u in enumerate(self.uav) if u]

    @property
    def d2d_users(self) -> list[int]:
        return [n for n, k in enumerate(self.parent) if k != NO_PARENT]

    @property
    def d2d_count(self) -> int:
        return sum(k != NO_PARENT for k in self.parent)

    def tags(self) -> list[str]:
        out = []
        for u, k in zip(self.uav, self.parent):
            if u and k != NO_PARENT:
                out.append(f"uav{u}+d2d:{k}")
            elif u:
                out.append(f"uav{u}")
            elif k != NO_PARENT:
                out.append(f"d2d:{k}")
            else:
                out.append("none")
        return out

    @classmethod
    def from_tags(cls, tags) -> Association:
        uav, parent = [], []
        for tag in tags:
            u, k = 0, NO_PARENT
            for part in str(tag).split("+"):
                if part in ("uav1", "uav2"):
                    u = int(part[3])
                elif part.startswith("d2d:"):
                    k = int(part[4:])
                elif part != "none":
                    raise ValueError(f"unknown association tag {tag!r}")
            uav.append(u)
            parent.append(k)
        return cls(tuple(uav), tuple(parent))


def lambertian_order(phi_half: float) -> float:
    if not 0 < phi_half < math.pi / 2:
        raise ValueError(f"half-power angle must lie in (0, pi/2) radians, got {phi_half!r}")
    return -math.log(2) / math.log(math.cos(phi_half))


def optical_gain(psi_in, params: NetworkParams):
    """Concentrator gain; zero at or beyond the field-of-view edge."""
    psi_in = np.asarray(psi_in, dtype=float)
    inside = n_r2_over_sin2(params)
    return np.where((psi_in >= 0) & (psi_in < params.psi_c), inside, 0.0)[()]


def n_r2_over_sin2(params: NetworkParams) -> float:
    return params.refractive_index**2 / math.sin(params.psi_c) ** 2


def distance_3d(uav, user, params: NetworkParams):
    diff = np.asarray(user, dtype=float) - np.asarray(uav, dtype=float)
    r2 = np.sum(diff * diff, axis=-1)
    return np.sqrt(r2 + params.uav_height**2)


def channel_gain(uav, user, params: NetworkParams):
    """Line-of-sight DC gain between a UAV at ``params.uav_height`` and users.

    ``user`` may be a single point or an (N, 2) array.
    """
    d = distance_3d(uav, user, params)
    m = params.m
    cos_psi = params.uav_height / d
    # cos is decreasing on [0, pi/2]: psi < psi_c  <=>  cos psi > cos psi_c
    in_fov = cos_psi > math.cos(params.psi_c)
    gain = (
        (m + 1) * params.detector_area / (2 * math.pi * d**2)
        * n_r2_over_sin2(params) * cos_psi ** (m + 1)
    )
    return np.where(in_fov, gain, 0.0)[()]


def illuminance(h_in, params: NetworkParams):
    return params.dimming * params.led_power * np.asarray(h_in, dtype=float)[()]


def link_rate(h_in, params: NetworkParams):
    """Achievable rate lower bound in bps/Hz for channel gain ``h_in``."""
    snr = params.dimming * params.led_power * np.asarray(h_in, dtype=float) / params.noise_sigma
    return (0.5 * np.log2(1 + math.e / (2 * math.pi) * snr**2))[()]


def illumination_distance_bound(params: NetworkParams) -> float:
    """Largest 3-D distance at which illuminance still reaches the threshold,
    ignoring the field-of-view cutoff."""
    m = params.m
    v = (
        2 * math.pi * params.illum_threshold
        / ((m + 1) * params.detector_area * n_r2_over_sin2(params)
           * params.uav_height ** (m + 1) * params.dimming)
    )
    return (params.led_power / v) ** (1 / (m + 3))


def fov_distance_bound(params: NetworkParams) -> float:
    return params.uav_height / math.cos(params.psi_c)


def coverage_distance_limit(params: NetworkParams) -> float:
    return min(illumination_distance_bound(params), fov_distance_bound(params))


def covers(uav, user, params: NetworkParams):
    """Whether a UAV meets the illumination constraint for the given user(s).

    Combines the closed-form distance bound with the direct illuminance
    test so the answer never disagrees with the constraint checker at the
    boundary.
    """
    d = distance_3d(uav, user, params)
    lux = illuminance(channel_gain(uav, user, params), params)
    return ((d <= coverage_distance_limit(params)) & (lux >= params.illum_threshold))[()]


def sum_rate(placement: Placement, association: Association, scenario: Scenario) -> float:
    """Total rate of UAV-served users; D2D and unserved users add nothing."""
    if len(association) != len(scenario):
        raise ValueError(
            f"association covers {len(association)} users, scenario has {len(scenario)}"
        )
    uav = np.asarray(association.uav)
    total = 0.0
    for i in (1, 2):
        served = scenario.users[uav == i]
        if len(served):
            total += float(np.sum(link_rate(channel_gain(placement[i], served, scenario.params),
                                            scenario.params)))
    return total


def objective(placement: Placement, association: Association, scenario: Scenario) -> float:
    """Weighted sum of UAV-served rate and the number of D2D-served users."""
    p = scenario.params
    return p.weight_rate * sum_rate(placement, association, scenario) + p.weight_d2d * association.d2d_count
