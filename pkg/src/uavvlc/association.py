"""Cluster-based user association for a fixed UAV placement.

A k-means-like loop over 2K cluster heads: users join the nearest head,
heads are handed to the UAVs by how much closer they sit to UAV 1 than to
UAV 2, and every UAV-served cluster then re-elects the member with the best
weighted rate + D2D-reach score as its head.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .geometry import as_rng
from .model import (
    NO_PARENT, Association, Placement, Scenario, channel_gain, covers, link_rate, objective,
)

UNASSIGNED = 0


@dataclass(frozen=True)
class ClusterState:
    """Cluster heads (user indices), per-user cluster labels, per-cluster UAV tag.

    ``labels`` is empty until users have been assigned; ``uav_of_cluster``
    holds 1, 2 or ``UNASSIGNED``.
    """

    centers: tuple[int, ...]
    labels: tuple[int, ...] = ()
    uav_of_cluster: tuple[int, ...] = ()

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.labels) == k)


def init_centers(scenario: Scenario, rng=None, keep=()) -> ClusterState:
    """Pick 2K distinct users as initial heads (all users when N < 2K).

    ``keep`` seeds the selection with given users; the rest is drawn
    uniformly without replacement.
    """
    n = len(scenario)
    if n == 0:
        raise ValueError("cannot cluster an empty scenario")
    want = min(2 * scenario.params.capacity, n)
    centers = list(dict.fromkeys(int(c) for c in keep))[:want]
    if any(not 0 <= c < n for c in centers):
        raise ValueError(f"initial centers {centers} out of range for {n} users")
    if len(centers) < want:
        pool = np.setdiff1d(np.arange(n), centers)
        drawn = as_rng(rng).choice(pool, size=want - len(centers), replace=False)
        centers += [int(c) for c in drawn]
    return ClusterState(tuple(centers))


def assign_to_centers(scenario: Scenario, state: ClusterState) -> ClusterState:
    """Label each user with its nearest head; ties go to the lowest cluster index."""
    if not state.centers:
        raise ValueError("no cluster centers")
    centers = np.asarray(state.centers)
    labels = np.argmin(scenario.distances[:, centers], axis=1)
    # heads always own their cluster, even when two heads coincide
    labels[centers] = np.arange(len(centers))
    return replace(state, labels=tuple(int(x) for x in labels), uav_of_cluster=())


def distance_difference_order(scenario: Scenario, state: ClusterState, placement: Placement):
    """Return (differences, order): ``|uav1 - c_k| - |uav2 - c_k|`` per head and
    the cluster indices sorted ascending by it, ties by index."""
    heads = scenario.users[list(state.centers)]
    diff = (
        np.hypot(*(heads - placement.uav1).T) - np.hypot(*(heads - placement.uav2).T)
    )
    order = np.lexsort((np.arange(len(diff)), diff))
    return diff, order


def assign_clusters_to_uavs(
    scenario: Scenario, state: ClusterState, placement: Placement
) -> ClusterState:
    """Give UAV 1 the first K coverable heads in ascending distance-difference
    order, then UAV 2 up to K of the remaining coverable heads, taken from the
    other end of the order."""
    params = scenario.params
    diff, order = distance_difference_order(scenario, state, placement)
    heads = scenario.users[list(state.centers)]
    ok1 = np.atleast_1d(covers(placement.uav1, heads, params))
    ok2 = np.atleast_1d(covers(placement.uav2, heads, params))

    tags = [UNASSIGNED] * len(state.centers)
    taken = 0
    for k in order:
        if taken == params.capacity:
            break
        if ok1[k]:
            tags[k] = 1
            taken += 1
    taken = 0
    for k in np.lexsort((np.arange(len(diff)), -diff)):
        if taken == params.capacity:
            break
        if tags[k] == UNASSIGNED and ok2[k]:
            tags[k] = 2
            taken += 1
    return replace(state, uav_of_cluster=tuple(tags))


def center_score(candidate: int, cluster_members, uav, scenario: Scenario) -> float:
    p = scenario.params
    rate = link_rate(channel_gain(uav, scenario.users[candidate], p), p)
    others = [k for k in cluster_members if k != candidate]
    reach = int(np.sum(scenario.distances[candidate, others] < p.d2d_range)) if others else 0
    return float(p.weight_rate * rate + p.weight_d2d * reach)


def _cluster_scores(candidates: np.ndarray, members: np.ndarray, uav, scenario: Scenario):
    p = scenario.params
    rate = np.atleast_1d(link_rate(channel_gain(uav, scenario.users[candidates], p), p))
    reach = scenario.d2d_neighbors[np.ix_(candidates, members)].sum(axis=1)
    return p.weight_rate * rate + p.weight_d2d * reach


def reselect_centers(
    scenario: Scenario, state: ClusterState, placement: Placement
) -> tuple[ClusterState, Association]:
    """Re-elect the head of every UAV-served cluster by exhaustive scoring.

    Only members the UAV can illuminate are eligible. Members within D2D
    range of the new head are served through it; everyone else in the
    cluster, and every member of an unassigned cluster, stays unserved.
    """
    n = len(scenario)
    uav = [0] * n
    parent = [NO_PARENT] * n
    centers = list(state.centers)
    labels = np.asarray(state.labels)
    for k, tag in enumerate(state.uav_of_cluster):
        if tag == UNASSIGNED:
            continue
        members = np.flatnonzero(labels == k)
        pos = placement[tag]
        eligible = members[np.atleast_1d(covers(pos, scenario.users[members], scenario.params))]
        if len(eligible) == 0:
            continue
        scores = _cluster_scores(eligible, members, pos, scenario)
        head = int(eligible[np.argmax(scores)])
        centers[k] = head
        uav[head] = tag
        for m in members[scenario.d2d_neighbors[members, head]]:
            parent[int(m)] = head
    return replace(state, centers=tuple(centers)), Association(tuple(uav), tuple(parent))


def run_association(
    scenario: Scenario,
    placement: Placement,
    rng=None,
    max_rounds: int = 50,
    initial_centers=(),
) -> Association:
    """Iterate nearest-head labelling, UAV hand-out and head re-election until
    the heads stop changing (or repeat), returning the best round seen."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    state = init_centers(scenario, rng, keep=initial_centers)
    seen = {state.centers}
    best, best_value = None, -math.inf
    for _ in range(max_rounds):
        state = assign_to_centers(scenario, state)
        state = assign_clusters_to_uavs(scenario, state, placement)
        state, assoc = reselect_centers(scenario, state, placement)
        value = objective(placement, assoc, scenario)
        if value > best_value:
            best, best_value = assoc, value
        if state.centers in seen:
            break
        seen.add(state.centers)
    return best
