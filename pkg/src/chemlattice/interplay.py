"""Coherence kick driven by the modal cluster.

Once per step (when enabled) the most frequent cluster *size* is found,
ties going to the smallest size, and the lowest-index cluster of that
size acts as representative.  If the representative's active fraction
sits inside the mixed band [theta_a, 1 - theta_a], every molecule is
independently pushed (with probability p_coh) toward the minority state:
active when the fraction is below one half, inactive otherwise.  Pure
representatives (fraction 0 or 1) never trigger a kick, so without noise
the kick is inert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .sim_core import recount_active_counts

if TYPE_CHECKING:
    from .sim_core import SimParams, SimState

__all__ = [
    "InterplayOutcome",
    "modal_cluster",
    "active_ratio",
    "target_activity",
    "coherence_kick",
    "run_interplay",
]


@dataclass(frozen=True)
class InterplayOutcome:
    """One interplay evaluation: the modal size, its representative, the
    activity ratio fed to the kick, whether the kick fired, the activity
    value it pushed toward, and how many flags actually changed."""

    mode_size: int
    representative: int
    r_a: float
    kicked: bool
    target_value: int
    flips: int


def modal_cluster(state: "SimState") -> tuple:
    """Most frequent cluster size and its lowest-index representative.

    Frequency ties resolve to the smallest size, so a fully fragmented
    population reports (1, 0).
    """
    sizes = np.asarray(state.c0)
    counts = np.bincount(sizes)
    mode_size = int(np.flatnonzero(counts == counts.max())[0])
    representative = int(np.argmax(sizes == mode_size))
    return mode_size, representative


def active_ratio(state: "SimState", cluster: int) -> float:
    """Active fraction of one cluster, in [0, 1]."""
    if not 0 <= cluster < state.c_max:
        raise ValueError(
            f"cluster index {cluster} outside 0..{state.c_max - 1}"
        )
    return state.c1[cluster] / state.c0[cluster]


def target_activity(r_a: float) -> int:
    """Minority activity value for a given active fraction.

    Below one half the push is toward active; at exactly one half and
    above it is toward inactive.
    """
    return 1 if r_a < 0.5 else 0


def coherence_kick(state: "SimState", r_a: float, p_coh: float, theta_a: float) -> int:
    """Push every molecule toward the minority state with prob. p_coh.

    The caller must have verified that ``r_a`` lies inside the mixed band
    [theta_a, 1 - theta_a]; out-of-band values raise without mutating the
    state.  Returns the number of activity flags that changed; cluster
    active counts are recomputed afterwards.
    """
    if not theta_a <= r_a <= 1.0 - theta_a:
        raise ValueError(
            f"active ratio {r_a} outside the mixed band "
            f"[{theta_a}, {1.0 - theta_a}]"
        )
    target = target_activity(r_a)
    selected = state.rng.random(state.n_molecules) < p_coh
    changed = int(np.count_nonzero(state.m1[selected] != target))
    if changed:
        state.m1[selected] = target
        recount_active_counts(state)
    return changed


def run_interplay(state: "SimState", params: "SimParams") -> InterplayOutcome:
    """Evaluate the modal cluster and fire the kick when the band allows.

    With ``pooled_modal_ratio`` the ratio aggregates active and total
    counts over *all* clusters of the modal size instead of the single
    representative.
    """
    mode_size, representative = modal_cluster(state)
    if params.pooled_modal_ratio:
        sizes = np.asarray(state.c0)
        pick = sizes == mode_size
        actives = np.asarray(state.c1)[pick]
        r_a = float(actives.sum()) / float(mode_size * int(pick.sum()))
    else:
        r_a = active_ratio(state, representative)
    kicked = params.theta_a <= r_a <= 1.0 - params.theta_a
    flips = 0
    if kicked:
        flips = coherence_kick(state, r_a, params.p_coh, params.theta_a)
    return InterplayOutcome(
        mode_size=mode_size,
        representative=representative,
        r_a=r_a,
        kicked=kicked,
        target_value=target_activity(r_a),
        flips=flips,
    )
