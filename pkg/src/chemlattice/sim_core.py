"""Stochastic dynamics of an activity-gated cluster chemistry.

A population of N molecules is partitioned into clusters, and every
molecule carries a binary activity flag.  One step attempts, in fixed
order: a merge of two uniformly drawn clusters (allowed only while both
are mostly inactive), a size-biased split (allowed only for mostly
active clusters), global activity resets at the two extremes of
aggregation, independent per-molecule activity noise, and optionally a
population-wide coherence kick driven by the modal cluster (see
`interplay`).  All randomness flows through one seeded generator held on
the state, so trajectories replay bit-exactly.  A state is not safe to
share between threads; parameter sweeps use independent states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "NoiseSchedule",
    "SimParams",
    "SimState",
    "StepReport",
    "init_state",
    "attempt_clustering",
    "attempt_declustering",
    "apply_boundary_rules",
    "apply_noise",
    "noise_at",
    "step",
    "audit_consistency",
    "recount_active_counts",
]


@dataclass(frozen=True)
class NoiseSchedule:
    """Per-step activity-flip probability, flat or linearly ramped.

    A ramp contributes nothing before ``onset_step`` and then grows
    linearly from ``p0`` at ``rate`` per step, clamped to [0, 1].
    """

    kind: Literal["constant", "ramp"] = "constant"
    p0: float = 0.0
    rate: float = 0.0
    onset_step: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "ramp"):
            raise ConfigError(f"unknown noise schedule kind {self.kind!r}")
        if not 0.0 <= self.p0 <= 1.0:
            raise ConfigError(f"noise p0 must lie in [0, 1], got {self.p0}")
        if self.rate < 0.0:
            raise ConfigError(f"noise ramp rate must be >= 0, got {self.rate}")
        if self.onset_step < 0:
            raise ConfigError(f"onset_step must be >= 0, got {self.onset_step}")

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "p0": self.p0}
        if self.kind == "ramp":
            d["rate"] = self.rate
            d["onset_step"] = self.onset_step
        return d


def noise_at(schedule: NoiseSchedule, t: int) -> float:
    """Flip probability in effect at step ``t``, always within [0, 1]."""
    if schedule.kind == "constant":
        return schedule.p0
    if t < schedule.onset_step:
        return 0.0
    p = schedule.p0 + schedule.rate * (t - schedule.onset_step)
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class SimParams:
    """Immutable run parameters.

    ``theta_c`` gates merging (both clusters must have an active fraction
    strictly below it), ``theta_dec`` gates splitting (strictly above),
    ``theta_a`` half-widths the mixed-activity band that lets a coherence
    kick fire, and ``p_coh`` is the per-molecule kick participation
    probability.  ``pooled_modal_ratio`` switches the kick's input from
    one representative cluster to all clusters of the modal size.
    """

    n_molecules: int = 200
    theta_c: float = 0.5
    theta_dec: float = 0.5
    noise_schedule: NoiseSchedule = NoiseSchedule()
    theta_a: float = 0.3
    p_coh: float = 0.95
    interplay_enabled: bool = False
    max_steps: int = 100_000
    seed: int = 11
    pooled_modal_ratio: bool = False

    def __post_init__(self) -> None:
        if self.n_molecules < 2:
            raise ConfigError(f"n_molecules must be >= 2, got {self.n_molecules}")
        for name in ("theta_c", "theta_dec", "p_coh"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.theta_a <= 0.5:
            raise ConfigError(f"theta_a must lie in [0, 0.5], got {self.theta_a}")
        if self.max_steps < 1:
            raise ConfigError(f"max_steps must be >= 1, got {self.max_steps}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def to_dict(self) -> dict:
        return {
            "n_molecules": self.n_molecules,
            "theta_c": self.theta_c,
            "theta_dec": self.theta_dec,
            "noise_schedule": self.noise_schedule.to_dict(),
            "theta_a": self.theta_a,
            "p_coh": self.p_coh,
            "interplay_enabled": self.interplay_enabled,
            "max_steps": self.max_steps,
            "seed": self.seed,
            "pooled_modal_ratio": self.pooled_modal_ratio,
        }


@dataclass
class SimState:
    """Mutable simulation state.

    ``m0[i]`` is molecule i's cluster index, ``m1[i]`` its activity bit.
    ``c0[n]``/``c1[n]`` are cluster n's size and active-member count, and
    ``cl[n]`` lists its members in insertion order (merges append the
    absorbed cluster's members; splits cut the list at the drawn point).
    Cluster indices are dense 0..c_max-1; removing cluster q shifts every
    index above q down by one.
    """

    t: int
    m0: np.ndarray
    m1: np.ndarray
    c0: list
    c1: list
    cl: list
    rng: np.random.Generator

    @property
    def n_molecules(self) -> int:
        return self.m0.shape[0]

    @property
    def c_max(self) -> int:
        return len(self.c0)

    def active_total(self) -> int:
        return int(np.count_nonzero(self.m1))

    def clone(self) -> "SimState":
        """Deep copy that replays identically to the original."""
        g = np.random.Generator(type(self.rng.bit_generator)())
        g.bit_generator.state = self.rng.bit_generator.state
        return SimState(
            t=self.t,
            m0=self.m0.copy(),
            m1=self.m1.copy(),
            c0=list(self.c0),
            c1=list(self.c1),
            cl=[list(members) for members in self.cl],
            rng=g,
        )


@dataclass(frozen=True)
class StepReport:
    """What one step did: merged pair, split (cluster, cut point), which
    boundary rule fired, and how many activity bits noise and the
    coherence kick changed."""

    t: int
    merged: Optional[tuple] = None
    split: Optional[tuple] = None
    boundary: str = "none"
    noise_flips: int = 0
    coherence_flips: int = 0


def init_state(params: SimParams) -> SimState:
    """All molecules start as inactive singleton clusters."""
    n = params.n_molecules
    return SimState(
        t=0,
        m0=np.arange(n, dtype=np.int32),
        m1=np.zeros(n, dtype=np.int8),
        c0=[1] * n,
        c1=[0] * n,
        cl=[[i] for i in range(n)],
        rng=np.random.default_rng(params.seed),
    )


def recount_active_counts(state: SimState) -> None:
    """Rebuild every cluster's active count from the molecule flags."""
    counts = np.bincount(
        state.m0[state.m1 != 0], minlength=state.c_max
    )
    state.c1 = counts.tolist()


def _merge_clusters(state: SimState, p: int, q: int) -> None:
    # p < q; q's members join p, then q's slot is compacted away.
    members_q = state.cl[q]
    state.m0[members_q] = p
    state.cl[p].extend(members_q)
    state.c0[p] += state.c0[q]
    state.c1[p] += state.c1[q]
    del state.c0[q]
    del state.c1[q]
    del state.cl[q]
    state.m0[state.m0 > q] -= 1


def attempt_clustering(state: SimState, theta_c: float):
    """Try one merge; returns the merged (p, q) pair or None.

    Two distinct clusters are drawn uniformly (redrawing the second until
    it differs, then ordered).  The merge goes ahead only if both have an
    active fraction strictly below ``theta_c``; a failed draw is not
    retried within the step.  With a single cluster nothing is drawn.
    """
    cm = state.c_max
    if cm < 2:
        return None
    rng = state.rng
    p = int(rng.integers(cm))
    q = int(rng.integers(cm))
    while q == p:
        q = int(rng.integers(cm))
    if p > q:
        p, q = q, p
    c0, c1 = state.c0, state.c1
    if not (c1[p] / c0[p] < theta_c and c1[q] / c0[q] < theta_c):
        return None
    _merge_clusters(state, p, q)
    return (p, q)


def _split_cluster(state: SimState, k: int, s: int) -> None:
    # The first s members stay in k; the tail becomes a new last cluster.
    members = state.cl[k]
    head = members[:s]
    tail = members[s:]
    new_index = state.c_max
    state.cl[k] = head
    state.cl.append(tail)
    state.m0[tail] = new_index
    state.c0[k] = s
    state.c0.append(len(tail))
    state.c1[k] = int(state.m1[head].sum())
    state.c1.append(int(state.m1[tail].sum()))


def attempt_declustering(state: SimState, theta_dec: float):
    """Try one split; returns (cluster, cut point) or None.

    The candidate cluster is the one holding a uniformly drawn molecule,
    so larger clusters are proportionally more likely to split.  The
    split happens only if the cluster's active fraction strictly exceeds
    ``theta_dec`` and it has at least two members; the cut point is then
    uniform over the interior positions.
    """
    rng = state.rng
    mol = int(rng.integers(state.n_molecules))
    k = int(state.m0[mol])
    size = state.c0[k]
    if size < 2:
        return None
    if not (state.c1[k] / size > theta_dec):
        return None
    s = 1 + int(rng.integers(size - 1))
    _split_cluster(state, k, s)
    return (k, s)


def apply_boundary_rules(state: SimState) -> str:
    """Global resets at the extremes of aggregation.

    Full fragmentation (every molecule a singleton) inactivates the whole
    population; full aggregation (one cluster) activates it.  Anywhere in
    between nothing happens.
    """
    n = state.n_molecules
    if state.c_max == n:
        state.m1[:] = 0
        state.c1 = [0] * n
        return "all_inactivated"
    if state.c_max == 1:
        state.m1[:] = 1
        state.c1 = [n]
        return "all_activated"
    return "none"


def apply_noise(state: SimState, p: float) -> int:
    """Flip each molecule's activity independently with probability p.

    Returns the number of flips; cluster active counts are recomputed
    from the flags afterwards.  With p <= 0 no random draws are consumed.
    """
    if p <= 0.0:
        return 0
    flips = state.rng.random(state.n_molecules) < p
    n_flips = int(np.count_nonzero(flips))
    if n_flips:
        state.m1[flips] ^= 1
        recount_active_counts(state)
    return n_flips


def step(state: SimState, params: SimParams) -> StepReport:
    """Advance one step: merge, split, boundary, noise, optional kick.

    When the interplay is enabled the boundary rules run once more after
    the kick so an extreme reached within the step keeps its mandated
    activity.  The step counter increments last.
    """
    if state.t >= params.max_steps:
        raise ValueError(
            f"step budget exhausted: t={state.t}, max_steps={params.max_steps}"
        )
    merged = attempt_clustering(state, params.theta_c)
    split = attempt_declustering(state, params.theta_dec)
    boundary = apply_boundary_rules(state)
    noise_flips = apply_noise(state, noise_at(params.noise_schedule, state.t))
    coherence_flips = 0
    if params.interplay_enabled:
        from .interplay import run_interplay

        outcome = run_interplay(state, params)
        coherence_flips = outcome.flips
        b2 = apply_boundary_rules(state)
        if boundary == "none":
            boundary = b2
    state.t += 1
    return StepReport(
        t=state.t,
        merged=merged,
        split=split,
        boundary=boundary,
        noise_flips=noise_flips,
        coherence_flips=coherence_flips,
    )


def audit_consistency(state: SimState) -> list:
    """Cross-check the redundant state arrays; returns violation strings.

    Verifies cluster sizes against membership lists, active counts
    against molecule flags, the molecule-to-cluster index map, and that
    every molecule appears exactly once.  Never mutates the state; an
    empty list means the invariants hold.
    """
    out = []
    n = state.n_molecules
    cm = state.c_max
    if not (1 <= cm <= n):
        out.append(f"cluster count {cm} outside 1..{n}")
    if not (len(state.c0) == len(state.c1) == len(state.cl)):
        out.append(
            f"bookkeeping lengths differ: c0={len(state.c0)} "
            f"c1={len(state.c1)} cl={len(state.cl)}"
        )
        return out
    total = sum(state.c0)
    if total != n:
        out.append(f"cluster sizes sum to {total}, expected {n}")
    bad_bits = np.flatnonzero((state.m1 != 0) & (state.m1 != 1))
    for mol in bad_bits[:5]:
        out.append(f"molecule {int(mol)}: activity {int(state.m1[mol])} not 0/1")
    seen = np.zeros(n, dtype=np.int64)
    for k in range(cm):
        members = state.cl[k]
        if state.c0[k] != len(members):
            out.append(
                f"cluster {k}: recorded size {state.c0[k]} != "
                f"membership length {len(members)}"
            )
        inside = [m for m in members if 0 <= m < n]
        if len(inside) != len(members):
            out.append(f"cluster {k}: member index out of range")
        for m in inside:
            seen[m] += 1
        active = int(state.m1[inside].sum()) if inside else 0
        if state.c1[k] != active:
            out.append(
                f"cluster {k}: recorded active count {state.c1[k]} != recount {active}"
            )
        if not (0 <= state.c1[k] <= state.c0[k]):
            out.append(
                f"cluster {k}: active count {state.c1[k]} outside 0..{state.c0[k]}"
            )
        wrong = [m for m in inside if state.m0[m] != k]
        if wrong:
            out.append(
                f"cluster {k}: member {wrong[0]} has cluster index "
                f"{int(state.m0[wrong[0]])}"
            )
    missing = np.flatnonzero(seen == 0)
    for mol in missing[:5]:
        out.append(f"molecule {int(mol)} appears in no membership list")
    dup = np.flatnonzero(seen > 1)
    for mol in dup[:5]:
        out.append(
            f"molecule {int(mol)} appears {int(seen[mol])} times across membership lists"
        )
    return out
