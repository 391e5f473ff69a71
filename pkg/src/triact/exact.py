"""Exhaustive ground truth for small scenes, plus logical checkers.

Everything here recomputes the joint energy from raw score and penalty
arrays with its own vectorized decomposition, deliberately sharing no code
with the differentiable implementation, so the two can be checked against
each other.

Assignments are encoded as mixed-radix integers: action digits first
(person 0 most significant), then relation bits (pair slot 0 most
significant). Enumeration walks that encoding in increasing order, so
"first minimum" equals "lexicographically smallest minimizer".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .autodiff import Tensor
from .factorgraph import InteractionGraph
from .network import ScoreSet
from .reasoning import CarParams, Labeling, MarginalSet

__all__ = [
    "ConsistencyReport",
    "brute_force_map",
    "exact_marginals",
    "check_transitivity",
    "check_compatibility",
    "groups_from_z",
    "consistency_report",
    "marginal_l1",
]

STATE_SPACE_LIMIT = 10_000_000


@dataclass
class ConsistencyReport:
    """Outcome of both logical checks plus the induced grouping."""

    compat_violations: list[tuple[int, int]]
    trans_violations: list[tuple[int, int, int]]
    groups: list[list[int]]

    @property
    def ok(self) -> bool:
        return not self.compat_violations and not self.trans_violations

    def format(self) -> str:
        lines = [f"groups: {self.groups}"]
        if self.compat_violations:
            lines.append(f"incompatible pairs: {self.compat_violations}")
        if self.trans_violations:
            lines.append(f"intransitive triples: {self.trans_violations}")
        if self.ok:
            lines.append("consistent: yes")
        else:
            lines.append("consistent: no")
        return "\n".join(lines)


def _state_space(num_actions: int, graph: InteractionGraph) -> tuple[int, int, int]:
    y_count = num_actions ** graph.n
    z_count = 2 ** graph.num_pairs
    total = y_count * z_count
    if total > STATE_SPACE_LIMIT:
        raise ValueError(
            f"state space has {num_actions}^{graph.n} * 2^{graph.num_pairs} "
            f"= {total} assignments, above the {STATE_SPACE_LIMIT} limit")
    return y_count, z_count, total


def _all_z(graph: InteractionGraph, z_count: int) -> np.ndarray:
    shifts = np.arange(graph.num_pairs - 1, -1, -1)
    return (np.arange(z_count)[:, None] >> shifts[None, :]) & 1


def _energy_blocks(
    theta_y: np.ndarray,
    theta_z: np.ndarray,
    compat: np.ndarray,
    trans: float,
    graph: InteractionGraph,
) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
    """Yield (y offset, y digit block, energy block) covering every assignment."""
    num_actions = theta_y.shape[1]
    y_count, z_count, _ = _state_space(num_actions, graph)
    z_all = _all_z(graph, z_count)

    z_base = -theta_z[np.arange(graph.num_pairs)[None, :], z_all].sum(axis=1)
    if graph.num_triples:
        two_of_three = (z_all[:, graph.triple_pair_slots].sum(axis=2) == 2)
        z_base = z_base + trans * two_of_three.sum(axis=1)

    u, v = graph.pairs[:, 0], graph.pairs[:, 1]
    powers = num_actions ** np.arange(graph.n - 1, -1, -1)
    block = max(1, 2_000_000 // z_count)
    for start in range(0, y_count, block):
        idx = np.arange(start, min(start + block, y_count))
        y_digits = (idx[:, None] // powers[None, :]) % num_actions
        y_base = -theta_y[np.arange(graph.n)[None, :], y_digits].sum(axis=1)
        pair_pen = compat[y_digits[:, u], y_digits[:, v]]
        energies = y_base[:, None] + z_base[None, :] + pair_pen @ z_all.T
        yield start, y_digits, energies


def brute_force_map(
    scores: ScoreSet, car: CarParams, graph: InteractionGraph,
) -> tuple[Labeling, float]:
    """Global energy minimizer by enumeration; first minimum wins ties."""
    theta_y = scores.action_probs.data
    theta_z = scores.relation_probs.data
    compat = car.compat_values()
    trans = car.trans_value()
    num_actions = theta_y.shape[1]
    _, z_count, _ = _state_space(num_actions, graph)

    best = np.inf
    best_y: np.ndarray | None = None
    best_z_idx = -1
    for _, y_digits, energies in _energy_blocks(theta_y, theta_z, compat, trans, graph):
        flat = int(np.argmin(energies))
        row, col = divmod(flat, energies.shape[1])
        val = energies[row, col]
        if val < best:
            best = val
            best_y = y_digits[row].copy()
            best_z_idx = col
    assert best_y is not None
    z_bits = _all_z(graph, z_count)[best_z_idx]
    return Labeling(actions=best_y, relations=z_bits), float(best)


def exact_marginals(
    scores: ScoreSet, car: CarParams, graph: InteractionGraph,
) -> MarginalSet:
    """True per-variable marginals of exp(-energy), by full enumeration."""
    theta_y = scores.action_probs.data
    theta_z = scores.relation_probs.data
    compat = car.compat_values()
    trans = car.trans_value()
    num_actions = theta_y.shape[1]
    _, z_count, _ = _state_space(num_actions, graph)

    lowest = np.inf
    for _, _, energies in _energy_blocks(theta_y, theta_z, compat, trans, graph):
        lowest = min(lowest, float(energies.min()))

    marg_y = np.zeros((graph.n, num_actions))
    z_weight = np.zeros(z_count)
    total = 0.0
    for _, y_digits, energies in _energy_blocks(theta_y, theta_z, compat, trans, graph):
        w = np.exp(lowest - energies)
        row_w = w.sum(axis=1)
        for i in range(graph.n):
            np.add.at(marg_y[i], y_digits[:, i], row_w)
        z_weight += w.sum(axis=0)
        total += float(w.sum())

    z_all = _all_z(graph, z_count)
    marg_z = np.zeros((graph.num_pairs, 2))
    for p in range(graph.num_pairs):
        on = float(z_weight[z_all[:, p] == 1].sum())
        marg_z[p] = [(total - on) / total, on / total]
    marg_y /= total
    return MarginalSet(actions=Tensor(marg_y), relations=Tensor(marg_z))


def check_transitivity(labeling: Labeling, graph: InteractionGraph) -> list[tuple[int, int, int]]:
    """Triples whose three relations contain exactly two links."""
    if not graph.num_triples:
        return []
    zt = labeling.relations[graph.triple_pair_slots]
    bad = np.flatnonzero(zt.sum(axis=1) == 2)
    return [tuple(int(x) for x in graph.triples[b]) for b in bad]


def check_compatibility(
    labeling: Labeling, table: np.ndarray, graph: InteractionGraph,
) -> list[tuple[int, int]]:
    """Linked pairs whose action classes the reference table forbids."""
    table = np.asarray(table, dtype=bool)
    u, v = graph.pairs[:, 0], graph.pairs[:, 1]
    linked = labeling.relations == 1
    ok = table[labeling.actions[u], labeling.actions[v]]
    bad = np.flatnonzero(linked & ~ok)
    return [(int(u[b]), int(v[b])) for b in bad]


def groups_from_z(labeling: Labeling) -> list[list[int]]:
    """Connected components of the link graph, as sorted member lists."""
    n = labeling.n
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    slot = 0
    for u in range(n):
        for v in range(u + 1, n):
            if labeling.relations[slot]:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[max(ru, rv)] = min(ru, rv)
            slot += 1
    members: dict[int, list[int]] = {}
    for i in range(n):
        members.setdefault(find(i), []).append(i)
    return [sorted(members[r]) for r in sorted(members)]


def consistency_report(
    labeling: Labeling, table: np.ndarray, graph: InteractionGraph,
) -> ConsistencyReport:
    return ConsistencyReport(
        compat_violations=check_compatibility(labeling, table, graph),
        trans_violations=check_transitivity(labeling, graph),
        groups=groups_from_z(labeling),
    )


def marginal_l1(a: MarginalSet, b: MarginalSet) -> dict[str, float]:
    """Mean per-variable L1 gap between two marginal sets (for logging)."""
    da = np.abs(a.actions.data - b.actions.data).sum(axis=1)
    dr = np.abs(a.relations.data - b.relations.data).sum(axis=1)
    return {"actions": float(da.mean()), "relations": float(dr.mean())}
