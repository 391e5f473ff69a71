"""Synthetic multi-person scenes with group-structured interactions.

Each scene partitions its people into groups. A group of one is idle; a
larger group picks an interaction type and every pair inside it is related
(so ground-truth relations are transitively closed by construction).
Action classes follow a fixed convention derived from the class count:

* class 0 is idle,
* the next two classes are symmetric interactions (both people perform
  the same action),
* remaining classes form (active, passive) asymmetric couples, with an
  odd leftover class treated as symmetric.

Per-person features carry the action in their first half (class prototype
plus noise) and group membership in the second half (per-group offset
plus noise), so both label kinds are recoverable from feature vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .factorgraph import PairIndexMap

__all__ = [
    "SceneConfig",
    "SceneSample",
    "action_type_ids",
    "compat_table",
    "action_prototypes",
    "gen_scene",
    "gen_dataset",
    "permute_sample",
    "scene_to_dict",
    "scene_from_dict",
    "write_scenes",
    "read_scenes",
]


@dataclass(frozen=True)
class SceneConfig:
    """Knobs for the generator; defaults give a learnable but noisy task.

    With ``offset_pool`` set, interacting groups take offsets from that
    many fixed directions instead of fresh draws, so co-present groups
    sometimes share an identical membership signature. Those collisions
    cannot be split from pair features alone; only the action classes give
    them away. People idling alone keep fresh random offsets.
    """

    num_actions: int = 9
    feature_dim: int = 32
    noise: float = 0.5
    offset_scale: float = 1.0
    offset_pool: int | None = None
    prototype_seed: int = 7
    group_size_weights: tuple[float, ...] = (0.2, 0.4, 0.25, 0.15)
    sizes: tuple[int, ...] = (3, 4, 5, 6)

    def __post_init__(self):
        if self.num_actions < 2:
            raise ValueError("need an idle class plus at least one interaction class")
        if self.feature_dim < 2 or self.feature_dim % 2:
            raise ValueError("feature_dim must be even and at least 2")
        if self.noise < 0 or self.offset_scale < 0:
            raise ValueError("noise scales must be nonnegative")
        if self.offset_pool is not None and self.offset_pool < 1:
            raise ValueError("offset_pool needs at least one direction")
        if not self.group_size_weights or min(self.group_size_weights) < 0 \
                or sum(self.group_size_weights) <= 0:
            raise ValueError("group_size_weights must be nonnegative with positive sum")
        if not self.sizes or min(self.sizes) < 2:
            raise ValueError("scene sizes must all be at least 2")


@dataclass(eq=False)
class SceneSample:
    """One generated scene: inputs plus ground-truth labels."""

    features: np.ndarray   # (n, feature_dim)
    actions: np.ndarray    # (n,) class ids
    relations: np.ndarray  # (P,) 0/1 in pair-slot order
    group_of: np.ndarray   # (n,) group id per person

    @property
    def n(self) -> int:
        return self.features.shape[0]


@lru_cache(maxsize=None)
def action_type_ids(num_actions: int) -> tuple[int, ...]:
    """Interaction type id per class; idle is type 0."""
    types = [0]
    next_type = 1
    for cls in (1, 2):
        if cls < num_actions:
            types.append(next_type)
            next_type += 1
    cls = 3
    while cls < num_actions:
        if cls + 1 < num_actions:
            types.extend([next_type, next_type])
            cls += 2
        else:
            types.append(next_type)
            cls += 1
        next_type += 1
    return tuple(types)


@lru_cache(maxsize=None)
def _type_members(num_actions: int) -> tuple[tuple[int, ...], ...]:
    """Classes belonging to each non-idle type, in type order."""
    ids = action_type_ids(num_actions)
    groups: dict[int, list[int]] = {}
    for cls, t in enumerate(ids):
        if t:
            groups.setdefault(t, []).append(cls)
    return tuple(tuple(groups[t]) for t in sorted(groups))


def compat_table(num_actions: int) -> np.ndarray:
    """(Y, Y) bool: two actions can share a relation iff same non-idle type."""
    ids = np.array(action_type_ids(num_actions))
    same = ids[:, None] == ids[None, :]
    return same & (ids[:, None] != 0)


@lru_cache(maxsize=None)
def _prototypes_cached(num_actions: int, half_dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    protos = rng.normal(size=(num_actions, half_dim))
    protos.setflags(write=False)
    return protos


@lru_cache(maxsize=None)
def _offset_directions_cached(pool: int, half_dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, 3])
    directions = rng.normal(size=(pool, half_dim))
    directions.setflags(write=False)
    return directions


def action_prototypes(config: SceneConfig) -> np.ndarray:
    return _prototypes_cached(
        config.num_actions, config.feature_dim // 2, config.prototype_seed)


def _draw_group_sizes(n: int, weights: tuple[float, ...], rng: np.random.Generator) -> list[int]:
    probs = np.asarray(weights, dtype=np.float64)
    probs = probs / probs.sum()
    sizes = []
    left = n
    while left > 0:
        s = int(rng.choice(len(probs), p=probs)) + 1
        sizes.append(min(s, left))
        left -= sizes[-1]
    return sizes


def gen_scene(
    config: SceneConfig = SceneConfig(), seed: int = 0, n: int | None = None,
) -> SceneSample:
    """Deterministically generate one scene; n drawn from config when omitted."""
    if n is None:
        pick = np.random.default_rng([int(seed), 77]).integers(len(config.sizes))
        n = int(config.sizes[pick])
    if n < 2:
        raise ValueError(f"need at least 2 people, got {n}")
    rng = np.random.default_rng([int(seed), 2026])
    sizes = _draw_group_sizes(n, config.group_size_weights, rng)

    order = rng.permutation(n)
    group_of = np.zeros(n, dtype=np.intp)
    actions = np.zeros(n, dtype=np.intp)
    types = _type_members(config.num_actions)

    start = 0
    for gid, size in enumerate(sizes):
        members = order[start:start + size]
        start += size
        group_of[members] = gid
        if size == 1:
            actions[members] = 0
            continue
        roles = types[int(rng.integers(len(types)))]
        if len(roles) == 1:
            actions[members] = roles[0]
        else:
            picks = rng.integers(2, size=size)
            if picks.min() == picks.max():
                picks[int(rng.integers(size))] ^= 1
            actions[members] = np.asarray(roles)[picks]

    pair_map = PairIndexMap.build(n)
    u, v = pair_map.pairs[:, 0], pair_map.pairs[:, 1]
    same_group = group_of[u] == group_of[v]
    sizes_arr = np.bincount(group_of, minlength=len(sizes))
    in_real_group = sizes_arr[group_of[u]] > 1
    relations = (same_group & in_real_group).astype(np.intp)

    half = config.feature_dim // 2
    protos = action_prototypes(config)
    if config.offset_pool:
        directions = _offset_directions_cached(
            config.offset_pool, half, config.prototype_seed)
        picks = rng.integers(config.offset_pool, size=len(sizes))
        offsets = config.offset_scale * directions[picks]
        for gid, size in enumerate(sizes):
            if size == 1:
                offsets[gid] = rng.normal(scale=config.offset_scale, size=half)
    else:
        offsets = rng.normal(scale=config.offset_scale, size=(len(sizes), half))
    feats = np.empty((n, config.feature_dim), dtype=np.float64)
    feats[:, :half] = protos[actions] + config.noise * rng.normal(size=(n, half))
    feats[:, half:] = offsets[group_of] + config.noise * rng.normal(size=(n, half))

    return SceneSample(features=feats, actions=actions,
                       relations=relations, group_of=group_of)


def gen_dataset(
    count: int,
    config: SceneConfig = SceneConfig(),
    start_seed: int = 0,
) -> list[SceneSample]:
    """Scenes with seeds ``start_seed .. start_seed+count-1``; n drawn per scene."""
    return [gen_scene(config, seed=start_seed + j) for j in range(count)]


def permute_sample(sample: SceneSample, perm: np.ndarray) -> SceneSample:
    """Relabel people so new person k is old person perm[k]."""
    perm = np.asarray(perm, dtype=np.intp)
    n = sample.n
    if sorted(perm.tolist()) != list(range(n)):
        raise ValueError("perm must be a permutation of range(n)")
    pair_map = PairIndexMap.build(n)
    old_slot = np.array([
        pair_map.slot(perm[k], perm[l]) for k, l in pair_map.pairs
    ], dtype=np.intp)
    return SceneSample(
        features=sample.features[perm].copy(),
        actions=sample.actions[perm].copy(),
        relations=sample.relations[old_slot].copy(),
        group_of=sample.group_of[perm].copy(),
    )


def scene_to_dict(sample: SceneSample) -> dict:
    return {
        "n": sample.n,
        "features": sample.features.tolist(),
        "actions": sample.actions.tolist(),
        "relations": sample.relations.tolist(),
        "group_of": sample.group_of.tolist(),
    }


def scene_from_dict(d: dict) -> SceneSample:
    feats = np.asarray(d["features"], dtype=np.float64)
    n = feats.shape[0]
    if feats.ndim != 2 or n < 2:
        raise ValueError("features must be a (n >= 2, dim) matrix")
    num_pairs = n * (n - 1) // 2
    actions = np.asarray(d.get("actions", [0] * n), dtype=np.intp)
    relations = np.asarray(d.get("relations", [0] * num_pairs), dtype=np.intp)
    group_of = np.asarray(d.get("group_of", list(range(n))), dtype=np.intp)
    if actions.shape != (n,) or group_of.shape != (n,):
        raise ValueError("per-person labels must have length n")
    if relations.shape != (num_pairs,):
        raise ValueError(f"relations must have length {num_pairs}")
    return SceneSample(features=feats, actions=actions,
                       relations=relations, group_of=group_of)


def write_scenes(path: str | Path, samples: list[SceneSample]) -> None:
    with open(path, "w") as fh:
        for s in samples:
            fh.write(json.dumps(scene_to_dict(s)) + "\n")


def read_scenes(path: str | Path) -> list[SceneSample]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(scene_from_dict(json.loads(line)))
    return out
