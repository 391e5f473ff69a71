"""Consistency-aware refinement of network scores by mean-field inference.

An energy couples per-person action scores and per-pair relation scores
through two soft rules: related people must carry compatible actions
(penalty matrix over class pairs) and relations must be transitive
(penalty on any person triple whose three relations contain exactly two
links). Marginals are refined over a fixed number of synchronous rounds;
every round reads only the previous round, so the update order inside a
round cannot matter. The whole procedure is built from taped ops and is
differentiable, which lets the penalties be learned jointly with the
network.

Penalties are stored through a softplus reparameterization so they stay
nonnegative; freeze flags replace either penalty with an exact constant
zero (softplus itself can never reach zero), which is how penalty-free
model variants are expressed.

Participant-indexed reductions use value-sorted summation and both pair
orientations are averaged where they meet, so evaluation-mode outputs are
exactly equivariant under relabeling of people.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .factorgraph import InteractionGraph, build_graph
from .network import RunCtx, ScoreSet, TognParams, togn_forward

__all__ = [
    "CarParams",
    "MarginalSet",
    "Labeling",
    "potts_compat",
    "potts_trans",
    "energy",
    "mf_action_update",
    "mf_relation_update",
    "mean_field",
    "decode",
    "predict",
]

COMPAT_INIT = 0.5
TRANS_INIT = 0.1
FROZEN_RAW = -40.0  # softplus(-40) ~ 4e-18, used when mapping a zero penalty


@dataclass(eq=False)
class CarParams:
    """Learnable consistency penalties plus the iteration budget."""

    num_actions: int
    iterations: int
    raw_compat: Tensor  # (Y, Y) unconstrained
    raw_trans: Tensor   # scalar unconstrained
    freeze_compat: bool = False
    freeze_trans: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("need at least one refinement round")
        y = self.num_actions
        if self.raw_compat.shape != (y, y) or self.raw_trans.ndim != 0:
            raise ad.ShapeError("penalty tensor shapes do not match num_actions")

    @classmethod
    def create(
        cls,
        num_actions: int,
        iterations: int = 10,
        compat_init: float = COMPAT_INIT,
        trans_init: float = TRANS_INIT,
        freeze_compat: bool = False,
        freeze_trans: bool = False,
    ) -> "CarParams":
        raw_c = float(ad.softplus_inverse(compat_init))
        raw_t = float(ad.softplus_inverse(trans_init))
        return cls(
            num_actions=num_actions,
            iterations=iterations,
            raw_compat=ad.param(np.full((num_actions, num_actions), raw_c)),
            raw_trans=ad.param(np.asarray(raw_t)),
            freeze_compat=freeze_compat,
            freeze_trans=freeze_trans,
        )

    @classmethod
    def from_penalties(
        cls,
        compat: np.ndarray,
        trans: float,
        iterations: int = 10,
        freeze_compat: bool = False,
        freeze_trans: bool = False,
    ) -> "CarParams":
        """Build params whose effective penalties equal the given values.

        ``compat`` must be symmetric and nonnegative; zero entries map to a
        deeply negative raw value whose softplus is ~4e-18.
        """
        compat = np.asarray(compat, dtype=np.float64)
        if compat.ndim != 2 or compat.shape[0] != compat.shape[1]:
            raise ad.ShapeError("compat penalty must be square")
        if not np.allclose(compat, compat.T):
            raise ValueError("compat penalty must be symmetric")
        if compat.min() < 0 or trans < 0:
            raise ValueError("penalties must be nonnegative")
        raw_c = np.where(compat > 0,
                         ad.softplus_inverse(np.maximum(compat, 1e-300)),
                         FROZEN_RAW)
        raw_t = ad.softplus_inverse(trans) if trans > 0 else np.asarray(FROZEN_RAW)
        return cls(
            num_actions=compat.shape[0],
            iterations=iterations,
            raw_compat=ad.param(raw_c),
            raw_trans=ad.param(np.asarray(raw_t, dtype=np.float64)),
            freeze_compat=freeze_compat,
            freeze_trans=freeze_trans,
        )

    def parameters(self) -> dict[str, Tensor]:
        out: dict[str, Tensor] = {}
        if not self.freeze_compat:
            out["lambda_compat"] = self.raw_compat
        if not self.freeze_trans:
            out["lambda_trans"] = self.raw_trans
        return out

    def compat_tensor(self) -> Tensor:
        """Effective (Y, Y) penalty: symmetrized softplus, or exact zeros."""
        if self.freeze_compat:
            return ad.const(np.zeros((self.num_actions, self.num_actions)))
        sp = ad.softplus(self.raw_compat)
        return ad.scale(ad.add(sp, ad.transpose(sp)), 0.5)

    def trans_tensor(self) -> Tensor:
        if self.freeze_trans:
            return ad.const(np.zeros(()))
        return ad.softplus(self.raw_trans)

    def compat_values(self) -> np.ndarray:
        return self.compat_tensor().data.copy()

    def trans_value(self) -> float:
        return float(self.trans_tensor().data)


@dataclass(eq=False)
class MarginalSet:
    """Per-person and per-pair marginal distributions."""

    actions: Tensor    # (n, Y) rows sum to 1
    relations: Tensor  # (P, 2) rows sum to 1

    def action_values(self) -> np.ndarray:
        return self.actions.data.copy()

    def relation_values(self) -> np.ndarray:
        return self.relations.data.copy()


@dataclass(eq=False)
class Labeling:
    """A hard assignment: one action class per person, one bit per pair."""

    actions: np.ndarray    # (n,)
    relations: np.ndarray  # (P,)

    def __post_init__(self):
        self.actions = np.asarray(self.actions, dtype=np.intp)
        self.relations = np.asarray(self.relations, dtype=np.intp)
        n = self.actions.shape[0]
        if self.relations.shape != (n * (n - 1) // 2,):
            raise ad.ShapeError("relation count must be n choose 2")
        if self.relations.size and not np.isin(self.relations, (0, 1)).all():
            raise ValueError("relations must be binary")

    @property
    def n(self) -> int:
        return self.actions.shape[0]


def potts_compat(y_j: int, y_k: int, z_jk: int, compat: np.ndarray) -> float:
    """Penalty paid when a claimed relation joins two action classes."""
    return float(compat[y_j, y_k]) if z_jk else 0.0


def potts_trans(z_rs: int, z_st: int, z_rt: int, trans: float) -> float:
    """Penalty paid when exactly two of a triple's three relations hold."""
    return float(trans) if z_rs + z_st + z_rt == 2 else 0.0


def energy(
    labeling: Labeling, scores: ScoreSet, car: CarParams, graph: InteractionGraph,
) -> float:
    """Scalar energy of one joint assignment under the given scores."""
    theta_y = scores.action_probs.data
    theta_z = scores.relation_probs.data
    y = labeling.actions
    z = labeling.relations
    if y.shape[0] != graph.n or z.shape[0] != graph.num_pairs:
        raise ad.ShapeError("labeling does not match graph size")
    compat = car.compat_values()
    trans = car.trans_value()

    total = -theta_y[np.arange(graph.n), y].sum()
    total -= theta_z[np.arange(graph.num_pairs), z].sum()
    u, v = graph.pairs[:, 0], graph.pairs[:, 1]
    total += (z * compat[y[u], y[v]]).sum()
    if graph.num_triples:
        zt = z[graph.triple_pair_slots]
        total += trans * (zt.sum(axis=1) == 2).sum()
    return float(total)


def _round_penalties(
    q_actions: Tensor, q_relations: Tensor, theta: ScoreSet,
    compat: Tensor, trans: Tensor, graph: InteractionGraph,
) -> tuple[Tensor, Tensor]:
    """Expected penalties for every variable, from one round's marginals."""
    pairs = graph.pairs
    n = graph.n
    k_idx, l_idx = pairs[:, 0], pairs[:, 1]

    z1 = ad.pairs_to_matrix(ad.col(q_relations, 1), n, pairs)
    z0 = ad.pairs_to_matrix(ad.col(q_relations, 0), n, pairs)

    # S[j, y] = sum over y_j of compat(y, y_j) * Q_j(y_j); compat is symmetric.
    s = ad.matmul(q_actions, compat)
    tilde_y = ad.sum_sorted(ad.weighted_rows(z1, s), axis=1)

    q_k = ad.gather_rows(q_actions, k_idx)
    q_l = ad.gather_rows(q_actions, l_idx)
    s_k = ad.gather_rows(s, k_idx)
    s_l = ad.gather_rows(s, l_idx)
    compat_on = ad.scale(ad.add(ad.rows_dot(q_k, s_l), ad.rows_dot(q_l, s_k)), 0.5)

    # Zero diagonals make the third-person sums skip m in {k, l} on their own.
    both = ad.gather_pairs(ad.sum_sorted(ad.chain_mul(z1, z1), axis=1), pairs)
    split = ad.gather_pairs(
        ad.sum_sorted(ad.add(ad.chain_mul(z1, z0), ad.chain_mul(z0, z1)), axis=1),
        pairs)

    tilde_z = ad.stack_cols(ad.mul(both, trans),
                            ad.add(compat_on, ad.mul(split, trans)))
    return tilde_y, tilde_z


def mean_field(
    scores: ScoreSet,
    car: CarParams,
    graph: InteractionGraph,
    trace: list | None = None,
) -> tuple[ScoreSet, MarginalSet]:
    """Refine scores through ``car.iterations`` synchronous rounds.

    Returns the refined scores (original scores minus the final round's
    expected penalties) and the matching final marginals. When ``trace``
    is a list, one entry per round is appended with marginal snapshots.
    """
    if car.iterations < 1:
        raise ValueError("need at least one refinement round")
    compat = car.compat_tensor()
    trans = car.trans_tensor()

    q_actions = ad.row_softmax(scores.action_probs)
    q_relations = ad.row_softmax(scores.relation_probs)

    tilde_y = tilde_z = None
    for round_idx in range(car.iterations):
        tilde_y, tilde_z = _round_penalties(
            q_actions, q_relations, scores, compat, trans, graph)
        q_actions = ad.row_softmax(ad.sub(scores.action_probs, tilde_y))
        q_relations = ad.row_softmax(ad.sub(scores.relation_probs, tilde_z))
        if trace is not None:
            trace.append({
                "round": round_idx + 1,
                "actions": q_actions.data.copy(),
                "relations": q_relations.data.copy(),
            })

    refined = ScoreSet(
        action_probs=ad.sub(scores.action_probs, tilde_y),
        relation_probs=ad.sub(scores.relation_probs, tilde_z),
    )
    return refined, MarginalSet(actions=q_actions, relations=q_relations)


def mf_action_update(
    marginals: MarginalSet, scores: ScoreSet, car: CarParams,
    graph: InteractionGraph, person: int,
) -> np.ndarray:
    """Reference one-person update; reads only the given marginals."""
    q_y = marginals.actions.data
    q_z = marginals.relations.data
    compat = car.compat_values()
    theta = scores.action_probs.data[person]
    tilde = np.zeros(car.num_actions)
    for other in range(graph.n):
        if other == person:
            continue
        slot = graph.pair_map.slot(person, other)
        tilde += compat @ q_y[other] * q_z[slot, 1]
    shifted = theta - tilde
    e = np.exp(shifted - shifted.max())
    return e / e.sum()


def mf_relation_update(
    marginals: MarginalSet, scores: ScoreSet, car: CarParams,
    graph: InteractionGraph, k: int, l: int,
) -> np.ndarray:
    """Reference one-pair update; reads only the given marginals."""
    if k > l:
        k, l = l, k
    q_y = marginals.actions.data
    q_z = marginals.relations.data
    compat = car.compat_values()
    trans = car.trans_value()
    slot = graph.pair_map.slot(k, l)
    theta = scores.relation_probs.data[slot]

    expected_compat = q_y[k] @ compat @ q_y[l]
    tilde = np.zeros(2)
    tilde[1] += expected_compat
    for m in range(graph.n):
        if m in (k, l):
            continue
        km = q_z[graph.pair_map.slot(k, m)]
        ml = q_z[graph.pair_map.slot(m, l)]
        # patterns of (z_km, z_ml, z_kl) with exactly two links
        tilde[0] += trans * km[1] * ml[1]
        tilde[1] += trans * (km[1] * ml[0] + km[0] * ml[1])
    shifted = theta - tilde
    e = np.exp(shifted - shifted.max())
    return e / e.sum()


def decode(scores: ScoreSet) -> Labeling:
    """Row argmax of both score blocks; ties go to the lowest class."""
    return Labeling(
        actions=np.argmax(scores.action_probs.data, axis=1),
        relations=np.argmax(scores.relation_probs.data, axis=1),
    )


def predict(
    togn: TognParams, car: CarParams, features: np.ndarray,
    graph: InteractionGraph | None = None,
) -> Labeling:
    """Evaluation-mode network pass, refinement, and per-variable argmax."""
    features = np.asarray(features, dtype=np.float64)
    graph = graph or build_graph(features.shape[0])
    scores = togn_forward(togn, features, graph, RunCtx(training=False))
    refined, _ = mean_field(scores, car, graph)
    return decode(refined)
