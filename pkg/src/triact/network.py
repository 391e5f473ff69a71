"""Third-order graph network over the interaction factor graph.

The forward pass embeds per-person features into action nodes, pair
concatenations into relation nodes, seeds factor features with the mean
of their three member nodes, computes one gating feature per edge, then
runs a stack of message-passing layers. Each layer updates factors from
nodes and nodes from factors in parallel (both read the previous layer),
where every edge contributes a candidate vector produced by an MLP on the
concatenated [factor, node] features, linearly transformed by a matrix
predicted from the edge feature, and candidates are combined by entrywise
max. Classification heads turn final node features into probabilities.

The relation-node embedding averages both concatenation orders of the two
people, so outputs do not depend on how the pair happens to be ordered;
combined with order-free pooling this makes evaluation-mode outputs exactly
equivariant under relabeling of people.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import RandomStream, Tensor
from .factorgraph import InteractionGraph

__all__ = [
    "NetConfig",
    "RunCtx",
    "FeatureState",
    "ScoreSet",
    "TognParams",
    "init_node_features",
    "init_factor_features",
    "init_edge_features",
    "layer_forward",
    "togn_forward",
]


@dataclass(frozen=True)
class NetConfig:
    feature_dim: int = 32
    num_actions: int = 9
    dim: int = 64
    edge_dim: int = 16
    depth: int = 10
    dropout: float = 0.3

    def __post_init__(self):
        if min(self.feature_dim, self.num_actions, self.dim, self.edge_dim) < 1:
            raise ValueError("dimensions must be positive")
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")


@dataclass
class RunCtx:
    """Mode flags threaded through the forward pass."""

    training: bool = False
    stream: RandomStream | None = None


@dataclass(eq=False)
class FeatureState:
    """Per-layer features; edge features are fixed after initialization."""

    nodes: Tensor    # (num_nodes, dim)
    factors: Tensor  # (num_factors, dim)
    edges: Tensor    # (num_edges, edge_dim)


@dataclass(eq=False)
class ScoreSet:
    """Head outputs: probability rows for actions and relations."""

    action_probs: Tensor    # (n, num_actions)
    relation_probs: Tensor  # (num_pairs, 2)


def _layer_key(layer: int, side: str, block: str) -> str:
    return f"layer{layer}.{side}.{block}"


@dataclass(eq=False)
class TognParams:
    """All network tensors, keyed by block name, in creation order."""

    config: NetConfig
    tensors: dict[str, Tensor] = field(default_factory=dict)

    @classmethod
    def create(cls, config: NetConfig, seed: int = 0) -> "TognParams":
        rng = np.random.default_rng([int(seed), 11])
        p = cls(config=config)

        def dense(key: str, din: int, dout: int, normed: bool = True):
            limit = np.sqrt(6.0 / (din + dout))
            p.tensors[f"{key}.w"] = ad.param(rng.uniform(-limit, limit, size=(dout, din)))
            p.tensors[f"{key}.b"] = ad.param(np.zeros(dout))
            if normed:
                p.tensors[f"{key}.ln_g"] = ad.param(np.ones(dout))
                p.tensors[f"{key}.ln_b"] = ad.param(np.zeros(dout))

        d, h, feat = config.dim, config.edge_dim, config.feature_dim
        dense("proj_y", feat, d)
        dense("proj_z", 2 * feat, d)
        dense("proj_e", 2 * d, h)
        for layer in range(config.depth):
            for side in ("to_factor", "to_node"):
                dense(_layer_key(layer, side, "msg1"), 2 * d, d)
                dense(_layer_key(layer, side, "msg2"), d, d)
                dense(_layer_key(layer, side, "mix1"), h, d)
                dense(_layer_key(layer, side, "mix2"), d, d * d)
        dense("head_y", d, config.num_actions, normed=False)
        dense("head_z", d, 2, normed=False)
        return p

    def parameters(self) -> dict[str, Tensor]:
        return self.tensors

    def _block(self, key: str, x: Tensor, ctx: RunCtx, activate: bool) -> Tensor:
        out = ad.linear(x, self.tensors[f"{key}.w"], self.tensors[f"{key}.b"])
        if f"{key}.ln_g" in self.tensors:
            out = ad.dropout(out, self.config.dropout, ctx.stream, ctx.training)
            out = ad.layer_norm(out, self.tensors[f"{key}.ln_g"],
                                self.tensors[f"{key}.ln_b"])
        if activate:
            out = ad.relu(out)
        return out

    def _mlp(self, key1: str, key2: str, x: Tensor, ctx: RunCtx) -> Tensor:
        return self._block(key2, self._block(key1, x, ctx, activate=True),
                           ctx, activate=False)


def init_node_features(
    params: TognParams, features: np.ndarray, graph: InteractionGraph, ctx: RunCtx,
) -> Tensor:
    """Embed people and pairs into one (num_nodes, dim) feature matrix."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape != (graph.n, params.config.feature_dim):
        raise ad.ShapeError(
            f"expected ({graph.n}, {params.config.feature_dim}) features, "
            f"got {features.shape}")
    if not np.all(np.isfinite(features)):
        raise ad.NumericsError("input features must be finite")

    y_feats = params._block("proj_y", ad.const(features), ctx, activate=False)

    u = graph.pairs[:, 0]
    v = graph.pairs[:, 1]
    fwd = ad.const(np.concatenate([features[u], features[v]], axis=1))
    rev = ad.const(np.concatenate([features[v], features[u]], axis=1))
    w, b = params.tensors["proj_z.w"], params.tensors["proj_z.b"]
    raw = ad.scale(ad.add(ad.linear(fwd, w, b), ad.linear(rev, w, b)), 0.5)
    raw = ad.dropout(raw, params.config.dropout, ctx.stream, ctx.training)
    z_feats = ad.layer_norm(raw, params.tensors["proj_z.ln_g"],
                            params.tensors["proj_z.ln_b"])

    return ad.vstack(y_feats, z_feats)


def init_factor_features(node_feats: Tensor, graph: InteractionGraph) -> Tensor:
    """Each factor starts as the mean of its three member node features."""
    m = graph.factor_members
    return ad.mean3_sorted(
        ad.gather_rows(node_feats, m[:, 0]),
        ad.gather_rows(node_feats, m[:, 1]),
        ad.gather_rows(node_feats, m[:, 2]),
    )


def init_edge_features(
    params: TognParams, node_feats: Tensor, factor_feats: Tensor,
    graph: InteractionGraph, ctx: RunCtx,
) -> Tensor:
    """One nonnegative gating vector per edge from its [node, factor] pair."""
    inp = ad.hstack(ad.gather_rows(node_feats, graph.edge_node),
                    ad.gather_rows(factor_feats, graph.edge_factor))
    return params._block("proj_e", inp, ctx, activate=True)


def _side_update(
    params: TognParams, layer: int, side: str, msg_in: Tensor,
    edges: Tensor, ctx: RunCtx,
) -> Tensor:
    """Per-edge candidates: edge-conditioned matrix applied to message MLP."""
    m = params._mlp(_layer_key(layer, side, "msg1"),
                    _layer_key(layer, side, "msg2"), msg_in, ctx)
    q = params._mlp(_layer_key(layer, side, "mix1"),
                    _layer_key(layer, side, "mix2"), edges, ctx)
    return ad.batched_matvec(q, m)


def layer_forward(
    params: TognParams, layer: int, state: FeatureState,
    graph: InteractionGraph, ctx: RunCtx,
) -> FeatureState:
    """One synchronous round of factor and node updates."""
    assert graph.degree >= 1, "graph construction guarantees degree >= 1"
    msg_in = ad.hstack(ad.gather_rows(state.factors, graph.edge_factor),
                       ad.gather_rows(state.nodes, graph.edge_node))

    factor_cand = _side_update(params, layer, "to_factor", msg_in, state.edges, ctx)
    new_factors = ad.max_pool_rows(factor_cand, 3)

    node_cand = _side_update(params, layer, "to_node", msg_in, state.edges, ctx)
    per_node = ad.gather_rows(node_cand, graph.node_edge_slots.reshape(-1))
    new_nodes = ad.max_pool_rows(per_node, graph.degree)

    return FeatureState(nodes=new_nodes, factors=new_factors, edges=state.edges)


def togn_forward(
    params: TognParams, features: np.ndarray, graph: InteractionGraph,
    ctx: RunCtx | None = None,
) -> ScoreSet:
    """Full network pass: embeddings, message-passing stack, heads."""
    ctx = ctx or RunCtx()
    nodes = init_node_features(params, features, graph, ctx)
    factors = init_factor_features(nodes, graph)
    edges = init_edge_features(params, nodes, factors, graph, ctx)
    state = FeatureState(nodes=nodes, factors=factors, edges=edges)
    for layer in range(params.config.depth):
        state = layer_forward(params, layer, state, graph, ctx)

    y_rows = ad.gather_rows(state.nodes, np.arange(graph.n))
    z_rows = ad.gather_rows(state.nodes,
                            np.arange(graph.n, graph.num_nodes))
    action = ad.row_softmax(ad.linear(y_rows, params.tensors["head_y.w"],
                                      params.tensors["head_y.b"]))
    relation = ad.row_softmax(ad.linear(z_rows, params.tensors["head_z.w"],
                                        params.tensors["head_z.b"]))
    return ScoreSet(action_probs=action, relation_probs=relation)
