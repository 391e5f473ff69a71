"""Graph network: embeddings, message passing, heads, equivariance."""

import time

import numpy as np
import pytest

from triact import autodiff as ad
from triact.autodiff import NumericsError, RandomStream, ShapeError
from triact.factorgraph import build_graph
from triact.network import (NetConfig, RunCtx, TognParams, init_edge_features,
                            init_factor_features, init_node_features,
                            togn_forward)
from triact.scenes import SceneConfig, gen_scene, permute_sample

SMALL = NetConfig(feature_dim=6, num_actions=4, dim=8, edge_dim=5, depth=2)
EVAL = RunCtx(training=False)

rng = np.random.default_rng(0)


def small_params(seed=0):
    return TognParams.create(SMALL, seed=seed)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            NetConfig(feature_dim=0)
        with pytest.raises(ValueError):
            NetConfig(dropout=1.0)
        with pytest.raises(ValueError):
            NetConfig(depth=-1)
        NetConfig(depth=0)  # degenerate depth is allowed

    def test_parameter_inventory_scales_with_depth(self):
        shallow = TognParams.create(NetConfig(depth=1)).parameters()
        deep = TognParams.create(NetConfig(depth=3)).parameters()
        assert len(deep) > len(shallow)
        for name, tensor in deep.items():
            assert tensor.requires_grad, name

    def test_create_deterministic(self):
        a = TognParams.create(SMALL, seed=9).tensors
        b = TognParams.create(SMALL, seed=9).tensors
        assert set(a) == set(b)
        for k in a:
            assert np.array_equal(a[k].data, b[k].data), k
        c = TognParams.create(SMALL, seed=10).tensors
        assert not np.array_equal(a["proj_y.w"].data, c["proj_y.w"].data)


class TestInitFeatures:
    def test_shapes(self):
        g = build_graph(4)
        feats = rng.normal(size=(4, 6))
        nodes = init_node_features(small_params(), feats, g, EVAL)
        assert nodes.data.shape == (g.num_nodes, 8)
        factors = init_factor_features(nodes, g)
        assert factors.data.shape == (g.num_factors, 8)
        edges = init_edge_features(small_params(), nodes, factors, g, EVAL)
        assert edges.data.shape == (g.num_edges, 5)

    def test_bad_inputs_rejected(self):
        g = build_graph(3)
        with pytest.raises(ShapeError):
            init_node_features(small_params(), rng.normal(size=(3, 5)), g, EVAL)
        with pytest.raises(ShapeError):
            init_node_features(small_params(), rng.normal(size=(4, 6)), g, EVAL)
        bad = np.full((3, 6), np.nan)
        with pytest.raises(NumericsError):
            init_node_features(small_params(), bad, g, EVAL)

    def test_pair_embedding_orientation_free(self):
        # Swapping the two participants must leave the pair node bitwise equal.
        g = build_graph(2)
        p = small_params()
        feats = rng.normal(size=(2, 6))
        a = init_node_features(p, feats, g, EVAL).data
        b = init_node_features(p, feats[::-1], g, EVAL).data
        assert np.array_equal(a[2], b[2])

    def test_factor_rows_are_member_means(self):
        g = build_graph(5)
        p = small_params()
        nodes = init_node_features(p, rng.normal(size=(5, 6)), g, EVAL)
        factors = init_factor_features(nodes, g).data
        for c in range(g.num_factors):
            want = nodes.data[g.factor_members[c]].mean(axis=0)
            assert np.allclose(factors[c], want, atol=1e-12)

    def test_edge_features_nonnegative(self):
        for seed in range(100):
            g = build_graph(3)
            p = small_params(seed)
            r = np.random.default_rng(seed)
            nodes = init_node_features(p, r.normal(size=(3, 6)), g, EVAL)
            factors = init_factor_features(nodes, g)
            edges = init_edge_features(p, nodes, factors, g, EVAL).data
            assert np.all(edges >= 0), seed


class TestForward:
    def test_score_shapes_and_sums(self):
        g = build_graph(5)
        out = togn_forward(small_params(), rng.normal(size=(5, 6)), g, EVAL)
        assert out.action_probs.data.shape == (5, 4)
        assert out.relation_probs.data.shape == (10, 2)
        assert np.allclose(out.action_probs.data.sum(axis=1), 1, atol=1e-9)
        assert np.allclose(out.relation_probs.data.sum(axis=1), 1, atol=1e-9)
        assert np.all(out.action_probs.data > 0)

    def test_depth_zero_heads_on_initial_features(self):
        cfg = NetConfig(feature_dim=6, num_actions=4, dim=8, edge_dim=5, depth=0)
        p = TognParams.create(cfg, seed=3)
        g = build_graph(3)
        feats = rng.normal(size=(3, 6))
        out = togn_forward(p, feats, g, EVAL)

        nodes = init_node_features(p, feats, g, EVAL)
        wy, by = p.tensors["head_y.w"], p.tensors["head_y.b"]
        want = ad.row_softmax(ad.linear(
            ad.gather_rows(nodes, np.arange(3)), wy, by)).data
        assert np.array_equal(out.action_probs.data, want)

    def test_duplicate_participants_share_scores(self):
        g = build_graph(2)
        p = small_params()
        row = rng.normal(size=6)
        feats = np.stack([row, row])
        out = togn_forward(p, feats, g, EVAL)
        assert np.allclose(out.action_probs.data[0], out.action_probs.data[1],
                           atol=1e-12)

    def test_eval_mode_is_default_and_deterministic(self):
        g = build_graph(3)
        p = small_params()
        feats = rng.normal(size=(3, 6))
        a = togn_forward(p, feats, g).action_probs.data
        b = togn_forward(p, feats, g, EVAL).action_probs.data
        assert np.array_equal(a, b)

    def test_training_mode_uses_dropout(self):
        g = build_graph(3)
        p = small_params()
        feats = rng.normal(size=(3, 6))
        base = togn_forward(p, feats, g, EVAL).action_probs.data
        noisy = togn_forward(p, feats, g,
                             RunCtx(training=True, stream=RandomStream(1)))
        assert not np.array_equal(base, noisy.action_probs.data)
        again = togn_forward(p, feats, g,
                             RunCtx(training=True, stream=RandomStream(1)))
        assert np.array_equal(noisy.action_probs.data, again.action_probs.data)

    def test_permutation_equivariance_bitwise(self):
        cfg = SceneConfig(feature_dim=6, num_actions=4)
        p = small_params()
        r = np.random.default_rng(5)
        for seed in range(10):
            sample = gen_scene(cfg, seed=seed)
            perm = r.permutation(sample.n)
            moved = permute_sample(sample, perm)
            g = build_graph(sample.n)
            base = togn_forward(p, sample.features, g, EVAL)
            out = togn_forward(p, moved.features, g, EVAL)
            # moved person k carries old person perm[k]'s features
            assert np.array_equal(out.action_probs.data,
                                  base.action_probs.data[perm])
            for slot in range(g.num_pairs):
                k, l = g.pair_map.people(slot)
                old_slot = g.pair_map.slot(int(perm[k]), int(perm[l]))
                assert np.array_equal(out.relation_probs.data[slot],
                                      base.relation_probs.data[old_slot])

    def test_default_config_forward_under_a_second(self):
        p = TognParams.create(NetConfig())
        g = build_graph(6)
        feats = rng.normal(size=(6, 32))
        togn_forward(p, feats, g, EVAL)  # warm caches
        t0 = time.perf_counter()
        togn_forward(p, feats, g, EVAL)
        assert time.perf_counter() - t0 < 1.0

    def test_gradients_flow_to_every_parameter(self):
        g = build_graph(3)
        p = small_params()
        feats = rng.normal(size=(3, 6))
        with ad.Tape() as tape:
            out = togn_forward(p, feats, g, EVAL)
            loss = ad.add(ad.asum(ad.cross_entropy_rows(
                out.action_probs, np.zeros(3, dtype=int))),
                ad.asum(ad.cross_entropy_rows(
                    out.relation_probs, np.zeros(3, dtype=int))))
        grads = ad.gradients(tape, loss, p.parameters())
        zero = {k for k, v in grads.items() if not np.any(v != 0)}
        # the last layer's factor update is never consumed by the heads,
        # so only that block may sit idle
        last_factor = f"layer{SMALL.depth - 1}.to_factor."
        assert all(k.startswith(last_factor) for k in zero), sorted(zero)
