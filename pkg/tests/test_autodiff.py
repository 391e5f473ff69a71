"""Numeric substrate: ops, tape, gradients, dropout stream, Adam."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triact import autodiff as ad
from triact.autodiff import (NumericsError, RandomStream, ShapeError, Tape,
                             Tensor, backward, const, grad_check, gradients,
                             param)
from triact.optim import AdamConfig, AdamState, adam_step

rng = np.random.default_rng(42)


def check_unary(op, shape, *, positive=False, coords=None, tol=1e-6, **kwargs):
    data = rng.normal(size=shape)
    if positive:
        data = np.abs(data) + 0.5
    p = param(data)
    worst = grad_check(lambda: ad.asum(op(p, **kwargs)), {"p": p}, coords=coords)
    assert worst < tol, f"{op.__name__}: {worst}"


class TestElementwise:
    def test_add_sub_mul_values(self):
        a, b = const([1.0, 2.0]), const([3.0, 5.0])
        assert np.allclose(ad.add(a, b).data, [4, 7])
        assert np.allclose(ad.sub(a, b).data, [-2, -3])
        assert np.allclose(ad.mul(a, b).data, [3, 10])

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            ad.add(const([1.0, 2.0]), const([1.0, 2.0, 3.0]))

    def test_scalar_broadcast(self):
        a = param(rng.normal(size=(3, 2)))
        c = param(np.asarray(2.5))
        worst = grad_check(lambda: ad.asum(ad.mul(a, c)), {"a": a, "c": c})
        assert worst < 1e-6

    def test_gradients(self):
        for op in (ad.add, ad.sub, ad.mul):
            a = param(rng.normal(size=5))
            b = param(rng.normal(size=5))
            worst = grad_check(lambda: ad.asum(op(a, b)), {"a": a, "b": b})
            assert worst < 1e-6, op.__name__

    def test_unary_gradients(self):
        check_unary(ad.neg, (4,))
        check_unary(ad.exp, (4,))
        check_unary(ad.log, (4,), positive=True)
        check_unary(ad.softplus, (6,))
        check_unary(lambda t: ad.scale(t, -1.7), (3, 2))

    def test_relu_away_from_kink(self):
        p = param(np.array([-2.0, -0.5, 0.7, 3.0]))
        worst = grad_check(lambda: ad.asum(ad.relu(p)), {"p": p})
        assert worst < 1e-6

    def test_softplus_inverse_round_trip(self):
        y = np.array([1e-8, 0.1, 0.5, 3.0, 40.0])
        x = ad.softplus_inverse(y)
        assert np.allclose(np.logaddexp(0, x), y, rtol=1e-9)
        with pytest.raises(ValueError):
            ad.softplus_inverse(0.0)


class TestReductionsAndLinear:
    def test_sum_mean(self):
        check_unary(ad.asum, (3, 4))
        check_unary(ad.amean, (5,))

    def test_sum_sorted_matches_sum(self):
        x = rng.normal(size=(4, 6, 3))
        assert np.allclose(ad.sum_sorted(const(x), axis=1).data, x.sum(axis=1))
        p = param(x)
        worst = grad_check(lambda: ad.asum(ad.sum_sorted(p, axis=1)), {"p": p})
        assert worst < 1e-6

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_sum_sorted_permutation_invariant_bitwise(self, seed):
        r = np.random.default_rng(seed)
        x = r.normal(size=(5, 7))
        perm = r.permutation(7)
        a = ad.sum_sorted(const(x), axis=1).data
        b = ad.sum_sorted(const(x[:, perm]), axis=1).data
        assert np.array_equal(a, b)

    def test_dot_matmul(self):
        a, b = param(rng.normal(size=6)), param(rng.normal(size=6))
        assert grad_check(lambda: ad.dot(a, b), {"a": a, "b": b}) < 1e-6
        m, k = param(rng.normal(size=(3, 4))), param(rng.normal(size=(4, 2)))
        assert grad_check(lambda: ad.asum(ad.matmul(m, k)), {"m": m, "k": k}) < 1e-6
        with pytest.raises(ShapeError):
            ad.matmul(const(np.ones((2, 3))), const(np.ones((2, 3))))

    def test_affine_matches_manual(self):
        x = rng.normal(size=8)
        w = rng.normal(size=(5, 8))
        b = rng.normal(size=5)
        got = ad.affine(const(x), const(w), const(b)).data
        want = np.array([np.dot(w[i], x) + b[i] for i in range(5)])
        assert np.allclose(got, want)

    def test_affine_shape_report(self):
        with pytest.raises(ShapeError) as err:
            ad.affine(const(np.ones(3)), const(np.ones((2, 4))), const(np.ones(2)))
        assert "(2, 4)" in str(err.value)

    def test_affine_linear_batched_matvec_gradients(self):
        x, w, b = param(rng.normal(size=4)), param(rng.normal(size=(3, 4))), param(rng.normal(size=3))
        assert grad_check(lambda: ad.asum(ad.affine(x, w, b)),
                          {"x": x, "w": w, "b": b}) < 1e-6
        xm = param(rng.normal(size=(6, 4)))
        assert grad_check(lambda: ad.asum(ad.linear(xm, w, b)),
                          {"x": xm, "w": w, "b": b}) < 1e-6
        a = param(rng.normal(size=(5, 12)))
        v = param(rng.normal(size=(5, 4)))
        assert grad_check(lambda: ad.asum(ad.batched_matvec(a, v)),
                          {"a": a, "v": v}) < 1e-6

    def test_rows_dot_transpose(self):
        a = param(rng.normal(size=(4, 3)))
        b = param(rng.normal(size=(4, 3)))
        assert grad_check(lambda: ad.asum(ad.rows_dot(a, b)), {"a": a, "b": b}) < 1e-6
        t = param(rng.normal(size=(3, 5)))
        assert grad_check(lambda: ad.asum(ad.transpose(t)), {"t": t}) < 1e-6


class TestShapeOps:
    def test_gather_scatter_stack(self):
        a = param(rng.normal(size=(5, 3)))
        idx = np.array([0, 2, 2, 4])
        assert grad_check(lambda: ad.asum(ad.gather_rows(a, idx)), {"a": a}) < 1e-6

        v = param(rng.normal(size=6))
        pairs = np.array([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        assert grad_check(lambda: ad.asum(ad.pairs_to_matrix(v, 4, pairs)),
                          {"v": v}) < 1e-6
        m = param(rng.normal(size=(4, 4)))
        assert grad_check(lambda: ad.asum(ad.gather_pairs(m, pairs)), {"m": m}) < 1e-6

        x, y = param(rng.normal(size=4)), param(rng.normal(size=4))
        assert grad_check(lambda: ad.asum(ad.stack_cols(x, y)), {"x": x, "y": y}) < 1e-6
        c = param(rng.normal(size=(3, 2)))
        assert grad_check(lambda: ad.asum(ad.col(c, 1)), {"c": c}) < 1e-6

    def test_concat_hstack_vstack_reshape(self):
        a, b = param(rng.normal(size=3)), param(rng.normal(size=5))
        assert grad_check(lambda: ad.asum(ad.concat(a, b)), {"a": a, "b": b}) < 1e-6
        m1, m2 = param(rng.normal(size=(2, 3))), param(rng.normal(size=(2, 4)))
        assert grad_check(lambda: ad.asum(ad.hstack(m1, m2)), {"a": m1, "b": m2}) < 1e-6
        v1, v2 = param(rng.normal(size=(2, 3))), param(rng.normal(size=(4, 3)))
        assert grad_check(lambda: ad.asum(ad.vstack(v1, v2)), {"a": v1, "b": v2}) < 1e-6
        r = param(rng.normal(size=(4, 3)))
        assert grad_check(lambda: ad.asum(ad.reshape(r, (2, 6))), {"r": r}) < 1e-6

    def test_weighted_rows_chain_mul_mean3(self):
        a = param(rng.normal(size=(4, 4)))
        b = param(rng.normal(size=(4, 3)))
        assert grad_check(lambda: ad.asum(ad.weighted_rows(a, b)),
                          {"a": a, "b": b}) < 1e-6
        c = param(rng.normal(size=(4, 4)))
        assert grad_check(lambda: ad.asum(ad.chain_mul(a, c)), {"a": a, "c": c}) < 1e-6
        x, y, z = (param(rng.normal(size=(3, 2))) for _ in range(3))
        assert grad_check(lambda: ad.asum(ad.mean3_sorted(x, y, z)),
                          {"x": x, "y": y, "z": z}) < 1e-6

    def test_mean3_sorted_order_free(self):
        x, y, z = (rng.normal(size=(5, 4)) for _ in range(3))
        a = ad.mean3_sorted(const(x), const(y), const(z)).data
        b = ad.mean3_sorted(const(z), const(x), const(y)).data
        assert np.array_equal(a, b)


class TestNetPrimitives:
    def test_softmax_basics(self):
        assert np.allclose(ad.softmax(const([0.0, 0.0])).data, [0.5, 0.5])
        assert np.allclose(ad.softmax(const([7.0, 7.0, 7.0])).data, [1 / 3] * 3)
        with pytest.raises(ShapeError):
            ad.softmax(const(np.zeros(0)))

    @given(st.lists(st.floats(-30, 30), min_size=1, max_size=8),
           st.floats(-50, 50))
    @settings(max_examples=50, deadline=None)
    def test_softmax_sums_and_shift_invariance(self, values, shift):
        s = np.array(values)
        p = ad.softmax(const(s)).data
        assert abs(p.sum() - 1.0) < 1e-9
        q = ad.softmax(const(s + shift)).data
        assert np.allclose(p, q, atol=1e-12)

    def test_softmax_gradients(self):
        s = param(rng.normal(size=5))
        w = const(rng.normal(size=5))
        assert grad_check(lambda: ad.dot(ad.softmax(s), w), {"s": s}) < 1e-6
        m = param(rng.normal(size=(3, 4)))
        wm = const(rng.normal(size=(3, 4)))
        assert grad_check(lambda: ad.asum(ad.mul(ad.row_softmax(m), wm)),
                          {"m": m}) < 1e-6

    def test_layer_norm(self):
        x = rng.normal(size=(6, 8))
        g, b = np.ones(8), np.zeros(8)
        out = ad.layer_norm(const(x), const(g), const(b)).data
        assert np.allclose(out.mean(axis=-1), 0, atol=1e-9)
        assert np.allclose(out.var(axis=-1), 1, atol=1e-4)
        flat = ad.layer_norm(const(np.full((3,), 2.2)), const(np.ones(3)),
                             const(np.zeros(3))).data
        assert np.allclose(flat, 0)

    def test_layer_norm_gradients(self):
        x = param(rng.normal(size=(4, 6)))
        g = param(rng.normal(size=6) + 1.0)
        b = param(rng.normal(size=6))
        w = const(rng.normal(size=(4, 6)))
        assert grad_check(lambda: ad.asum(ad.mul(ad.layer_norm(x, g, b), w)),
                          {"x": x, "g": g, "b": b}) < 1e-5

    def test_max_pool_rows(self):
        x = np.array([[1.0, 5.0], [3.0, 2.0], [0.0, 9.0], [4.0, 1.0]])
        out = ad.max_pool_rows(const(x), 2).data
        assert np.allclose(out, [[3, 5], [4, 9]])
        with pytest.raises(ShapeError):
            ad.max_pool_rows(const(x), 3)

    def test_max_pool_tie_routes_to_lowest_row(self):
        x = param(np.array([[2.0], [2.0]]))
        with Tape() as tape:
            out = ad.asum(ad.max_pool_rows(x, 2))
        backward(tape, out)
        assert np.allclose(x.grad, [[1.0], [0.0]])

    def test_max_pool_gradient(self):
        x = param(rng.normal(size=(9, 4)))
        w = const(rng.normal(size=(3, 4)))
        assert grad_check(lambda: ad.asum(ad.mul(ad.max_pool_rows(x, 3), w)),
                          {"x": x}) < 1e-6

    def test_cross_entropy_values(self):
        assert ad.cross_entropy(const([1.0, 0.0]), 0).data <= 1e-7
        assert np.isclose(ad.cross_entropy(const([0.5, 0.5]), 1).data, np.log(2))
        assert np.isclose(ad.cross_entropy(const([0.1, 0.9]), 0).data, -np.log(0.1))
        with pytest.raises(ValueError):
            ad.cross_entropy(const([0.5, 0.5]), 2)

    def test_cross_entropy_floor(self):
        out = ad.cross_entropy(const([0.0, 1.0]), 0)
        assert np.isclose(out.data, -np.log(1e-12))
        p = param(np.array([0.0, 1.0]))
        with Tape() as tape:
            l = ad.cross_entropy(p, 0)
        backward(tape, l)
        assert np.allclose(p.grad, 0)  # clamped region has zero slope

    def test_cross_entropy_rows(self):
        p = param(np.array([[0.2, 0.8], [0.6, 0.4]]))
        labels = np.array([1, 0])
        with Tape() as tape:
            l = ad.asum(ad.cross_entropy_rows(p, labels))
        assert np.isclose(l.data, -np.log(0.8) - np.log(0.6))
        backward(tape, l)
        assert np.allclose(p.grad, [[0, -1 / 0.8], [-1 / 0.6, 0]])


class TestDropout:
    def test_eval_mode_identity(self):
        x = const(rng.normal(size=(4, 4)))
        out = ad.dropout(x, 0.3, None, training=False)
        assert out is x

    def test_ratio_zero_identity(self):
        x = const(rng.normal(size=(4, 4)))
        assert ad.dropout(x, 0.0, RandomStream(0), training=True) is x

    def test_training_requires_stream(self):
        with pytest.raises(ValueError):
            ad.dropout(const(np.ones(3)), 0.3, None, training=True)
        with pytest.raises(ValueError):
            ad.dropout(const(np.ones(3)), 1.0, RandomStream(0), training=True)

    def test_mask_statistics_and_scaling(self):
        x = const(np.ones((200, 200)))
        out = ad.dropout(x, 0.3, RandomStream(7), training=True).data
        kept = out != 0
        assert abs(kept.mean() - 0.7) < 0.01
        assert np.allclose(out[kept], 1 / 0.7)

    def test_counter_based_reproducibility(self):
        s1, s2 = RandomStream(11), RandomStream(11)
        a1 = ad.dropout(const(np.ones(50)), 0.4, s1, training=True).data
        a2 = ad.dropout(const(np.ones(50)), 0.4, s2, training=True).data
        assert np.array_equal(a1, a2)
        b1 = ad.dropout(const(np.ones(50)), 0.4, s1, training=True).data
        assert not np.array_equal(a1, b1)  # counter advanced
        assert s1.calls == 2


class TestTape:
    def test_records_only_when_tracked_and_active(self):
        a = const(np.ones(3))
        b = param(np.ones(3))
        with Tape() as tape:
            ad.add(a, a)
            assert len(tape) == 0
            out = ad.add(a, b)
            assert len(tape) == 1 and tape.owns(out)
        assert not tape.owns(ad.add(a, b))  # outside the with-block

    def test_backward_simple_product(self):
        w = param(np.array([4.0]))
        x = const(np.array([3.0]))
        with Tape() as tape:
            l = ad.asum(ad.mul(w, x))
        backward(tape, l)
        assert np.allclose(w.grad, [3.0])

    def test_backward_resets_between_calls(self):
        w = param(np.array([2.0]))
        with Tape() as tape:
            l = ad.asum(ad.mul(w, w))
        backward(tape, l)
        g1 = w.grad.copy()
        backward(tape, l)
        assert np.array_equal(w.grad, g1)

    def test_untouched_param_gets_zero(self):
        w = param(np.ones(3))
        unused = param(np.ones(2))
        with Tape() as tape:
            l = ad.asum(w)
        grads = gradients(tape, l, {"w": w, "unused": unused})
        assert np.allclose(grads["unused"], 0)
        assert np.allclose(grads["w"], 1)

    def test_foreign_loss_rejected(self):
        w = param(np.ones(2))
        with Tape():
            pass
        with Tape() as other:
            loss = ad.asum(w)
        with Tape() as fresh:
            ad.asum(w)
        with pytest.raises(ValueError):
            backward(fresh, loss)
        backward(other, loss)  # its own tape is fine

    def test_non_scalar_loss_rejected(self):
        w = param(np.ones(2))
        with Tape() as tape:
            out = ad.mul(w, w)
        with pytest.raises(ShapeError):
            backward(tape, out)

    def test_composed_chain_matches_fd(self):
        w = param(rng.normal(size=(3, 4)))
        b = param(rng.normal(size=3))
        x = const(rng.normal(size=4))

        def f():
            return ad.cross_entropy(ad.softmax(ad.affine(x, w, b)), 1)

        assert grad_check(f, {"w": w, "b": b}) < 1e-6

    def test_grad_check_rejects_nonfinite(self):
        w = param(np.array([1.0]))
        with np.errstate(divide="ignore"), pytest.raises(NumericsError):
            grad_check(lambda: ad.log(ad.sub(w, w)), {"w": w})
        with pytest.raises(ValueError):
            grad_check(lambda: ad.asum(w), {"w": w}, step=0.0)

    def test_grad_check_quadratic(self):
        w = param(np.array([3.0]))
        assert grad_check(lambda: ad.asum(ad.mul(w, w)), {"w": w},
                          step=1e-4) < 1e-6

    def test_grad_check_constant(self):
        w = param(np.array([3.0]))
        c = const(np.array([1.0]))
        assert grad_check(lambda: ad.asum(c), {"w": w}) < 1e-12

    def test_determinism_bitwise(self):
        def run():
            r = np.random.default_rng(3)
            w = param(r.normal(size=(4, 4)))
            x = const(r.normal(size=(4, 4)))
            d = ad.dropout(x, 0.3, RandomStream(5), training=True)
            with Tape() as tape:
                l = ad.asum(ad.mul(ad.matmul(w, d), d))
            grads = gradients(tape, l, {"w": w})
            return float(l.data), grads["w"]

        l1, g1 = run()
        l2, g2 = run()
        assert l1 == l2 and np.array_equal(g1, g2)


class TestAdam:
    def test_zero_grad_leaves_params_unchanged(self):
        p = param(rng.normal(size=(3, 3)))
        before = p.data.copy()
        state = AdamState.for_params({"p": p})
        adam_step({"p": p}, {"p": np.zeros((3, 3))}, state)
        assert np.array_equal(p.data, before)
        assert state.step == 1

    def test_first_step_is_lr_times_sign(self):
        p = param(np.array([1.0, -2.0]))
        state = AdamState.for_params({"p": p})
        g = np.array([0.3, -0.7])
        adam_step({"p": p}, {"p": g}, state, AdamConfig(lr=0.01))
        assert np.allclose(p.data, [1.0 - 0.01, -2.0 + 0.01], atol=1e-6)

    def test_matches_reference_implementation(self):
        p = param(rng.normal(size=4))
        ref = p.data.copy()
        cfg = AdamConfig(lr=0.05)
        state = AdamState.for_params({"p": p})
        m = np.zeros(4)
        v = np.zeros(4)
        for t in range(1, 6):
            g = rng.normal(size=4)
            adam_step({"p": p}, {"p": g.copy()}, state, cfg)
            m = cfg.beta1 * m + (1 - cfg.beta1) * g
            v = cfg.beta2 * v + (1 - cfg.beta2) * g * g
            mhat = m / (1 - cfg.beta1 ** t)
            vhat = v / (1 - cfg.beta2 ** t)
            ref = ref - cfg.lr * mhat / (np.sqrt(vhat) + cfg.eps)
        assert np.allclose(p.data, ref, atol=1e-12)

    def test_quadratic_descends(self):
        p = param(np.array([5.0]))
        state = AdamState.for_params({"p": p})
        cfg = AdamConfig(lr=0.1)
        losses = []
        for _ in range(200):
            losses.append(float(p.data[0] ** 2))
            adam_step({"p": p}, {"p": 2 * p.data}, state, cfg)
        assert losses[-1] < 1e-3 < losses[0]

    def test_shape_mismatch_rejected(self):
        p = param(np.ones(3))
        state = AdamState.for_params({"p": p})
        with pytest.raises(ValueError):
            adam_step({"p": p}, {"p": np.ones(4)}, state)

    def test_missing_grad_treated_as_zero(self):
        p = param(np.ones(2))
        state = AdamState.for_params({"p": p})
        adam_step({"p": p}, {}, state)
        assert np.array_equal(p.data, np.ones(2))
