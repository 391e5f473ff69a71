"""Reverse-mode automatic differentiation over numpy arrays.

Values live in :class:`Tensor`. While a :class:`Tape` is active, every
operation involving a gradient-tracked tensor appends one backward rule;
:func:`backward` replays the tape once, in reverse order of recording,
accumulating gradients into ``Tensor.grad``.

The op set is deliberately small: exactly what dense feature networks and
an unrolled mean-field loop need. Reductions over participant axes go
through :func:`sum_sorted`, which sums addends in value order so that the
result is invariant under relabeling of the summed axis at the bit level.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "ShapeError",
    "NumericsError",
    "Tensor",
    "Tape",
    "RandomStream",
    "param",
    "const",
    "backward",
    "gradients",
    "grad_check",
]

FLOAT = np.float64
CROSS_ENTROPY_FLOOR = 1e-12
LAYER_NORM_EPS = 1e-5


class ShapeError(ValueError):
    """Operand shapes do not satisfy an operation's contract."""


class NumericsError(RuntimeError):
    """A numerical quantity left its valid domain (non-finite, etc.)."""


class Tensor:
    """A numpy array plus gradient bookkeeping."""

    __slots__ = ("data", "grad", "requires_grad")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=FLOAT)
        self.grad: np.ndarray | None = None
        self.requires_grad = bool(requires_grad)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def copy_value(self) -> np.ndarray:
        return self.data.copy()

    def __repr__(self) -> str:
        flag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{flag})"

    # Convenience arithmetic; floats are promoted to constants.
    def __add__(self, other):
        return add(self, as_tensor(other))

    def __radd__(self, other):
        return add(as_tensor(other), self)

    def __sub__(self, other):
        return sub(self, as_tensor(other))

    def __rsub__(self, other):
        return sub(as_tensor(other), self)

    def __mul__(self, other):
        return mul(self, as_tensor(other))

    def __rmul__(self, other):
        return mul(as_tensor(other), self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, as_tensor(other))


def param(data) -> Tensor:
    """A gradient-tracked tensor (model parameter or marked input)."""
    return Tensor(data, requires_grad=True)


def const(data) -> Tensor:
    return Tensor(data)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


_TAPES: list["Tape"] = []


class Tape:
    """Ordered record of primitive operations from one forward pass."""

    def __init__(self):
        self._records: list[tuple[Tensor, tuple[Tensor, ...], Callable]] = []
        self._produced: set[int] = set()

    def __enter__(self) -> "Tape":
        _TAPES.append(self)
        return self

    def __exit__(self, *exc) -> None:
        popped = _TAPES.pop()
        assert popped is self

    def __len__(self) -> int:
        return len(self._records)

    def owns(self, t: Tensor) -> bool:
        return id(t) in self._produced

    def _add(self, out: Tensor, inputs: tuple[Tensor, ...], back: Callable) -> None:
        self._records.append((out, inputs, back))
        self._produced.add(id(out))


def _emit(out_data: np.ndarray, inputs: tuple[Tensor, ...], back: Callable) -> Tensor:
    """Wrap an op result, recording the backward rule if anything is tracked."""
    out = Tensor(out_data)
    tape = _TAPES[-1] if _TAPES else None
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape._add(out, inputs, back)
    return out


def backward(tape: Tape, loss: Tensor) -> None:
    """Propagate d(loss) to every tracked tensor reachable on ``tape``.

    Grad fields of all tensors touched by the tape are reset first, so a
    second call recomputes from scratch rather than accumulating.
    """
    if loss.data.ndim != 0:
        raise ShapeError(f"loss must be scalar, got shape {loss.data.shape}")
    if loss.requires_grad and not tape.owns(loss):
        raise ValueError("loss was not produced on this tape")
    for out, inputs, _ in tape._records:
        out.grad = None
        for t in inputs:
            t.grad = None
    loss.grad = np.ones((), dtype=FLOAT)
    for out, inputs, back in reversed(tape._records):
        g = out.grad
        if g is None:
            continue
        for t, gi in zip(inputs, back(g)):
            if gi is None or not t.requires_grad:
                continue
            t.grad = gi if t.grad is None else t.grad + gi


def gradients(tape: Tape, loss: Tensor, params: dict[str, Tensor]) -> dict[str, np.ndarray]:
    """Gradients for named parameters; untouched parameters get zeros."""
    backward(tape, loss)
    return {
        name: (np.zeros_like(t.data) if t.grad is None else t.grad.copy())
        for name, t in params.items()
    }


# ---------------------------------------------------------------------------
# Elementwise arithmetic


def _scalar_compatible(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape or a.ndim == 0 or b.ndim == 0


def _reduce_to(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    return np.sum(g).reshape(shape)  # broadcast partner was scalar


def add(a: Tensor, b: Tensor) -> Tensor:
    if not _scalar_compatible(a.data, b.data):
        raise ShapeError(f"add: {a.data.shape} vs {b.data.shape}")
    ash, bsh = a.data.shape, b.data.shape
    return _emit(a.data + b.data, (a, b),
                 lambda g: (_reduce_to(g, ash), _reduce_to(g, bsh)))


def sub(a: Tensor, b: Tensor) -> Tensor:
    if not _scalar_compatible(a.data, b.data):
        raise ShapeError(f"sub: {a.data.shape} vs {b.data.shape}")
    ash, bsh = a.data.shape, b.data.shape
    return _emit(a.data - b.data, (a, b),
                 lambda g: (_reduce_to(g, ash), _reduce_to(-g, bsh)))


def mul(a: Tensor, b: Tensor) -> Tensor:
    if not _scalar_compatible(a.data, b.data):
        raise ShapeError(f"mul: {a.data.shape} vs {b.data.shape}")
    av, bv = a.data, b.data
    return _emit(av * bv, (a, b),
                 lambda g: (_reduce_to(g * bv, av.shape), _reduce_to(g * av, bv.shape)))


def neg(a: Tensor) -> Tensor:
    return _emit(-a.data, (a,), lambda g: (-g,))


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _emit(a.data * c, (a,), lambda g: (g * c,))


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return _emit(out, (a,), lambda g: (g * out,))


def log(a: Tensor) -> Tensor:
    av = a.data
    return _emit(np.log(av), (a,), lambda g: (g / av,))


def softplus(a: Tensor) -> Tensor:
    av = a.data
    out = np.logaddexp(0.0, av)
    return _emit(out, (a,), lambda g: (g * _sigmoid(av),))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def softplus_inverse(y) -> np.ndarray:
    """x with softplus(x) = y, for y > 0. Tiny y saturates near log(y)."""
    y = np.asarray(y, dtype=FLOAT)
    if np.any(y <= 0):
        raise ValueError("softplus_inverse requires positive input")
    with np.errstate(divide="ignore"):
        return np.where(y > 30.0, y, np.log(np.expm1(np.minimum(y, 30.0))))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _emit(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


# ---------------------------------------------------------------------------
# Reductions


def asum(a: Tensor) -> Tensor:
    sh = a.data.shape
    return _emit(np.sum(a.data), (a,), lambda g: (np.broadcast_to(g, sh).copy(),))


def amean(a: Tensor) -> Tensor:
    n = a.data.size
    sh = a.data.shape
    return _emit(np.sum(a.data) / n, (a,),
                 lambda g: (np.broadcast_to(g / n, sh).copy(),))


def sum_sorted(a: Tensor, axis: int) -> Tensor:
    """Sum along ``axis`` with addends pre-sorted by value.

    The result depends only on the multiset of addends, so outputs are
    bit-identical under any permutation of the reduced axis.
    """
    out = np.sort(a.data, axis=axis).sum(axis=axis)
    sh = a.data.shape

    def back(g):
        return (np.broadcast_to(np.expand_dims(g, axis), sh).copy(),)

    return _emit(out, (a,), back)


def dot(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 1 or a.data.shape != b.data.shape:
        raise ShapeError(f"dot: {a.data.shape} vs {b.data.shape}")
    av, bv = a.data, b.data
    return _emit(np.dot(av, bv), (a, b), lambda g: (g * bv, g * av))


def rows_dot(a: Tensor, b: Tensor) -> Tensor:
    """Row-wise dot product of two equal-shape matrices -> vector."""
    if a.data.shape != b.data.shape or a.data.ndim != 2:
        raise ShapeError(f"rows_dot: {a.data.shape} vs {b.data.shape}")
    av, bv = a.data, b.data
    out = np.einsum("rc,rc->r", av, bv)
    return _emit(out, (a, b), lambda g: (g[:, None] * bv, g[:, None] * av))


# ---------------------------------------------------------------------------
# Linear algebra


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul: {a.data.shape} @ {b.data.shape}")
    av, bv = a.data, b.data
    return _emit(av @ bv, (a, b), lambda g: (g @ bv.T, av.T @ g))


def transpose(a: Tensor) -> Tensor:
    return _emit(a.data.T.copy(), (a,), lambda g: (g.T,))


def affine(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """w @ x + b for a single vector x; w is (out, in)."""
    xv, wv, bv = x.data, w.data, b.data
    if xv.ndim != 1 or wv.ndim != 2 or bv.ndim != 1:
        raise ShapeError(
            f"affine expects vector/matrix/vector, got {xv.shape}/{wv.shape}/{bv.shape}")
    if wv.shape[1] != xv.shape[0] or wv.shape[0] != bv.shape[0]:
        raise ShapeError(
            f"affine shape mismatch: w {wv.shape}, x {xv.shape}, b {bv.shape}")
    out = wv @ xv + bv
    return _emit(out, (x, w, b),
                 lambda g: (wv.T @ g, np.outer(g, xv), g))


def linear(x: Tensor, w: Tensor, b: Tensor) -> Tensor:
    """Row-batched affine map: x (R, in) @ w (out, in)^T + b."""
    xv, wv, bv = x.data, w.data, b.data
    if xv.ndim != 2 or wv.ndim != 2 or xv.shape[1] != wv.shape[1] or wv.shape[0] != bv.shape[0]:
        raise ShapeError(
            f"linear shape mismatch: x {xv.shape}, w {wv.shape}, b {bv.shape}")
    out = xv @ wv.T + bv
    return _emit(out, (x, w, b),
                 lambda g: (g @ wv, g.T @ xv, g.sum(axis=0)))


def batched_matvec(a_flat: Tensor, x: Tensor) -> Tensor:
    """Per-row matrix-vector product.

    ``a_flat`` is (R, out*in), each row a flattened (out, in) matrix; ``x``
    is (R, in). Returns (R, out).
    """
    av, xv = a_flat.data, x.data
    rows, din = xv.shape
    if av.shape[0] != rows or av.shape[1] % din != 0:
        raise ShapeError(f"batched_matvec: {av.shape} with {xv.shape}")
    dout = av.shape[1] // din
    a3 = av.reshape(rows, dout, din)
    out = np.einsum("rij,rj->ri", a3, xv)

    def back(g):
        da = np.einsum("ri,rj->rij", g, xv).reshape(rows, dout * din)
        dx = np.einsum("rij,ri->rj", a3, g)
        return (da, dx)

    return _emit(out, (a_flat, x), back)


# ---------------------------------------------------------------------------
# Shape manipulation and indexing


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    old = a.data.shape
    return _emit(a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def concat(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 1 or b.data.ndim != 1:
        raise ShapeError("concat expects vectors")
    na = a.data.shape[0]
    return _emit(np.concatenate([a.data, b.data]), (a, b),
                 lambda g: (g[:na], g[na:]))


def hstack(a: Tensor, b: Tensor) -> Tensor:
    """Column-concatenate two matrices with equal row counts."""
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[0] != b.data.shape[0]:
        raise ShapeError(f"hstack: {a.data.shape} vs {b.data.shape}")
    na = a.data.shape[1]
    return _emit(np.concatenate([a.data, b.data], axis=1), (a, b),
                 lambda g: (g[:, :na], g[:, na:]))


def vstack(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[1]:
        raise ShapeError(f"vstack: {a.data.shape} vs {b.data.shape}")
    na = a.data.shape[0]
    return _emit(np.concatenate([a.data, b.data], axis=0), (a, b),
                 lambda g: (g[:na], g[na:]))


def gather_rows(a: Tensor, idx: np.ndarray) -> Tensor:
    idx = np.asarray(idx, dtype=np.intp)
    av = a.data

    def back(g):
        da = np.zeros_like(av)
        np.add.at(da, idx, g)
        return (da,)

    return _emit(av[idx], (a,), back)


def col(a: Tensor, j: int) -> Tensor:
    av = a.data

    def back(g):
        da = np.zeros_like(av)
        da[:, j] = g
        return (da,)

    return _emit(av[:, j].copy(), (a,), back)


def stack_cols(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape or a.data.ndim != 1:
        raise ShapeError(f"stack_cols: {a.data.shape} vs {b.data.shape}")
    return _emit(np.stack([a.data, b.data], axis=1), (a, b),
                 lambda g: (g[:, 0], g[:, 1]))


def pairs_to_matrix(v: Tensor, n: int, pairs: np.ndarray) -> Tensor:
    """Scatter a per-pair vector into a symmetric (n, n) matrix, zero diagonal."""
    pairs = np.asarray(pairs, dtype=np.intp)
    k, l = pairs[:, 0], pairs[:, 1]
    out = np.zeros((n, n), dtype=FLOAT)
    out[k, l] = v.data
    out[l, k] = v.data
    return _emit(out, (v,), lambda g: (g[k, l] + g[l, k],))


def gather_pairs(m: Tensor, pairs: np.ndarray) -> Tensor:
    pairs = np.asarray(pairs, dtype=np.intp)
    k, l = pairs[:, 0], pairs[:, 1]
    mv = m.data

    def back(g):
        dm = np.zeros_like(mv)
        np.add.at(dm, (k, l), g)
        return (dm,)

    return _emit(mv[k, l].copy(), (m,), back)


def weighted_rows(a: Tensor, b: Tensor) -> Tensor:
    """out[i, j, :] = a[i, j] * b[j, :] for a (n, n) and b (n, c)."""
    av, bv = a.data, b.data
    if av.ndim != 2 or bv.ndim != 2 or av.shape[1] != bv.shape[0]:
        raise ShapeError(f"weighted_rows: {av.shape} with {bv.shape}")
    out = av[:, :, None] * bv[None, :, :]

    def back(g):
        da = np.einsum("ijc,jc->ij", g, bv)
        db = np.einsum("ijc,ij->jc", g, av)
        return (da, db)

    return _emit(out, (a, b), back)


def chain_mul(a: Tensor, b: Tensor) -> Tensor:
    """out[k, m, l] = a[k, m] * b[m, l] for two (n, n) matrices."""
    av, bv = a.data, b.data
    if av.shape != bv.shape or av.ndim != 2 or av.shape[0] != av.shape[1]:
        raise ShapeError(f"chain_mul: {av.shape} with {bv.shape}")
    out = av[:, :, None] * bv[None, :, :]

    def back(g):
        da = np.einsum("kml,ml->km", g, bv)
        db = np.einsum("kml,km->ml", g, av)
        return (da, db)

    return _emit(out, (a, b), back)


def mean3_sorted(a: Tensor, b: Tensor, c: Tensor) -> Tensor:
    """Entrywise mean of three equal-shape arrays, summed in value order."""
    if not (a.data.shape == b.data.shape == c.data.shape):
        raise ShapeError("mean3_sorted expects equal shapes")
    stacked = np.sort(np.stack([a.data, b.data, c.data], axis=0), axis=0)
    out = stacked.sum(axis=0) / 3.0
    return _emit(out, (a, b, c), lambda g: (g / 3.0, g / 3.0, g / 3.0))


# ---------------------------------------------------------------------------
# Neural-net primitives


def softmax(s: Tensor) -> Tensor:
    if s.data.ndim != 1 or s.data.size == 0:
        raise ShapeError("softmax expects a nonempty vector")
    shifted = s.data - s.data.max()
    e = np.exp(shifted)
    out = e / e.sum()

    def back(g):
        inner = np.dot(g, out)
        return (out * (g - inner),)

    return _emit(out, (s,), back)


def row_softmax(s: Tensor) -> Tensor:
    if s.data.ndim != 2 or s.data.shape[1] == 0:
        raise ShapeError("row_softmax expects a matrix with nonempty rows")
    shifted = s.data - s.data.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=1, keepdims=True)

    def back(g):
        inner = np.sum(g * out, axis=1, keepdims=True)
        return (out * (g - inner),)

    return _emit(out, (s,), back)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor) -> Tensor:
    """Normalize the last axis to zero mean, unit variance; affine output."""
    xv = x.data
    width = xv.shape[-1]
    if gain.data.shape != (width,) or bias.data.shape != (width,):
        raise ShapeError(
            f"layer_norm affine params must have shape ({width},)")
    mu = xv.mean(axis=-1, keepdims=True)
    var = xv.var(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    xhat = (xv - mu) * inv
    gv = gain.data
    out = xhat * gv + bias.data

    def back(g):
        lead = tuple(range(g.ndim - 1))
        dgain = np.sum(g * xhat, axis=lead)
        dbias = np.sum(g, axis=lead)
        gx = g * gv
        m1 = gx.mean(axis=-1, keepdims=True)
        m2 = (gx * xhat).mean(axis=-1, keepdims=True)
        dx = (gx - m1 - xhat * m2) * inv
        return (dx, dgain, dbias)

    return _emit(out, (x, gain, bias), back)


def dropout(x: Tensor, ratio: float, stream: "RandomStream | None", training: bool) -> Tensor:
    """Zero entries with probability ``ratio``; rescale survivors.

    Identity outside training mode. Training mode requires a stream.
    """
    if not 0.0 <= ratio < 1.0:
        raise ValueError(f"dropout ratio must be in [0, 1), got {ratio}")
    if not training or ratio == 0.0:
        return x
    if stream is None:
        raise ValueError("training-mode dropout needs a random stream")
    keep = stream.uniform(x.data.shape) >= ratio
    factor = keep / (1.0 - ratio)
    return _emit(x.data * factor, (x,), lambda g: (g * factor,))


def max_pool_rows(x: Tensor, group: int) -> Tensor:
    """Entrywise max over consecutive row groups of fixed size.

    Gradient routes to the single argmax row per entry; ties break toward
    the lowest row index.
    """
    xv = x.data
    rows, width = xv.shape
    if group < 1 or rows % group != 0:
        raise ShapeError(f"max_pool_rows: {rows} rows not grouped by {group}")
    blocks = xv.reshape(rows // group, group, width)
    arg = blocks.argmax(axis=1)
    out = np.take_along_axis(blocks, arg[:, None, :], axis=1)[:, 0, :]

    def back(g):
        dblocks = np.zeros_like(blocks)
        np.put_along_axis(dblocks, arg[:, None, :], g[:, None, :], axis=1)
        return (dblocks.reshape(rows, width),)

    return _emit(out, (x,), back)


def cross_entropy(p: Tensor, label: int) -> Tensor:
    """-log p[label], with the probability floored at 1e-12."""
    pv = p.data
    if pv.ndim != 1:
        raise ShapeError("cross_entropy expects a probability vector")
    if not 0 <= label < pv.shape[0]:
        raise ValueError(f"label {label} out of range for {pv.shape[0]} classes")
    q = pv[label]
    clamped = q < CROSS_ENTROPY_FLOOR
    safe = max(q, CROSS_ENTROPY_FLOOR)

    def back(g):
        dp = np.zeros_like(pv)
        if not clamped:
            dp[label] = -g / safe
        return (dp,)

    return _emit(np.asarray(-np.log(safe)), (p,), back)


def cross_entropy_rows(p: Tensor, labels: np.ndarray) -> Tensor:
    """Per-row -log p[row, label], floored; returns a vector of losses."""
    pv = p.data
    labels = np.asarray(labels, dtype=np.intp)
    if pv.ndim != 2 or labels.shape != (pv.shape[0],):
        raise ShapeError(f"cross_entropy_rows: {pv.shape} with {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= pv.shape[1]):
        raise ValueError("label out of range")
    rows = np.arange(pv.shape[0])
    q = pv[rows, labels]
    live = q >= CROSS_ENTROPY_FLOOR
    safe = np.maximum(q, CROSS_ENTROPY_FLOOR)

    def back(g):
        dp = np.zeros_like(pv)
        dp[rows, labels] = np.where(live, -g / safe, 0.0)
        return (dp,)

    return _emit(-np.log(safe), (p,), back)


# ---------------------------------------------------------------------------
# Randomness and validation


class RandomStream:
    """Counter-based pseudo-random stream.

    Draw ``i`` depends only on (seed, i), so replaying a run reproduces
    every mask bit-exactly regardless of what happened between draws.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.calls = 0

    def uniform(self, shape) -> np.ndarray:
        key = np.array([self.seed, self.calls], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        self.calls += 1
        return gen.random(shape)


def grad_check(
    f: Callable[[], Tensor],
    params: dict[str, Tensor],
    step: float = 1e-5,
    coords: Iterable[tuple[str, int]] | None = None,
) -> float:
    """Compare tape gradients of ``f()`` against central finite differences.

    ``f`` must be deterministic (run dropout in evaluation mode). ``coords``
    selects (param name, flat index) pairs; by default every coordinate is
    checked. Returns the worst relative error.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    with Tape() as tape:
        out = f()
    if not np.isfinite(out.data):
        raise NumericsError("grad_check: function value is not finite")
    grads = gradients(tape, out, params)

    if coords is None:
        coords = [(name, i) for name, t in params.items() for i in range(t.size)]

    worst = 0.0
    for name, idx in coords:
        t = params[name]
        flat = t.data.reshape(-1)
        orig = flat[idx]
        flat[idx] = orig + step
        fp = float(f().data)
        flat[idx] = orig - step
        fm = float(f().data)
        flat[idx] = orig
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise NumericsError("grad_check: perturbed value is not finite")
        fd = (fp - fm) / (2.0 * step)
        ad = grads[name].reshape(-1)[idx]
        rel = abs(ad - fd) / max(abs(ad), abs(fd), 1e-6)
        worst = max(worst, rel)
    return worst
