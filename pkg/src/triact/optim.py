"""Adam optimizer over named parameter dictionaries."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor

__all__ = ["AdamConfig", "AdamState", "adam_step"]


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


@dataclass
class AdamState:
    """First/second moment estimates plus the shared step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params: dict[str, Tensor]) -> "AdamState":
        return cls(
            m={k: np.zeros_like(t.data) for k, t in params.items()},
            v={k: np.zeros_like(t.data) for k, t in params.items()},
            step=0,
        )


def adam_step(
    params: dict[str, Tensor],
    grads: dict[str, np.ndarray],
    state: AdamState,
    config: AdamConfig = AdamConfig(),
    lr_scale: dict[str, float] | None = None,
) -> None:
    """One in-place Adam update with bias correction.

    Missing gradient entries are treated as zero (the moments still decay).
    lr_scale maps parameter names to a constant multiplier on the base rate,
    for parameters that should move slower (or faster) than the rest.
    """
    state.step += 1
    t = state.step
    bc1 = 1.0 - config.beta1 ** t
    bc2 = 1.0 - config.beta2 ** t
    for name, tensor in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(tensor.data)
        if g.shape != tensor.data.shape:
            raise ValueError(f"gradient shape mismatch for {name!r}")
        m = state.m[name]
        v = state.v[name]
        m *= config.beta1
        m += (1.0 - config.beta1) * g
        v *= config.beta2
        v += (1.0 - config.beta2) * (g * g)
        mhat = m / bc1
        vhat = v / bc2
        lr = config.lr
        if lr_scale is not None:
            lr *= lr_scale.get(name, 1.0)
        tensor.data -= lr * mhat / (np.sqrt(vhat) + config.eps)
