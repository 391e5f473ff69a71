"""The full model: network plus consistency penalties, with persistence."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .checkpoint import CheckpointError, load_tensors, save_tensors
from .factorgraph import InteractionGraph, build_graph
from .network import NetConfig, RunCtx, ScoreSet, TognParams, togn_forward
from .reasoning import (CarParams, Labeling, MarginalSet, decode, mean_field)

__all__ = ["Model", "save_model", "load_model"]


@dataclass(eq=False)
class Model:
    net: TognParams
    car: CarParams

    @classmethod
    def create(
        cls,
        config: NetConfig,
        iterations: int = 10,
        compat_init: float = 0.5,
        trans_init: float = 0.1,
        freeze_compat: bool = False,
        freeze_trans: bool = False,
        seed: int = 0,
    ) -> "Model":
        return cls(
            net=TognParams.create(config, seed=seed),
            car=CarParams.create(
                config.num_actions, iterations=iterations,
                compat_init=compat_init, trans_init=trans_init,
                freeze_compat=freeze_compat, freeze_trans=freeze_trans),
        )

    @property
    def num_actions(self) -> int:
        return self.net.config.num_actions

    def parameters(self) -> dict[str, ad.Tensor]:
        out = {f"net.{k}": t for k, t in self.net.parameters().items()}
        out.update({f"car.{k}": t for k, t in self.car.parameters().items()})
        return out

    def refine(
        self,
        features: np.ndarray,
        graph: InteractionGraph | None = None,
        ctx: RunCtx | None = None,
        trace: list | None = None,
    ) -> tuple[ScoreSet, ScoreSet, MarginalSet]:
        """Run the network and the refinement; returns (raw, refined, marginals)."""
        features = np.asarray(features, dtype=np.float64)
        graph = graph or build_graph(features.shape[0])
        raw = togn_forward(self.net, features, graph, ctx or RunCtx())
        refined, marginals = mean_field(raw, self.car, graph, trace=trace)
        return raw, refined, marginals

    def predict(self, features: np.ndarray, graph: InteractionGraph | None = None) -> Labeling:
        _, refined, _ = self.refine(features, graph)
        return decode(refined)


def save_model(path: str | Path, model: Model, extra_meta: dict | None = None) -> None:
    tensors = {f"net.{k}": t.data for k, t in model.net.tensors.items()}
    tensors["car.raw_compat"] = model.car.raw_compat.data
    tensors["car.raw_trans"] = model.car.raw_trans.data
    meta = {
        "net": asdict(model.net.config),
        "car": {
            "iterations": model.car.iterations,
            "freeze_compat": model.car.freeze_compat,
            "freeze_trans": model.car.freeze_trans,
        },
    }
    if extra_meta:
        meta["extra"] = extra_meta
    save_tensors(path, tensors, meta)


def load_model(path: str | Path) -> Model:
    tensors, meta = load_tensors(path)
    try:
        config = NetConfig(**meta["net"])
        car_meta = meta["car"]
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"{path}: missing model metadata") from exc

    net_tensors: dict[str, ad.Tensor] = {}
    reference = TognParams.create(config, seed=0)
    for key, ref in reference.tensors.items():
        full = f"net.{key}"
        if full not in tensors:
            raise CheckpointError(f"{path}: missing tensor {full!r}")
        if tensors[full].shape != ref.data.shape:
            raise CheckpointError(f"{path}: bad shape for {full!r}")
        net_tensors[key] = ad.param(tensors[full])
    net = TognParams(config=config, tensors=net_tensors)

    for key in ("car.raw_compat", "car.raw_trans"):
        if key not in tensors:
            raise CheckpointError(f"{path}: missing tensor {key!r}")
    car = CarParams(
        num_actions=config.num_actions,
        iterations=int(car_meta["iterations"]),
        raw_compat=ad.param(tensors["car.raw_compat"]),
        raw_trans=ad.param(tensors["car.raw_trans"]),
        freeze_compat=bool(car_meta["freeze_compat"]),
        freeze_trans=bool(car_meta["freeze_trans"]),
    )
    return Model(net=net, car=car)
