"""Joint action and interaction labeling with consistency-aware refinement.

A factor-graph network scores per-person actions and per-pair relations,
then a differentiable mean-field stage nudges the scores toward logically
consistent joint labelings. Exhaustive oracles, a synthetic scene
generator, metrics, training, and a CLI round out the package.
"""

from .exact import (ConsistencyReport, brute_force_map, check_compatibility,
                    check_transitivity, consistency_report, exact_marginals,
                    groups_from_z)
from .factorgraph import InteractionGraph, PairIndexMap, build_graph, pair_index
from .learn import TrainConfig, ablate, benchmark_config, evaluate_model, loss, train
from .metrics import (MetricReport, consistency_rate, evaluate, macro_f1,
                      mean_iou, overall_accuracy)
from .model import Model, load_model, save_model
from .network import (FeatureState, NetConfig, RunCtx, ScoreSet, TognParams,
                      init_edge_features, init_factor_features,
                      init_node_features, layer_forward, togn_forward)
from .reasoning import (CarParams, Labeling, MarginalSet, decode, energy,
                        mean_field, mf_action_update, mf_relation_update,
                        potts_compat, potts_trans, predict)
from .scenes import SceneConfig, SceneSample, compat_table, gen_dataset, gen_scene

__version__ = "0.1.0"

__all__ = [
    "ConsistencyReport", "brute_force_map", "check_compatibility",
    "check_transitivity", "consistency_report", "exact_marginals",
    "groups_from_z",
    "InteractionGraph", "PairIndexMap", "build_graph", "pair_index",
    "TrainConfig", "ablate", "benchmark_config", "evaluate_model", "loss", "train",
    "MetricReport", "consistency_rate", "evaluate", "macro_f1", "mean_iou",
    "overall_accuracy",
    "Model", "load_model", "save_model",
    "FeatureState", "NetConfig", "RunCtx", "ScoreSet", "TognParams",
    "init_edge_features", "init_factor_features", "init_node_features",
    "layer_forward", "togn_forward",
    "CarParams", "Labeling", "MarginalSet", "decode", "energy", "mean_field",
    "mf_action_update", "mf_relation_update", "potts_compat", "potts_trans",
    "predict",
    "SceneConfig", "SceneSample", "compat_table", "gen_dataset", "gen_scene",
]
