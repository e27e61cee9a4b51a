from .baselines import (
    ChurchGaleModel,
    DummyModel,
    fit_church_gale,
    train_church_gale,
    train_dummy,
    unit_cg_score,
)
from .forest import (
    ForestModel,
    ForestParams,
    bootstrap_indices,
    fit_forest,
    load_model,
    model_from_json,
    model_to_json,
    predict,
    save_model,
    train_forest,
)
from .tree import Leaf, Split, grow_tree

__all__ = [
    "ChurchGaleModel",
    "DummyModel",
    "ForestModel",
    "ForestParams",
    "Leaf",
    "Split",
    "bootstrap_indices",
    "fit_church_gale",
    "fit_forest",
    "grow_tree",
    "load_model",
    "model_from_json",
    "model_to_json",
    "predict",
    "save_model",
    "train_church_gale",
    "train_dummy",
    "train_forest",
    "unit_cg_score",
]
