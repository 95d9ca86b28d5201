"""
Filename: serialization.py

Description:
    Reads and writes survival trees as version-tagged JSON documents.
    Output is deterministic: keys keep insertion order and floats use
    their shortest round-trip representation.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from dipoletree.core.data import Standardization
from dipoletree.core.splitter import SplitModel
from dipoletree.tree.growth import GrowthConfig, SurvivalTree, TreeNode
from dipoletree.tree.survival import KaplanMeier
from dipoletree.utilities.errors import ModelFormatError

logger = logging.getLogger(__name__)

MODEL_VERSION = "dipole-tree/1"


def _node_to_dict(node: TreeNode) -> dict[str, Any]:
    record: dict[str, Any] = {
        "node_id": node.node_id,
        "depth": node.depth,
        "n_samples": node.n_samples,
        "median": node.median,
        "median_reached": node.median_reached,
        "km": node.km.to_dict(),
    }

    if not node.is_leaf:
        record.update({
            "logrank": node.logrank,
            "split": node.split.to_dict(),
            "left": _node_to_dict(node.left),
            "right": _node_to_dict(node.right),
        })

    return record


def _node_from_dict(record: dict[str, Any]) -> TreeNode:
    node = TreeNode(
        int(record["node_id"]), int(record["depth"]), KaplanMeier.from_dict(record["km"]),
        float(record["median"]), int(record["n_samples"]), bool(record.get("median_reached", True)),
    )

    if "split" in record:
        node.split = SplitModel.from_dict(record["split"])
        node.left = _node_from_dict(record["left"])
        node.right = _node_from_dict(record["right"])
        node.logrank = float(record["logrank"])

    return node


def tree_to_dict(tree: SurvivalTree, metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    """ Model document for a tree, with optional extra metadata """
    document = {
        "version": MODEL_VERSION,
        "covariates": list(tree.covariates),
        "standardization": tree.standardization.to_dict(),
        "config": tree.config.to_dict(),
        "root": _node_to_dict(tree.root),
    }

    if metadata:
        document["metadata"] = metadata

    return document


def tree_from_dict(document: dict[str, Any], source: Any = "<memory>") -> SurvivalTree:
    """ Rebuilds a tree from a model document """
    if not isinstance(document, dict):
        raise ModelFormatError(source, "top level must be an object")

    version = document.get("version")
    if version != MODEL_VERSION:
        raise ModelFormatError(source, f"unsupported version {version!r}, expected {MODEL_VERSION!r}")

    try:
        standardization = Standardization.from_dict(document["standardization"])
        config = GrowthConfig.from_dict(document["config"])
        root = _node_from_dict(document["root"])
        covariates = tuple(document.get("covariates", ()))
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(source, f"malformed document ({type(e).__name__}: {e})") from e

    if covariates and len(covariates) != standardization.p:
        raise ModelFormatError(source, "covariate names do not match the standardization")

    return SurvivalTree(root, standardization, config, covariates)


def dumps_model(tree: SurvivalTree, metadata: dict[str, Any] | None = None) -> str:
    """ Deterministic JSON text of a model document """
    return json.dumps(tree_to_dict(tree, metadata), indent=2, allow_nan=False, default=_encode) + "\n"


def _encode(value: Any) -> Any:
    """ numpy scalars reaching the encoder """
    if isinstance(value, np.generic):
        return value.item()

    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def write_model(path: str | Path, tree: SurvivalTree, metadata: dict[str, Any] | None = None) -> Path:
    """ Writes the model document to path """
    path = Path(path)
    path.write_text(dumps_model(tree, metadata), encoding="utf-8")

    logger.info("Wrote model with %d nodes to %s", tree.n_nodes, path)
    return path


def read_model(path: str | Path) -> SurvivalTree:
    """ Reads a model document written by write_model """
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ModelFormatError(path.name, f"cannot be read ({e})") from e
    except json.JSONDecodeError as e:
        raise ModelFormatError(path.name, f"is not valid JSON ({e.msg} at line {e.lineno})") from e

    return tree_from_dict(document, path.name)
