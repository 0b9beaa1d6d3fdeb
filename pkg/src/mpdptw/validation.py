"""Input checking shared by the estimators and the CLI."""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from .instance import Instance, InstanceSyntaxError, instance_from_dict, load_instance, parse_instance


def check_instance(X: Any, **fleet: Any) -> Instance:
    """Coerce ``X`` to an :class:`Instance`.

    Accepts an Instance, a mapping in the file layout, JSON text, or a path
    to a JSON file. Keyword arguments override fleet parameters (None values
    are ignored).
    """
    if isinstance(X, Instance):
        inst = X
    elif isinstance(X, Mapping):
        inst = instance_from_dict(X)
    elif isinstance(X, Path):
        inst = load_instance(X)
    elif isinstance(X, str):
        if X.lstrip().startswith("{"):
            inst = parse_instance(X)
        else:
            inst = load_instance(X)
    else:
        raise TypeError(f"expected an Instance, mapping, JSON text or path, got {type(X).__name__}")
    if any(v is not None for v in fleet.values()):
        inst = inst.with_fleet(**fleet)
    return inst


def load_config_file(path: str | Path) -> dict:
    """Read GA settings from a JSON object file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceSyntaxError(f"config file {path} must hold a JSON object")
    return data
