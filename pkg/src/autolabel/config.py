"""`key = value` config files: flat string pairs, `#` comments allowed."""

from __future__ import annotations

import os

__all__ = ["load_config", "resolve"]


def load_config(path) -> dict[str, str]:
    cfg: dict[str, str] = {}
    path = os.fspath(path)
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def resolve(flag, cfg: dict[str, str], key: str, default, cast=str):
    """Single precedence rule: flag > config file > built-in default."""
    if flag is not None:
        return flag
    if key in cfg:
        return cast(cfg[key])
    return default
