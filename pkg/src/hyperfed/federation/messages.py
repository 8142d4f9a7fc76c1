"""Payloads exchanged between clients and the server."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        a, b = np.asarray(a), np.asarray(b)
        return a.shape == b.shape and bool(np.array_equal(a, b))
    if isinstance(a, (tuple, list)) and isinstance(b, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    if dataclasses.is_dataclass(a) and type(a) is type(b):
        return all(
            _same(getattr(a, f.name), getattr(b, f.name)) for f in dataclasses.fields(a)
        )
    return a == b


class _Message:
    def __eq__(self, other):
        return type(self) is type(other) and _same(self, other)

    __hash__ = None


class HcUploadEntry(NamedTuple):
    edge_id: int
    embedding: np.ndarray  # partial hyperedge embedding over this client's members
    count: int  # local member count


class HcBroadcastEntry(NamedTuple):
    edge_id: int
    embedding: np.ndarray  # summed over all clients
    degree: int  # global edge degree s(e)
    weight: float


@dataclass(eq=False)
class HcUploadMsg(_Message):
    client_id: int
    layer: int
    entries: tuple[HcUploadEntry, ...] = ()


@dataclass(eq=False)
class HcBroadcastMsg(_Message):
    layer: int
    entries: tuple[HcBroadcastEntry, ...] = ()


@dataclass(eq=False)
class ParamUploadMsg(_Message):
    client_id: int
    param_blocks: tuple[np.ndarray, ...]
    train_node_count: int


@dataclass(eq=False)
class ParamBroadcastMsg(_Message):
    param_blocks: tuple[np.ndarray, ...]
