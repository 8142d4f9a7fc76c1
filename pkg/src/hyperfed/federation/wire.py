"""Binary framing for federation messages, plus the two transports.

Frame layout::

    u32 LE  length of everything after this prefix
    u8      tag (0x01 HcUpload, 0x02 HcBroadcast, 0x03 ParamUpload, 0x04 ParamBroadcast)
    body    fields in declaration order

Integers are i64 LE, reals are f64 LE, a list is an i64 count followed by
its elements, and a matrix is ``rows, cols`` followed by its row-major
values as a list of reals.
"""

from __future__ import annotations

import struct

import numpy as np

from ..errors import LengthMismatch, MalformedFrame, UnknownTag
from .messages import (
    HcBroadcastEntry,
    HcBroadcastMsg,
    HcUploadEntry,
    HcUploadMsg,
    ParamBroadcastMsg,
    ParamUploadMsg,
)

TAG_HC_UPLOAD = 0x01
TAG_HC_BROADCAST = 0x02
TAG_PARAM_UPLOAD = 0x03
TAG_PARAM_BROADCAST = 0x04

_I64 = struct.Struct("<q")
_F64 = struct.Struct("<d")
_U32 = struct.Struct("<I")


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def int(self, value) -> None:
        self.parts.append(_I64.pack(int(value)))

    def real(self, value) -> None:
        self.parts.append(_F64.pack(float(value)))

    def reals(self, values) -> None:
        arr = np.ascontiguousarray(values, dtype="<f8").reshape(-1)
        self.int(arr.size)
        self.parts.append(arr.tobytes())

    def matrix(self, values) -> None:
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise MalformedFrame(f"matrix field must be 2-d, got {arr.ndim} dims")
        self.int(arr.shape[0])
        self.int(arr.shape[1])
        self.reals(arr)

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, buf: bytes, offset: int = 0):
        self.buf = buf
        self.pos = offset

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.buf):
            raise MalformedFrame(f"frame truncated at byte {self.pos} (wanted {n} more)")
        chunk = self.buf[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def int(self) -> int:
        return _I64.unpack(self.take(8))[0]

    def real(self) -> float:
        return _F64.unpack(self.take(8))[0]

    def count(self) -> int:
        n = self.int()
        if n < 0:
            raise MalformedFrame(f"negative list length {n}")
        return n

    def reals(self) -> np.ndarray:
        n = self.count()
        return np.frombuffer(self.take(8 * n), dtype="<f8").astype(np.float64)

    def matrix(self) -> np.ndarray:
        rows, cols = self.int(), self.int()
        values = self.reals()
        if rows < 0 or cols < 0 or rows * cols != values.size:
            raise MalformedFrame(f"matrix header {rows}x{cols} holds {values.size} values")
        return values.reshape(rows, cols)


def encode_message(msg) -> bytes:
    w = _Writer()
    if isinstance(msg, HcUploadMsg):
        tag = TAG_HC_UPLOAD
        w.int(msg.client_id)
        w.int(msg.layer)
        w.int(len(msg.entries))
        for entry in msg.entries:
            w.int(entry.edge_id)
            w.reals(entry.embedding)
            w.int(entry.count)
    elif isinstance(msg, HcBroadcastMsg):
        tag = TAG_HC_BROADCAST
        w.int(msg.layer)
        w.int(len(msg.entries))
        for entry in msg.entries:
            w.int(entry.edge_id)
            w.reals(entry.embedding)
            w.int(entry.degree)
            w.real(entry.weight)
    elif isinstance(msg, ParamUploadMsg):
        tag = TAG_PARAM_UPLOAD
        w.int(msg.client_id)
        w.int(len(msg.param_blocks))
        for block in msg.param_blocks:
            w.matrix(block)
        w.int(msg.train_node_count)
    elif isinstance(msg, ParamBroadcastMsg):
        tag = TAG_PARAM_BROADCAST
        w.int(len(msg.param_blocks))
        for block in msg.param_blocks:
            w.matrix(block)
    else:
        raise TypeError(f"cannot encode {type(msg).__name__}")
    body = bytes([tag]) + w.getvalue()
    return _U32.pack(len(body)) + body


def decode_message(buf: bytes):
    buf = bytes(buf)
    if len(buf) < 5:
        raise MalformedFrame(f"frame of {len(buf)} bytes is shorter than the 5-byte header")
    (length,) = _U32.unpack_from(buf, 0)
    if len(buf) - 4 < length:
        raise MalformedFrame(f"frame truncated: prefix says {length} bytes, {len(buf) - 4} present")
    if len(buf) - 4 > length:
        raise LengthMismatch(f"{len(buf) - 4 - length} trailing bytes after frame")
    tag = buf[4]
    r = _Reader(buf, 5)
    if tag == TAG_HC_UPLOAD:
        client_id, layer = r.int(), r.int()
        entries = tuple(
            HcUploadEntry(r.int(), r.reals(), r.int()) for _ in range(r.count())
        )
        msg = HcUploadMsg(client_id, layer, entries)
    elif tag == TAG_HC_BROADCAST:
        layer = r.int()
        entries = tuple(
            HcBroadcastEntry(r.int(), r.reals(), r.int(), r.real()) for _ in range(r.count())
        )
        msg = HcBroadcastMsg(layer, entries)
    elif tag == TAG_PARAM_UPLOAD:
        client_id = r.int()
        blocks = tuple(r.matrix() for _ in range(r.count()))
        msg = ParamUploadMsg(client_id, blocks, r.int())
    elif tag == TAG_PARAM_BROADCAST:
        msg = ParamBroadcastMsg(tuple(r.matrix() for _ in range(r.count())))
    else:
        raise UnknownTag(f"unknown message tag 0x{tag:02x}")
    if r.pos != len(buf):
        raise LengthMismatch(f"body parsed to byte {r.pos} of {len(buf)}")
    return msg


class InProcessTransport:
    """Hands message objects over unchanged."""

    name = "inproc"

    def __init__(self):
        self.messages = 0

    def deliver(self, msg):
        self.messages += 1
        return msg


class WireTransport:
    """Round-trips every message through its byte encoding."""

    name = "wire"

    def __init__(self):
        self.messages = 0
        self.bytes_sent = 0

    def deliver(self, msg):
        frame = encode_message(msg)
        self.messages += 1
        self.bytes_sent += len(frame)
        return decode_message(frame)


def make_transport(name: str):
    if name == "inproc":
        return InProcessTransport()
    if name == "wire":
        return WireTransport()
    raise ValueError(f"unknown transport {name!r}")
