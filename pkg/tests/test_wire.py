import struct

import numpy as np
import pytest

from hyperfed.errors import LengthMismatch, MalformedFrame, UnknownTag
from hyperfed.federation import (
    HcBroadcastEntry,
    HcBroadcastMsg,
    HcUploadEntry,
    HcUploadMsg,
    ParamBroadcastMsg,
    ParamUploadMsg,
    WireTransport,
    decode_message,
    encode_message,
)


def samples():
    rng = np.random.default_rng(0)
    return [
        HcUploadMsg(0, 0, ()),
        HcUploadMsg(3, 1, (HcUploadEntry(7, rng.normal(size=4), 2), HcUploadEntry(9, np.zeros(4), 1))),
        HcBroadcastMsg(1, (HcBroadcastEntry(7, rng.normal(size=3), 5, 0.25),)),
        HcBroadcastMsg(0, ()),
        ParamUploadMsg(2, (rng.normal(size=(3, 2)), rng.normal(size=(2, 4))), 17),
        ParamBroadcastMsg((rng.normal(size=(1433, 16)), rng.normal(size=(16, 7)))),
        ParamBroadcastMsg(()),
    ]


@pytest.mark.parametrize("msg", samples(), ids=lambda m: type(m).__name__)
def test_round_trip(msg):
    assert decode_message(encode_message(msg)) == msg


def test_empty_upload_round_trip():
    m = HcUploadMsg(0, 0, ())
    assert decode_message(encode_message(m)) == m


def test_param_broadcast_frame_size():
    frame = encode_message(ParamBroadcastMsg((np.arange(4.0).reshape(2, 2),)))
    # prefix + tag + block count + (rows + cols + value count + 4 values)
    assert len(frame) == 4 + 1 + 8 + (8 + 8 + 8 + 4 * 8)
    assert struct.unpack_from("<I", frame)[0] == len(frame) - 4
    assert frame[4] == 0x04


def test_tags():
    assert [encode_message(m)[4] for m in samples()[:5:2]] == [0x01, 0x02, 0x03]


def test_little_endian_fields():
    frame = encode_message(HcUploadMsg(5, 1, ()))
    assert struct.unpack_from("<qqq", frame, 5) == (5, 1, 0)


def test_nonfinite_values_survive():
    m = HcBroadcastMsg(0, (HcBroadcastEntry(1, np.array([np.inf, -0.0, 1e-308]), 2, 1.0),))
    out = decode_message(encode_message(m))
    assert out.entries[0].embedding.tobytes() == m.entries[0].embedding.tobytes()


def test_truncated():
    frame = encode_message(samples()[1])
    with pytest.raises(MalformedFrame):
        decode_message(frame[:-3])
    with pytest.raises(MalformedFrame):
        decode_message(frame[:3])


def test_trailing_bytes():
    with pytest.raises(LengthMismatch):
        decode_message(encode_message(samples()[0]) + b"\x00")


def test_body_shorter_than_prefix_claims():
    frame = bytearray(encode_message(HcUploadMsg(0, 0, ())))
    frame += b"\x00" * 8
    frame[:4] = struct.pack("<I", len(frame) - 4)
    with pytest.raises(LengthMismatch):
        decode_message(bytes(frame))


def test_unknown_tag():
    frame = bytearray(encode_message(samples()[0]))
    frame[4] = 0x09
    with pytest.raises(UnknownTag):
        decode_message(bytes(frame))


def test_bad_matrix_header():
    frame = bytearray(encode_message(ParamBroadcastMsg((np.ones((2, 2)),))))
    frame[13:21] = struct.pack("<q", 3)  # rows
    with pytest.raises(MalformedFrame):
        decode_message(bytes(frame))


def test_wire_transport_counts_bytes():
    t = WireTransport()
    msg = samples()[4]
    assert t.deliver(msg) == msg
    assert t.bytes_sent == len(encode_message(msg)) and t.messages == 1
