"""File formats: instance files and the structure container.

Instance text format::

    OOV <n> <d>
    <d characters of 0/1>      (n lines, character j is coordinate j)

Binary instance format: ``OOVB``, u32 n, u32 d (little endian), then each
row as ``ceil(d/8)`` little-endian bytes.

Structure container (all integers little endian)::

    magic   b"OOVS"
    version u8  (1)
    engine  u8  (0 oracle, 1 avg, 2 worst)
    u32 length + JSON parameter block (sorted keys, no spaces)
    u64 length + payload
    u64 checksum of the payload

The checksum is the polynomial hash ``h = h * P + w  (mod 2**64)`` over the
payload read as little-endian 64-bit words (zero padded), seeded with the
64-bit FNV offset basis, followed by one final step absorbing the payload
byte length. ``P`` is the 64-bit FNV prime.
"""

from __future__ import annotations

import io
import json
import struct
from typing import BinaryIO

import numpy as np

from .core import ContractError, OVInstance, compressor
from .engines import AvgEngine, Engine, OracleEngine, WorstEngine
from .avgcase import AvgStructure, as_fraction
from .oracle import FullBitmap
from .tables import CandidateTable, SparseBitmap
from .worstcase import Child, DenseNode, InternalNode, LeafNode, WorstNode

MAGIC = b"OOVS"
VERSION = 1
ENGINE_TAGS = {"oracle": 0, "avg": 1, "worst": 2}
TAG_ENGINES = {v: k for k, v in ENGINE_TAGS.items()}

CHECKSUM_PRIME = 0x100000001B3
CHECKSUM_OFFSET = 0xCBF29CE484222325
_M64 = (1 << 64) - 1

_NODE_LEAF, _NODE_DENSE, _NODE_INTERNAL = 0, 1, 2
_DTYPES = {1: np.dtype("<u1"), 2: np.dtype("<u2"), 4: np.dtype("<u4"), 8: np.dtype("<u8")}


# ---------------------------------------------------------------------------
# checksum


def checksum_reference(payload: bytes) -> int:
    h = CHECKSUM_OFFSET
    padded = payload + b"\0" * (-len(payload) % 8)
    for j in range(0, len(padded), 8):
        h = (h * CHECKSUM_PRIME + int.from_bytes(padded[j : j + 8], "little")) & _M64
    return (h * CHECKSUM_PRIME + len(payload)) & _M64


def _pow_mod64(base: int, e: int) -> int:
    return pow(base, e, 1 << 64)


def checksum(payload: bytes) -> int:
    """Vectorised form of :func:`checksum_reference`."""
    padded = payload + b"\0" * (-len(payload) % 8)
    words = np.frombuffer(padded, dtype="<u8")
    L = len(words)
    h = (CHECKSUM_OFFSET * _pow_mod64(CHECKSUM_PRIME, L)) & _M64
    if L:
        # word j is multiplied by P^(L-1-j); uint64 arithmetic wraps mod 2^64
        powers = np.empty(L, dtype=np.uint64)
        powers[0] = 1
        if L > 1:
            powers[1:] = CHECKSUM_PRIME
            with np.errstate(over="ignore"):
                powers = np.cumprod(powers, dtype=np.uint64)
        with np.errstate(over="ignore"):
            acc = int(np.sum(words * powers[::-1], dtype=np.uint64))
        h = (h + acc) & _M64
    return (h * CHECKSUM_PRIME + len(payload)) & _M64


# ---------------------------------------------------------------------------
# instance files


def row_bytes(d: int) -> int:
    return (d + 7) // 8


def format_instance(X: OVInstance) -> str:
    lines = [f"OOV {X.n} {X.dim}"]
    lines.extend(str(v) for v in X.vectors)
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> OVInstance:
    lines = [ln.strip() for ln in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    if not lines:
        raise ContractError("empty instance file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "OOV":
        raise ContractError(f"line 1: expected 'OOV <n> <d>', got {lines[0]!r}")
    n, d = int(head[1]), int(head[2])
    body = lines[1:]
    if len(body) != n:
        raise ContractError(f"header declares {n} vectors, file has {len(body)}")
    rows = []
    for j, ln in enumerate(body, 2):
        if len(ln) != d or set(ln) - {"0", "1"}:
            raise ContractError(f"line {j}: expected {d} characters from {{0,1}}, got {ln!r}")
        rows.append(int(ln[::-1], 2))
    return OVInstance(d, tuple(rows))


def dump_instance_binary(X: OVInstance) -> bytes:
    out = io.BytesIO()
    out.write(b"OOVB")
    out.write(struct.pack("<II", X.n, X.dim))
    _write_rows(out, X.rows, X.dim)
    return out.getvalue()


def load_instance_binary(data: bytes) -> OVInstance:
    if data[:4] != b"OOVB":
        raise ContractError("not a binary instance file (bad magic)")
    n, d = struct.unpack_from("<II", data, 4)
    r = _Reader(data[12:])
    rows = r.rows(n, d)
    r.done()
    return OVInstance(d, rows)


def read_instance(path) -> OVInstance:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == b"OOVB":
        return load_instance_binary(data)
    return parse_instance(data.decode("ascii"))


def write_instance(path, X: OVInstance, binary: bool = False) -> None:
    data = dump_instance_binary(X) if binary else format_instance(X).encode("ascii")
    with open(path, "wb") as fh:
        fh.write(data)


# ---------------------------------------------------------------------------
# payload primitives


def _write_rows(out: BinaryIO, rows, d: int) -> None:
    nb = row_bytes(d)
    out.write(b"".join(x.to_bytes(nb, "little") for x in rows))


def _write_array(out: BinaryIO, arr: np.ndarray) -> None:
    width = arr.dtype.itemsize
    out.write(struct.pack("<BQ", width, len(arr)))
    out.write(np.ascontiguousarray(arr, dtype=_DTYPES[width]).tobytes())


def _write_blob(out: BinaryIO, blob: bytes) -> None:
    out.write(struct.pack("<Q", len(blob)))
    out.write(blob)


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.pos = 0

    def take(self, size: int) -> bytes:
        if self.pos + size > len(self.data):
            raise ContractError("truncated payload")
        chunk = self.data[self.pos : self.pos + size]
        self.pos += size
        return chunk

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))

    def u8(self) -> int:
        return self.unpack("<B")[0]

    def u32(self) -> int:
        return self.unpack("<I")[0]

    def rows(self, n: int, d: int) -> tuple[int, ...]:
        nb = row_bytes(d)
        blob = self.take(n * nb)
        return tuple(int.from_bytes(blob[j * nb : (j + 1) * nb], "little") for j in range(n))

    def array(self) -> np.ndarray:
        width, length = self.unpack("<BQ")
        if width not in _DTYPES:
            raise ContractError(f"unsupported array width {width}")
        blob = self.take(width * length)
        return np.frombuffer(blob, dtype=_DTYPES[width]).astype(_DTYPES[width].newbyteorder("="))

    def blob(self) -> bytes:
        (length,) = self.unpack("<Q")
        return self.take(length)

    def done(self) -> None:
        if self.pos != len(self.data):
            raise ContractError(f"{len(self.data) - self.pos} trailing bytes in payload")


def _write_table(out: BinaryIO, table: CandidateTable) -> None:
    out.write(struct.pack("<I", len(table.rows)))
    _write_rows(out, table.rows, table.dim)
    _write_array(out, table.offsets)
    _write_array(out, table.entries)


def _read_table(r: _Reader, d: int, t: int) -> CandidateTable:
    rows = r.rows(r.u32(), d)
    offsets = r.array()
    entries = r.array()
    return CandidateTable(d, t, rows, offsets, entries)


# ---------------------------------------------------------------------------
# engine payloads


def _oracle_payload(e: OracleEngine) -> bytes:
    out = io.BytesIO()
    X = e.instance
    out.write(struct.pack("<II", X.n, X.dim))
    _write_rows(out, X.rows, X.dim)
    return out.getvalue()


def _avg_payload(e: AvgEngine) -> bytes:
    S = e.structure
    out = io.BytesIO()
    out.write(struct.pack("<II", S.dim, S.t))
    _write_blob(out, S.sparse.bits)
    _write_table(out, S.candidates)
    return out.getvalue()


def _write_node(out: BinaryIO, node: WorstNode) -> None:
    if isinstance(node, LeafNode):
        out.write(struct.pack("<BI", _NODE_LEAF, node.dim))
        _write_rows(out, (node.vector,), node.dim)
    elif isinstance(node, DenseNode):
        out.write(struct.pack("<BI", _NODE_DENSE, node.dim))
        _write_blob(out, node.bitmap.bits)
    else:
        out.write(struct.pack("<BIIIII", _NODE_INTERNAL, node.dim, node.level, node.n, node.m, node.t))
        _write_blob(out, node.sparse.bits)
        _write_table(out, node.candidates)
        out.write(struct.pack("<I", len(node.children)))
        for ch in node.children:
            _write_rows(out, (ch.zero_set,), node.dim)
            _write_node(out, ch.node)


def _read_node(r: _Reader) -> WorstNode:
    tag = r.u8()
    if tag == _NODE_LEAF:
        d = r.u32()
        return LeafNode(d, r.rows(1, d)[0])
    if tag == _NODE_DENSE:
        d = r.u32()
        return DenseNode(FullBitmap(d, r.blob()))
    if tag != _NODE_INTERNAL:
        raise ContractError(f"unknown node tag {tag}")
    d, level, n, m, t = r.unpack("<IIIII")
    sparse = SparseBitmap(d, t, r.blob())
    table = _read_table(r, d, t)
    children = []
    full = (1 << d) - 1
    for _ in range(r.u32()):
        S = r.rows(1, d)[0]
        children.append(Child(S, _read_node(r), compressor(d, full ^ S)))
    return InternalNode(d, level, n, m, t, sparse, table, tuple(children))


def _worst_payload(e: WorstEngine) -> bytes:
    out = io.BytesIO()
    _write_node(out, e.root)
    return out.getvalue()


def serialize(engine: Engine) -> bytes:
    kind = engine.kind
    if kind == "oracle":
        payload = _oracle_payload(engine)  # type: ignore[arg-type]
    elif kind == "avg":
        payload = _avg_payload(engine)  # type: ignore[arg-type]
    elif kind == "worst":
        payload = _worst_payload(engine)  # type: ignore[arg-type]
    else:
        raise ContractError(f"cannot serialize engine {kind!r}")
    params = json.dumps(engine.params, sort_keys=True, separators=(",", ":")).encode("utf-8")
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<BB", VERSION, ENGINE_TAGS[kind]))
    out.write(struct.pack("<I", len(params)))
    out.write(params)
    _write_blob(out, payload)
    out.write(struct.pack("<Q", checksum(payload)))
    return out.getvalue()


def read_header(data: bytes) -> tuple[str, dict]:
    """Engine name and parameter block, without decoding the payload."""
    if data[:4] != MAGIC:
        raise ContractError("not a structure container (bad magic)")
    version, tag = struct.unpack_from("<BB", data, 4)
    if version != VERSION:
        raise ContractError(f"unsupported container version {version}")
    if tag not in TAG_ENGINES:
        raise ContractError(f"unknown engine tag {tag}")
    (plen,) = struct.unpack_from("<I", data, 6)
    params = json.loads(data[10 : 10 + plen].decode("utf-8"))
    return TAG_ENGINES[tag], params


def deserialize(data: bytes) -> Engine:
    kind, params = read_header(data)
    r = _Reader(data)
    r.take(6)
    r.take(r.u32())
    payload = r.blob()
    (expected,) = r.unpack("<Q")
    r.done()
    if checksum(payload) != expected:
        raise ContractError("payload checksum mismatch")
    p = _Reader(payload)
    engine: Engine
    if kind == "oracle":
        n, d = p.unpack("<II")
        engine = OracleEngine(OVInstance(d, p.rows(n, d)))
    elif kind == "avg":
        d, t = p.unpack("<II")
        sparse = SparseBitmap(d, t, p.blob())
        table = _read_table(p, d, t)
        fr = {key: as_fraction(params[key]) for key in ("p", "eps") if key in params}
        engine = AvgEngine(AvgStructure(d, t, sparse, table), fr.get("p"), fr.get("eps"))
    else:
        engine = WorstEngine(_read_node(p), int(params["i"]))
    p.done()
    return engine


def save(path, engine: Engine) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(engine))


def load(path) -> Engine:
    with open(path, "rb") as fh:
        return deserialize(fh.read())
