"""Coefficient-file serialization: JSON and a little-endian binary format.

Binary layout: magic ``GEPI``, u32 version, then the header (group, kind,
parity, index encoding, channel list, doubled L, vector count) followed by
one record per vector listing (index tuple, doubled K, coefficient).  The
binary round-trip is bit-exact; JSON carries floats at full repr precision.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .halfint import HalfInt
from .indexing import LChannel, is_class_rep, minimal_partition
from .mup import CouplingBasis

MAGIC = b"GEPI"
FORMAT_VERSION = 1

_GROUPS = ["so3", "su2", "o3"]
_KINDS = ["ge", "gepi"]
_PARITIES = [None, "+", "-"]


class CoefficientFileError(ValueError):
    """Malformed, truncated, or inconsistent coefficient file."""


def _header_dict(basis: CouplingBasis) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "group": basis.group,
        "kind": basis.kind,
        "lvec": [
            {"tags": list(c.tags), "twice_ell": c.twice_ell} for c in basis.lvec.entries
        ],
        "twice_L": basis.L.twice,
        "parity": basis.parity,
        "n_vectors": basis.n_vectors,
        "index_encoding": "mtuple" if basis.kind == "ge" else "class",
    }


def _vect_entries(basis: CouplingBasis) -> list[list]:
    """Per vector: list of [index list, twice_K, coefficient]."""
    out = [[] for _ in range(basis.n_vectors)]
    for row, tK, coeffs in basis.entries():
        for v, c in enumerate(coeffs):
            if c != 0.0:
                out[v].append([row.tolist(), int(tK), float(c)])
    return out


def save_json(basis: CouplingBasis, path) -> None:
    doc = _header_dict(basis)
    doc["vectors"] = _vect_entries(basis)
    with open(path, "w") as fh:
        json.dump(doc, fh)


def save_binary(basis: CouplingBasis, path) -> None:
    head = _header_dict(basis)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<BBBB", _GROUPS.index(head["group"]),
                             _KINDS.index(head["kind"]),
                             _PARITIES.index(head["parity"]),
                             0 if head["index_encoding"] == "mtuple" else 1))
        fh.write(struct.pack("<I", len(head["lvec"])))
        for ch in head["lvec"]:
            fh.write(struct.pack("<I", len(ch["tags"])))
            for t in ch["tags"]:
                fh.write(struct.pack("<i", t))
            fh.write(struct.pack("<i", ch["twice_ell"]))
        fh.write(struct.pack("<i", head["twice_L"]))
        fh.write(struct.pack("<I", head["n_vectors"]))
        vectors = _vect_entries(basis)
        n = len(head["lvec"])
        for entries in vectors:
            fh.write(struct.pack("<I", len(entries)))
            for row, tK, coeff in entries:
                fh.write(struct.pack(f"<{n}i", *row))
                fh.write(struct.pack("<i", tK))
                fh.write(struct.pack("<d", coeff))


def save(basis: CouplingBasis, path, fmt: str = "json") -> None:
    if fmt == "json":
        save_json(basis, path)
    elif fmt in ("bin", "binary"):
        save_binary(basis, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _basis_from_entries(header: dict, vectors: list[list]) -> CouplingBasis:
    channels = [
        LChannel(tuple(ch["tags"]), HalfInt(int(ch["twice_ell"])))
        for ch in header["lvec"]
    ]
    lvec = minimal_partition(channels)
    tL = int(header["twice_L"])
    L = HalfInt(tL)
    kind = header["kind"]
    if header["group"] not in _GROUPS or kind not in _KINDS:
        raise CoefficientFileError("unknown group or kind in header")
    if int(header["n_vectors"]) != len(vectors):
        raise CoefficientFileError("vector count disagrees with the header")
    from .mup import index_rows

    rows = {tK: index_rows(lvec, kind, tK) for tK in range(-tL, tL + 1, 2)}
    lookup = {
        tK: {r.tobytes(): i for i, r in enumerate(rows[tK])} for tK in rows
    }
    offsets = {}
    pos = 0
    for tK in sorted(rows):
        offsets[tK] = pos
        pos += rows[tK].shape[0]
    vecs = np.zeros((pos, len(vectors)))
    for v, entries in enumerate(vectors):
        for row, tK, coeff in entries:
            tK = int(tK)
            if not np.isfinite(coeff):
                raise CoefficientFileError("non-finite coefficient")
            arr = np.asarray(row, dtype=np.int64)
            if arr.shape != (lvec.n_slots,):
                raise CoefficientFileError("index tuple has the wrong length")
            if int(arr.sum()) != tK or tK not in lookup:
                raise CoefficientFileError("index sum disagrees with its K label")
            if kind == "gepi" and not is_class_rep(lvec, arr):
                raise CoefficientFileError("index is not a canonical class representative")
            idx = lookup[tK].get(arr.tobytes())
            if idx is None:
                raise CoefficientFileError(f"invalid index {row} for this channel vector")
            vecs[offsets[tK] + idx, v] = coeff
    return CouplingBasis(
        header["group"], kind, lvec, L, header["parity"], rows, vecs
    )


def load_json(path) -> CouplingBasis:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format_version") != FORMAT_VERSION:
        raise CoefficientFileError(
            f"unsupported format_version {doc.get('format_version')}"
        )
    return _basis_from_entries(doc, doc["vectors"])


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, fmt: str):
        size = struct.calcsize(fmt)
        if self.pos + size > len(self.data):
            raise CoefficientFileError("truncated file")
        out = struct.unpack_from(fmt, self.data, self.pos)
        self.pos += size
        return out


def load_binary(path) -> CouplingBasis:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise CoefficientFileError("bad magic; not a coefficient file")
    rd = _Reader(data)
    rd.pos = 4
    (version,) = rd.take("<I")
    if version != FORMAT_VERSION:
        raise CoefficientFileError(f"unsupported format version {version}")
    g, k, p, enc = rd.take("<BBBB")
    try:
        group, kind, parity = _GROUPS[g], _KINDS[k], _PARITIES[p]
    except IndexError:
        raise CoefficientFileError("unknown group/kind/parity code") from None
    (n_channels,) = rd.take("<I")
    lvec_entries = []
    for _ in range(n_channels):
        (n_tags,) = rd.take("<I")
        tags = [rd.take("<i")[0] for _ in range(n_tags)]
        (twice_ell,) = rd.take("<i")
        lvec_entries.append({"tags": tags, "twice_ell": twice_ell})
    (twice_L,) = rd.take("<i")
    (n_vectors,) = rd.take("<I")
    vectors = []
    for _ in range(n_vectors):
        (n_entries,) = rd.take("<I")
        entries = []
        for _ in range(n_entries):
            row = list(rd.take(f"<{n_channels}i"))
            (tK,) = rd.take("<i")
            (coeff,) = rd.take("<d")
            entries.append([row, tK, coeff])
        vectors.append(entries)
    header = {
        "group": group,
        "kind": kind,
        "parity": parity,
        "lvec": lvec_entries,
        "twice_L": twice_L,
        "n_vectors": n_vectors,
    }
    return _basis_from_entries(header, vectors)


def load(path) -> CouplingBasis:
    """Load either format, sniffing the binary magic."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return load_binary(path)
    return load_json(path)
