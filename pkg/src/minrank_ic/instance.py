"""Problem instances: packets, per-user requests, and cache encodings.

An instance has N packets of F bits each.  The global bit layout is
packet-major: bit f of packet p lives at column p*F + f, matching the
stacking of the full packet vector.  Each user carries a request set and
a cache encoding matrix whose rows are XOR combinations of packet bits.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable

from .gf2 import Gf2Matrix


class InstanceError(ValueError):
    """Invalid instance data; ``path`` locates the offending JSON field."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class UserSpec:
    """One receiver: requested packet indices and its cache encoding matrix.

    ``requests`` is normalized to ascending order.  ``side_info`` may have
    zero rows (no cache); its width is validated against the instance.
    """

    requests: tuple[int, ...]
    side_info: Gf2Matrix

    def __post_init__(self):
        reqs = tuple(sorted(self.requests))
        if not reqs:
            raise InstanceError("request set must be non-empty")
        if len(set(reqs)) != len(reqs):
            raise InstanceError(f"duplicate packet in request set {reqs}")
        object.__setattr__(self, "requests", reqs)


@dataclass(frozen=True)
class ProblemInstance:
    num_packets: int
    packet_bits: int
    users: tuple[UserSpec, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "users", tuple(self.users))
        if self.num_packets < 1:
            raise InstanceError(f"num_packets must be >= 1, got {self.num_packets}")
        if self.packet_bits < 1:
            raise InstanceError(f"packet_bits must be >= 1, got {self.packet_bits}")
        if not self.users:
            raise InstanceError("at least one user is required")
        width = self.num_packets * self.packet_bits
        for k, user in enumerate(self.users):
            for t in user.requests:
                if not 0 <= t < self.num_packets:
                    raise InstanceError(
                        f"packet index {t} out of range [0, {self.num_packets})",
                        path=f"users[{k}].requests",
                    )
            if user.side_info.ncols != width:
                raise InstanceError(
                    f"side_info has {user.side_info.ncols} columns, expected {width}",
                    path=f"users[{k}].side_info",
                )

    @property
    def num_users(self) -> int:
        return len(self.users)

    @property
    def total_bits(self) -> int:
        """Width of the global packet bit vector (N*F)."""
        return self.num_packets * self.packet_bits


def build_request_matrix(instance: ProblemInstance, user: int) -> Gf2Matrix:
    """Selector matrix for a user's requested bits.

    Requested packets are taken in ascending index order; the block for
    the i-th requested packet is an F x F identity placed at that
    packet's column block.  The result always has full row rank.
    """
    target = instance.users[user]
    f = instance.packet_bits
    rows = []
    for t in target.requests:
        for b in range(f):
            rows.append(1 << (t * f + b))
    return Gf2Matrix(instance.total_bits, tuple(rows))


def side_info_uncoded(n: int, f: int, packets: Iterable[int]) -> Gf2Matrix:
    """Cache encoding for verbatim (uncoded) packet storage.

    One row per stored bit: for each known packet, ascending, and each of
    its F bits, a single 1 at that bit's global column.
    """
    pkts = sorted(packets)
    if len(set(pkts)) != len(pkts):
        raise InstanceError(f"duplicate packet in {pkts}")
    for p in pkts:
        if not 0 <= p < n:
            raise InstanceError(f"packet index {p} out of range [0, {n})")
    rows = [1 << (p * f + b) for p in pkts for b in range(f)]
    return Gf2Matrix(n * f, tuple(rows))


@dataclass(frozen=True)
class XorTerm:
    """One cached XOR combination: a packet set, optionally one bit position.

    Without ``bit``, the term expands to F rows (one per bit position,
    XORing the matching bit of every packet in the set).  With ``bit``,
    it produces a single row, which is how sub-packet caches such as a
    one-bit XOR of two 2-bit packets are expressed.
    """

    packets: tuple[int, ...]
    bit: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "packets", tuple(sorted(self.packets)))


def side_info_xor(
    n: int, f: int, terms: Iterable[XorTerm | Iterable[int]]
) -> Gf2Matrix:
    """Cache encoding from XOR terms; bare packet collections are full terms."""
    rows = []
    for i, term in enumerate(terms):
        if not isinstance(term, XorTerm):
            term = XorTerm(tuple(term))
        if not term.packets:
            raise InstanceError(f"term {i} is empty")
        if len(set(term.packets)) != len(term.packets):
            raise InstanceError(f"term {i} has duplicate packets {term.packets}")
        for p in term.packets:
            if not 0 <= p < n:
                raise InstanceError(
                    f"term {i}: packet index {p} out of range [0, {n})"
                )
        if term.bit is not None:
            if not 0 <= term.bit < f:
                raise InstanceError(
                    f"term {i}: bit position {term.bit} out of range [0, {f})"
                )
            bits = (term.bit,)
        else:
            bits = tuple(range(f))
        for b in bits:
            row = 0
            for p in term.packets:
                row |= 1 << (p * f + b)
            rows.append(row)
    return Gf2Matrix(n * f, tuple(rows))


# -- JSON instance format ----------------------------------------------
#
# {
#   "num_packets": N, "packet_bits": F,
#   "users": [
#     { "requests": [t, ...],
#       "side_info": {"kind": "rows",    "rows":    [[b, ...], ...]}
#                  | {"kind": "uncoded", "packets": [p, ...]}
#                  | {"kind": "xor",     "terms":   [{"packets": [...], "bit": f?}, ...]} }
#   ]
# }
#
# Indices are 0-based; raw rows have exactly N*F entries in {0, 1}; an
# xor term without "bit" expands to all F bit positions.


def _need(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise InstanceError(f"expected an object, got {type(obj).__name__}", path)
    if key not in obj:
        raise InstanceError(f"missing required key {key!r}", path)
    return obj[key]


def _as_int(value, path: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InstanceError(f"expected an integer, got {value!r}", path)
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise InstanceError(f"expected a list, got {type(value).__name__}", path)
    return value


def _parse_side_info(obj, n: int, f: int, path: str) -> Gf2Matrix:
    kind = _need(obj, "kind", path)
    try:
        if kind == "rows":
            rows = _as_list(_need(obj, "rows", path), f"{path}.rows")
            width = n * f
            packed = []
            for i, row in enumerate(rows):
                row = _as_list(row, f"{path}.rows[{i}]")
                if len(row) != width:
                    raise InstanceError(
                        f"row has {len(row)} entries, expected {width}",
                        f"{path}.rows[{i}]",
                    )
                bits = 0
                for j, v in enumerate(row):
                    if v not in (0, 1):
                        raise InstanceError(
                            f"entry {v!r} is not a bit", f"{path}.rows[{i}]"
                        )
                    bits |= v << j
                packed.append(bits)
            return Gf2Matrix(width, tuple(packed))
        if kind == "uncoded":
            packets = _as_list(_need(obj, "packets", path), f"{path}.packets")
            return side_info_uncoded(
                n, f, [_as_int(p, f"{path}.packets") for p in packets]
            )
        if kind == "xor":
            terms = []
            for i, t in enumerate(_as_list(_need(obj, "terms", path), f"{path}.terms")):
                tpath = f"{path}.terms[{i}]"
                packets = [
                    _as_int(p, f"{tpath}.packets")
                    for p in _as_list(_need(t, "packets", tpath), f"{tpath}.packets")
                ]
                bit = t.get("bit") if isinstance(t, dict) else None
                if bit is not None:
                    bit = _as_int(bit, f"{tpath}.bit")
                terms.append(XorTerm(tuple(packets), bit))
            return side_info_xor(n, f, terms)
    except InstanceError as exc:
        if exc.path:
            raise
        raise InstanceError(str(exc), path) from None
    raise InstanceError(f"unknown side_info kind {kind!r}", f"{path}.kind")


def parse_instance(text: bytes | str) -> ProblemInstance:
    """Parse and fully validate the JSON instance format.

    Builder kinds ("uncoded", "xor") are expanded to raw rows; "rows" is
    taken verbatim.  Every error names the JSON path it occurred at.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc}") from None
    n = _as_int(_need(doc, "num_packets", "$"), "$.num_packets")
    f = _as_int(_need(doc, "packet_bits", "$"), "$.packet_bits")
    if n < 1:
        raise InstanceError("num_packets must be >= 1", "$.num_packets")
    if f < 1:
        raise InstanceError("packet_bits must be >= 1", "$.packet_bits")
    users = []
    for k, u in enumerate(_as_list(_need(doc, "users", "$"), "$.users")):
        upath = f"users[{k}]"
        requests = [
            _as_int(t, f"{upath}.requests")
            for t in _as_list(_need(u, "requests", upath), f"{upath}.requests")
        ]
        side = _parse_side_info(
            _need(u, "side_info", upath), n, f, f"{upath}.side_info"
        )
        try:
            users.append(UserSpec(tuple(requests), side))
        except InstanceError as exc:
            raise InstanceError(str(exc), upath) from None
    return ProblemInstance(n, f, tuple(users))


_FLAT_INT_ARRAY = re.compile(r"\[[\d,\s-]*\]")


def dump_canonical(doc) -> bytes:
    """Deterministic JSON with innermost integer arrays kept on one line."""
    text = json.dumps(doc, sort_keys=True, indent=1)

    def flatten(match: re.Match) -> str:
        return re.sub(r"\s+", " ", match.group(0)).replace("[ ", "[").replace(" ]", "]")

    return (_FLAT_INT_ARRAY.sub(flatten, text) + "\n").encode("utf-8")


def serialize_instance(instance: ProblemInstance) -> bytes:
    """Canonical JSON: sorted keys, side-info in raw-rows form."""
    doc = {
        "num_packets": instance.num_packets,
        "packet_bits": instance.packet_bits,
        "users": [
            {
                "requests": list(u.requests),
                "side_info": {"kind": "rows", "rows": u.side_info.to_rows()},
            }
            for u in instance.users
        ],
    }
    return dump_canonical(doc)
