from __future__ import annotations

import pathlib
import random

import pytest

from minrank_ic import (
    Gf2Matrix,
    ProblemInstance,
    UserSpec,
    XorTerm,
    free_bit_count,
    side_info_uncoded,
    side_info_xor,
)

INSTANCE_DIR = pathlib.Path(__file__).resolve().parent.parent / "instances"

EX2_SIDE_SETS = [[1, 4], [0, 4], [1, 3], [1, 2], [0, 2, 3]]


def make_ex2_coded() -> ProblemInstance:
    """Five users, one packet each, a single cached XOR combination per user."""
    return ProblemInstance(
        5,
        1,
        tuple(
            UserSpec((k,), side_info_xor(5, 1, [pkts]))
            for k, pkts in enumerate(EX2_SIDE_SETS)
        ),
    )


def make_ex2_uncoded() -> ProblemInstance:
    """Same request pattern, caches stored verbatim (one row per packet)."""
    return ProblemInstance(
        5,
        1,
        tuple(
            UserSpec((k,), side_info_uncoded(5, 1, pkts))
            for k, pkts in enumerate(EX2_SIDE_SETS)
        ),
    )


def make_ex3_caching() -> ProblemInstance:
    """Two 2-bit files; each user caches one cross-file XOR bit."""
    return ProblemInstance(
        2,
        2,
        (
            UserSpec((0,), side_info_xor(2, 2, [XorTerm((0, 1), bit=0)])),
            UserSpec((1,), side_info_xor(2, 2, [XorTerm((0, 1), bit=1)])),
        ),
    )


def make_allbutone(k: int) -> ProblemInstance:
    """K one-bit packets; user i caches the XOR of all packets except its own."""
    return ProblemInstance(
        k,
        1,
        tuple(
            UserSpec((i,), side_info_xor(k, 1, [[p for p in range(k) if p != i]]))
            for i in range(k)
        ),
    )


def make_butterfly() -> ProblemInstance:
    return ProblemInstance(
        2,
        1,
        (
            UserSpec((0,), side_info_uncoded(2, 1, [1])),
            UserSpec((1,), side_info_uncoded(2, 1, [0])),
        ),
    )


def random_instance(
    rng: random.Random,
    max_total_bits: int = 4,
    max_users: int = 3,
    max_free_bits: int = 10,
    max_side_rows: int = 2,
) -> ProblemInstance:
    """Small random instance with a bounded free-bit search space."""
    shapes = [
        (n, f)
        for n in range(1, max_total_bits + 1)
        for f in range(1, max_total_bits + 1)
        if n * f <= max_total_bits
    ]
    while True:
        n, f = rng.choice(shapes)
        width = n * f
        users = []
        for _ in range(rng.randint(1, max_users)):
            requests = tuple(rng.sample(range(n), rng.randint(1, n)))
            rows = tuple(
                rng.randrange(1 << width) for _ in range(rng.randint(0, max_side_rows))
            )
            users.append(UserSpec(requests, Gf2Matrix(width, rows)))
        inst = ProblemInstance(n, f, tuple(users))
        if free_bit_count(inst) <= max_free_bits:
            return inst


@pytest.fixture
def ex2_coded() -> ProblemInstance:
    return make_ex2_coded()


@pytest.fixture
def ex2_uncoded() -> ProblemInstance:
    return make_ex2_uncoded()


@pytest.fixture
def ex3_caching() -> ProblemInstance:
    return make_ex3_caching()


@pytest.fixture
def butterfly() -> ProblemInstance:
    return make_butterfly()
