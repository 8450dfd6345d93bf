from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from minrank_ic import (
    Gf2Matrix,
    InstanceError,
    ProblemInstance,
    UserSpec,
    XorTerm,
    build_request_matrix,
    parse_instance,
    serialize_instance,
    side_info_uncoded,
    side_info_xor,
)
from conftest import INSTANCE_DIR, make_ex3_caching, random_instance


# -- request matrices --------------------------------------------------------


def test_request_matrix_first_packet_two_bits():
    inst = ProblemInstance(2, 2, (UserSpec((0,), Gf2Matrix.from_rows([], cols=4)),))
    assert build_request_matrix(inst, 0).to_rows() == [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
    ]


def test_request_matrix_second_packet_two_bits():
    inst = ProblemInstance(2, 2, (UserSpec((1,), Gf2Matrix.from_rows([], cols=4)),))
    assert build_request_matrix(inst, 0).to_rows() == [
        [0, 0, 1, 0],
        [0, 0, 0, 1],
    ]


@pytest.mark.parametrize("k", range(5))
def test_request_matrix_unit_rows(k):
    inst = ProblemInstance(5, 1, (UserSpec((k,), Gf2Matrix.from_rows([], cols=5)),))
    m = build_request_matrix(inst, 0)
    assert m.to_rows() == [[1 if j == k else 0 for j in range(5)]]


def test_request_matrix_full_row_rank():
    rnd = random.Random(5)
    for _ in range(30):
        inst = random_instance(rnd)
        for k in range(inst.num_users):
            m = build_request_matrix(inst, k)
            assert m.rank() == m.nrows == len(inst.users[k].requests) * inst.packet_bits


def test_request_matrix_orders_packets_ascending():
    inst = ProblemInstance(3, 1, (UserSpec((2, 0), Gf2Matrix.from_rows([], cols=3)),))
    assert build_request_matrix(inst, 0).to_rows() == [[1, 0, 0], [0, 0, 1]]


# -- side-information builders ------------------------------------------------


def test_uncoded_rows_are_unit_vectors():
    m = side_info_uncoded(5, 1, [1, 4])
    assert m.to_rows() == [[0, 1, 0, 0, 0], [0, 0, 0, 0, 1]]


def test_uncoded_empty():
    assert side_info_uncoded(3, 2, []).shape == (0, 6)


def test_uncoded_identity_block_placement():
    assert side_info_uncoded(2, 2, [1]).to_rows() == [[0, 0, 1, 0], [0, 0, 0, 1]]


def test_uncoded_rejects_bad_packets():
    with pytest.raises(InstanceError):
        side_info_uncoded(3, 1, [0, 3])
    with pytest.raises(InstanceError):
        side_info_uncoded(3, 1, [1, 1])


def test_xor_pair():
    assert side_info_xor(5, 1, [[1, 4]]).to_rows() == [[0, 1, 0, 0, 1]]


def test_xor_single_bit_term():
    m = side_info_xor(2, 2, [XorTerm((0, 1), bit=0)])
    assert m.to_rows() == [[1, 0, 1, 0]]


def test_xor_all_packets():
    assert side_info_xor(3, 1, [[0, 1, 2]]).to_rows() == [[1, 1, 1]]


def test_xor_term_without_bit_expands_all_positions():
    m = side_info_xor(2, 2, [[0, 1]])
    assert m.to_rows() == [[1, 0, 1, 0], [0, 1, 0, 1]]


def test_xor_rejects_bad_terms():
    with pytest.raises(InstanceError):
        side_info_xor(3, 1, [[]])
    with pytest.raises(InstanceError):
        side_info_xor(3, 1, [[0, 5]])
    with pytest.raises(InstanceError):
        side_info_xor(2, 2, [XorTerm((0,), bit=2)])


@given(st.integers(1, 6), st.integers(1, 3), st.data())
def test_uncoded_equals_singleton_xor(n, f, data):
    packets = data.draw(st.sets(st.integers(0, n - 1)))
    assert side_info_uncoded(n, f, packets) == side_info_xor(
        n, f, [[p] for p in sorted(packets)]
    )


# -- instance validation --------------------------------------------------------


def test_instance_rejects_degenerate_counts():
    side = Gf2Matrix.from_rows([], cols=1)
    with pytest.raises(InstanceError):
        ProblemInstance(0, 1, (UserSpec((0,), side),))
    with pytest.raises(InstanceError):
        ProblemInstance(1, 0, (UserSpec((0,), side),))
    with pytest.raises(InstanceError):
        ProblemInstance(1, 1, ())


def test_instance_rejects_bad_requests():
    side = Gf2Matrix.from_rows([], cols=2)
    with pytest.raises(InstanceError):
        UserSpec((), side)
    with pytest.raises(InstanceError):
        UserSpec((0, 0), side)
    with pytest.raises(InstanceError):
        ProblemInstance(2, 1, (UserSpec((2,), side),))


def test_instance_rejects_wrong_side_width():
    with pytest.raises(InstanceError) as exc:
        ProblemInstance(2, 1, (UserSpec((0,), Gf2Matrix.from_rows([], cols=3)),))
    assert "users[0].side_info" in str(exc.value)


def test_zero_cache_rows_allowed():
    inst = ProblemInstance(2, 1, (UserSpec((0,), Gf2Matrix.from_rows([], cols=2)),))
    assert inst.users[0].side_info.nrows == 0


def test_shared_requests_across_users_allowed():
    side = Gf2Matrix.from_rows([], cols=2)
    inst = ProblemInstance(2, 1, (UserSpec((0,), side), UserSpec((0,), side)))
    assert inst.num_users == 2


# -- parse / serialize -----------------------------------------------------------


def test_parse_shipped_coded_fixture():
    inst = parse_instance((INSTANCE_DIR / "ex2_coded.json").read_bytes())
    assert inst.num_users == 5
    assert all(u.side_info.nrows == 1 for u in inst.users)
    assert inst.users[0].side_info.to_rows() == [[0, 1, 0, 0, 1]]


def test_parse_wrong_row_width_names_path():
    bad = """
    {"num_packets": 2, "packet_bits": 1,
     "users": [{"requests": [0],
                "side_info": {"kind": "rows", "rows": [[1, 0, 0]]}}]}
    """
    with pytest.raises(InstanceError) as exc:
        parse_instance(bad)
    assert "users[0].side_info" in str(exc.value)


def test_parse_bad_request_index_names_path():
    bad = """
    {"num_packets": 2, "packet_bits": 1,
     "users": [{"requests": [7],
                "side_info": {"kind": "rows", "rows": []}}]}
    """
    with pytest.raises(InstanceError) as exc:
        parse_instance(bad)
    assert "users[0].requests" in str(exc.value)


def test_parse_rejects_invalid_json_and_schema():
    with pytest.raises(InstanceError):
        parse_instance(b"{not json")
    with pytest.raises(InstanceError):
        parse_instance(b'{"num_packets": 2}')
    with pytest.raises(InstanceError):
        parse_instance(b'{"num_packets": "2", "packet_bits": 1, "users": []}')
    with pytest.raises(InstanceError):
        parse_instance(
            b'{"num_packets": 1, "packet_bits": 1, '
            b'"users": [{"requests": [0], "side_info": {"kind": "bogus"}}]}'
        )


def test_roundtrip_shipped_fixtures():
    for path in sorted(INSTANCE_DIR.glob("*.json")):
        inst = parse_instance(path.read_bytes())
        assert parse_instance(serialize_instance(inst)) == inst


def test_roundtrip_random_instances():
    rnd = random.Random(99)
    for _ in range(40):
        inst = random_instance(rnd, max_total_bits=6, max_free_bits=30)
        assert parse_instance(serialize_instance(inst)) == inst


def test_serialize_empty_side_info_is_explicit():
    inst = ProblemInstance(2, 1, (UserSpec((0,), Gf2Matrix.from_rows([], cols=2)),))
    assert b'"rows": []' in serialize_instance(inst).replace(b"\n", b"")


def test_serialize_caching_fixture_rows():
    data = serialize_instance(make_ex3_caching())
    inst = parse_instance(data)
    assert inst.users[0].side_info.to_rows() == [[1, 0, 1, 0]]
    assert inst.users[1].side_info.to_rows() == [[0, 1, 0, 1]]


def test_shipped_caching_fixture_matches_builder():
    inst = parse_instance((INSTANCE_DIR / "ex3_caching.json").read_bytes())
    assert inst == make_ex3_caching()
