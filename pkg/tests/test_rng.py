import numpy as np

from cogmac.rng import SlotStreams, slot_stream, stream_key


def test_key_is_deterministic_and_path_sensitive():
    assert stream_key(3) == stream_key(3)
    keys = {stream_key(3), stream_key(4), stream_key(3, 100), stream_key(3, 200)}
    assert len(keys) == 4
    assert 0 <= stream_key(0) < 2**128


def test_slot_streams_match_fresh_generators():
    key = stream_key(9, 5)
    reuse = SlotStreams(key)
    for slot in (0, 7, 3, 7, 2**40):
        a = reuse(slot).random(11)
        b = slot_stream(key, slot).random(11)
        np.testing.assert_array_equal(a, b)


def test_slots_do_not_overlap():
    key = stream_key(1)
    a = slot_stream(key, 0).random(1000)
    b = slot_stream(key, 1).random(1000)
    assert not np.intersect1d(a, b).size
