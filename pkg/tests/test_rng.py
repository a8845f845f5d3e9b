import threading

import numpy as np
import pytest

from auscult.rng import RandomStream


def test_same_seed_and_path_give_same_draws():
    a = RandomStream(7).child("record", "a0001")
    b = RandomStream(7).child("record", "a0001")
    assert [a.uniform(0, 1) for _ in range(5)] == [b.uniform(0, 1) for _ in range(5)]


def test_children_are_independent_of_parent_consumption():
    root = RandomStream(3)
    first = root.child("x").random()
    root.normal(1000)
    assert root.child("x").random() == first
    assert RandomStream(3).child("y").random() != first


def test_different_seeds_differ():
    assert RandomStream(1).random() != RandomStream(2).random()


def test_randint_is_inclusive_and_choice_covers_options():
    r = RandomStream(0)
    ints = {r.randint(5, 7) for _ in range(300)}
    assert ints == {5, 6, 7}
    assert {r.choice((512, 1024, 2048)) for _ in range(300)} == {512, 1024, 2048}


def test_gate_extremes():
    r = RandomStream(0)
    assert not any(r.gate(0.0) for _ in range(100))
    assert all(r.gate(1.0) for _ in range(100))


def test_draws_do_not_depend_on_thread_scheduling():
    results = {}

    def work(i):
        results[i] = RandomStream(99).child("record", i).normal(50)

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in reversed(threads):
        t.start()
    for t in threads:
        t.join()
    for i in range(8):
        assert np.array_equal(results[i], RandomStream(99).child("record", i).normal(50))


def test_rejects_out_of_range_seed():
    with pytest.raises(ValueError):
        RandomStream(-1)
    with pytest.raises(ValueError):
        RandomStream(2**64)
