"""Hot loops of the simulator.

Each kernel exists in two forms: a loop compiled with numba, and an
equivalent path that runs without it. ``atomsim._accel`` picks which one the
public names bind to. Both forms are importable directly so the benchmark and
the tests can compare them.
"""

import numpy as np

from atomsim._accel import HAS_NUMBA, njit

# Pipeline slot marker for "no packet in this stage".
EMPTY = -1


def _blocking_entries_loop(arrivals, depth):
    n = arrivals.shape[0]
    entries = np.empty(n, dtype=np.int64)
    prev = arrivals[0] - depth
    for i in range(n):
        ready = prev + depth
        a = arrivals[i]
        e = a if a > ready else ready
        entries[i] = e
        prev = e
    return entries


def blocking_entries_numpy(arrivals, depth):
    """Admission cycles under single-occupancy locking, without a Python loop.

    With ``e[i] = max(a[i], e[i-1] + D)``, the shifted sequence
    ``e[i] - i*D`` is the running maximum of ``a[i] - i*D``.
    """
    arrivals = np.asarray(arrivals, dtype=np.int64)
    offsets = np.arange(arrivals.shape[0], dtype=np.int64) * depth
    return np.maximum.accumulate(arrivals - offsets) + offsets


def _oracle_loop(read, depth, blocking):
    # Explicit per-cycle model. No recurrences: the reader walks chunk by
    # chunk, finished headers go into a FIFO, and the action pipeline is an
    # array of D stage slots shifted once per cycle.
    n = read.shape[0]
    entries = np.full(n, -1, dtype=np.int64)
    hazard_flags = np.zeros(n, dtype=np.bool_)
    stages = np.full(depth, EMPTY, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    q_head = 0
    q_tail = 0

    reading = 0          # packet currently on the reader
    chunks_left = read[0]
    admitted = 0
    in_flight = 0
    t = 0
    while True:
        # 1. Pipeline advances: whatever sat in the last stage exits.
        if stages[depth - 1] != EMPTY:
            in_flight -= 1
        for s in range(depth - 1, 0, -1):
            stages[s] = stages[s - 1]
        stages[0] = EMPTY

        if admitted == n and in_flight == 0:
            break

        # 2. Headers whose last chunk was read on the previous cycle are
        #    parsed and handed to the action pipeline this cycle.
        if reading < n and chunks_left == 0:
            queue[q_tail] = reading
            q_tail += 1
            reading += 1
            if reading < n:
                chunks_left = read[reading]

        # 3. Admission into the first stage.
        if q_head < q_tail:
            occupied = in_flight > 0
            if not blocking or not occupied:
                pkt = queue[q_head]
                q_head += 1
                if occupied:
                    hazard_flags[pkt] = True
                stages[0] = pkt
                entries[pkt] = t
                admitted += 1
                in_flight += 1

        # 4. Reader consumes one chunk.
        if reading < n:
            chunks_left -= 1

        t += 1
    return entries, hazard_flags, t


if HAS_NUMBA:
    blocking_entries = njit(_blocking_entries_loop)
    oracle_loop = njit(_oracle_loop)
else:
    blocking_entries = blocking_entries_numpy
    oracle_loop = _oracle_loop

blocking_entries_python = _blocking_entries_loop
oracle_loop_python = _oracle_loop
