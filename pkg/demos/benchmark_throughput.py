"""Measure end-to-end episode throughput on this machine.

An episode is the unit of work that dominates every experiment: encode one
input, run the circuit once, measure once. The feature pipeline batches
thousands of episodes into contiguous numpy work, and the design target is
at least one million two-qubit episodes per second per core end to end.

Run with no arguments; pass an ansatz name to benchmark a wider circuit.
"""

import sys
import time

import numpy as np

from qks import EncodingStructure, featurize, get_ansatz, sample_machine

ANSATZ = sys.argv[1] if len(sys.argv) > 1 else "cnot2"
REPEATS = 3

template = get_ansatz(ANSATZ)
q = template.num_params
# one pass should take on the order of a second; wide circuits cost
# exponentially more per episode, so shrink the workload with qubit count
ROWS, EPISODES = {
    1: (800, 2000),
    2: (800, 2000),
    4: (400, 500),
    9: (100, 200),
    16: (10, 30),
}.get(template.num_qubits, (100, 200))
structure = EncodingStructure.split(q)
machine = sample_machine(template, structure, 1.0, EPISODES, seed=0)
rng = np.random.default_rng(0)
inputs = rng.normal(size=(ROWS, q))

total_episodes = ROWS * EPISODES
print(f"ansatz={ANSATZ} ({template.num_qubits} qubits), "
      f"{ROWS} rows x {EPISODES} episodes = {total_episodes:,} episodes")

featurize(machine, inputs[: min(ROWS, 32)])  # warm up caches and the engine

best = float("inf")
for i in range(REPEATS):
    t0 = time.perf_counter()
    fm = featurize(machine, inputs)
    dt = time.perf_counter() - t0
    best = min(best, dt)
    print(f"  pass {i + 1}: {dt:.3f}s  "
          f"({total_episodes / dt:,.0f} episodes/s)")

rate = total_episodes / best
print(f"\nbest: {rate:,.0f} episodes/s on one worker thread")
print(f"feature matrix: {fm.rows} x {fm.num_columns} bits, "
      f"{fm.packed.nbytes:,} bytes packed")
if ANSATZ == "cnot2":
    target = 1e6
    verdict = "meets" if rate >= target else "below"
    print(f"{verdict} the 1M two-qubit episodes/s/core design target")
