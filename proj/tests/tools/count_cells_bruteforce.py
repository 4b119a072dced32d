#!/usr/bin/env python3
"""Independent brute-force recount of the cell-space constants frozen in
test_data.cpp. Counts valid cells over ordered node slots (slot 0 = input,
last slot = output, interior slots carry one of the 3 ops) with edge sets
drawn from the upper-triangular pairs, at most 9 edges, and every node on
some input->output path.

Run: python3 tests/tools/count_cells_bruteforce.py
"""
import itertools

MAX_EDGES = 9
NUM_OPS = 3


def valid(n, edges):
    if len(edges) > MAX_EDGES:
        return False
    succ = [[] for _ in range(n)]
    pred = [[] for _ in range(n)]
    for a, b in edges:
        succ[a].append(b)
        pred[a if False else b].append(a)

    def reach(start, adj):
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    from_input = reach(0, succ)
    to_output = reach(n - 1, pred)
    return all(v in from_input and v in to_output for v in range(n))


def count_for_size(n):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    wirings = 0
    for r in range(len(pairs) + 1):
        if r > MAX_EDGES:
            break
        for edges in itertools.combinations(pairs, r):
            if valid(n, edges):
                wirings += 1
    return wirings * (NUM_OPS ** (n - 2))


if __name__ == "__main__":
    total = 0
    for n in range(2, 8):
        c = count_for_size(n)
        total += c
        print(f"size {n}: {c:>10}  cumulative(max_nodes={n}): {total}")
