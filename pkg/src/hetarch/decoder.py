"""Syndrome decoding: matching on detector graphs plus lookup decoding.

``build_graph`` enumerates every single Pauli fault of a noisy circuit by
reverse frame propagation and assembles a detector graph whose edges carry
error probabilities, weights -ln(p/(1-p)) and observable-flip labels.

``MatchingDecoder`` performs exact minimum-weight perfect matching over the
fired detectors with a boundary: candidate edges are pruned by the triangle
rule d(u,v) < d(u,B) + d(v,B) (which preserves optimality), the problem
decomposes over connected components, each component is solved exactly by
bitmask dynamic programming, and oversized components fall back to an exact
blossom matcher from networkx.

``LookupDecoder`` maps full-circuit syndromes to the most probable logical
coset from fault enumeration up to a weight cap, for the codes whose graphs
are not matchable.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

BOUNDARY = -1
_DP_LIMIT = 12


# ---------------------------------------------------------------------------
# Fault enumeration by reverse sensitivity propagation
# ---------------------------------------------------------------------------

def _detector_bits(circuit):
    """Per measurement index: bitmask of detectors and observables using it."""
    n_det = len(circuit.detectors)
    det_of_meas = [0] * circuit.n_measurements
    obs_of_meas = [0] * circuit.n_measurements
    for j, det in enumerate(circuit.detectors):
        for m in det:
            det_of_meas[m] ^= 1 << j
    for j, obs in enumerate(circuit.observables):
        for m in obs:
            obs_of_meas[m] ^= 1 << j
    return det_of_meas, obs_of_meas


def enumerate_faults(circuit):
    """Yield (op_index, pauli_label, probability, det_mask, obs_mask) for
    every single-Pauli fault of every noise instruction.

    det/obs masks are computed with one reverse pass: Dx[q]/Dz[q] hold the
    detector and observable bits flipped by an X/Z injected on q at the
    current (reverse) position.
    """
    det_of_meas, obs_of_meas = _detector_bits(circuit)
    n_obs = len(circuit.observables)
    n = circuit.n_qubits
    dx = [0] * n
    dz = [0] * n
    # combined bits: low bits detectors, high bits observables
    shift = len(circuit.detectors)

    meas_seen = circuit.n_measurements
    faults = []
    for i in range(len(circuit.ops) - 1, -1, -1):
        name, tg, args = circuit.ops[i]
        if name == "M":
            meas_seen -= 1
            q = tg[0]
            dx[q] ^= det_of_meas[meas_seen] | (obs_of_meas[meas_seen] << shift)
        elif name == "R":
            q = tg[0]
            dx[q] = 0
            dz[q] = 0
        elif name == "H":
            q = tg[0]
            dx[q], dz[q] = dz[q], dx[q]
        elif name == "S":
            q = tg[0]
            dx[q] ^= dz[q]
        elif name == "CX":
            c, t = tg
            dx[c] ^= dx[t]
            dz[t] ^= dz[c]
        elif name == "SWAP":
            a, b = tg
            dx[a], dx[b] = dx[b], dx[a]
            dz[a], dz[b] = dz[b], dz[a]
        elif name == "PAULI1":
            q = tg[0]
            px, py, pz = args
            for lbl, p, bits in (("X", px, dx[q]), ("Y", py, dx[q] ^ dz[q]),
                                 ("Z", pz, dz[q])):
                if p > 0:
                    faults.append((i, lbl, p, bits))
        elif name == "DEP1":
            q = tg[0]
            p = args[0] / 3.0
            for lbl, bits in (("X", dx[q]), ("Y", dx[q] ^ dz[q]), ("Z", dz[q])):
                faults.append((i, lbl, p, bits))
        elif name == "DEP2":
            a, b = tg
            p = args[0] / 15.0
            for pa, pb in itertools.product("IXZY", repeat=2):
                if pa == pb == "I":
                    continue
                bits = 0
                for lbl, q in ((pa, a), (pb, b)):
                    if lbl in ("X", "Y"):
                        bits ^= dx[q]
                    if lbl in ("Z", "Y"):
                        bits ^= dz[q]
                faults.append((i, pa + pb, p, bits))
    mask = (1 << shift) - 1
    out = []
    for i, lbl, p, bits in faults:
        out.append((i, lbl, p, bits & mask, bits >> shift))
    return out


def _primitive_parts(circuit, op_index, label):
    """Split a fault into single-qubit X/Z primitives for decomposition."""
    name, tg, _ = circuit.ops[op_index]
    prims = []
    for lbl, q in zip(label, tg):
        if lbl in ("X", "Y"):
            prims.append(("X", q))
        if lbl in ("Z", "Y"):
            prims.append(("Z", q))
    return prims


@dataclass
class DetectorGraph:
    n_detectors: int
    n_observables: int
    # (u, v) with u < v or v == BOUNDARY: {"p": prob, "obs": mask}
    edges: dict = field(default_factory=dict)
    hyperedges: list = field(default_factory=list)

    def add_fault(self, dets: tuple[int, ...], p: float, obs: int):
        if len(dets) == 0:
            if obs:
                self.hyperedges.append(("undetectable-logical", dets, p, obs))
            return
        if len(dets) == 1:
            key = (dets[0], BOUNDARY)
        else:
            key = (min(dets), max(dets))
        prev = self.edges.get(key)
        if prev is None:
            self.edges[key] = {"p": p, "obs": obs}
        elif prev["obs"] == obs:
            prev["p"] = prev["p"] * (1 - p) + p * (1 - prev["p"])
        else:
            # same detector pair, different logical effect: keep both as a
            # weight race; store under an extended key
            alt = (key[0], key[1], obs)
            prev2 = self.edges.get(alt)
            if prev2 is None:
                self.edges[alt] = {"p": p, "obs": obs}
            else:
                prev2["p"] = prev2["p"] * (1 - p) + p * (1 - prev2["p"])

    def weight(self, p: float) -> float:
        p = min(max(p, 1e-15), 0.5 - 1e-12)
        return -math.log(p / (1.0 - p))


def build_graph(circuit) -> DetectorGraph:
    """Detector graph from single-fault enumeration.

    Faults firing more than two detectors are decomposed into their
    single-qubit X/Z primitives; a primitive still firing more than two
    detectors is reported as a hyperedge (and raises, since the matching
    decoder would be unsound for this circuit).
    """
    g = DetectorGraph(len(circuit.detectors), len(circuit.observables))

    def bits_to_dets(bits):
        out = []
        while bits:
            b = bits & -bits
            out.append(b.bit_length() - 1)
            bits ^= b
        return tuple(out)

    faults = enumerate_faults(circuit)
    # index primitive sensitivities for decomposition: recompute per op via
    # a second pass keyed by (op, qubit, kind)
    prim_sens = _primitive_sensitivities(circuit)
    for op_i, lbl, p, det_bits, obs_bits in faults:
        dets = bits_to_dets(det_bits)
        if len(dets) <= 2:
            g.add_fault(dets, p, obs_bits)
            continue
        ok = True
        parts = _primitive_parts(circuit, op_i, lbl)
        for kind, q in parts:
            db, ob = prim_sens[(op_i, q, kind)]
            pd = bits_to_dets(db)
            if len(pd) > 2:
                g.hyperedges.append((f"op{op_i}:{lbl}", pd, p, ob))
                ok = False
                continue
            g.add_fault(pd, p, ob)
        if not ok:
            raise ValueError(
                f"fault {lbl} at op {op_i} triggers >2 detectors even after "
                f"decomposition: {g.hyperedges[-1]}"
            )
    return g


def _primitive_sensitivities(circuit):
    """(op_index, qubit, 'X'|'Z') -> (det_bits, obs_bits) at that op."""
    det_of_meas, obs_of_meas = _detector_bits(circuit)
    shift = len(circuit.detectors)
    n = circuit.n_qubits
    dx = [0] * n
    dz = [0] * n
    meas_seen = circuit.n_measurements
    sens = {}
    mask = (1 << shift) - 1
    for i in range(len(circuit.ops) - 1, -1, -1):
        name, tg, args = circuit.ops[i]
        if name == "M":
            meas_seen -= 1
            dx[tg[0]] ^= det_of_meas[meas_seen] | (obs_of_meas[meas_seen] << shift)
        elif name == "R":
            dx[tg[0]] = 0
            dz[tg[0]] = 0
        elif name == "H":
            q = tg[0]
            dx[q], dz[q] = dz[q], dx[q]
        elif name == "S":
            dx[tg[0]] ^= dz[tg[0]]
        elif name == "CX":
            c, t = tg
            dx[c] ^= dx[t]
            dz[t] ^= dz[c]
        elif name == "SWAP":
            a, b = tg
            dx[a], dx[b] = dx[b], dx[a]
            dz[a], dz[b] = dz[b], dz[a]
        elif name in ("PAULI1", "DEP1", "DEP2"):
            for q in tg:
                sens[(i, q, "X")] = (dx[q] & mask, dx[q] >> shift)
                sens[(i, q, "Z")] = (dz[q] & mask, dz[q] >> shift)
    return sens


# ---------------------------------------------------------------------------
# Exact MWPM decoding
# ---------------------------------------------------------------------------

class MatchingDecoder:
    def __init__(self, graph: DetectorGraph):
        self.graph = graph
        self.n = graph.n_detectors
        self.n_obs = graph.n_observables
        self._build_adjacency()
        self._dijkstra_all()
        self._memo = {}

    def _build_adjacency(self):
        adj = [[] for _ in range(self.n)]
        boundary_w = [math.inf] * self.n
        boundary_obs = [0] * self.n
        for key, info in self.graph.edges.items():
            u, v = key[0], key[1]
            w = self.graph.weight(info["p"])
            if v == BOUNDARY:
                if w < boundary_w[u]:
                    boundary_w[u] = w
                    boundary_obs[u] = info["obs"]
            else:
                adj[u].append((v, w, info["obs"]))
                adj[v].append((u, w, info["obs"]))
        self.adj = adj
        self.boundary_w = boundary_w
        self.boundary_obs = boundary_obs

    def _dijkstra_all(self):
        """All-pairs shortest paths among detectors, plus to boundary.

        Path observable parity rides along; ties broken by (weight, then
        lowest predecessor) deterministically via heap ordering.
        """
        n = self.n
        self.dist = np.full((n, n), np.inf, dtype=np.float64)
        self.path_obs = np.zeros((n, n), dtype=np.int64)
        for src in range(n):
            dist = np.full(n, np.inf)
            obs = np.zeros(n, dtype=np.int64)
            dist[src] = 0.0
            heap = [(0.0, src)]
            while heap:
                d, u = heapq.heappop(heap)
                if d > dist[u] + 1e-12:
                    continue
                for v, w, eo in self.adj[u]:
                    nd = d + w
                    if nd < dist[v] - 1e-12:
                        dist[v] = nd
                        obs[v] = obs[u] ^ eo
                        heapq.heappush(heap, (nd, v))
            self.dist[src] = dist
            self.path_obs[src] = obs
        # distance to boundary: Dijkstra from a virtual node
        bdist = np.array(self.boundary_w, dtype=np.float64)
        bobs = np.array(self.boundary_obs, dtype=np.int64)
        heap = [(bdist[u], u) for u in range(n) if np.isfinite(bdist[u])]
        heapq.heapify(heap)
        while heap:
            d, u = heapq.heappop(heap)
            if d > bdist[u] + 1e-12:
                continue
            for v, w, eo in self.adj[u]:
                nd = d + w
                if nd < bdist[v] - 1e-12:
                    bdist[v] = nd
                    bobs[v] = bobs[u] ^ eo
                    heapq.heappush(heap, (nd, v))
        self.bdist = bdist
        self.bobs = bobs

    # -- per-syndrome decode ------------------------------------------------
    def decode(self, syndrome) -> int:
        """Predicted observable mask for one syndrome bit vector."""
        fired = tuple(int(v) for v in np.flatnonzero(np.asarray(syndrome)))
        if not fired:
            return 0
        key = fired
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        obs = self._decode_fired(fired)
        self._memo[key] = obs
        return obs

    def _decode_fired(self, fired) -> int:
        m = len(fired)
        # candidate edges among fired nodes
        cand = {}
        for i in range(m):
            for j in range(i + 1, m):
                u, v = fired[i], fired[j]
                d = self.dist[u, v]
                if d < self.bdist[u] + self.bdist[v] - 1e-12:
                    cand.setdefault(i, []).append((j, d))
                    cand.setdefault(j, []).append((i, d))
        # connected components over candidate edges
        parent = list(range(m))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, lst in cand.items():
            for j, _ in lst:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
        comps = {}
        for i in range(m):
            comps.setdefault(find(i), []).append(i)
        total_obs = 0
        for nodes in comps.values():
            total_obs ^= self._match_component(fired, nodes, cand)
        return total_obs

    def _match_component(self, fired, nodes, cand) -> int:
        k = len(nodes)
        if k == 1:
            u = fired[nodes[0]]
            return int(self.bobs[u])
        if k > _DP_LIMIT:
            return self._match_networkx(fired, nodes)
        # bitmask DP over local indices
        local = {node: li for li, node in enumerate(nodes)}
        w_pair = [[math.inf] * k for _ in range(k)]
        for li, node in enumerate(nodes):
            for j, d in cand.get(node, ()):
                if j in local:
                    w_pair[li][local[j]] = d
        w_bnd = [self.bdist[fired[node]] for node in nodes]
        memo = {0: (0.0, 0)}

        def dp(mask):
            if mask in memo:
                return memo[mask]
            li = (mask & -mask).bit_length() - 1
            rest = mask ^ (1 << li)
            best_cost = dp(rest)[0] + w_bnd[li]
            best_pair = (BOUNDARY, li)
            for lj in range(li + 1, k):
                if rest >> lj & 1 and math.isfinite(w_pair[li][lj]):
                    cost = dp(rest ^ (1 << lj))[0] + w_pair[li][lj]
                    if cost < best_cost - 1e-12:
                        best_cost = cost
                        best_pair = (li, lj)
            memo[mask] = (best_cost, best_pair)
            return memo[mask]

        full = (1 << k) - 1
        dp(full)
        # reconstruct
        obs = 0
        mask = full
        while mask:
            _, choice = dp(mask)
            if choice[0] == BOUNDARY:
                li = choice[1]
                u = fired[nodes[li]]
                obs ^= int(self.bobs[u])
                mask ^= 1 << li
            else:
                li, lj = choice
                u, v = fired[nodes[li]], fired[nodes[lj]]
                obs ^= int(self.path_obs[u, v])
                mask ^= (1 << li) | (1 << lj)
        return obs

    def _match_networkx(self, fired, nodes) -> int:
        import networkx as nx

        G = nx.Graph()
        k = len(nodes)
        for li in range(k):
            u = fired[nodes[li]]
            G.add_edge(("d", li), ("b", li), weight=float(self.bdist[u]))
            for lj in range(li + 1, k):
                v = fired[nodes[lj]]
                d = self.dist[u, v]
                if math.isfinite(d):
                    G.add_edge(("d", li), ("d", lj), weight=float(d))
            for lj in range(li + 1, k):
                G.add_edge(("b", li), ("b", lj), weight=0.0)
        match = nx.min_weight_matching(G)
        obs = 0
        for a, b in match:
            if a[0] == "d" and b[0] == "d":
                u, v = fired[nodes[a[1]]], fired[nodes[b[1]]]
                obs ^= int(self.path_obs[u, v])
            elif a[0] != b[0]:
                li = a[1] if a[0] == "d" else b[1]
                u = fired[nodes[li]]
                obs ^= int(self.bobs[u])
        return obs

    def decode_batch(self, detectors: np.ndarray) -> np.ndarray:
        shots = detectors.shape[0]
        out = np.zeros((shots, self.n_obs), dtype=bool)
        for s in range(shots):
            obs = self.decode(detectors[s])
            for j in range(self.n_obs):
                out[s, j] = bool(obs >> j & 1)
        return out


# ---------------------------------------------------------------------------
# Lookup decoder for non-matchable codes
# ---------------------------------------------------------------------------

class LookupDecoder:
    """Most-probable-coset decoder from fault enumeration.

    Weight-1 syndromes are tabulated eagerly. If ``max_weight`` is 2,
    two-fault syndromes are resolved lazily (best product of single-fault
    probabilities) and memoized. Unexplained syndromes decode to identity
    and are counted.
    """

    def __init__(self, circuit, max_weight: int = 1):
        if max_weight not in (1, 2):
            raise ValueError("max_weight must be 1 or 2")
        self.n_obs = len(circuit.observables)
        self.max_weight = max_weight
        self.unexplained = 0
        faults = enumerate_faults(circuit)
        merged = {}
        for _, _, p, det_bits, obs_bits in faults:
            if p <= 0:
                continue
            prev = merged.get((det_bits, obs_bits), 0.0)
            merged[(det_bits, obs_bits)] = prev * (1 - p) + p * (1 - prev)
        self.singles = [(db, ob, p) for (db, ob), p in merged.items()]
        self.table1 = {}
        for db, ob, p in self.singles:
            cur = self.table1.get(db)
            if cur is None or p > cur[1]:
                self.table1[db] = (ob, p)
        self._memo = {}

    def decode(self, syndrome) -> int:
        bits = 0
        arr = np.asarray(syndrome)
        for idx in np.flatnonzero(arr):
            bits |= 1 << int(idx)
        if bits == 0:
            return 0
        hit = self.table1.get(bits)
        if hit is not None:
            return hit[0]
        if self.max_weight < 2:
            self.unexplained += 1
            return 0
        memo = self._memo.get(bits)
        if memo is not None:
            return memo
        best_p = -1.0
        best_obs = 0
        for db, ob, p in self.singles:
            partner = self.table1.get(bits ^ db)
            if partner is not None:
                q = p * partner[1]
                if q > best_p:
                    best_p = q
                    best_obs = ob ^ partner[0]
        if best_p < 0:
            self.unexplained += 1
            best_obs = 0
        self._memo[bits] = best_obs
        return best_obs

    def decode_batch(self, detectors: np.ndarray) -> np.ndarray:
        shots = detectors.shape[0]
        out = np.zeros((shots, self.n_obs), dtype=bool)
        for s in range(shots):
            obs = self.decode(detectors[s])
            for j in range(self.n_obs):
                out[s, j] = bool(obs >> j & 1)
        return out


def merge_parallel(p1: float, p2: float) -> float:
    """Probability that exactly one of two independent faults occurs."""
    return p1 * (1 - p2) + p2 * (1 - p1)
