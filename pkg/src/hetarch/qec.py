"""Error-corrected-memory experiments.

Two architectures are modeled:

* a planar surface code with parallel syndrome extraction, where data and
  ancilla qubits are two compute classes with separate coherence times
  (T_CD, T_CA);
* a storage-backed universal module that runs any stabilizer code up to 30
  qubits by keeping data in high-capacity storage and serializing checks
  through one readout compute, with a brute-force-optimized qubit
  assignment and a port-aware schedule.

The homogeneous baseline places everything on an unbounded square lattice
of compute devices and routes non-adjacent checks with SWAP chains.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field

import numpy as np

from .codes import StabilizerCode, surface
from .devices import idle_pauli_probs
from .stabsim import NoisyCircuit
from .util import mix64

T_1Q = 0.04    # us
T_2Q = 0.1
T_MEAS = 1.0   # combined measure+reset window
T_SWAP = 0.1   # storage load/store, coherence limited


# ---------------------------------------------------------------------------
# Planar surface code (parallel extraction)
# ---------------------------------------------------------------------------

@dataclass
class SurfaceExperimentConfig:
    d: int
    rounds: int
    t_cd: float           # data compute coherence (us), T1 = T2
    t_ca: float           # ancilla compute coherence
    p2q: float = 1e-2
    shots: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")


def _surface_geometry(d: int):
    """Data grid, included plaquettes and their diagonal data neighbours."""
    def data(r, c):
        return r * d + c

    plaquettes = []
    for ar in range(d + 1):
        for ac in range(d + 1):
            is_x = (ar + ac) % 2 == 1
            bulk = 1 <= ar <= d - 1 and 1 <= ac <= d - 1
            if bulk:
                include = True
            elif ar == 0 or ar == d:
                include = is_x and 1 <= ac <= d - 1
            else:
                include = (not is_x) and 1 <= ar <= d - 1
            if not include:
                continue
            # NW, NE, SW, SE data neighbours (None if off-grid)
            corners = {}
            for tag, (r, c) in (("NW", (ar - 1, ac - 1)), ("NE", (ar - 1, ac)),
                                ("SW", (ar, ac - 1)), ("SE", (ar, ac))):
                corners[tag] = data(r, c) if 0 <= r < d and 0 <= c < d else None
            plaquettes.append({"pos": (ar, ac), "x": is_x, "corners": corners})
    return plaquettes


# CX layer orders chosen to keep hook errors off the logical direction.
_X_ORDER = ("NE", "NW", "SE", "SW")
_Z_ORDER = ("NE", "SE", "NW", "SW")


def surface_circuit(cfg: SurfaceExperimentConfig) -> NoisyCircuit:
    """Memory-Z experiment: rounds of extraction, then transversal readout.

    Idle noise policy: data qubits twirl with T_CD whenever a layer does not
    gate them (including the 1 us measure window); ancillas twirl with T_CA,
    including over their own measurement window (readout is otherwise
    error-free). Every CX is followed by two-qubit depolarizing of p2q.
    """
    d = cfg.d
    plaq = _surface_geometry(d)
    n_data = d * d
    n = n_data + len(plaq)
    anc_index = {id(p): n_data + i for i, p in enumerate(plaq)}
    circuit = NoisyCircuit(n)
    circuit.rounds = cfg.rounds

    data_qubits = list(range(n_data))
    x_anc = [n_data + i for i, p in enumerate(plaq) if p["x"]]
    z_anc = [n_data + i for i, p in enumerate(plaq) if not p["x"]]

    def idle(qubits, t, coherence):
        pn = idle_pauli_probs(coherence, coherence, t)
        for q in qubits:
            circuit.pauli1(q, pn.px, pn.py, pn.pz)

    for q in range(n):
        circuit.reset(q)

    meas_of = {}  # (anc qubit, round) -> measurement index
    for rnd in range(cfg.rounds):
        # H layer
        for a in x_anc:
            circuit.h(a)
        idle(data_qubits, T_1Q, cfg.t_cd)
        idle(z_anc, T_1Q, cfg.t_ca)
        # 4 CX layers
        for layer in range(4):
            busy = set()
            for i, p in enumerate(plaq):
                a = n_data + i
                tag = (_X_ORDER if p["x"] else _Z_ORDER)[layer]
                dq = p["corners"][tag]
                if dq is None:
                    continue
                if p["x"]:
                    circuit.cx(a, dq)
                else:
                    circuit.cx(dq, a)
                circuit.depolarize2(a, dq, cfg.p2q)
                busy.add(a)
                busy.add(dq)
            idle([q for q in data_qubits if q not in busy], T_2Q, cfg.t_cd)
            idle([a for a in range(n_data, n) if a not in busy], T_2Q, cfg.t_ca)
        # H layer
        for a in x_anc:
            circuit.h(a)
        idle(data_qubits, T_1Q, cfg.t_cd)
        idle(z_anc, T_1Q, cfg.t_ca)
        # measurement window
        idle(range(n_data, n), T_MEAS, cfg.t_ca)
        idle(data_qubits, T_MEAS, cfg.t_cd)
        for a in range(n_data, n):
            meas_of[(a, rnd)] = circuit.measure(a)
            circuit.reset(a)

    # final transversal Z readout (with its own decay window)
    idle(data_qubits, T_MEAS, cfg.t_cd)
    final = {q: circuit.measure(q) for q in data_qubits}

    # detectors
    for i, p in enumerate(plaq):
        a = n_data + i
        if not p["x"]:
            circuit.detector([meas_of[(a, 0)]])
        for rnd in range(1, cfg.rounds):
            circuit.detector([meas_of[(a, rnd - 1)], meas_of[(a, rnd)]])
        if not p["x"]:
            support = [v for v in p["corners"].values() if v is not None]
            circuit.detector([meas_of[(a, cfg.rounds - 1)]]
                             + [final[q] for q in support])
    # logical Z = top data row
    circuit.observable(0, [final[q] for q in range(d)])
    return circuit


# ---------------------------------------------------------------------------
# Universal module: assignment and schedule
# ---------------------------------------------------------------------------

@dataclass
class Topology:
    n_usc: int = 1
    n_ext: int = 0
    register_capacity: int = 10

    @property
    def n_registers(self) -> int:
        return 3 * self.n_usc + 2 * self.n_ext


@dataclass
class Assignment:
    """data qubit -> (register, slot); the ancilla is the central compute."""
    register_of: dict[int, int]
    topology: Topology
    optimal: bool = True

    def slots(self) -> dict[int, tuple[int, int]]:
        out = {}
        counts = {}
        for q in sorted(self.register_of):
            r = self.register_of[q]
            s = counts.get(r, 0)
            counts[r] = s + 1
            out[q] = (r, s)
        return out

    def validate(self):
        counts = {}
        for q, r in self.register_of.items():
            if not 0 <= r < self.topology.n_registers:
                raise ValueError(f"register {r} out of range")
            counts[r] = counts.get(r, 0) + 1
        for r, c in counts.items():
            if c > self.topology.register_capacity:
                raise ValueError(f"register {r} over capacity ({c})")


@dataclass
class ScheduledOp:
    name: str          # SWAP_IN, SWAP_OUT, CX, H, M, R
    qubit: int | None  # data qubit (or None for ancilla-only ops)
    register: int | None
    start: float
    duration: float

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass
class Schedule:
    ops: list[ScheduledOp]
    check_order: list[int]
    makespan: float
    swap_count: int

    def validate(self, n_registers: int):
        """No device double-booking; gated qubits resident in compute."""
        anc_busy = []
        reg_busy = {r: [] for r in range(n_registers)}
        resident = {r: None for r in range(n_registers)}
        in_compute = {}
        for op in sorted(self.ops, key=lambda o: (o.start, o.name)):
            spans = []
            if op.name in ("SWAP_IN", "SWAP_OUT"):
                spans.append(reg_busy[op.register])
            elif op.name == "CX":
                spans.append(anc_busy)
                spans.append(reg_busy[op.register])
            elif op.name in ("H", "M", "R"):
                spans.append(anc_busy)
            for busy in spans:
                for (s, e) in busy:
                    if op.start < e - 1e-12 and s < op.end - 1e-12:
                        raise AssertionError(
                            f"device double-booked: {op} overlaps ({s},{e})"
                        )
                busy.append((op.start, op.end))
            if op.name == "SWAP_IN":
                if resident[op.register] is not None:
                    raise AssertionError("register compute already occupied")
                resident[op.register] = op.qubit
                in_compute[op.qubit] = True
            elif op.name == "SWAP_OUT":
                if resident[op.register] != op.qubit:
                    raise AssertionError("swap-out of non-resident qubit")
                resident[op.register] = None
                in_compute[op.qubit] = False
            elif op.name == "CX":
                if resident[op.register] != op.qubit or not in_compute.get(op.qubit):
                    raise AssertionError(
                        f"CX on non-resident qubit {op.qubit}"
                    )
        return True


def _check_supports(code: StabilizerCode) -> list[tuple[str, tuple[int, ...]]]:
    """Cycle order: X generators then Z generators, in listed order."""
    checks = []
    for g in code.generators:
        if g.z == 0:
            checks.append(("X", g.support))
    for g in code.generators:
        if g.x == 0:
            checks.append(("Z", g.support))
    return checks


def build_schedule(code: StabilizerCode, asn: Assignment,
                   t_swap: float = T_SWAP) -> Schedule:
    """Serialized stabilizer cycle with port-aware overlap.

    Within a check the supports swap into their register computes and gate
    with the central ancilla one at a time; swaps for the next check overlap
    the measurement window whenever the port is free. A qubit shared with
    the immediately following check stays resident, saving two swaps.
    """
    asn.validate()
    checks = _check_supports(code)
    n_reg = asn.topology.n_registers
    reg_time = [0.0] * n_reg
    anc_time = 0.0
    resident: dict[int, int | None] = {r: None for r in range(n_reg)}
    ops: list[ScheduledOp] = []
    swap_count = 0

    def reg_of(q):
        return asn.register_of[q]

    for ci, (kind, support) in enumerate(checks):
        next_support = set(checks[ci + 1][1]) if ci + 1 < len(checks) else set()
        by_reg: dict[int, list[int]] = {}
        for q in support:
            by_reg.setdefault(reg_of(q), []).append(q)
        # within each register: shared-with-next qubit goes last
        for r, qs in by_reg.items():
            qs.sort(key=lambda q: (q in next_support, q))
        # ancilla prep
        if kind == "X":
            anc_time = max(anc_time, 0.0)
            ops.append(ScheduledOp("H", None, None, anc_time, T_1Q))
            anc_time += T_1Q
        # sequence the CX ladder over registers round-robin by sorted register
        queues = {r: list(qs) for r, qs in sorted(by_reg.items())}
        while any(queues.values()):
            for r in sorted(queues):
                if not queues[r]:
                    continue
                q = queues[r].pop(0)
                if resident[r] != q:
                    if resident[r] is not None:
                        ops.append(ScheduledOp("SWAP_OUT", resident[r], r,
                                               reg_time[r], t_swap))
                        reg_time[r] += t_swap
                        swap_count += 1
                        resident[r] = None
                    ops.append(ScheduledOp("SWAP_IN", q, r, reg_time[r], t_swap))
                    reg_time[r] += t_swap
                    swap_count += 1
                    resident[r] = q
                t0 = max(anc_time, reg_time[r])
                ops.append(ScheduledOp("CX", q, r, t0, T_2Q))
                anc_time = t0 + T_2Q
                reg_time[r] = t0 + T_2Q
                # swap out unless reused by the next check
                if q not in next_support:
                    ops.append(ScheduledOp("SWAP_OUT", q, r, reg_time[r], t_swap))
                    reg_time[r] += t_swap
                    swap_count += 1
                    resident[r] = None
        # ancilla measurement (ports stay free for next check's swaps)
        if kind == "X":
            ops.append(ScheduledOp("H", None, None, anc_time, T_1Q))
            anc_time += T_1Q
        ops.append(ScheduledOp("M", None, None, anc_time, T_MEAS))
        anc_time += T_MEAS
        ops.append(ScheduledOp("R", None, None, anc_time, 0.0))
    # drain residents
    for r, q in resident.items():
        if q is not None:
            ops.append(ScheduledOp("SWAP_OUT", q, r, reg_time[r], t_swap))
            reg_time[r] += t_swap
            swap_count += 1
            resident[r] = None
    makespan = max([anc_time] + reg_time)
    sched = Schedule(ops, list(range(len(checks))), makespan, swap_count)
    sched.validate(n_reg)
    return sched


def _set_partitions(items, max_parts, capacity):
    """Unordered partitions into at most max_parts groups of bounded size."""
    items = list(items)

    def rec(idx, groups):
        if idx == len(items):
            yield [tuple(g) for g in groups]
            return
        item = items[idx]
        for g in groups:
            if len(g) < capacity:
                g.append(item)
                yield from rec(idx + 1, groups)
                g.pop()
        if len(groups) < max_parts:
            groups.append([item])
            yield from rec(idx + 1, groups)
            groups.pop()

    yield from rec(0, [])


EXHAUSTIVE_LIMIT = 9


def assignment_cost(code: StabilizerCode, asn: Assignment) -> tuple[int, float]:
    sched = build_schedule(code, asn)
    return sched.swap_count, sched.makespan


def optimize_assignment(code: StabilizerCode, topology: Topology | None = None,
                        seed: int = 0, node_budget: int = 20000) -> Assignment:
    """Minimize swap count per cycle (tie-break: makespan).

    Exhaustive over register partitions with symmetry pruning (equal-shape
    registers and slots within a register are interchangeable) up to the
    node budget; seeded randomized-restart hill climbing beyond it.
    """
    topology = topology or Topology()
    capacity = topology.register_capacity
    n_reg = topology.n_registers
    if code.n > n_reg * capacity:
        raise ValueError(
            f"code needs {code.n} slots, topology provides {n_reg * capacity}"
        )
    qubits = list(range(code.n))

    def to_assignment(groups) -> Assignment:
        reg_of = {}
        for r, group in enumerate(groups):
            for q in group:
                reg_of[q] = r
        return Assignment(reg_of, topology)

    n_parts_estimate = (n_reg ** code.n)
    if code.n <= EXHAUSTIVE_LIMIT or n_parts_estimate <= node_budget:
        best = None
        for groups in _set_partitions(qubits, n_reg, capacity):
            asn = to_assignment(groups)
            cost = assignment_cost(code, asn)
            if best is None or cost < best[0]:
                best = (cost, asn)
        best[1].optimal = True
        return best[1]

    # randomized restarts + greedy relocation/swap moves
    rng = random.Random(mix64(seed, code.n, 0xA55))
    best = None
    for restart in range(8):
        reg_of = {q: rng.randrange(n_reg) for q in qubits}
        # repair capacity
        while True:
            counts = {}
            for q, r in reg_of.items():
                counts.setdefault(r, []).append(q)
            over = [r for r, qs in counts.items() if len(qs) > capacity]
            if not over:
                break
            r = over[0]
            q = rng.choice(counts[r])
            targets = [t for t in range(n_reg)
                       if len(counts.get(t, [])) < capacity]
            reg_of[q] = rng.choice(targets)
        asn = Assignment(dict(reg_of), topology, optimal=False)
        cost = assignment_cost(code, asn)
        improved = True
        while improved:
            improved = False
            for q in qubits:
                cur = reg_of[q]
                for r in range(n_reg):
                    if r == cur:
                        continue
                    if sum(1 for v in reg_of.values() if v == r) >= capacity:
                        continue
                    reg_of[q] = r
                    cand = Assignment(dict(reg_of), topology, optimal=False)
                    c2 = assignment_cost(code, cand)
                    if c2 < cost:
                        cost = c2
                        improved = True
                    else:
                        reg_of[q] = cur
        if best is None or cost < best[0]:
            best = (cost, Assignment(dict(reg_of), topology, optimal=False))
    return best[1]


# ---------------------------------------------------------------------------
# Schedule -> noisy circuit
# ---------------------------------------------------------------------------

@dataclass
class UECNoise:
    t_s: float            # storage coherence
    t_c: float            # compute coherence
    p2q: float = 1e-2     # compute-compute two-qubit gates
    p_swap: float = 0.0   # storage load/store intrinsic error


def _weak_basis(code: StabilizerCode) -> str:
    """Memory basis aligned with the code's weak direction."""
    wz = code.logical_z.weight()
    wx = code.logical_x.weight()
    return "X" if wz <= wx else "Z"


class _IdleTracker:
    def __init__(self, circuit: NoisyCircuit, noise: UECNoise):
        self.circuit = circuit
        self.noise = noise
        self.last: dict[int, float] = {}
        self.loc: dict[int, str] = {}

    def init_qubit(self, q, t, loc):
        self.last[q] = t
        self.loc[q] = loc

    def advance(self, q, t):
        dt = t - self.last[q]
        if dt > 1e-12:
            T = self.noise.t_s if self.loc[q] == "storage" else self.noise.t_c
            pn = idle_pauli_probs(T, T, dt)
            self.circuit.pauli1(q, pn.px, pn.py, pn.pz)
        self.last[q] = max(self.last[q], t)


def uec_circuit(code: StabilizerCode, sched: Schedule, noise: UECNoise,
                rounds: int, basis: str = "auto") -> NoisyCircuit:
    """Compile the per-cycle schedule into a memory experiment circuit."""
    if basis == "auto":
        basis = _weak_basis(code)
    checks = _check_supports(code)
    n = code.n
    anc = n
    circuit = NoisyCircuit(n + 1)
    circuit.rounds = rounds
    tracker = _IdleTracker(circuit, noise)

    for q in range(n):
        circuit.reset(q)
        if basis == "X":
            circuit.h(q)
        tracker.init_qubit(q, 0.0, "storage")
    circuit.reset(anc)
    tracker.init_qubit(anc, 0.0, "compute")

    cycle_ops = sorted(sched.ops, key=lambda o: (o.start, o.name, o.qubit or -1))
    cycle_len = sched.makespan
    meas_of: dict[tuple[int, int], int] = {}  # (check index, round) -> meas idx

    for rnd in range(rounds):
        offset = rnd * cycle_len
        check_idx = 0
        for op in cycle_ops:
            t0 = op.start + offset
            if op.name == "SWAP_IN":
                tracker.advance(op.qubit, t0)
                if noise.p_swap > 0:
                    circuit.depolarize1(op.qubit, noise.p_swap)
                tracker.loc[op.qubit] = "compute"
                tracker.last[op.qubit] = t0 + op.duration
            elif op.name == "SWAP_OUT":
                tracker.advance(op.qubit, t0)
                if noise.p_swap > 0:
                    circuit.depolarize1(op.qubit, noise.p_swap)
                tracker.loc[op.qubit] = "storage"
                tracker.last[op.qubit] = t0 + op.duration
            elif op.name == "CX":
                kind = checks[check_idx][0]
                tracker.advance(op.qubit, t0)
                tracker.advance(anc, t0)
                if kind == "X":
                    circuit.cx(anc, op.qubit)
                else:
                    circuit.cx(op.qubit, anc)
                circuit.depolarize2(anc, op.qubit, noise.p2q)
                tracker.last[op.qubit] = t0 + op.duration
                tracker.last[anc] = t0 + op.duration
            elif op.name == "H":
                tracker.advance(anc, t0)
                circuit.h(anc)
                tracker.last[anc] = t0 + op.duration
            elif op.name == "M":
                # ancilla decoheres while its readout integrates
                tracker.advance(anc, t0 + op.duration)
                meas_of[(check_idx, rnd)] = circuit.measure(anc)
                tracker.last[anc] = t0 + op.duration
            elif op.name == "R":
                circuit.reset(anc)
                tracker.last[anc] = t0
                check_idx += 1

    # final transversal readout in the memory basis
    t_end = rounds * cycle_len
    final = {}
    for q in range(n):
        tracker.advance(q, t_end)
        # decay over the readout window at compute coherence
        pn = idle_pauli_probs(noise.t_c, noise.t_c, T_MEAS)
        circuit.pauli1(q, pn.px, pn.py, pn.pz)
        if basis == "X":
            circuit.h(q)
        final[q] = circuit.measure(q)

    # detectors: per check, aligned checks absolute in round 0 and vs data
    aligned = basis  # 'X' checks deterministic for |+>^n, 'Z' for |0>^n
    for ci, (kind, support) in enumerate(checks):
        if kind == aligned:
            circuit.detector([meas_of[(ci, 0)]])
        for rnd in range(1, rounds):
            circuit.detector([meas_of[(ci, rnd - 1)], meas_of[(ci, rnd)]])
        if kind == aligned:
            circuit.detector([meas_of[(ci, rounds - 1)]]
                             + [final[q] for q in support])
    logical = code.logical_x if basis == "X" else code.logical_z
    circuit.observable(0, [final[q] for q in logical.support])
    return circuit


# ---------------------------------------------------------------------------
# Experiment entry points
# ---------------------------------------------------------------------------

def _decoder_for(circuit: NoisyCircuit, code: StabilizerCode):
    from .decoder import LookupDecoder

    max_w = max(1, min(2, (code.distance - 1) // 2))
    return LookupDecoder(circuit, max_weight=max_w)


def uec_logical_error(code: StabilizerCode, t_s: float, t_c: float = 500.0,
                      shots: int = 100_000, seed: int = 0,
                      p2q: float = 1e-2, rounds: int | None = None,
                      basis: str = "auto") -> dict:
    """Per-cycle logical error of the storage-backed module."""
    from .stabsim import logical_error_rate

    noise = UECNoise(t_s=t_s, t_c=t_c, p2q=p2q)
    asn = optimize_assignment(code)
    sched = build_schedule(code, asn)
    circuit = uec_circuit(code, sched, noise, rounds or code.distance, basis)
    dec = _decoder_for(circuit, code)
    res = logical_error_rate(circuit, dec, shots, seed)
    res["swap_count"] = sched.swap_count
    res["makespan_us"] = sched.makespan
    res["assignment_optimal"] = asn.optimal
    return res


# -- homogeneous baseline ----------------------------------------------------

def _router_placement(code: StabilizerCode) -> tuple[dict[int, tuple[int, int]],
                                                     tuple[int, int], int]:
    """Deterministic placement on a square lattice.

    Qubits are placed greedily (most check participation first) onto
    row-major cells minimizing summed Manhattan distance to already-placed
    check partners; the ancilla takes the most central free cell.
    """
    checks = _check_supports(code)
    side = math.ceil(math.sqrt(code.n + 1)) + 1
    cells = [(r, c) for r in range(side) for c in range(side)]
    partners: dict[int, set[int]] = {q: set() for q in range(code.n)}
    participation = {q: 0 for q in range(code.n)}
    for _, support in checks:
        for q in support:
            participation[q] += 1
            partners[q].update(set(support) - {q})
    order = sorted(range(code.n), key=lambda q: (-participation[q], q))
    placed: dict[int, tuple[int, int]] = {}
    used = set()
    for q in order:
        best = None
        for cell in cells:
            if cell in used:
                continue
            dist = sum(abs(cell[0] - placed[p][0]) + abs(cell[1] - placed[p][1])
                       for p in partners[q] if p in placed)
            key = (dist, cell)
            if best is None or key < best:
                best = key
        placed[q] = best[1]
        used.add(best[1])
    center = ((side - 1) / 2, (side - 1) / 2)
    anc_cell = min((c for c in cells if c not in used),
                   key=lambda c: (abs(c[0] - center[0]) + abs(c[1] - center[1]), c))
    return placed, anc_cell, side


def _route_to_adjacent(start: tuple[int, int], target: tuple[int, int],
                       blocked: tuple[int, int]) -> list[tuple[int, int]]:
    """Cells stepped through moving start adjacent to target (greedy
    row-then-column), never entering `blocked` (the ancilla cell)."""
    path = [start]
    cur = start
    while abs(cur[0] - target[0]) + abs(cur[1] - target[1]) > 1:
        options = []
        if cur[0] != target[0]:
            options.append((cur[0] + (1 if target[0] > cur[0] else -1), cur[1]))
        if cur[1] != target[1]:
            options.append((cur[0], cur[1] + (1 if target[1] > cur[1] else -1)))
        step = next((o for o in options if o != blocked), None)
        if step is None:
            # sidestep around the ancilla
            step = (cur[0] + 1, cur[1]) if blocked != (cur[0] + 1, cur[1]) \
                else (cur[0], cur[1] + 1)
        path.append(step)
        cur = step
    return path


def homogeneous_router_stats(code: StabilizerCode) -> dict:
    """Swap counts of the deterministic router (native surface: zero)."""
    if code.name.startswith("surface"):
        return {"swaps_per_cycle": 0, "native": True}
    placed, anc_cell, side = _router_placement(code)
    checks = _check_supports(code)
    swaps = 0
    for _, support in checks:
        for q in support:
            path = _route_to_adjacent(placed[q], anc_cell, anc_cell)
            swaps += 2 * (len(path) - 1)  # there and back
    return {"swaps_per_cycle": swaps, "native": False}


def homogeneous_circuit(code: StabilizerCode, t_c: float, p2q: float,
                        rounds: int, basis: str = "auto") -> NoisyCircuit:
    """Square-lattice compute-only baseline with SWAP-chain routing."""
    if basis == "auto":
        basis = _weak_basis(code)
    placed, anc_cell, side = _router_placement(code)
    cell_wire = {}
    for q, cell in placed.items():
        cell_wire[cell] = q
    anc = code.n
    cell_wire[anc_cell] = anc
    # bystander cells get wires too (they can be swapped through)
    extra = code.n + 1
    for r in range(side):
        for c in range(side):
            if (r, c) not in cell_wire:
                cell_wire[(r, c)] = extra
                extra += 1
    n_wires = extra
    circuit = NoisyCircuit(n_wires)
    circuit.rounds = rounds
    noise = UECNoise(t_s=t_c, t_c=t_c, p2q=p2q)
    tracker = _IdleTracker(circuit, noise)
    for w in range(n_wires):
        circuit.reset(w)
        if basis == "X" and w < code.n:
            circuit.h(w)
        tracker.init_qubit(w, 0.0, "compute")

    checks = _check_supports(code)
    # occupancy: cell -> current wire
    occupant = dict(cell_wire)
    t = 0.0
    meas_of = {}

    def do_swap(c1, c2, t0):
        w1, w2 = occupant[c1], occupant[c2]
        tracker.advance(w1, t0)
        tracker.advance(w2, t0)
        circuit.swap(w1, w2)
        circuit.depolarize2(w1, w2, p2q)
        tracker.last[w1] = t0 + T_2Q
        tracker.last[w2] = t0 + T_2Q
        occupant[c1], occupant[c2] = w2, w1

    for rnd in range(rounds):
        for ci, (kind, support) in enumerate(checks):
            if kind == "X":
                aw = occupant[anc_cell]
                tracker.advance(aw, t)
                circuit.h(aw)
                tracker.last[aw] = t + T_1Q
                t += T_1Q
            for q in sorted(support):
                # locate q's current cell (it is home unless mid-route)
                qcell = next(c for c, w in occupant.items() if w == q)
                path = _route_to_adjacent(qcell, anc_cell, anc_cell)
                for i in range(len(path) - 1):
                    do_swap(path[i], path[i + 1], t)
                    t += T_2Q
                here = path[-1]
                aw = occupant[anc_cell]
                tracker.advance(q, t)
                tracker.advance(aw, t)
                if kind == "X":
                    circuit.cx(aw, q)
                else:
                    circuit.cx(q, aw)
                circuit.depolarize2(aw, q, p2q)
                tracker.last[q] = t + T_2Q
                tracker.last[aw] = t + T_2Q
                t += T_2Q
                for i in range(len(path) - 1, 0, -1):
                    do_swap(path[i], path[i - 1], t)
                    t += T_2Q
            aw = occupant[anc_cell]
            if kind == "X":
                tracker.advance(aw, t)
                circuit.h(aw)
                tracker.last[aw] = t + T_1Q
                t += T_1Q
            tracker.advance(aw, t + T_MEAS)
            meas_of[(ci, rnd)] = circuit.measure(aw)
            tracker.last[aw] = t + T_MEAS
            t += T_MEAS
            circuit.reset(aw)

    final = {}
    for q in range(code.n):
        tracker.advance(q, t)
        pn = idle_pauli_probs(t_c, t_c, T_MEAS)
        circuit.pauli1(q, pn.px, pn.py, pn.pz)
        if basis == "X":
            circuit.h(q)
        final[q] = circuit.measure(q)

    aligned = basis
    for ci, (kind, support) in enumerate(checks):
        if kind == aligned:
            circuit.detector([meas_of[(ci, 0)]])
        for rnd in range(1, rounds):
            circuit.detector([meas_of[(ci, rnd - 1)], meas_of[(ci, rnd)]])
        if kind == aligned:
            circuit.detector([meas_of[(ci, rounds - 1)]]
                             + [final[q] for q in support])
    logical = code.logical_x if basis == "X" else code.logical_z
    circuit.observable(0, [final[q] for q in logical.support])
    return circuit


def homogeneous_baseline(code: StabilizerCode, t_c: float = 500.0,
                         shots: int = 100_000, seed: int = 0,
                         p2q: float = 1e-2, rounds: int | None = None,
                         basis: str = "auto") -> dict:
    """Per-cycle logical error on the compute-only square lattice.

    Surface codes use their native parallel extraction (zero SWAPs); other
    codes run the serialized router circuit.
    """
    from .stabsim import logical_error_rate
    from .decoder import MatchingDecoder, build_graph

    rounds = rounds or code.distance
    if code.name.startswith("surface"):
        d = int(round(math.sqrt(code.n)))
        cfg = SurfaceExperimentConfig(d=d, rounds=rounds, t_cd=t_c, t_ca=t_c,
                                      p2q=p2q, shots=shots, seed=seed)
        circuit = surface_circuit(cfg)
        dec = MatchingDecoder(build_graph(circuit))
        res = logical_error_rate(circuit, dec, shots, seed)
        res["swaps_per_cycle"] = 0
        return res
    circuit = homogeneous_circuit(code, t_c, p2q, rounds, basis)
    dec = _decoder_for(circuit, code)
    res = logical_error_rate(circuit, dec, shots, seed)
    res["swaps_per_cycle"] = homogeneous_router_stats(code)["swaps_per_cycle"]
    return res


# -- pseudothreshold ---------------------------------------------------------

def pseudothreshold(code: StabilizerCode, t_s: float = 50_000.0,
                    t_c: float = 500.0, p2q: float = 1e-2,
                    shots: int = 20_000, seed: int = 0,
                    scale_range: tuple[float, float] = (0.25, 64.0),
                    rel_tol: float = 0.05, max_iter: int = 40) -> dict:
    """Bisection on a global noise scale until logical-per-cycle equals the
    scaled two-qubit physical error."""

    def logical_at(scale: float) -> float:
        res = uec_logical_error(
            code, t_s=t_s / scale, t_c=t_c / scale, shots=shots,
            seed=mix64(seed, int(scale * 1e6)), p2q=min(p2q * scale, 0.75),
        )
        return res["p_logical_per_cycle"]

    lo, hi = scale_range
    f_lo = logical_at(lo) - lo * p2q
    f_hi = logical_at(hi) - hi * p2q
    if f_lo * f_hi > 0:
        raise ValueError(
            f"no pseudothreshold crossing in scale range {scale_range}: "
            f"f({lo})={f_lo:.3g}, f({hi})={f_hi:.3g}"
        )
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi)
        p_log = logical_at(mid)
        target = mid * p2q
        if abs(p_log - target) <= rel_tol * target:
            return {"pseudothreshold": target, "scale": mid, "p_logical": p_log}
        if (p_log - target) * f_lo > 0:
            lo = mid
        else:
            hi = mid
    mid = math.sqrt(lo * hi)
    return {"pseudothreshold": mid * p2q, "scale": mid,
            "p_logical": logical_at(mid), "converged": False}
