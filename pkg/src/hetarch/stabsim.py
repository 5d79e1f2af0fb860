"""Circuit-level stabilizer Monte Carlo engine (Pauli-frame sampling).

A ``NoisyCircuit`` is an ordered instruction stream over qubit indices with
detector/observable declarations (parities of measurement indices). A
reference tableau pass with symbolic measurement outcomes establishes, once
per circuit, that every detector and observable parity is deterministic in
the noiseless circuit; Monte Carlo sampling then propagates Pauli frames
only, which is orders of magnitude faster than state simulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .util import mix64, per_cycle_rate, wilson_interval

GATES_1Q = ("H", "S")
GATES_2Q = ("CX", "SWAP")


class NoisyCircuit:
    """Clifford + Pauli-noise instruction stream.

    Instructions are (name, targets, args) tuples; supported names:
    H, S, CX, SWAP, M, R, PAULI1(px,py,pz), DEP1(p), DEP2(p), TICK(dur).
    """

    def __init__(self, n_qubits: int):
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        self.n_qubits = n_qubits
        self.ops: list[tuple] = []
        self.detectors: list[tuple[int, ...]] = []
        self.observables: list[tuple[int, ...]] = []
        self.n_measurements = 0
        self.rounds = 1  # metadata for per-cycle conversion
        self._reference = None

    # -- construction -----------------------------------------------------
    def _chk(self, *qs):
        for q in qs:
            if not 0 <= q < self.n_qubits:
                raise ValueError(f"qubit {q} out of range")
        if len(set(qs)) != len(qs):
            raise ValueError(f"duplicate targets {qs}")
        self._reference = None

    def h(self, q):
        self._chk(q)
        self.ops.append(("H", (q,), ()))

    def s(self, q):
        self._chk(q)
        self.ops.append(("S", (q,), ()))

    def cx(self, c, t):
        self._chk(c, t)
        self.ops.append(("CX", (c, t), ()))

    def swap(self, a, b):
        self._chk(a, b)
        self.ops.append(("SWAP", (a, b), ()))

    def measure(self, q) -> int:
        """Z-basis measurement; returns the measurement record index."""
        self._chk(q)
        self.ops.append(("M", (q,), ()))
        self.n_measurements += 1
        return self.n_measurements - 1

    def reset(self, q):
        self._chk(q)
        self.ops.append(("R", (q,), ()))

    def pauli1(self, q, px, py, pz):
        self._chk(q)
        if min(px, py, pz) < 0 or px + py + pz > 1:
            raise ValueError("bad Pauli probabilities")
        if px + py + pz > 0:
            self.ops.append(("PAULI1", (q,), (px, py, pz)))

    def depolarize1(self, q, p):
        self._chk(q)
        if not 0 <= p <= 1:
            raise ValueError("bad probability")
        if p > 0:
            self.ops.append(("DEP1", (q,), (p,)))

    def depolarize2(self, a, b, p):
        self._chk(a, b)
        if not 0 <= p <= 1:
            raise ValueError("bad probability")
        if p > 0:
            self.ops.append(("DEP2", (a, b), (p,)))

    def tick(self, duration):
        self.ops.append(("TICK", (), (float(duration),)))

    def detector(self, meas_indices):
        idxs = tuple(meas_indices)
        for m in idxs:
            if not 0 <= m < self.n_measurements:
                raise ValueError(f"measurement index {m} not yet defined")
        self.detectors.append(idxs)
        self._reference = None

    def observable(self, index, meas_indices):
        idxs = tuple(meas_indices)
        for m in idxs:
            if not 0 <= m < self.n_measurements:
                raise ValueError(f"measurement index {m} not yet defined")
        while len(self.observables) <= index:
            self.observables.append(())
        self.observables[index] = tuple(
            sorted(set(self.observables[index]) ^ set(idxs))
        )
        self._reference = None

    # -- text serialization -------------------------------------------------
    def to_text(self) -> str:
        lines = [f"qubits {self.n_qubits}", f"rounds {self.rounds}"]
        for name, tg, args in self.ops:
            parts = [name] + [str(t) for t in tg] + [repr(a) for a in args]
            lines.append(" ".join(parts))
        for det in self.detectors:
            lines.append("DETECTOR " + " ".join(map(str, det)))
        for i, obs in enumerate(self.observables):
            lines.append(f"OBSERVABLE {i} " + " ".join(map(str, obs)))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NoisyCircuit":
        circuit = None
        rounds = 1
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            key = parts[0]
            if key == "qubits":
                circuit = cls(int(parts[1]))
                circuit.rounds = rounds
                continue
            if circuit is None:
                raise ValueError("first line must declare qubits")
            if key == "rounds":
                circuit.rounds = int(parts[1])
            elif key == "H":
                circuit.h(int(parts[1]))
            elif key == "S":
                circuit.s(int(parts[1]))
            elif key == "CX":
                circuit.cx(int(parts[1]), int(parts[2]))
            elif key == "SWAP":
                circuit.swap(int(parts[1]), int(parts[2]))
            elif key == "M":
                circuit.measure(int(parts[1]))
            elif key == "R":
                circuit.reset(int(parts[1]))
            elif key == "PAULI1":
                circuit.pauli1(int(parts[1]), *map(float, parts[2:5]))
            elif key == "DEP1":
                circuit.depolarize1(int(parts[1]), float(parts[2]))
            elif key == "DEP2":
                circuit.depolarize2(int(parts[1]), int(parts[2]), float(parts[3]))
            elif key == "TICK":
                circuit.tick(float(parts[1]))
            elif key == "DETECTOR":
                circuit.detector([int(v) for v in parts[1:]])
            elif key == "OBSERVABLE":
                circuit.observable(int(parts[1]), [int(v) for v in parts[2:]])
            else:
                raise ValueError(f"unknown instruction {key!r}")
        if circuit is None:
            raise ValueError("empty circuit text")
        return circuit


# ---------------------------------------------------------------------------
# Reference tableau pass with symbolic measurement outcomes
# ---------------------------------------------------------------------------

@dataclass
class ReferenceResult:
    """Noiseless-run facts: per-measurement affine outcome forms and the
    deterministic reference parity of each detector/observable."""

    meas_const: list[int]
    meas_mask: list[int]
    detector_parity: list[int]
    observable_parity: list[int]


class _SymbolicTableau:
    """Aaronson-Gottesman tableau; row signs are affine forms over the
    symbolic random-outcome bits (sign = const XOR mask.symbols)."""

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=np.uint8)
        self.z = np.zeros((2 * n, n), dtype=np.uint8)
        for i in range(n):
            self.x[i, i] = 1
            self.z[n + i, i] = 1
        self.const = np.zeros(2 * n, dtype=np.uint8)
        self.mask = [0] * (2 * n)
        self.n_symbols = 0

    def h(self, q):
        self.const ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q):
        self.const ^= self.x[:, q] & self.z[:, q]
        self.z[:, q] ^= self.x[:, q]

    def cx(self, c, t):
        self.const ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ 1)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def swap(self, a, b):
        for arr in (self.x, self.z):
            arr[:, a], arr[:, b] = arr[:, b].copy(), arr[:, a].copy()

    def _phase_exponent(self, h, i):
        """Sum over qubits of the Pauli-product phase g, for row i onto row h."""
        x1, z1 = self.x[i], self.z[i]
        x2, z2 = self.x[h], self.z[h]
        # g per qubit: from Aaronson-Gottesman rowsum
        g = (x1 & z1) * (z2.astype(np.int8) - x2.astype(np.int8)) \
            + (x1 & ~z1) * (z2 * (2 * x2.astype(np.int8) - 1)) \
            + (~x1 & z1) * (x2 * (1 - 2 * z2.astype(np.int8)))
        return int(g.sum())

    def rowsum(self, h, i):
        g = self._phase_exponent(h, i)
        total = 2 * int(self.const[h]) + 2 * int(self.const[i]) + g
        if total % 2 != 0:
            raise AssertionError("non-real phase in rowsum")
        self.const[h] = (total % 4) // 2
        self.mask[h] ^= self.mask[i]
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure(self, q) -> tuple[int, int]:
        """Measure Z_q; returns the outcome's (const, symbol mask)."""
        n = self.n
        piv = None
        for p in range(n, 2 * n):
            if self.x[p, q]:
                piv = p
                break
        if piv is not None:
            # random outcome: fresh symbol
            for i in range(2 * n):
                if i != piv and self.x[i, q]:
                    self.rowsum(i, piv)
            self.x[piv - n] = self.x[piv].copy()
            self.z[piv - n] = self.z[piv].copy()
            self.const[piv - n] = self.const[piv]
            self.mask[piv - n] = self.mask[piv]
            self.x[piv] = 0
            self.z[piv] = 0
            self.z[piv, q] = 1
            sym = self.n_symbols
            self.n_symbols += 1
            self.const[piv] = 0
            self.mask[piv] = 1 << sym
            return 0, 1 << sym
        # deterministic: accumulate indicated stabilizer rows in scratch
        sx = np.zeros(self.n, dtype=np.uint8)
        sz = np.zeros(self.n, dtype=np.uint8)
        sc = 0
        sm = 0
        for i in range(n):
            if self.x[i, q]:
                # scratch += stabilizer row n+i
                x1, z1 = self.x[n + i], self.z[n + i]
                g = (x1 & z1) * (sz.astype(np.int8) - sx.astype(np.int8)) \
                    + (x1 & ~z1) * (sz * (2 * sx.astype(np.int8) - 1)) \
                    + (~x1 & z1) * (sx * (1 - 2 * sz.astype(np.int8)))
                total = 2 * sc + 2 * int(self.const[n + i]) + int(g.sum())
                if total % 2 != 0:
                    raise AssertionError("non-real phase in measurement")
                sc = (total % 4) // 2
                sm ^= self.mask[n + i]
                sx ^= x1
                sz ^= z1
        return sc, sm

    def conditional_x(self, q, f_const: int, f_mask: int):
        """Apply X(q) conditioned on a classical affine bit (for reset)."""
        for i in range(2 * self.n):
            if self.z[i, q]:
                self.const[i] ^= f_const
                self.mask[i] ^= f_mask


def reference_pass(circuit: NoisyCircuit) -> ReferenceResult:
    """Noiseless symbolic run; proves detectors/observables deterministic.

    Raises ValueError if any detector or observable parity depends on a
    random measurement outcome (the frame method would be invalid).
    """
    tab = _SymbolicTableau(circuit.n_qubits)
    mc: list[int] = []
    mm: list[int] = []
    for name, tg, args in circuit.ops:
        if name == "H":
            tab.h(tg[0])
        elif name == "S":
            tab.s(tg[0])
        elif name == "CX":
            tab.cx(*tg)
        elif name == "SWAP":
            tab.swap(*tg)
        elif name == "M":
            c, m = tab.measure(tg[0])
            mc.append(c)
            mm.append(m)
        elif name == "R":
            c, m = tab.measure(tg[0])
            tab.conditional_x(tg[0], c, m)
        # noise and TICK are no-ops in the reference pass
    det_par = []
    for j, det in enumerate(circuit.detectors):
        mask = 0
        par = 0
        for idx in det:
            mask ^= mm[idx]
            par ^= mc[idx]
        if mask:
            raise ValueError(
                f"detector {j} is not deterministic in the noiseless circuit"
            )
        det_par.append(par)
    obs_par = []
    for j, obs in enumerate(circuit.observables):
        mask = 0
        par = 0
        for idx in obs:
            mask ^= mm[idx]
            par ^= mc[idx]
        if mask:
            raise ValueError(
                f"observable {j} is not deterministic in the noiseless circuit"
            )
        obs_par.append(par)
    return ReferenceResult(mc, mm, det_par, obs_par)


def _ensure_reference(circuit: NoisyCircuit) -> ReferenceResult:
    if circuit._reference is None:
        circuit._reference = reference_pass(circuit)
    return circuit._reference


# ---------------------------------------------------------------------------
# Pauli-frame sampling
# ---------------------------------------------------------------------------

@dataclass
class ShotBatch:
    detectors: np.ndarray    # (shots, n_detectors) bool
    observables: np.ndarray  # (shots, n_observables) bool

    @property
    def shots(self) -> int:
        return self.detectors.shape[0]


_CLIFFORD = {"H", "S", "CX", "SWAP", "M", "R", "TICK"}
_NOISE = {"PAULI1", "DEP1", "DEP2"}


def _sample_block(circuit: NoisyCircuit, block: int, rng: np.random.Generator):
    n = circuit.n_qubits
    xf = np.zeros((block, n), dtype=bool)
    zf = np.zeros((block, n), dtype=bool)
    flips = np.zeros((block, circuit.n_measurements), dtype=bool)
    mi = 0
    for name, tg, args in circuit.ops:
        if name == "CX":
            c, t = tg
            xf[:, t] ^= xf[:, c]
            zf[:, c] ^= zf[:, t]
        elif name == "M":
            q = tg[0]
            flips[:, mi] = xf[:, q]
            mi += 1
            zf[:, q] ^= rng.integers(0, 2, size=block, dtype=np.uint8).astype(bool)
        elif name == "R":
            q = tg[0]
            xf[:, q] = False
            zf[:, q] = False
        elif name == "PAULI1":
            q = tg[0]
            px, py, pz = args
            u = rng.random(block)
            xf[:, q] ^= u < (px + py)
            zf[:, q] ^= (u >= px) & (u < px + py + pz)
        elif name == "DEP1":
            q = tg[0]
            p = args[0]
            u = rng.random(block)
            third = p / 3.0
            xf[:, q] ^= u < 2 * third
            zf[:, q] ^= (u >= third) & (u < p)
        elif name == "DEP2":
            a, b = tg
            p = args[0]
            u = rng.random(block)
            hit = u < p
            if hit.any():
                k = np.minimum((u[hit] / p * 15).astype(np.int64), 14) + 1
                pa = k & 3          # 0=I 1=X 2=Z 3=Y on qubit a
                pb = k >> 2
                idx = np.flatnonzero(hit)
                xf[idx, a] ^= (pa % 2).astype(bool)
                zf[idx, a] ^= (pa >= 2)
                xf[idx, b] ^= (pb % 2).astype(bool)
                zf[idx, b] ^= (pb >= 2)
        elif name == "H":
            q = tg[0]
            xf[:, q], zf[:, q] = zf[:, q].copy(), xf[:, q].copy()
        elif name == "S":
            q = tg[0]
            zf[:, q] ^= xf[:, q]
        elif name == "SWAP":
            a, b = tg
            xf[:, a], xf[:, b] = xf[:, b].copy(), xf[:, a].copy()
            zf[:, a], zf[:, b] = zf[:, b].copy(), zf[:, a].copy()
        elif name == "TICK":
            pass
        else:
            raise ValueError(f"non-Clifford instruction {name!r}")
    dets = np.zeros((block, len(circuit.detectors)), dtype=bool)
    for j, det in enumerate(circuit.detectors):
        for idx in det:
            dets[:, j] ^= flips[:, idx]
    obs = np.zeros((block, len(circuit.observables)), dtype=bool)
    for j, ob in enumerate(circuit.observables):
        for idx in ob:
            obs[:, j] ^= flips[:, idx]
    return dets, obs


DEFAULT_BLOCK = 8192


def sample(circuit: NoisyCircuit, shots: int, seed: int,
           block_size: int = DEFAULT_BLOCK) -> ShotBatch:
    """Monte Carlo detector/observable sampling, deterministic given seed.

    Shots are split into fixed-size blocks; block b uses an RNG stream
    derived from mix64(seed, b), so results are independent of how blocks
    would be scheduled across workers.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    _ensure_reference(circuit)
    det_parts = []
    obs_parts = []
    done = 0
    b = 0
    while done < shots:
        cur = min(block_size, shots - done)
        rng = np.random.Generator(np.random.PCG64(mix64(seed, b)))
        dets, obs = _sample_block(circuit, cur, rng)
        det_parts.append(dets)
        obs_parts.append(obs)
        done += cur
        b += 1
    return ShotBatch(np.vstack(det_parts), np.vstack(obs_parts))


def logical_error_rate(circuit: NoisyCircuit, decoder, shots: int, seed: int
                       ) -> dict:
    """Decoded logical failure statistics.

    ``decoder`` must provide decode_batch(detectors) -> predicted observable
    flips of shape (shots, n_observables).
    """
    batch = sample(circuit, shots, seed)
    predicted = decoder.decode_batch(batch.detectors)
    predicted = np.asarray(predicted, dtype=bool)
    if predicted.shape != batch.observables.shape:
        raise ValueError(
            f"decoder produced {predicted.shape}, circuit has "
            f"{batch.observables.shape}"
        )
    wrong = (predicted ^ batch.observables).any(axis=1)
    failures = int(wrong.sum())
    p_shot = failures / shots
    lo, hi = wilson_interval(failures, shots)
    return {
        "p_shot": p_shot,
        "p_logical_per_cycle": per_cycle_rate(p_shot, circuit.rounds),
        "ci95": (per_cycle_rate(lo, circuit.rounds),
                 per_cycle_rate(hi, circuit.rounds)),
        "failures": failures,
        "shots": shots,
        "rounds": circuit.rounds,
    }
