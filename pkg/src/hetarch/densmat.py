"""Exact density-matrix simulation with noise channels for cell-level studies.

States are dense 2^n x 2^n complex matrices with little-endian qubit
indexing (qubit 0 is the least significant bit of a basis index). The
engine is capped at 10 qubits; anything larger must go through the
stabilizer Monte Carlo path instead.
"""

from __future__ import annotations

import math
import struct

import numpy as np

MAX_QUBITS = 10
_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
# Little-endian 2-qubit gates: index = bit(targets[0]) + 2*bit(targets[1]);
# CX control is targets[0].
CX = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
# sqrt(+-iX) rotations used by the purification circuit
SQRT_PLUS_IX = (I2 + 1j * X) / math.sqrt(2)
SQRT_MINUS_IX = (I2 - 1j * X) / math.sqrt(2)

PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


class DensityMatrix:
    """An n-qubit mixed state, kept Hermitian / unit-trace / PSD."""

    def __init__(self, n_qubits: int, data: np.ndarray | None = None,
                 check: bool = True):
        if n_qubits < 1 or n_qubits > MAX_QUBITS:
            raise ValueError(
                f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
            )
        dim = 1 << n_qubits
        if data is None:
            data = np.zeros((dim, dim), dtype=complex)
            data[0, 0] = 1.0
        else:
            data = np.asarray(data, dtype=complex)
            if data.shape != (dim, dim):
                raise ValueError(f"expected {dim}x{dim} matrix, got {data.shape}")
        self.n_qubits = n_qubits
        self.data = data
        if check:
            self.validate()

    @classmethod
    def from_state(cls, psi: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex).ravel()
        n = int(round(math.log2(psi.size)))
        if 1 << n != psi.size:
            raise ValueError("state vector length must be a power of 2")
        psi = psi / np.linalg.norm(psi)
        return cls(n, np.outer(psi, psi.conj()))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.data.copy(), check=False)

    def validate(self, atol: float = _ATOL):
        if not np.allclose(self.data, self.data.conj().T, atol=atol):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(self.data).real
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace is {tr}, expected 1")
        evals = np.linalg.eigvalsh(self.data)
        if evals.min() < -1e-9:
            raise ValueError(f"negative eigenvalue {evals.min()}")

    def trace(self) -> float:
        return float(np.trace(self.data).real)


def _check_targets(rho: DensityMatrix, targets: tuple[int, ...]):
    if len(set(targets)) != len(targets):
        raise ValueError(f"duplicate targets {targets}")
    for t in targets:
        if not 0 <= t < rho.n_qubits:
            raise ValueError(f"target {t} out of range for {rho.n_qubits} qubits")


def _apply_op_tensor(mat: np.ndarray, op: np.ndarray, targets: tuple[int, ...],
                     n: int, side: str) -> np.ndarray:
    """Multiply op onto the row (side='L') or conj(op) onto column indices."""
    k = len(targets)
    op_t = op.reshape((2,) * (2 * k))
    if side == "R":
        op_t = np.conj(op_t)
    # Row index of qubit q sits at axis n-1-q, column index at 2n-1-q.
    full = mat.reshape((2,) * (2 * n))
    base = n - 1 if side == "L" else 2 * n - 1
    axes = [base - q for q in targets]  # mat axis carrying local qubit i
    contact = [2 * k - 1 - i for i in range(k)]  # op column axis of local qubit i
    moved = np.tensordot(op_t, full, axes=(contact, axes))
    # tensordot puts the op's free (row) axes first; local qubit i's row axis
    # is k-1-i. Route each back to its original mat position.
    pos_map = {axes[i]: k - 1 - i for i in range(k)}
    rest = iter(range(k, 2 * n))
    perm = [pos_map.get(pos, None) for pos in range(2 * n)]
    perm = [p if p is not None else next(rest) for p in perm]
    return moved.transpose(perm).reshape(mat.shape)


def apply_unitary(rho: DensityMatrix, u: np.ndarray,
                  targets: int | tuple[int, ...]) -> DensityMatrix:
    """rho -> U rho U^dagger with U embedded on the target qubits."""
    if isinstance(targets, int):
        targets = (targets,)
    _check_targets(rho, targets)
    dim = 1 << len(targets)
    u = np.asarray(u, dtype=complex)
    if u.shape != (dim, dim):
        raise ValueError(f"unitary shape {u.shape} does not match targets {targets}")
    out = _apply_op_tensor(rho.data, u, targets, rho.n_qubits, "L")
    out = _apply_op_tensor(out, u, targets, rho.n_qubits, "R")
    return DensityMatrix(rho.n_qubits, out, check=False)


# Backwards-friendly alias: gates are unitaries.
apply_gate = apply_unitary


class Channel:
    """A CPTP map given by Kraus operators on k target qubits."""

    def __init__(self, kraus_ops: list[np.ndarray], name: str = "channel"):
        ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        dim = ops[0].shape[0]
        k = int(round(math.log2(dim)))
        if 1 << k != dim:
            raise ValueError("Kraus operators must act on whole qubits")
        for op in ops:
            if op.shape != (dim, dim):
                raise ValueError("inconsistent Kraus operator shapes")
        total = sum(op.conj().T @ op for op in ops)
        if not np.allclose(total, np.eye(dim), atol=_ATOL):
            raise ValueError(f"channel {name!r} is not trace preserving")
        self.kraus_ops = ops
        self.n_targets = k
        self.name = name

    def __repr__(self):
        return f"Channel({self.name}, {len(self.kraus_ops)} Kraus, k={self.n_targets})"


def apply_channel(rho: DensityMatrix, ch: Channel,
                  targets: int | tuple[int, ...]) -> DensityMatrix:
    if isinstance(targets, int):
        targets = (targets,)
    _check_targets(rho, targets)
    if len(targets) != ch.n_targets:
        raise ValueError(
            f"channel acts on {ch.n_targets} qubits, got targets {targets}"
        )
    out = np.zeros_like(rho.data)
    for op in ch.kraus_ops:
        term = _apply_op_tensor(rho.data, op, targets, rho.n_qubits, "L")
        term = _apply_op_tensor(term, op, targets, rho.n_qubits, "R")
        out += term
    return DensityMatrix(rho.n_qubits, out, check=False)


# ---------------------------------------------------------------------------
# Builtin channels
# ---------------------------------------------------------------------------

def amplitude_damping(gamma: float) -> Channel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma={gamma} out of [0,1]")
    k0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    return Channel([k0, k1], name=f"amp_damp({gamma:g})")


def dephasing(q: float) -> Channel:
    """Phase flip with probability q (off-diagonals shrink by 1-2q)."""
    if not 0.0 <= q <= 0.5 + 1e-12:
        raise ValueError(f"dephasing probability {q} out of [0, 1/2]")
    return Channel(
        [math.sqrt(1 - q) * I2, math.sqrt(q) * Z], name=f"dephase({q:g})"
    )


def idle_channels(t1: float, t2: float, dt: float) -> list[Channel]:
    """Amplitude damping plus pure dephasing accumulated over dt.

    The pure-dephasing rate is 1/t2 - 1/(2 t1); combined with damping this
    contracts off-diagonals by exp(-dt/t2) exactly.
    """
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if t2 > 2.0 * t1 + 1e-12:
        raise ValueError("t2 may not exceed 2*t1")
    if dt == 0:
        return []
    gamma = -math.expm1(-dt / t1)
    phi_rate = 1.0 / t2 - 1.0 / (2.0 * t1)
    q = 0.5 * (-math.expm1(-phi_rate * dt)) if phi_rate > 0 else 0.0
    chans = [amplitude_damping(gamma)]
    if q > 0:
        chans.append(dephasing(q))
    return chans


def apply_idle(rho: DensityMatrix, qubit: int, t1: float, t2: float,
               dt: float) -> DensityMatrix:
    for ch in idle_channels(t1, t2, dt):
        rho = apply_channel(rho, ch, qubit)
    return rho


def _pauli_basis(n_qubits: int) -> list[tuple[str, np.ndarray]]:
    labels = ["I", "X", "Y", "Z"]
    if n_qubits == 1:
        return [(lbl, PAULIS[lbl]) for lbl in labels]
    # little-endian: first label character acts on targets[0]
    return [(a + b, np.kron(PAULIS[b], PAULIS[a])) for b in labels for a in labels]


def uniform_pauli(p: float, n_qubits: int = 1) -> Channel:
    """Each of the 4^n - 1 non-identity Paulis with probability p/(4^n - 1).

    This is the channel realized by the stabilizer simulator's Depolarize
    instructions and by gate-error realization.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} out of [0,1]")
    if n_qubits not in (1, 2):
        raise ValueError("uniform_pauli supports 1 or 2 qubits")
    paulis = _pauli_basis(n_qubits)
    n_err = len(paulis) - 1
    ops = []
    for lbl, mat in paulis:
        weight = 1.0 - p if set(lbl) == {"I"} else p / n_err
        if weight > 0:
            ops.append(math.sqrt(weight) * mat)
    return Channel(ops, name=f"uniform_pauli{n_qubits}({p:g})")


def depolarizing(p: float, n_qubits: int = 1) -> Channel:
    """With probability p replace the state by the maximally mixed state."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} out of [0,1]")
    if n_qubits not in (1, 2):
        raise ValueError("depolarizing supports 1 or 2 qubits")
    dim2 = 4 ** n_qubits
    ops = []
    for lbl, mat in _pauli_basis(n_qubits):
        weight = (1.0 - p) + p / dim2 if set(lbl) == {"I"} else p / dim2
        if weight > 0:
            ops.append(math.sqrt(weight) * mat)
    return Channel(ops, name=f"depol{n_qubits}({p:g})")


def pauli_channel(px: float, py: float, pz: float) -> Channel:
    p0 = 1.0 - px - py - pz
    if p0 < -1e-12:
        raise ValueError("Pauli probabilities exceed 1")
    ops = [math.sqrt(max(p0, 0.0)) * I2]
    for p, mat in ((px, X), (py, Y), (pz, Z)):
        if p > 0:
            ops.append(math.sqrt(p) * mat)
    return Channel(ops, name=f"pauli({px:g},{py:g},{pz:g})")


# ---------------------------------------------------------------------------
# Measurement and fidelity
# ---------------------------------------------------------------------------

def measure(rho: DensityMatrix, qubit: int, basis: str = "Z"
            ) -> list[tuple[int, float, DensityMatrix]]:
    """Born-rule branches for measuring one qubit.

    Returns [(outcome, probability, renormalized posterior)] for outcomes
    with nonzero probability.
    """
    _check_targets(rho, (qubit,))
    if basis == "Z":
        work = rho
    elif basis == "X":
        work = apply_unitary(rho, H, qubit)
    else:
        raise ValueError(f"unsupported basis {basis!r}")
    dim = 1 << rho.n_qubits
    idx = np.arange(dim)
    results = []
    for outcome in (0, 1):
        mask = ((idx >> qubit) & 1) == outcome
        proj = np.zeros((dim, dim), dtype=complex)
        proj[mask, mask] = 1.0
        post = proj @ work.data @ proj
        p = float(np.trace(post).real)
        if p <= 1e-14:
            continue
        post = post / p
        post_dm = DensityMatrix(rho.n_qubits, post, check=False)
        if basis == "X":
            post_dm = apply_unitary(post_dm, H, qubit)
        results.append((outcome, p, post_dm))
    return results


def fidelity(rho: DensityMatrix, target: np.ndarray | DensityMatrix) -> float:
    """<psi|rho|psi> against a pure target state."""
    if isinstance(target, DensityMatrix):
        # pure-state target passed as a projector
        return float(np.trace(rho.data @ target.data).real)
    psi = np.asarray(target, dtype=complex).ravel()
    if psi.size != rho.data.shape[0]:
        raise ValueError("dimension mismatch")
    psi = psi / np.linalg.norm(psi)
    return float(np.real(psi.conj() @ rho.data @ psi))


def partial_trace(rho: DensityMatrix, keep: tuple[int, ...]) -> DensityMatrix:
    keep = tuple(keep)
    _check_targets(rho, keep)
    n = rho.n_qubits
    drop = [q for q in range(n) if q not in keep]
    full = rho.data.reshape((2,) * (2 * n))
    for q in sorted(drop, reverse=True):
        ax_row = n - 1 - q
        ax_col = 2 * n - 1 - q
        full = np.trace(full, axis1=ax_row, axis2=ax_col)
        n -= 1
        # removing a qubit renumbers the ones above it; keep-list adjusts below
    new_order = sorted(keep)
    perm_needed = [new_order.index(q) for q in keep]
    out = DensityMatrix(len(keep), full.reshape(1 << len(keep), 1 << len(keep)),
                        check=False)
    if perm_needed != list(range(len(keep))):
        out = permute_qubits(out, tuple(perm_needed))
    return out


def permute_qubits(rho: DensityMatrix, perm: tuple[int, ...]) -> DensityMatrix:
    """Relabel qubits: new qubit i is old qubit perm[i]."""
    n = rho.n_qubits
    full = rho.data.reshape((2,) * (2 * n))
    axes = [n - 1 - perm[n - 1 - ax] for ax in range(n)]
    axes += [2 * n - 1 - perm[2 * n - 1 - ax] for ax in range(n, 2 * n)]
    out = full.transpose(axes).reshape(rho.data.shape)
    return DensityMatrix(n, out, check=False)


# ---------------------------------------------------------------------------
# Common states
# ---------------------------------------------------------------------------

def ket(bits: str) -> np.ndarray:
    """Computational basis state; bits[i] is qubit i (little-endian)."""
    n = len(bits)
    idx = 0
    for q, b in enumerate(bits):
        if b == "1":
            idx |= 1 << q
    psi = np.zeros(1 << n, dtype=complex)
    psi[idx] = 1.0
    return psi


def bell_phi_plus() -> np.ndarray:
    return (ket("00") + ket("11")) / math.sqrt(2)


BELL_STATES = {
    "phi+": (ket("00") + ket("11")) / math.sqrt(2),
    "phi-": (ket("00") - ket("11")) / math.sqrt(2),
    "psi+": (ket("01") + ket("10")) / math.sqrt(2),
    "psi-": (ket("01") - ket("10")) / math.sqrt(2),
}


def werner(f: float) -> DensityMatrix:
    """Mixture of phi+ (weight f) with the other Bells in equal weights."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"fidelity {f} out of [0,1]")
    rest = (1.0 - f) / 3.0
    data = f * np.outer(BELL_STATES["phi+"], BELL_STATES["phi+"].conj())
    for name in ("phi-", "psi+", "psi-"):
        v = BELL_STATES[name]
        data = data + rest * np.outer(v, v.conj())
    return DensityMatrix(2, data, check=False)


def bell_diagonal_components(rho: DensityMatrix) -> np.ndarray:
    """Components (phi+, phi-, psi+, psi-) of a 2-qubit state."""
    if rho.n_qubits != 2:
        raise ValueError("needs a 2-qubit state")
    return np.array(
        [fidelity(rho, BELL_STATES[k]) for k in ("phi+", "phi-", "psi+", "psi-")]
    )


# ---------------------------------------------------------------------------
# Binary state dump
# ---------------------------------------------------------------------------

_MAGIC = b"DMAT"


def dump_state(rho: DensityMatrix, path: str):
    """Header (magic, n_qubits, endianness tag) + row-major complex doubles."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<B", rho.n_qubits))
        fh.write(b"LE")
        fh.write(np.ascontiguousarray(rho.data, dtype=np.complex128).tobytes())


def load_state(path: str) -> DensityMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError("not a state dump file")
        (n,) = struct.unpack("<B", fh.read(1))
        tag = fh.read(2)
        if tag != b"LE":
            raise ValueError(f"unsupported endianness tag {tag!r}")
        dim = 1 << n
        data = np.frombuffer(fh.read(), dtype=np.complex128).reshape(dim, dim)
    return DensityMatrix(n, data.copy())
