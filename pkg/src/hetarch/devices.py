"""Device parameter records and coherence-to-noise-channel conversion.

All durations are in microseconds unless a key or argument name says
otherwise. A device is either a compute element (single qubit, fast gates,
optional readout) or a storage element (multi-qubit memory accessed through
a single SWAP port).
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass
from enum import Enum

NS = 1e-3  # nanoseconds expressed in microseconds
MS = 1e3


class Role(Enum):
    COMPUTE = "compute"
    STORAGE = "storage"


@dataclass(frozen=True)
class GateInfo:
    """Duration (us) and error probability of one native gate."""

    duration: float
    error: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"gate duration must be > 0, got {self.duration}")
        if not 0.0 <= self.error <= 1.0:
            raise ValueError(f"gate error must be in [0,1], got {self.error}")


@dataclass(frozen=True)
class DeviceSpec:
    """Physical parameters of one device type.

    ``t1``/``t2`` are amplitude and phase coherence times. ``capacity`` is
    the number of qubits the device can hold (1 for compute devices).
    ``gate_set`` maps gate names (CX, SWAP, H, ...) to ``GateInfo``.
    ``control_overhead`` lists control line kinds (charge/flux/readout).
    ``footprint`` is (w, h) or (w, h, depth) in mm.
    """

    id: str
    role: Role
    t1: float
    t2: float
    gate_set: dict[str, GateInfo]
    readout_time: float | None = None
    capacity: int = 1
    connectivity_limit: int = 1
    control_overhead: tuple[str, ...] = ()
    footprint: tuple[float, ...] = (0.0, 0.0)
    notes: str = ""

    def __post_init__(self):
        if self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("t1 and t2 must be positive")
        if self.t2 > 2.0 * self.t1 + 1e-12:
            raise ValueError(
                f"{self.id}: t2={self.t2} exceeds 2*t1={2 * self.t1} "
                "(unphysical dephasing rate)"
            )
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.role is Role.COMPUTE and self.capacity != 1:
            raise ValueError("compute devices hold exactly one qubit")
        if self.role is Role.STORAGE:
            bad = set(self.gate_set) - {"SWAP"}
            if bad:
                raise ValueError(f"storage gate set is SWAP only, got {sorted(bad)}")
        if self.connectivity_limit < 1:
            raise ValueError("connectivity_limit must be >= 1")
        if self.readout_time is not None and self.readout_time <= 0:
            raise ValueError("readout_time must be positive when present")

    @property
    def footprint_area(self) -> float:
        """Projected 2D footprint in mm^2 (w*h, depth ignored)."""
        return self.footprint[0] * self.footprint[1]


@dataclass(frozen=True)
class PauliNoise:
    """Single-qubit Pauli error probabilities (px, py, pz)."""

    px: float
    py: float
    pz: float

    def __post_init__(self):
        for name, p in (("px", self.px), ("py", self.py), ("pz", self.pz)):
            if not -1e-15 <= p <= 1.0:
                raise ValueError(f"{name}={p} out of [0,1]")
        if self.px + self.py + self.pz > 1.0 + 1e-12:
            raise ValueError("px+py+pz must not exceed 1")

    @property
    def total(self) -> float:
        return self.px + self.py + self.pz

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.total <= tol


def idle_pauli_probs(t1: float, t2: float, dt: float) -> PauliNoise:
    """Pauli-twirled idle noise accumulated over ``dt`` microseconds.

    The twirl of amplitude damping (rate 1/t1) composed with pure dephasing
    (rate 1/t2 - 1/(2 t1)) keeps the diagonal of the Pauli transfer matrix:
    the X/Y components contract by exp(-dt/t2) and the Z component by
    exp(-dt/t1), which solves to

        px = py = (1 - exp(-dt/t1)) / 4
        pz = (1 - exp(-dt/t2)) / 2 - (1 - exp(-dt/t1)) / 4
    """
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if t1 <= 0 or t2 <= 0:
        raise ValueError("t1 and t2 must be positive")
    if t2 > 2.0 * t1 + 1e-12:
        raise ValueError("t2 may not exceed 2*t1")
    if dt == 0 or (math.isinf(t1) and math.isinf(t2)):
        return PauliNoise(0.0, 0.0, 0.0)
    decay1 = -math.expm1(-dt / t1)  # 1 - e^{-dt/t1}
    decay2 = -math.expm1(-dt / t2)
    px = decay1 / 4.0
    pz = decay2 / 2.0 - decay1 / 4.0
    return PauliNoise(px, px, max(pz, 0.0))


def gate_depolarizing(spec: DeviceSpec, gate: str) -> tuple[float, float]:
    """(duration us, depolarizing probability) for ``gate`` on ``spec``.

    The error is to be realized as a uniform 1- or 2-qubit depolarizing
    channel on the gate's support after the ideal gate.
    """
    try:
        info = spec.gate_set[gate]
    except KeyError:
        raise KeyError(f"device {spec.id!r} has no gate {gate!r}") from None
    return info.duration, info.error


# ---------------------------------------------------------------------------
# Builtin catalog
# ---------------------------------------------------------------------------

_ARB_1Q2Q = {
    "X": GateInfo(40 * NS, 1e-3),
    "H": GateInfo(40 * NS, 1e-3),
    "S": GateInfo(40 * NS, 1e-3),
    "CX": GateInfo(100 * NS, 1e-3),
    "SWAP": GateInfo(100 * NS, 1e-3),
}


def builtin_catalog() -> list[DeviceSpec]:
    """The tabulated near-term devices plus the default experiment devices.

    Experiment compute devices keep the tabulated transmon-grade gate
    errors; experiment storage uses coherence-limited SWAPs (zero intrinsic
    error, the cost is the idle decay over the swap window).
    """
    return [
        DeviceSpec(
            id="fixed_frequency_qubit",
            role=Role.COMPUTE,
            t1=300.0,
            t2=550.0,
            gate_set=dict(_ARB_1Q2Q),
            readout_time=1.0,
            connectivity_limit=4,
            control_overhead=("charge", "readout"),
            footprint=(2.0, 2.0),
            notes="e.g. transmon",
        ),
        DeviceSpec(
            id="flux_tunable_qubit",
            role=Role.COMPUTE,
            t1=800.0,
            t2=200.0,
            gate_set=dict(_ARB_1Q2Q),
            readout_time=1.0,
            connectivity_limit=4,
            control_overhead=("charge", "flux", "readout"),
            footprint=(2.0, 2.0),
            notes="e.g. fluxonium",
        ),
        DeviceSpec(
            id="quantum_memory_3d",
            role=Role.STORAGE,
            t1=25 * MS,
            t2=30 * MS,
            gate_set={"SWAP": GateInfo(1.0, 1e-2)},
            capacity=1,
            connectivity_limit=1,
            footprint=(50.0, 0.5, 1.0),
            notes="requires 2D/3D integration",
        ),
        DeviceSpec(
            id="multimode_resonator_3d",
            role=Role.STORAGE,
            t1=2 * MS,
            t2=2.5 * MS,
            gate_set={"SWAP": GateInfo(400 * NS, 1e-2)},
            capacity=10,
            connectivity_limit=1,
            footprint=(100.0, 100.0, 10.0),
            notes="requires 2D/3D integration",
        ),
        DeviceSpec(
            id="multimode_resonator_onchip",
            role=Role.STORAGE,
            t1=1 * MS,
            t2=1 * MS,
            gate_set={"SWAP": GateInfo(100 * NS, 1e-2)},
            capacity=10,
            connectivity_limit=1,
            footprint=(5.0, 5.0),
            notes="no demonstration yet",
        ),
        # Default experiment compute: T1 = T2 = 500 us, transmon-grade gates.
        DeviceSpec(
            id="compute_default",
            role=Role.COMPUTE,
            t1=500.0,
            t2=500.0,
            gate_set=dict(_ARB_1Q2Q),
            readout_time=1.0,
            connectivity_limit=4,
            control_overhead=("charge", "readout"),
            footprint=(2.0, 2.0),
            notes="experiment default compute",
        ),
        # Error-corrected-memory variant: 100 us coherence, 1% 2Q gates.
        DeviceSpec(
            id="compute_qec",
            role=Role.COMPUTE,
            t1=100.0,
            t2=100.0,
            gate_set={
                "X": GateInfo(40 * NS, 1e-2),
                "H": GateInfo(40 * NS, 1e-2),
                "S": GateInfo(40 * NS, 1e-2),
                "CX": GateInfo(100 * NS, 1e-2),
                "SWAP": GateInfo(100 * NS, 1e-2),
            },
            readout_time=1.0,
            connectivity_limit=4,
            control_overhead=("charge", "readout"),
            footprint=(2.0, 2.0),
            notes="surface-memory experiment compute",
        ),
    ]


def catalog_by_id(extra: list[DeviceSpec] | None = None) -> dict[str, DeviceSpec]:
    specs = {s.id: s for s in builtin_catalog()}
    for s in extra or ():
        specs[s.id] = s
    return specs


def experiment_storage(t_s: float, swap_time: float = 100 * NS,
                       swap_error: float = 0.0, capacity: int = 10) -> DeviceSpec:
    """Storage device for experiments: T1 = T2 = t_s, coherence-limited SWAP."""
    return DeviceSpec(
        id=f"storage_ts_{t_s:g}",
        role=Role.STORAGE,
        t1=t_s,
        t2=t_s,
        gate_set={"SWAP": GateInfo(swap_time, swap_error)},
        capacity=capacity,
        connectivity_limit=1,
        footprint=(5.0, 5.0),
    )


def experiment_compute(t_c: float, cx_error: float = 1e-3,
                       device_id: str | None = None,
                       readout: bool = True) -> DeviceSpec:
    """Compute device for experiments: T1 = T2 = t_c, 40ns/100ns gates."""
    return DeviceSpec(
        id=device_id or f"compute_tc_{t_c:g}",
        role=Role.COMPUTE,
        t1=t_c,
        t2=t_c,
        gate_set={
            "X": GateInfo(40 * NS, cx_error),
            "H": GateInfo(40 * NS, cx_error),
            "S": GateInfo(40 * NS, cx_error),
            "CX": GateInfo(100 * NS, cx_error),
            "SWAP": GateInfo(100 * NS, cx_error),
        },
        readout_time=1.0,
        connectivity_limit=4,
        control_overhead=("charge", "readout"),
        footprint=(2.0, 2.0),
    )


# ---------------------------------------------------------------------------
# Catalog serialization (one INI section per device, units spelled in keys)
# ---------------------------------------------------------------------------

def catalog_to_text(specs: list[DeviceSpec]) -> str:
    cp = configparser.ConfigParser()
    for s in specs:
        sec = s.id
        cp.add_section(sec)
        cp.set(sec, "role", s.role.value)
        cp.set(sec, "t1_us", repr(s.t1))
        cp.set(sec, "t2_us", repr(s.t2))
        if s.readout_time is not None:
            cp.set(sec, "readout_time_us", repr(s.readout_time))
        cp.set(sec, "capacity", str(s.capacity))
        cp.set(sec, "connectivity_limit", str(s.connectivity_limit))
        for gate, info in s.gate_set.items():
            cp.set(sec, f"gate_{gate}_time_ns", repr(info.duration / NS))
            cp.set(sec, f"gate_{gate}_error", repr(info.error))
        if s.control_overhead:
            cp.set(sec, "control_overhead", ",".join(s.control_overhead))
        cp.set(sec, "footprint_mm", ",".join(repr(v) for v in s.footprint))
        if s.notes:
            cp.set(sec, "notes", s.notes)
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


def catalog_from_text(text: str) -> list[DeviceSpec]:
    cp = configparser.ConfigParser()
    cp.read_string(text)
    specs = []
    for sec in cp.sections():
        kv = dict(cp.items(sec))
        gates = {}
        for key in kv:
            if key.startswith("gate_") and key.endswith("_time_ns"):
                gate = key[len("gate_"):-len("_time_ns")].upper()
                gates[gate] = GateInfo(
                    float(kv[key]) * NS, float(kv[f"gate_{gate.lower()}_error"])
                )
        control = tuple(
            t for t in kv.get("control_overhead", "").split(",") if t
        )
        footprint = tuple(float(v) for v in kv["footprint_mm"].split(","))
        specs.append(
            DeviceSpec(
                id=sec,
                role=Role(kv["role"]),
                t1=float(kv["t1_us"]),
                t2=float(kv["t2_us"]),
                gate_set=gates,
                readout_time=(
                    float(kv["readout_time_us"]) if "readout_time_us" in kv else None
                ),
                capacity=int(kv.get("capacity", 1)),
                connectivity_limit=int(kv.get("connectivity_limit", 1)),
                control_overhead=control,
                footprint=footprint,
                notes=kv.get("notes", ""),
            )
        )
    return specs
