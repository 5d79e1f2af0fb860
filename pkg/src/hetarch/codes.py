"""Stabilizer code library: rotated surface codes, the 7-qubit CSS code,
a 17-qubit distance-5 color code, and the 15-qubit punctured Reed-Muller
code.

Pauli strings are stored as paired bit-vectors (X part, Z part) packed into
Python ints, plus a sign bit. Commutation is the symplectic inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """n-qubit Pauli operator: qubit q has X iff bit q of x, Z iff bit q of z."""

    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("support outside qubit range")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliString":
        """Parse 'IXZY...' with character i acting on qubit i."""
        x = z = 0
        for q, ch in enumerate(label):
            if ch in "XY":
                x |= 1 << q
            if ch in "ZY":
                z |= 1 << q
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli character {ch!r}")
        return cls(len(label), x, z, sign)

    @classmethod
    def from_support(cls, n: int, kind: str, support) -> "PauliString":
        mask = 0
        for q in support:
            mask |= 1 << q
        if kind == "X":
            return cls(n, mask, 0)
        if kind == "Z":
            return cls(n, 0, mask)
        if kind == "Y":
            return cls(n, mask, mask)
        raise ValueError(f"kind must be X, Y or Z, got {kind!r}")

    def to_label(self) -> str:
        out = []
        for q in range(self.n):
            xs = self.x >> q & 1
            zs = self.z >> q & 1
            out.append("IXZY"[xs + 2 * zs] if xs + 2 * zs != 3 else "Y")
        return "".join(out)

    def commutes(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("length mismatch")
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def mul(self, other: "PauliString") -> "PauliString":
        """Product up to phase (sign tracking limited to +-1 composition)."""
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z,
                           self.sign * other.sign)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.n) if (self.x | self.z) >> q & 1)


@dataclass(frozen=True)
class StabilizerCode:
    name: str
    n: int
    generators: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    distance: int
    planar: bool = True

    @property
    def k(self) -> int:
        return self.n - len(self.generators)

    def x_generators(self) -> list[PauliString]:
        return [g for g in self.generators if g.z == 0]

    def z_generators(self) -> list[PauliString]:
        return [g for g in self.generators if g.x == 0]


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def _css(name: str, n: int, x_supports, z_supports, lx, lz, distance: int,
         planar: bool) -> StabilizerCode:
    gens = [PauliString.from_support(n, "X", s) for s in x_supports]
    gens += [PauliString.from_support(n, "Z", s) for s in z_supports]
    code = StabilizerCode(
        name=name,
        n=n,
        generators=tuple(gens),
        logical_x=PauliString.from_support(n, "X", lx),
        logical_z=PauliString.from_support(n, "Z", lz),
        distance=distance,
        planar=planar,
    )
    findings = validate(code)
    if findings:
        raise AssertionError(f"{name}: invalid construction: {findings}")
    return code


def steane() -> StabilizerCode:
    supports = [(0, 2, 4, 6), (1, 2, 5, 6), (3, 4, 5, 6)]
    return _css("steane", 7, supports, supports, (0, 1, 2), (0, 1, 2), 3, True)


def reed_muller15() -> StabilizerCode:
    """Punctured quantum Reed-Muller [[15,1,3]]; qubit i has address i+1."""
    xs = []
    for b in range(4):
        xs.append(tuple(i for i in range(15) if (i + 1) >> b & 1))
    zs = list(xs)
    for b in range(4):
        for c in range(b + 1, 4):
            zs.append(tuple(i for i in range(15)
                            if ((i + 1) >> b & 1) and ((i + 1) >> c & 1)))
    return _css("reed_muller15", 15, xs, zs, tuple(range(15)), (0, 1, 2), 3,
                planar=False)


# Triangular color code on 17 qubits: an 18-vertex spherical 2-colex (one
# octagon, three hexagons, seven squares; faces 3-colored) with one corner
# vertex removed. Self-dual CSS, distance 5 (verified exhaustively by the
# test suite).
_COLOR17_FACES = (
    (0, 1, 2, 3, 4, 5, 6, 7),
    (13, 14, 15, 16),
    (2, 3, 15, 16),
    (4, 5, 9, 10),
    (6, 7, 11, 12),
    (1, 2, 14, 16),
    (5, 6, 10, 11),
    (0, 7, 8, 12),
)
_COLOR17_LOGICAL = (0, 1, 2, 3, 8)


def color17() -> StabilizerCode:
    return _css("color17", 17, _COLOR17_FACES, _COLOR17_FACES,
                _COLOR17_LOGICAL, _COLOR17_LOGICAL, 5, planar=True)


def surface(d: int) -> StabilizerCode:
    """Rotated surface code with d*d data qubits, distance d."""
    if d < 2:
        raise ValueError("surface code needs d >= 2")

    def data(r, c):
        return r * d + c

    xs, zs = [], []
    for ar in range(d + 1):
        for ac in range(d + 1):
            corners = [
                (r, c)
                for r, c in ((ar - 1, ac - 1), (ar - 1, ac), (ar, ac - 1), (ar, ac))
                if 0 <= r < d and 0 <= c < d
            ]
            is_x = (ar + ac) % 2 == 1
            bulk = 1 <= ar <= d - 1 and 1 <= ac <= d - 1
            if bulk:
                include = True
            elif ar == 0 or ar == d:
                include = is_x and 1 <= ac <= d - 1
            else:  # ac == 0 or ac == d
                include = (not is_x) and 1 <= ar <= d - 1
            if not include:
                continue
            support = tuple(sorted(data(r, c) for r, c in corners))
            (xs if is_x else zs).append(support)
    lz = tuple(data(0, c) for c in range(d))   # top row
    lx = tuple(data(r, 0) for r in range(d))   # left column
    return _css(f"surface_{d}", d * d, xs, zs, lx, lz, d, planar=True)


_BUILDERS = {
    "steane": steane,
    "color17": color17,
    "reed_muller15": reed_muller15,
}


def code(name: str) -> StabilizerCode:
    """Look up 'steane', 'color17', 'reed_muller15', or 'surface(d)'."""
    key = name.strip().lower()
    if key in _BUILDERS:
        return _BUILDERS[key]()
    if key.startswith("surface(") and key.endswith(")"):
        return surface(int(key[len("surface("):-1]))
    if key.startswith("surface_"):
        return surface(int(key[len("surface_"):]))
    if key in ("sc3", "sc4"):
        return surface(int(key[2]))
    if key in ("st",):
        return steane()
    if key in ("rm", "rm15"):
        return reed_muller15()
    if key in ("17qcc",):
        return color17()
    raise KeyError(f"unknown code {name!r}")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(c: StabilizerCode) -> list[str]:
    """Check commutation relations; returns human-readable findings."""
    findings = []
    gens = c.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            if not gens[i].commutes(gens[j]):
                findings.append(f"generators {i} and {j} anticommute")
    for i, g in enumerate(gens):
        if not c.logical_x.commutes(g):
            findings.append(f"logical X anticommutes with generator {i}")
        if not c.logical_z.commutes(g):
            findings.append(f"logical Z anticommutes with generator {i}")
    if c.logical_x.commutes(c.logical_z):
        findings.append("logical X and logical Z commute")
    if len(gens) != c.n - 1:
        findings.append(f"expected {c.n - 1} generators, got {len(gens)}")
    if _gf2_rank([(g.x, g.z) for g in gens], c.n) != len(gens):
        findings.append("generators are not independent")
    return findings


def _gf2_rank(rows: list[tuple[int, int]], n: int) -> int:
    """Rank of symplectic rows (x|z) over GF(2)."""
    vecs = [x | (z << n) for x, z in rows]
    rank = 0
    for col in range(2 * n):
        piv = None
        for i in range(rank, len(vecs)):
            if vecs[i] >> col & 1:
                piv = i
                break
        if piv is None:
            continue
        vecs[rank], vecs[piv] = vecs[piv], vecs[rank]
        for i in range(len(vecs)):
            if i != rank and vecs[i] >> col & 1:
                vecs[i] ^= vecs[rank]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# Text serialization (rows of IXZY, one generator per line)
# ---------------------------------------------------------------------------

MAX_USER_QUBITS = 30


def code_to_text(c: StabilizerCode) -> str:
    lines = [f"name {c.name}", f"distance {c.distance}",
             f"planar {int(c.planar)}"]
    for g in c.generators:
        lines.append(g.to_label())
    lines.append("LX " + c.logical_x.to_label())
    lines.append("LZ " + c.logical_z.to_label())
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> StabilizerCode:
    name = "user"
    distance = 0
    planar = True
    gens = []
    lx = lz = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name "):
            name = line[5:].strip()
        elif line.startswith("distance "):
            distance = int(line.split()[1])
        elif line.startswith("planar "):
            planar = bool(int(line.split()[1]))
        elif line.startswith("LX "):
            lx = PauliString.from_label(line[3:].strip())
        elif line.startswith("LZ "):
            lz = PauliString.from_label(line[3:].strip())
        else:
            gens.append(PauliString.from_label(line))
    if not gens or lx is None or lz is None:
        raise ValueError("stabilizer table needs generators, LX and LZ rows")
    n = gens[0].n
    if n > MAX_USER_QUBITS:
        raise ValueError(f"user codes limited to {MAX_USER_QUBITS} qubits")
    c = StabilizerCode(name=name, n=n, generators=tuple(gens),
                       logical_x=lx, logical_z=lz,
                       distance=distance, planar=planar)
    findings = validate(c)
    if findings:
        raise ValueError("invalid stabilizer table: " + "; ".join(findings))
    return c
