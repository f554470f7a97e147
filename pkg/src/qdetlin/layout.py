"""Named qubit registers packed into a single basis index.

Registers get bit offsets in declaration order, least-significant first:
S_0..S_{N-1}, A_0..A_{N-2}, B, R, C, b, Bt for the determinant family and
R1, C1, R2, C2, Bt for multiplication.
"""

from dataclasses import dataclass, field

from .errors import ResourceCapError, SizeError

ALGORITHMS = ("det", "inv", "solve", "matmul")


@dataclass(frozen=True)
class Register:
    name: str
    role: str
    width: int
    offset: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))

    @property
    def mask(self) -> int:
        return ((1 << self.width) - 1) << self.offset

    def extract(self, index: int) -> int:
        return (index >> self.offset) & ((1 << self.width) - 1)


@dataclass(frozen=True)
class RegisterLayout:
    algorithm: str
    registers: tuple[Register, ...]
    sizes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        seen = 0
        for r in self.registers:
            if r.mask & seen:
                raise ValueError(f"register {r.name} overlaps an earlier register")
            seen |= r.mask
        if seen != (1 << self.total_qubits) - 1:
            raise ValueError("registers do not tile the basis index")

    @property
    def total_qubits(self) -> int:
        return sum(r.width for r in self.registers)

    def __getitem__(self, name: str) -> Register:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def __contains__(self, name) -> bool:
        return any(r.name == name for r in self.registers)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.registers)

    def by_role(self, role: str) -> list[Register]:
        return [r for r in self.registers if r.role == role]

    def qubits_of(self, names) -> list[int]:
        return [q for name in names for q in self[name].qubits]

    def index_of(self, assignment: dict) -> int:
        idx = 0
        for name, value in assignment.items():
            reg = self[name]
            if not 0 <= value < (1 << reg.width):
                raise IndexError(f"value {value} out of range for {reg.width}-qubit register {name}")
            idx |= int(value) << reg.offset
        return idx

    def decode(self, index: int) -> dict:
        return {r.name: r.extract(index) for r in self.registers}


def log2_exact(n: int, what: str = "N") -> int:
    if n < 2 or n & (n - 1):
        raise SizeError(f"{what} must be a power of two >= 2, got {n}")
    return n.bit_length() - 1


def ancilla_width(N: int, k: int) -> int:
    """Qubits needed to record 'no swap' or one of N-1-k swap partners: ceil(log2(N-k))."""
    return (N - k - 1).bit_length()


def tilde_N(N: int) -> int:
    return sum(ancilla_width(N, k) for k in range(N - 1))


def build_layout(algorithm: str, N: int | None = None, *, n: int | None = None,
                 k: int | None = None, m: int | None = None,
                 max_qubits: int | None = None) -> RegisterLayout:
    if algorithm not in ALGORITHMS:
        raise SizeError(f"unknown algorithm {algorithm!r}")
    specs = []
    if algorithm == "matmul":
        for label, v in (("n", n), ("k", k), ("m", m)):
            if v is None or int(v) < 1:
                raise SizeError(f"matmul needs {label} >= 1, got {v}")
        specs = [("R1", "row", n), ("C1", "col", k), ("R2", "row", k),
                 ("C2", "col", m), ("Bt", "flag", 1)]
        sizes = {"n": n, "k": k, "m": m}
    else:
        if N is None:
            raise SizeError(f"{algorithm} needs N")
        nq = log2_exact(int(N))
        specs += [(f"S{j}", "row_state", nq) for j in range(N)]
        specs += [(f"A{kk}", "swap_record", ancilla_width(N, kk)) for kk in range(N - 1)]
        specs.append(("B", "flag", 1))
        if algorithm in ("inv", "solve"):
            specs += [("R", "row_index", nq), ("C", "col_index", nq)]
        if algorithm == "solve":
            specs += [("b", "rhs", nq), ("Bt", "flag", 1)]
        sizes = {"N": N, "n": nq, "tilde_N": tilde_N(N)}

    regs, offset = [], 0
    for name, role, width in specs:
        regs.append(Register(name, role, int(width), offset))
        offset += int(width)
    if max_qubits is not None and offset > max_qubits:
        raise ResourceCapError(f"{algorithm} layout needs {offset} qubits, cap is {max_qubits}")
    return RegisterLayout(algorithm, tuple(regs), sizes)
