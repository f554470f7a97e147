"""Ordered gate plans and their execution on a :class:`QuantumState`."""

from dataclasses import dataclass, field

from .layout import RegisterLayout
from .state import GateLayer, QuantumState, apply_layers, hadamard_project_zero

FUSABLE = "H_A"


@dataclass
class CircuitPlan:
    """Gate groups in execution order, each tagged with the operator it realises.

    Tags used by the builders: ``W_SRC``, ``V``, ``U``, ``H_A``, ``X_S``,
    ``W2``, ``X_B``, ``CNOT``, ``H_C``, ``W3``.
    """

    layout: RegisterLayout
    groups: list = field(default_factory=list)
    sizes: dict = field(default_factory=dict)

    def add(self, tag: str, layers) -> None:
        self.groups.append((tag, list(layers)))

    def extend(self, other: "CircuitPlan") -> None:
        self.groups.extend(other.groups)

    @property
    def tags(self) -> list:
        return [t for t, _ in self.groups]

    def count(self, tag: str) -> int:
        return sum(1 for t, _ in self.groups if t == tag)

    def layers(self, tag: str | None = None) -> list:
        return [g for t, gs in self.groups if tag is None or t == tag for g in gs]

    @property
    def N(self):
        return self.sizes.get("N")

    @property
    def n(self):
        return self.sizes.get("n")

    @property
    def tilde_N(self):
        return self.sizes.get("tilde_N")

    def gate_tallies(self) -> dict:
        out = {}
        for layer in self.layers():
            out[layer.kind] = out.get(layer.kind, 0) + 1
        return dict(sorted(out.items()))


def ancilla_names(layout: RegisterLayout) -> list:
    return [r.name for r in layout.by_role("swap_record")]


def execute(state: QuantumState, plan: CircuitPlan, fuse_hadamard: bool = True,
            use_numba: bool | None = None) -> QuantumState:
    """Run ``plan`` on ``state`` in place.

    With ``fuse_hadamard`` the ``H_A`` group becomes a Hadamard-and-project
    onto A = 0, which leaves the amplitudes on A = 0 exact and drops the rest.
    Every later gate in these circuits only flags the A = 0 branch, so flag
    probabilities are unchanged.
    """
    for tag, layers in plan.groups:
        if tag == FUSABLE and fuse_hadamard:
            hadamard_project_zero(state, ancilla_names(plan.layout))
        else:
            apply_layers(state, layers, use_numba)
    return state


def single(kind: str, targets, controls=(), partners=(), tag: str = "") -> GateLayer:
    return GateLayer(kind, tuple(targets), tuple(controls), tuple(partners), tag)
