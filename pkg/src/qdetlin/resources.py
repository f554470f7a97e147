"""Qubit and depth accounting without simulation.

Cost unit: one layer of disjoint one- and two-qubit gates after
decomposing multi-controlled gates into Toffoli chains, so a gate with a
w-qubit control pattern costs w units. Per primitive:

    V (S_j-controlled write into A_k)       n
    U (n controlled swaps)                  n**2
    W_SRC (all (N-1)**2 taggers)            (N-1)**2 * n
    H_A together with X_S                   1
    W2 (flag B on S = 0, A = 0)             N * n
    W2 un-flag on C = 0 (inverse, solve)    N * n + n
    X_B with the C -> b CNOTs               1
    H on C                                  1
    W3 (2n + 1 controls / 2k controls)      2n + 1 / 2k

``depth_parallel`` counts the (V, U) pairs of one sorting stage as a single
slot; ``depth_serial`` runs every pair one after another.
"""

import csv
import io
import math
from dataclasses import asdict, dataclass, field

from .errors import SizeError
from .layout import build_layout, log2_exact, tilde_N


@dataclass
class ResourceReport:
    algorithm: str
    sizes: dict
    qubits: int
    depth_parallel: int
    depth_serial: int
    gate_tallies: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _sort_depths(N, n):
    pair = n + n * n
    parallel = (N - 1) * pair
    serial = sum(N - 1 - k for k in range(N - 1)) * pair
    return parallel, serial


def _tallies(algorithm, N=None, n=None, k=None, m=None, with_plan=True):
    if not with_plan:
        return {}
    from .det import build_det_plan
    from .inverse import build_inverse_plan
    from .mulsolve import build_matmul_plan, build_solve_plan

    if algorithm == "det":
        plan = build_det_plan(N)
    elif algorithm == "inv":
        plan = build_inverse_plan(N)
    elif algorithm == "solve":
        plan = build_solve_plan(N)
    else:
        plan = build_matmul_plan(build_layout("matmul", n=n, k=k, m=m))
    tallies = {f"op:{t}": plan.count(t) for t in dict.fromkeys(plan.tags)}
    tallies.update({f"gate:{kind}": c for kind, c in plan.gate_tallies().items()})
    return tallies


def estimate(algorithm: str, N: int | None = None, *, n: int | None = None,
             k: int | None = None, m: int | None = None, tallies: bool = True) -> ResourceReport:
    """Qubits and layered depth for one circuit size.

    ``tallies`` builds the actual gate plan to count operators; switch it off
    for very large N where only the closed-form counts are wanted.
    """
    if algorithm == "matmul":
        layout = build_layout("matmul", n=n, k=k, m=m)
        depth = 1 + 1 + 2 * k
        return ResourceReport("matmul", {"n": n, "k": k, "m": m}, layout.total_qubits,
                              depth, depth, _tallies("matmul", n=n, k=k, m=m, with_plan=tallies))
    if algorithm not in ("det", "inv", "solve"):
        raise SizeError(f"unknown algorithm {algorithm!r}")
    if N is None:
        raise SizeError(f"{algorithm} needs N")
    nq = log2_exact(int(N))
    layout = build_layout(algorithm, N)
    par, ser = _sort_depths(N, nq)
    tail = 1 + N * nq
    if algorithm in ("inv", "solve"):
        tail += (N - 1) ** 2 * nq + N * nq + nq
    if algorithm == "solve":
        tail += 1 + 1 + 2 * nq + 1
    return ResourceReport(algorithm, {"N": N, "n": nq, "tilde_N": tilde_N(N)},
                          layout.total_qubits, par + tail, ser + tail,
                          _tallies(algorithm, N, with_plan=tallies))


def claimed_parallel(algorithm: str, N: int) -> float:
    """Asymptotic depth under parallel (V, U) pairs: N log^2 N (det) or N^2 log N."""
    lg = math.log2(N)
    return N * lg * lg if algorithm == "det" else N * N * lg


def claimed_serial(N: int) -> float:
    lg = math.log2(N)
    return N * N * lg * lg


def scaling_table(algorithm: str, N_list, tallies: bool = False) -> list:
    Ns = [int(x) for x in N_list]
    if Ns != sorted(Ns) or len(set(Ns)) != len(Ns):
        raise SizeError("N_list must be strictly ascending")
    rows = []
    for N in Ns:
        rep = estimate(algorithm, N, tallies=tallies)
        rows.append({
            "N": N,
            "qubits": rep.qubits,
            "depth_parallel": rep.depth_parallel,
            "depth_serial": rep.depth_serial,
            "ratio_parallel": rep.depth_parallel / claimed_parallel(algorithm, N),
            "ratio_serial": rep.depth_serial / claimed_serial(N),
        })
    return rows


def table_to_csv(rows) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def ratio_spread(values) -> float:
    """Largest relative deviation from the geometric midpoint of min and max."""
    lo, hi = min(values), max(values)
    mid = math.sqrt(lo * hi)
    return max(hi / mid - 1.0, 1.0 - lo / mid)
