"""Command-line front end.

    qdetlin det     --input m.json [--backend auto|dense|sparse] [--mode exact|shots --seed S]
    qdetlin inv     --input m.json [--q 0.7071]
    qdetlin solve   --input system.json
    qdetlin matmul  --input left.json right.json
    qdetlin estimate --algorithm det --N 4 | --algorithm matmul --n 1 --k 1 --m 1
    qdetlin estimate --algorithm det --scaling 4 8 16 32 [--format csv]

Matrices are JSON ``{"matrix": [[[re, im], ...], ...]}``; ``solve`` also
reads ``"rhs": [[re, im], ...]``. Results are written as JSON with
``"schema": "qdetlin/1"``. Exit codes: 0 ok, 2 malformed input, 3
precondition or singularity failure, 4 resource cap exceeded.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import ledger as led
from .det import run_determinant
from .errors import (EncodingError, MalformedInputError, QdlError, ShapeError,
                     SingularityError)
from .inverse import DEFAULT_Q, can_verify, run_inverse
from .layout import build_layout
from .mulsolve import run_matmul, run_solve
from .oracle import leibniz_det, singularity_threshold
from .resources import estimate, scaling_table, table_to_csv
from .state import choose_backend

SCHEMA = "qdetlin/1"
DEFAULT_SHOTS = 10000


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise MalformedInputError(message)


@dataclass
class JobSpec:
    subcommand: str
    inputs: list
    backend: str = "auto"
    mode: str = "exact"
    shots: int = DEFAULT_SHOTS
    seed: int | None = None
    q: float = DEFAULT_Q
    output: str | None = None
    max_qubits: int | None = None
    readout: str = "auto"
    algorithm: str | None = None
    N: int | None = None
    n: int | None = None
    k: int | None = None
    m: int | None = None
    scaling: list | None = None
    fmt: str = "json"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdetlin", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def run_opts(p, nargs=None):
        p.add_argument("--input", required=True, nargs=nargs, help="matrix JSON file(s)")
        p.add_argument("--backend", choices=("auto", "dense", "sparse"), default="auto")
        p.add_argument("--mode", choices=("exact", "shots"), default="exact")
        p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
        p.add_argument("--seed", type=int)
        p.add_argument("--output", help="write the result here instead of stdout")
        p.add_argument("--max-qubits", type=int, dest="max_qubits",
                       help="dense backend qubit cap (overrides QDL_MAX_QUBITS)")
        return p

    run_opts(sub.add_parser("det", help="determinant"))
    for name in ("inv", "solve"):
        p = run_opts(sub.add_parser(name, help="inverse" if name == "inv" else "linear system"))
        p.add_argument("--q", type=float, default=DEFAULT_Q, help="border amplitude in (0, 1)")
        p.add_argument("--readout", choices=("auto", "verify", "faithful"), default="auto",
                       help="verify: exact recovery using a classical determinant; "
                            "faithful: normalised state and probability only")
    run_opts(sub.add_parser("matmul", help="matrix product"), nargs=2)

    est = sub.add_parser("estimate", help="qubit and depth accounting")
    est.add_argument("--algorithm", choices=("det", "inv", "solve", "matmul"), required=True)
    est.add_argument("--N", type=int, dest="N")
    est.add_argument("--n", type=int)
    est.add_argument("--k", type=int)
    est.add_argument("--m", type=int)
    est.add_argument("--scaling", type=int, nargs="+", help="emit a table over these N")
    est.add_argument("--format", choices=("json", "csv"), default="json", dest="fmt")
    est.add_argument("--output")
    return parser


def parse_job(argv) -> JobSpec:
    ns = build_parser().parse_args(argv)
    d = vars(ns)
    inputs = d.pop("input", None)
    job = JobSpec(inputs=[inputs] if isinstance(inputs, str) else list(inputs or []), **d)
    if job.mode == "shots":
        if job.shots < 1:
            raise MalformedInputError("--shots must be >= 1")
        if job.seed is None:
            raise MalformedInputError("shots mode needs --seed for reproducible output")
    return job


def _complex(v, where):
    if isinstance(v, bool):
        raise MalformedInputError(f"{where}: expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise MalformedInputError(f"{where}: expected a number or [re, im], got {v!r}")


def _matrix(raw, where="matrix"):
    if not isinstance(raw, list) or not raw or not all(isinstance(r, list) and r for r in raw):
        raise MalformedInputError(f"{where} must be a non-empty list of non-empty rows")
    widths = {len(r) for r in raw}
    if len(widths) != 1:
        raise EncodingError(f"{where} rows have unequal lengths {sorted(widths)}")
    out = np.array([[_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)]
                    for i, row in enumerate(raw)])
    if not np.all(np.isfinite(out)):
        raise MalformedInputError(f"{where} has non-finite entries")
    return out


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise MalformedInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "matrix" not in doc:
        raise MalformedInputError(f"{path} must be an object with a 'matrix' field")
    return doc


def _c(z):
    z = complex(z)
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def _cvec(v):
    return [_c(z) for z in np.asarray(v).ravel()]


def _ctab(t):
    return [[_c(z) for z in row] for row in np.asarray(t)]


def _base(job, algorithm, layout, backend):
    return {"schema": SCHEMA, "algorithm": algorithm, "n_qubits": layout.total_qubits,
            "backend": backend, "mode": job.mode, "seed": job.seed}


def _shots(doc, res):
    if res.mode == "shots":
        doc["shots"] = res.shots
        doc["b1_count"] = res.b1_count


def _backend(job, layout):
    return choose_backend(layout, job.backend, job.max_qubits)


def _readout(job, N):
    if job.readout == "auto":
        return "verify" if N <= 4 else "faithful"
    if job.readout == "verify" and not can_verify(N):
        raise MalformedInputError(f"verification readout needs N - 1 <= 10, got N = {N}")
    return job.readout


def _nonsingular_det(scaled):
    det = leibniz_det(scaled)
    if abs(det) < singularity_threshold(scaled):
        raise SingularityError(f"matrix is singular (|det| = {abs(det):.3g})", abs(det))
    return det


def run_det(job):
    m = _matrix(load_document(job.inputs[0])["matrix"])
    scaled, lg = led.normalize_for_det(m)
    if scaled.shape[0] != scaled.shape[1]:
        raise ShapeError(f"determinant needs a square matrix, got {scaled.shape}")
    layout = build_layout("det", scaled.shape[0])
    backend = _backend(job, layout)
    res = run_determinant(scaled, backend, job.mode, job.shots, job.seed, job.max_qubits)
    doc = _base(job, "det", layout, backend)
    doc.update({
        "tilde_N": res.tilde_N,
        "amplitude": _c(res.amplitude),
        "success_probability": res.success_probability,
        "det_scaled": _c(res.det_scaled),
        "det_original": _c(led.recover_det(res.amplitude, lg, res.tilde_N)),
        "row_norms": list(lg.row_norms),
    })
    _shots(doc, res)
    return doc


def run_inv(job):
    m = _matrix(load_document(job.inputs[0])["matrix"])
    scaled, lg = led.normalize_for_inverse(m, job.q)
    N = scaled.shape[0] + 1
    layout = build_layout("inv", N)
    backend = _backend(job, layout)
    readout = _readout(job, N)
    res = run_inverse(scaled, job.q, backend, job.mode, job.shots, job.seed,
                      max_dense_qubits=job.max_qubits)
    doc = _base(job, "inv", layout, backend)
    doc.update({
        "tilde_N": res.tilde_N, "q": res.q, "readout": readout,
        "amplitudes": _ctab(res.amplitudes),
        "success_probability": res.success_probability,
        "normalized_state": _ctab(res.normalized_table()),
        "det_times_G": res.det_times_G,
        "row_norms": list(lg.row_norms),
    })
    if readout == "verify":
        det = _nonsingular_det(scaled)
        inv_scaled = res.inverse_given_det(det)
        doc.update({
            "det_scaled": _c(det),
            "G": float(np.linalg.norm(inv_scaled)),
            "inverse": _ctab(led.recover_inverse(res.amplitudes, lg, det)),
        })
    _shots(doc, res)
    return doc


def run_solve_job(job):
    raw = load_document(job.inputs[0])
    m = _matrix(raw["matrix"])
    if "rhs" not in raw or not isinstance(raw["rhs"], list):
        raise MalformedInputError("solve input needs an 'rhs' list")
    b = np.array([_complex(v, f"rhs[{i}]") for i, v in enumerate(raw["rhs"])])
    scaled, lg = led.normalize_for_inverse(m, job.q)
    b_enc, b_norm = led.encode_rhs(b, lg)
    N = scaled.shape[0] + 1
    layout = build_layout("solve", N)
    backend = _backend(job, layout)
    readout = _readout(job, N)
    res = run_solve(scaled, b_enc, job.q, backend, job.mode, job.shots, job.seed,
                    max_dense_qubits=job.max_qubits)
    if res.success_probability <= 0:
        raise SingularityError("zero flag probability: the matrix is singular", 0.0)
    doc = _base(job, "solve", layout, backend)
    doc.update({
        "tilde_N": res.tilde_N, "q": res.q, "readout": readout,
        "success_probability": res.success_probability,
        "G": res.G,
        "x_normalized": _cvec(res.normalized_solution()),
        "row_norms": list(lg.row_norms),
    })
    if readout == "verify":
        det = _nonsingular_det(scaled)
        x = led.recover_solution(res.normalized_solution(), res.G, lg, b_norm, det)
        doc.update({"det_scaled": _c(det), "x": _cvec(x),
                    "residual": float(np.max(np.abs(m @ x - b)))})
    _shots(doc, res)
    return doc


def run_matmul_job(job):
    left = _matrix(load_document(job.inputs[0])["matrix"], "left matrix")
    right = _matrix(load_document(job.inputs[1])["matrix"], "right matrix")
    l_scaled, l_led = led.normalize_for_matmul(left)
    r_scaled, r_led = led.normalize_for_matmul(right)
    res = run_matmul(l_scaled, r_scaled, job.backend, job.mode, job.shots, job.seed,
                     max_dense_qubits=job.max_qubits)
    layout = res.state.layout
    doc = _base(job, "matmul", layout, res.backend)
    doc.update({
        "sizes": {"n": res.n, "k": res.k, "m": res.m},
        "amplitudes": _ctab(res.amplitudes),
        "success_probability": res.success_probability,
        "G": res.G,
        "product": _ctab(led.recover_product(res.product, l_led, r_led)),
        "frobenius_norms": [l_led.row_norms[0], r_led.row_norms[0]],
    })
    _shots(doc, res)
    return doc


def run_estimate(job):
    if job.scaling:
        if job.algorithm == "matmul":
            raise MalformedInputError("--scaling applies to det, inv and solve")
        rows = scaling_table(job.algorithm, job.scaling)
        if job.fmt == "csv":
            return table_to_csv(rows)
        return {"schema": SCHEMA, "algorithm": job.algorithm, "scaling": rows}
    if job.algorithm == "matmul":
        rep = estimate("matmul", n=job.n, k=job.k, m=job.m)
    else:
        rep = estimate(job.algorithm, job.N)
    doc = {"schema": SCHEMA, **rep.as_dict()}
    if job.fmt == "csv":
        return table_to_csv([{k: v for k, v in doc.items() if not isinstance(v, dict)}])
    return doc


RUNNERS = {"det": run_det, "inv": run_inv, "solve": run_solve_job,
           "matmul": run_matmul_job, "estimate": run_estimate}


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    return obj


def emit_report(result, fmt: str = "json") -> str:
    """Serialise a result deterministically (sorted keys, shortest round-trip floats)."""
    if isinstance(result, str):
        return result
    return json.dumps(_finite(result), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _write(text, path):
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise MalformedInputError(f"cannot write {path}: {exc.strerror}") from None
    else:
        sys.stdout.write(text)


def parse_and_run(argv=None) -> int:
    output = None
    try:
        job = parse_job(argv)
        output = job.output
        text = emit_report(RUNNERS[job.subcommand](job), job.fmt)
        _write(text, output)
        return 0
    except QdlError as exc:
        doc = {"schema": SCHEMA, "error": {"type": type(exc).__name__, "message": str(exc),
                                           "exit_code": exc.exit_code}}
        print(f"qdetlin: {type(exc).__name__}: {exc}", file=sys.stderr)
        try:
            _write(emit_report(doc), output)
        except QdlError:
            sys.stdout.write(emit_report(doc))
        return exc.exit_code


def main():
    sys.exit(parse_and_run())


if __name__ == "__main__":
    main()
