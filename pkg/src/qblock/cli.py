"""
Command-line entry point ``qblock``.

Every command prints one JSON document (``"schema": 1``) on stdout, or a
single JSON error object on stderr with exit status 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import arith
from .approx import inverse_series, jacobi_anger_tail
from .encoding import PauliSum, from_array, from_eye, from_lcu, from_operator
from .simulator import array_from_json
from .solvers import cks, cycle_edges, heisenberg, ising, lanczos, maximal_matching
from .state_prep import singlet_prep

SCHEMA = 1


class CLIError(Exception):
    pass


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path} is not valid JSON: {exc}") from None


def _load_array(path: str) -> np.ndarray:
    doc = _load_json(path)
    if isinstance(doc, list):
        return np.asarray(doc, dtype=complex)
    try:
        return array_from_json(doc)
    except ValueError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _load_matrix(path: str) -> np.ndarray:
    A = _load_array(path)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise CLIError(f"{path} does not hold a square matrix")
    N = A.shape[0]
    if N < 2 or N & (N - 1):
        raise CLIError(f"matrix dimension {N} is not a power of two; pad it to {1 << (N - 1).bit_length()}")
    return A


def _real_if_close(a: np.ndarray):
    if np.allclose(np.imag(a), 0, atol=1e-12):
        return np.real(a).tolist()
    return [[float(z.real), float(z.imag)] for z in np.ravel(a)]


def _laplace(n: int) -> np.ndarray:
    N = 1 << n
    A = -2 * np.eye(N) + np.eye(N, k=1) + np.eye(N, k=-1)
    A[0, N - 1] = A[N - 1, 0] = 1
    return A


def laplace_lcu(n: int):
    """Periodic Laplacian ``-2I + V + V†`` with ``V`` the cyclic increment."""
    return from_lcu(
        [2.0, 1.0, 1.0],
        [lambda c, q: c.gphase(math.pi), lambda c, q: arith.increment(c, q),
         lambda c, q: arith.decrement(c, q)],
        (n,),
    )


# -- commands ----------------------------------------------------------------------


def cmd_verify(args) -> dict:
    if args.diag_k is not None:
        enc = from_eye(args.diag_k, args.n)
        target = np.eye(1 << args.n, k=args.diag_k)
    elif args.hamiltonian:
        op = PauliSum.from_dict(_load_json(args.hamiltonian))
        enc = from_operator(op)
        target = op.to_matrix(enc.num_operand_qubits)
    elif args.matrix:
        target = _load_matrix(args.matrix)
        enc = from_array(target)
    else:
        raise CLIError("verify needs --matrix, --hamiltonian or --diag-k")
    err = float(np.abs(target - enc.alpha * enc.block()).max())
    return {"alpha": enc.alpha, "epsilon": enc.epsilon, "ancilla_qubits": enc.num_ancillas,
            "max_block_error": err}


def cmd_solve(args) -> dict:
    if not args.matrix or not args.rhs:
        raise CLIError("solve needs --matrix and --rhs")
    A = _load_matrix(args.matrix)
    b = _load_array(args.rhs)
    if b.ndim != 1 or b.size != A.shape[0]:
        raise CLIError(f"rhs has {b.size} entries, matrix dimension is {A.shape[0]}")
    if np.any(np.abs(b.imag) > 0):
        raise CLIError("rhs must be real")
    kappa = args.kappa if args.kappa is not None else float(np.linalg.cond(A))
    enc = from_array(A)
    solver = enc.inv(args.eps, kappa) if args.method == "qet" else cks(enc, args.eps, kappa)
    res = solver.apply_rus(b.real, trials=args.shots, seed=args.seed)
    plan = inverse_series(args.eps, kappa)
    out = {"amplitudes": _real_if_close(res.state), "success_probability": res.success_probability,
           "degree": plan.series.degree, "kappa": kappa, "method": args.method,
           "resources": solver.resources().to_dict()}
    if res.attempts is not None:
        out["mean_attempts"] = float(res.attempts.mean())
    return out


def cmd_simulate(args) -> dict:
    if args.hamiltonian:
        op = PauliSum.from_dict(_load_json(args.hamiltonian))
    else:
        op = ising(args.L, 0.25, 0.5)
    enc = from_operator(op)
    evo = enc.sim(args.time, args.order)
    res = evo.apply_rus(None)
    return {"amplitudes": [[float(z.real), float(z.imag)] for z in res.state],
            "success_probability": res.success_probability,
            "tail_bound": jacobi_anger_tail(args.time * enc.alpha, args.order),
            "alpha": enc.alpha, "resources": evo.resources().to_dict()}


def cmd_resources(args) -> dict:
    out = {"n": args.n}
    if args.example in ("generic", "both"):
        out["generic"] = from_array(_laplace(args.n)).resources().to_dict()
    if args.example in ("laplace", "both"):
        out["custom"] = laplace_lcu(args.n).resources().to_dict()
    if args.example == "both":
        g, c = out["generic"], out["custom"]
        out["ratio"] = {"depth": g["depth"] / c["depth"],
                        "cx": g["gate_counts"].get("cx", 0) / max(c["gate_counts"].get("cx", 0), 1)}
    return out


def cmd_lanczos(args) -> dict:
    H = heisenberg(args.L)
    prep = singlet_prep(maximal_matching(cycle_edges(args.L)), args.L)
    res = lanczos(H, args.D, prep, shots=args.shots, seed=args.seed)
    return {"energy": res.energy, "exact_energy": H.ground_state_energy(args.L),
            "S": res.overlap.tolist(), "H'": res.hamiltonian.tolist(), "retained": res.retained}


COMMANDS = {"verify": cmd_verify, "solve": cmd_solve, "simulate": cmd_simulate,
            "resources": cmd_resources, "lanczos": cmd_lanczos}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="print a readable table instead of JSON")
    common.add_argument("--seed", type=int, default=0, help="seed for every sampled quantity")
    common.add_argument("--shots", type=int, default=0, help="0 means exact (no sampling)")

    p = argparse.ArgumentParser(prog="qblock", description=__doc__.strip().splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check alpha * block against the target")
    v.add_argument("--matrix")
    v.add_argument("--hamiltonian")
    v.add_argument("--diag-k", type=int)
    v.add_argument("--n", type=int, default=1)

    s = sub.add_parser("solve", parents=[common], help="solve A x = b by QET inversion or CKS")
    s.add_argument("--matrix")
    s.add_argument("--rhs")
    s.add_argument("--eps", type=float, default=0.01)
    s.add_argument("--kappa", type=float)
    s.add_argument("--method", choices=["qet", "cks"], default="qet")

    m = sub.add_parser("simulate", parents=[common], help="evolve |0> under a Hamiltonian")
    m.add_argument("--hamiltonian")
    m.add_argument("--L", type=int, default=4)
    m.add_argument("--time", type=float, default=0.5)
    m.add_argument("--order", type=int, default=8)

    r = sub.add_parser("resources", parents=[common], help="Laplace operator resource comparison")
    r.add_argument("--example", choices=["laplace", "generic", "both"], default="both")
    r.add_argument("--n", type=int, default=8)

    lz = sub.add_parser("lanczos", parents=[common], help="Krylov ground energy of the Heisenberg cycle")
    lz.add_argument("--L", type=int, default=6)
    lz.add_argument("--D", type=int, default=6)
    return p


def _table(doc: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k, v in doc.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_table(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], list):
            lines.append(f"{pad}{k}:")
            lines.extend(f"{pad}  " + "  ".join(f"{x: .6g}" if isinstance(x, float) else str(x) for x in row)
                         for row in v)
        else:
            lines.append(f"{pad}{k:<20} {v}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = COMMANDS[args.command](args)
    except (CLIError, ValueError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc), "command": args.command}), file=sys.stderr)
        return 1
    doc = {"schema": SCHEMA, "command": args.command, **result}
    print(_table(doc) if args.pretty else json.dumps(doc, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
