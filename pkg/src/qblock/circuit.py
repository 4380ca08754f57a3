"""
Gate-level circuit IR.

Qubits are referenced by flat integer indices. Registers are laid out in
declaration order (register-major) and each register is little-endian: its
first qubit is the least significant bit of the integer it holds. The same
convention is used by :mod:`qblock.simulator`, so qubit ``q`` of a circuit is
bit ``q`` of a basis-state index.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ANGLE_KINDS = frozenset({"rx", "ry", "rz", "p", "gphase"})
FIXED_KINDS = frozenset({"x", "y", "z", "h", "s", "sdg", "t", "tdg", "cx", "mcx", "measure"})
KINDS = ANGLE_KINDS | FIXED_KINDS
BASE_KINDS = frozenset({"rx", "ry", "rz", "p", "gphase", "h", "x", "s", "sdg", "t", "tdg", "cx", "measure"})

_INVERSE_KIND = {"s": "sdg", "sdg": "s", "t": "tdg", "tdg": "t"}


class CircuitError(ValueError):
    """Raised on malformed gates or circuits."""


@dataclass(frozen=True)
class Register:
    name: str
    size: int
    role: str = "system"

    def __post_init__(self):
        if self.size < 1:
            raise CircuitError(f"register {self.name!r} must hold at least one qubit")
        if self.role not in ("system", "ancilla"):
            raise CircuitError(f"unknown register role {self.role!r}")


@dataclass(frozen=True)
class Gate:
    """
    A single gate: one base operation on ``targets`` conditioned on ``controls``.

    ``polarity[i]`` is the value control ``controls[i]`` must hold for the gate
    to act. ``gphase`` has no targets and never carries controls; controlling a
    global phase turns it into a phase gate on the control (see
    :meth:`Circuit.controlled`).
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    polarity: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        targets = tuple(int(q) for q in self.targets)
        controls = tuple(int(q) for q in self.controls)
        polarity = tuple(int(b) for b in self.polarity) if self.polarity else (1,) * len(controls)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "polarity", polarity)
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if (self.angle is not None) != (self.kind in ANGLE_KINDS):
            raise CircuitError(f"{self.kind}: angle must be given iff the gate is a rotation/phase")
        if len(polarity) != len(controls) or any(b not in (0, 1) for b in polarity):
            raise CircuitError("polarity must be one bit per control")
        if len(set(controls)) != len(controls) or set(controls) & set(targets):
            raise CircuitError("controls must be distinct and disjoint from targets")
        if self.kind == "gphase":
            if targets or controls:
                raise CircuitError("gphase acts on no qubits")
        elif len(targets) != 1:
            raise CircuitError(f"{self.kind} takes exactly one target")
        if self.kind == "cx" and (len(controls) != 1 or polarity != (1,)):
            raise CircuitError("cx takes exactly one positive control")
        if self.kind == "mcx" and not controls:
            raise CircuitError("mcx needs at least one control")
        if self.kind == "measure" and controls:
            raise CircuitError("measurements cannot be controlled")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    @property
    def name(self) -> str:
        if not self.controls or self.kind in ("cx", "mcx"):
            return self.kind
        return ("c" if len(self.controls) == 1 else "mc") + self.kind

    def inverse(self) -> Gate:
        if self.kind == "measure":
            raise CircuitError("measurements have no inverse")
        kind = _INVERSE_KIND.get(self.kind, self.kind)
        angle = -self.angle if self.angle is not None else None
        return Gate(kind, self.targets, self.controls, self.polarity, angle)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "targets": list(self.targets),
            "controls": list(self.controls),
            "polarity": list(self.polarity),
            "angle": self.angle,
        }

    @classmethod
    def from_dict(cls, d: dict) -> Gate:
        return cls(d["kind"], tuple(d.get("targets", ())), tuple(d.get("controls", ())),
                   tuple(d.get("polarity", ())), d.get("angle"))


def _x_gate(target: int, controls: Sequence[int] = (), polarity: Sequence[int] = ()) -> Gate:
    polarity = tuple(polarity) or (1,) * len(controls)
    if not controls:
        return Gate("x", (target,))
    if len(controls) == 1 and polarity == (1,):
        return Gate("cx", (target,), tuple(controls))
    return Gate("mcx", (target,), tuple(controls), polarity)


@dataclass(frozen=True)
class ResourceReport:
    gate_counts: dict[str, int]
    depth: int
    qubits: int

    def to_dict(self) -> dict:
        return {"gate_counts": dict(sorted(self.gate_counts.items())), "depth": self.depth,
                "qubits": self.qubits}


class Circuit:
    """
    Ordered gate list over named registers.

    Builder methods (``h``, ``cx``, ``ry`` ...) append in place and return the
    circuit so calls can be chained. The transforms :meth:`adjoint`,
    :meth:`controlled` and :meth:`decompose` return new circuits.
    """

    def __init__(self, registers: Iterable[Register] = ()):
        self.registers: list[Register] = []
        self.gates: list[Gate] = []
        self._offsets: dict[str, int] = {}
        self.num_qubits = 0
        for reg in registers:
            self.add_register(reg)

    # -- registers -----------------------------------------------------------

    def add_register(self, name: str | Register, size: int | None = None,
                     role: str = "system") -> list[int]:
        reg = name if isinstance(name, Register) else Register(name, size, role)
        if reg.name in self._offsets:
            raise CircuitError(f"duplicate register name {reg.name!r}")
        self._offsets[reg.name] = self.num_qubits
        self.registers.append(reg)
        self.num_qubits += reg.size
        return list(range(self._offsets[reg.name], self.num_qubits))

    def qubits(self, name: str) -> list[int]:
        start = self._offsets[name]
        size = next(r.size for r in self.registers if r.name == name)
        return list(range(start, start + size))

    def qubits_by_role(self, role: str) -> list[int]:
        return [q for r in self.registers if r.role == role for q in self.qubits(r.name)]

    def fresh_name(self, prefix: str) -> str:
        i = 0
        while f"{prefix}{i}" in self._offsets:
            i += 1
        return f"{prefix}{i}"

    def sub(self) -> Circuit:
        """Empty circuit over the same registers."""
        return Circuit(self.registers)

    # -- construction --------------------------------------------------------

    def append(self, gate: Gate) -> Circuit:
        for q in gate.qubits:
            if not 0 <= q < self.num_qubits:
                raise CircuitError(f"{gate.kind} references undeclared qubit {q}")
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate] | Circuit) -> Circuit:
        if isinstance(gates, Circuit):
            gates = gates.gates
        for g in gates:
            self.append(g)
        return self

    def x(self, q): return self.append(Gate("x", (q,)))
    def y(self, q): return self.append(Gate("y", (q,)))
    def z(self, q): return self.append(Gate("z", (q,)))
    def h(self, q): return self.append(Gate("h", (q,)))
    def s(self, q): return self.append(Gate("s", (q,)))
    def sdg(self, q): return self.append(Gate("sdg", (q,)))
    def t(self, q): return self.append(Gate("t", (q,)))
    def tdg(self, q): return self.append(Gate("tdg", (q,)))
    def rx(self, theta, q): return self.append(Gate("rx", (q,), angle=theta))
    def ry(self, theta, q): return self.append(Gate("ry", (q,), angle=theta))
    def rz(self, theta, q): return self.append(Gate("rz", (q,), angle=theta))
    def p(self, theta, q): return self.append(Gate("p", (q,), angle=theta))
    def gphase(self, theta): return self.append(Gate("gphase", angle=theta))
    def cx(self, c, t): return self.append(Gate("cx", (t,), (c,)))
    def measure(self, q): return self.append(Gate("measure", (q,)))

    def mcx(self, controls: Sequence[int], target: int, polarity: Sequence[int] = ()) -> Circuit:
        return self.append(_x_gate(target, tuple(controls), tuple(polarity)))

    def mcz(self, controls: Sequence[int], target: int, polarity: Sequence[int] = ()) -> Circuit:
        if not controls:
            return self.z(target)
        return self.append(Gate("z", (target,), tuple(controls), tuple(polarity)))

    # -- transforms ----------------------------------------------------------

    def used_qubits(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}

    def adjoint(self) -> Circuit:
        out = self.sub()
        out.gates = [g.inverse() for g in reversed(self.gates)]
        return out

    def controlled(self, controls: Sequence[int], polarity: Sequence[int] | None = None) -> Circuit:
        controls = tuple(int(c) for c in controls)
        polarity = tuple(polarity) if polarity is not None else (1,) * len(controls)
        if len(polarity) != len(controls):
            raise CircuitError("polarity must be one bit per control")
        if set(controls) & self.used_qubits():
            raise CircuitError("control qubits overlap the controlled circuit")
        out = self.sub()
        if not controls:
            out.gates = list(self.gates)
            return out
        for g in self.gates:
            if g.kind == "measure":
                raise CircuitError("cannot control a circuit containing measurements")
            if g.kind == "gphase":
                last, pol = controls[-1], polarity[-1]
                if not pol:
                    out.x(last)
                out.append(Gate("p", (last,), controls[:-1], polarity[:-1], g.angle))
                if not pol:
                    out.x(last)
            elif g.kind in ("x", "cx", "mcx"):
                out.append(_x_gate(g.targets[0], controls + g.controls, polarity + g.polarity))
            else:
                out.append(Gate(g.kind, g.targets, controls + g.controls, polarity + g.polarity, g.angle))
        return out

    def remap(self, mapping: Sequence[int]) -> list[Gate]:
        """Gates of this circuit with qubit ``i`` renamed to ``mapping[i]``."""
        return [Gate(g.kind, tuple(mapping[q] for q in g.targets), tuple(mapping[q] for q in g.controls),
                     g.polarity, g.angle) for g in self.gates]

    def decompose(self) -> Circuit:
        return _Decomposer(self).run()

    def resources(self) -> ResourceReport:
        dec = self.decompose()
        counts = Counter(dict.fromkeys(BASE_KINDS, 0))
        counts.update(g.name for g in dec.gates)
        level = [0] * dec.num_qubits
        depth = 0
        for g in dec.gates:
            if not g.qubits:
                continue
            d = 1 + max(level[q] for q in g.qubits)
            for q in g.qubits:
                level[q] = d
            depth = max(depth, d)
        return ResourceReport(dict(counts), depth, dec.num_qubits)

    # -- misc ----------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.gates)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.registers == other.registers and self.gates == other.gates

    def __repr__(self) -> str:
        return f"Circuit(qubits={self.num_qubits}, gates={len(self.gates)})"

    def to_dict(self) -> dict:
        return {
            "registers": [{"name": r.name, "size": r.size, "role": r.role} for r in self.registers],
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> Circuit:
        circ = cls(Register(r["name"], r["size"], r.get("role", "system")) for r in d["registers"])
        circ.extend(Gate.from_dict(g) for g in d["gates"])
        return circ

    @classmethod
    def from_json(cls, text: str) -> Circuit:
        return cls.from_dict(json.loads(text))


def build(circuit: Circuit, fn, *args) -> Circuit:
    """Run the gate-appending callable ``fn`` into an empty copy of ``circuit``."""
    sub = circuit.sub()
    fn(sub, *args)
    return sub


# -- decomposition -------------------------------------------------------------


def _toffoli(a: int, b: int, t: int) -> list[Gate]:
    G = Gate
    return [
        G("h", (t,)), G("cx", (t,), (b,)), G("tdg", (t,)), G("cx", (t,), (a,)),
        G("t", (t,)), G("cx", (t,), (b,)), G("tdg", (t,)), G("cx", (t,), (a,)),
        G("t", (b,)), G("t", (t,)), G("h", (t,)), G("cx", (b,), (a,)),
        G("t", (a,)), G("tdg", (b,)), G("cx", (b,), (a,)),
    ]


def _zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """Angles (delta, beta, gamma, zeta) with u = e^{i delta} RZ(beta) RY(gamma) RZ(zeta)."""
    delta = float(np.angle(np.linalg.det(u))) / 2
    v = u * np.exp(-1j * delta)
    a, b = v[0, 0], v[1, 0]
    gamma = 2 * math.atan2(abs(b), abs(a))
    s = -2 * float(np.angle(a)) if abs(a) > 1e-12 else 0.0
    d = 2 * float(np.angle(b)) if abs(b) > 1e-12 else 0.0
    beta, zeta = (s + d) / 2, (s - d) / 2
    return delta, beta, gamma, zeta


def _single_controlled(g: Gate, c: int) -> list[Gate]:
    """Base-gate expansion of ``g`` (uncontrolled kind) controlled on one positive qubit."""
    from .simulator import gate_matrix

    t = g.targets[0]
    G = Gate
    k, a = g.kind, g.angle
    if k in ("x", "cx", "mcx"):
        return [G("cx", (t,), (c,))]
    if k == "y":
        return [G("sdg", (t,)), G("cx", (t,), (c,)), G("s", (t,))]
    if k == "z":
        return [G("h", (t,)), G("cx", (t,), (c,)), G("h", (t,))]
    phase = {"s": math.pi / 2, "sdg": -math.pi / 2, "t": math.pi / 4, "tdg": -math.pi / 4, "p": a}
    if k in phase:
        th = phase[k]
        return [G("p", (c,), angle=th / 2), G("p", (t,), angle=th / 2), G("cx", (t,), (c,)),
                G("p", (t,), angle=-th / 2), G("cx", (t,), (c,))]
    if k in ("rz", "ry"):
        return [G(k, (t,), angle=a / 2), G("cx", (t,), (c,)), G(k, (t,), angle=-a / 2), G("cx", (t,), (c,))]
    if k == "rx":
        return [G("h", (t,)), G("rz", (t,), angle=a / 2), G("cx", (t,), (c,)),
                G("rz", (t,), angle=-a / 2), G("cx", (t,), (c,)), G("h", (t,))]
    delta, beta, gamma, zeta = _zyz(gate_matrix(k, a))
    return [
        G("rz", (t,), angle=(zeta - beta) / 2),
        G("cx", (t,), (c,)),
        G("rz", (t,), angle=-(zeta + beta) / 2), G("ry", (t,), angle=-gamma / 2),
        G("cx", (t,), (c,)),
        G("ry", (t,), angle=gamma / 2), G("rz", (t,), angle=beta),
        G("p", (c,), angle=delta),
    ]


def _uncontrolled(g: Gate) -> list[Gate]:
    t = g.targets[0] if g.targets else None
    if g.kind == "y":
        return [Gate("sdg", (t,)), Gate("x", (t,)), Gate("s", (t,))]
    if g.kind == "z":
        return [Gate("s", (t,)), Gate("s", (t,))]
    return [g]


class _Decomposer:
    """
    Lowers a circuit to the base gate set.

    Runs of consecutive gates sharing the same multi-qubit control set are
    handled together: the AND of the controls is computed once into a clean
    ancilla by a Toffoli ladder, the run is applied singly-controlled from that
    ancilla, and the ladder is undone. A lone MCX uses the shorter ladder that
    ends directly on its target. Ancillas are appended as one extra register.
    """

    def __init__(self, circuit: Circuit):
        self.src = circuit
        self.base = circuit.num_qubits
        self.peak = 0
        self.out: list[Gate] = []

    def anc(self, i: int) -> int:
        self.peak = max(self.peak, i + 1)
        return self.base + i

    def emit(self, gates: Iterable[Gate]):
        self.out.extend(gates)

    def flip(self, controls, polarity):
        self.emit(Gate("x", (c,)) for c, b in zip(controls, polarity) if not b)

    def ladder(self, controls: Sequence[int]) -> tuple[list[Gate], int]:
        """Toffoli ladder computing AND(controls) into a fresh ancilla; returns (gates, ancilla)."""
        gates = []
        prev = controls[0]
        for i, c in enumerate(controls[1:]):
            a = self.anc(i)
            gates += _toffoli(prev, c, a)
            prev = a
        return gates, prev

    def run(self) -> Circuit:
        gates = self.src.gates
        i = 0
        while i < len(gates):
            g = gates[i]
            if len(g.controls) <= 1:
                self.lower_small(g)
                i += 1
                continue
            key = frozenset(zip(g.controls, g.polarity))
            j = i + 1
            while j < len(gates) and gates[j].controls and frozenset(zip(gates[j].controls, gates[j].polarity)) == key:
                j += 1
            self.lower_group(gates[i:j])
            i = j
        out = self.src.sub()
        if self.peak:
            out.add_register(out.fresh_name("decomp"), self.peak, "ancilla")
        out.gates = self.out
        return out

    def lower_small(self, g: Gate):
        if not g.controls:
            self.emit(_uncontrolled(g))
            return
        c, pol = g.controls[0], g.polarity[0]
        if not pol:
            self.emit([Gate("x", (c,))])
        self.emit(_single_controlled(g, c))
        if not pol:
            self.emit([Gate("x", (c,))])

    def lower_group(self, run: list[Gate]):
        controls, polarity = run[0].controls, run[0].polarity
        self.flip(controls, polarity)
        if len(run) == 1 and run[0].kind == "mcx":
            t = run[0].targets[0]
            if len(controls) == 2:
                self.emit(_toffoli(controls[0], controls[1], t))
            else:
                up, top = self.ladder(controls[:-1])
                self.emit(up)
                self.emit(_toffoli(top, controls[-1], t))
                self.emit(g.inverse() for g in reversed(up))
        else:
            up, flag = self.ladder(controls)
            self.emit(up)
            for g in run:
                self.emit(_single_controlled(g, flag))
            self.emit(g.inverse() for g in reversed(up))
        self.flip(controls, polarity)
