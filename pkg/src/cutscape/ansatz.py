"""Ansatz families as ordered lists of gate generators.

Every generator G enters the circuit as exp(-i theta G), applied in list order
(first generator acts first on the initial state).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

GENERATOR_KINDS = (
    "x_string",  # prod_{i in mask} X_i
    "z_string",  # prod_{i in mask} Z_i
    "global_x_mixer",  # sum_i X_i
    "local_x_layer_element",  # X_i, one per qubit inside a QAOA layer
    "problem_phase",  # H_p
    "global_z_layer",  # sum_i Z_i
)
MASKED_KINDS = {"x_string", "z_string", "local_x_layer_element"}
INITIAL_STATES = ("all_zeros", "all_plus")
FULL_NONSYMMETRIC_CAP = 20


class AnsatzError(ValueError):
    pass


@dataclass(frozen=True)
class Generator:
    kind: str
    mask: int | None = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise AnsatzError(f"unknown generator kind {self.kind!r}")
        if self.kind in MASKED_KINDS:
            if not self.mask or self.mask < 0:
                raise AnsatzError(f"{self.kind} needs a non-empty mask")
            if self.kind == "local_x_layer_element" and self.mask & (self.mask - 1):
                raise AnsatzError("local_x_layer_element acts on exactly one qubit")
        elif self.mask is not None:
            raise AnsatzError(f"{self.kind} takes no mask")


@dataclass(frozen=True)
class Ansatz:
    n_qubits: int
    generators: tuple[Generator, ...]
    initial_state: str = "all_zeros"

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.n_qubits < 1:
            raise AnsatzError("need at least one qubit")
        if self.initial_state not in INITIAL_STATES:
            raise AnsatzError(f"unknown initial state {self.initial_state!r}")
        for gen in self.generators:
            if gen.mask is not None and gen.mask >> self.n_qubits:
                raise AnsatzError(f"mask {gen.mask:#x} exceeds {self.n_qubits} qubits")

    @property
    def M(self) -> int:
        return len(self.generators)

    @property
    def is_x_ansatz(self) -> bool:
        """Pure commuting X-string family started from |0...0>."""
        return self.initial_state == "all_zeros" and all(g.kind == "x_string" for g in self.generators)

    @property
    def masks(self) -> np.ndarray:
        return np.array([g.mask or 0 for g in self.generators], dtype=np.int64)

    @property
    def depth(self) -> int:
        """k-body depth: largest X-string support."""
        xs = [bin(g.mask).count("1") for g in self.generators if g.kind == "x_string"]
        return max(xs, default=0)

    def require_x_ansatz(self):
        if not self.is_x_ansatz:
            raise AnsatzError("operation needs a pure X-string ansatz starting from |0...0>")

    def permuted(self, order) -> "Ansatz":
        return Ansatz(self.n_qubits, tuple(self.generators[i] for i in order), self.initial_state)


def _x_ansatz(n, masks) -> Ansatz:
    return Ansatz(n, tuple(Generator("x_string", int(m)) for m in masks))


def _popcount(m: int) -> int:
    return bin(m).count("1")


def masks_up_to_depth(n: int, D: int) -> list[int]:
    """All non-empty masks with popcount <= D, ordered by (popcount, value)."""
    out = []
    for k in range(1, D + 1):
        out += sorted(sum(1 << i for i in c) for c in combinations(range(n), k))
    return out


def classical_ansatz(n: int) -> Ansatz:
    if n < 1:
        raise AnsatzError("n >= 1 required")
    return _x_ansatz(n, [1 << j for j in range(n)])


def x_ansatz_depth(n: int, D: int) -> Ansatz:
    if not 1 <= D <= n:
        raise AnsatzError(f"depth D={D} outside [1, {n}]")
    return _x_ansatz(n, masks_up_to_depth(n, D))


def nonsymmetric_representative(mask: int, n: int) -> int:
    """Member of {mask, complement} kept by the full non-symmetric ansatz.

    Smaller support wins; equal supports keep the one without vertex n-1.
    """
    comp = ((1 << n) - 1) ^ mask
    pm, pc = _popcount(mask), _popcount(comp)
    if pm != pc:
        return mask if pm < pc else comp
    return mask if not (mask >> (n - 1)) & 1 else comp


def x_ansatz_full_nonsymmetric(n: int) -> Ansatz:
    if not 2 <= n <= FULL_NONSYMMETRIC_CAP:
        raise AnsatzError(f"full non-symmetric ansatz needs 2 <= n <= {FULL_NONSYMMETRIC_CAP}")
    full = (1 << n) - 1
    reps = {nonsymmetric_representative(m, n) for m in range(1, full)}
    return _x_ansatz(n, sorted(reps, key=lambda m: (_popcount(m), m)))


def path_masks(n: int, start: int = 0) -> list[int]:
    masks, m = [], 0
    for k in range(n - 1):
        m |= 1 << ((start + k) % n)
        masks.append(m)
    return masks


def path_ansatz(n: int) -> Ansatz:
    if n < 2:
        raise AnsatzError("path ansatz needs n >= 2")
    return _x_ansatz(n, path_masks(n))


def ring_ansatz(n: int) -> Ansatz:
    if n < 2:
        raise AnsatzError("ring ansatz needs n >= 2")
    return _x_ansatz(n, [m for s in range(n) for m in path_masks(n, s)])


def xz_ansatz(n: int, D: int, variant: str = "kbody_z") -> Ansatz:
    if not 1 <= D <= n:
        raise AnsatzError(f"depth D={D} outside [1, {n}]")
    if variant not in ("kbody_z", "global_z"):
        raise AnsatzError(f"unknown XZ variant {variant!r}")
    gens = []
    for m in masks_up_to_depth(n, D):
        gens.append(Generator("x_string", m))
        gens.append(Generator("z_string", m) if variant == "kbody_z" else Generator("global_z_layer"))
    return Ansatz(n, tuple(gens))


def qaoa_ansatz(n: int, p_layers: int, variant: str = "standard") -> Ansatz:
    if p_layers < 1:
        raise AnsatzError("need at least one QAOA layer")
    if variant not in ("standard", "local_x", "local_x_zero_start"):
        raise AnsatzError(f"unknown QAOA variant {variant!r}")
    gens = []
    for _ in range(p_layers):
        gens.append(Generator("problem_phase"))
        if variant == "standard":
            gens.append(Generator("global_x_mixer"))
        else:
            gens += [Generator("local_x_layer_element", 1 << i) for i in range(n)]
    init = "all_zeros" if variant == "local_x_zero_start" else "all_plus"
    return Ansatz(n, tuple(gens), init)


def xz_parameter_count(n: int, D: int) -> int:
    return 2 * sum(comb(n, k) for k in range(1, D + 1))


def random_x_ansatz(n: int, M: int, D: int, rng: np.random.Generator) -> Ansatz:
    """M distinct random masks of popcount <= D (M capped by availability)."""
    pool = masks_up_to_depth(n, D)
    M = min(M, len(pool))
    pick = rng.choice(len(pool), size=M, replace=False)
    return _x_ansatz(n, [pool[i] for i in pick])


# --- spec strings and serialization -------------------------------------------

def from_spec(spec: str) -> Ansatz:
    """Build an ansatz from a compact string such as ``xdepth:8:3``.

    Forms: classical:n, xdepth:n:D, full:n, path:n, ring:n,
    xz:n:D[:kbody_z|global_z], qaoa:n:p[:standard|local_x|local_x_zero_start].
    """
    parts = spec.strip().split(":")
    name, args = parts[0], parts[1:]
    try:
        ints = [int(a) for a in args if a.lstrip("-").isdigit()]
        words = [a for a in args if not a.lstrip("-").isdigit()]
        if name == "classical":
            return classical_ansatz(*ints)
        if name == "xdepth":
            return x_ansatz_depth(*ints)
        if name == "full":
            return x_ansatz_full_nonsymmetric(*ints)
        if name == "path":
            return path_ansatz(*ints)
        if name == "ring":
            return ring_ansatz(*ints)
        if name == "xz":
            return xz_ansatz(*ints, *words)
        if name == "qaoa":
            return qaoa_ansatz(*ints, *words)
    except TypeError as exc:
        raise AnsatzError(f"bad arguments in ansatz spec {spec!r}") from exc
    raise AnsatzError(f"unknown ansatz spec {spec!r}")


def dumps(ansatz: Ansatz) -> str:
    doc = {
        "n": ansatz.n_qubits,
        "initial_state": ansatz.initial_state,
        "generators": [[g.kind, None if g.mask is None else hex(g.mask)] for g in ansatz.generators],
    }
    return json.dumps(doc, indent=1)


def loads(text: str) -> Ansatz:
    try:
        doc = json.loads(text)
        gens = tuple(
            Generator(kind, None if mask is None else int(mask, 16)) for kind, mask in doc["generators"]
        )
        return Ansatz(int(doc["n"]), gens, doc["initial_state"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise AnsatzError(f"malformed ansatz document: {exc}") from exc
