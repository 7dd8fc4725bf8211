"""Declarative mixer / linearized-transformer stacks and their symbolic value.

A spec fixes the family, depth, input shape, and per-layer structure;
weights are sampled separately so the same spec replays under many
seeds.  symbolic_forward evaluates a spec on the symbolic input X and
returns the exact polynomial matrix the network computes, which the
oracle then profiles.

Layer semantics, on an n-by-m input X:

  mixer, odd layer k (token mixing):    square(Wk @ pi_e(X))
  mixer, even layer k (channel mixing): square((Wk @ pi_o(X^T))^T)
  either adds pi_r(X) when k is in the residual set.

  transformer layer:  W_O @ (sum over heads of a product of d factors)
  where factor j of head k is (W_jk @ X), transposed when j is NOT in
  the head's plain-factor set T_k; the layer adds X when residual.

Odd mixer weights are n-by-n, even ones m-by-m (the shapes the products
force).  Transformer factor weights are m-by-n and W_O is n-by-m, so
every factor product is m-by-m and the layer output is again n-by-m.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple, Union

from srk.errors import DegreeCapExceeded, InvalidShape, InvalidTransposeSet
from srk.poly import (
    PolyMatrix,
    check_permutation,
    const_left_mul,
    entrywise_square,
    input_matrix,
    mat_add,
    mat_matmul,
    mat_permute,
    mat_transpose,
)

DEFAULT_DEGREE_CAP = 64

WEIGHT_RANGE = tuple(w for w in range(-9, 10) if w != 0)

IntMatrix = Tuple[Tuple[int, ...], ...]


def degree_cap() -> int:
    """Largest output degree symbolic_forward will attempt.

    Overridable through the SRK_DEGREE_CAP environment variable.
    """
    return int(os.environ.get("SRK_DEGREE_CAP", DEFAULT_DEGREE_CAP))


@dataclass(frozen=True)
class MixerLayerSpec:
    """One mixing layer; orientation follows the parity of its index."""

    index: int
    orientation: str  # "odd" = token mixing, "even" = channel mixing
    residual: bool
    pi_e: Optional[Tuple[int, ...]] = None  # None means identity
    pi_o: Optional[Tuple[int, ...]] = None
    pi_r: Optional[Tuple[int, ...]] = None


@dataclass(frozen=True)
class AttentionLayerSpec:
    """One linearized attention layer of polynomial degree d."""

    index: int
    heads: int
    degree: int
    transpose_sets: Tuple[Tuple[int, ...], ...]  # per head: 1-based plain factors
    residual: bool


LayerSpec = Union[MixerLayerSpec, AttentionLayerSpec]


@dataclass(frozen=True)
class ArchSpec:
    """A full stack: family, depth p, input shape (n, m), layers, default seed."""

    family: str  # "mixer" or "linear_transformer"
    p: int
    n: int
    m: int
    layers: Tuple[LayerSpec, ...]
    seed: int = 0


@dataclass(frozen=True)
class MixerLayerWeights:
    w: IntMatrix


@dataclass(frozen=True)
class AttentionLayerWeights:
    heads: Tuple[Tuple[IntMatrix, ...], ...]  # [head][factor j]
    w_o: IntMatrix


LayerWeights = Union[MixerLayerWeights, AttentionLayerWeights]


@dataclass(frozen=True)
class WeightAssignment:
    layers: Tuple[LayerWeights, ...]
    seed: int


def build_mixer(
    p: int,
    n: int,
    m: int,
    residual_set: Sequence[int] = (),
    permutations: Optional[Dict[str, Sequence[int]]] = None,
    seed: int = 0,
) -> ArchSpec:
    """Alternating token/channel squaring stack of depth p on n-by-m inputs.

    residual_set holds 1-based layer indices that add a (permuted) copy
    of the layer input.  permutations optionally maps any of "pi_e",
    "pi_o", "pi_r" to an entry permutation of length n*m, applied at
    every layer; omitted ones are the identity, which recovers the plain
    alternating stack.
    """
    if p < 1 or n < 1 or m < 1:
        raise InvalidShape(f"need p, n, m >= 1, got p={p}, n={n}, m={m}")
    residual = set(residual_set)
    if not residual <= set(range(1, p + 1)):
        raise InvalidShape(f"residual indices {sorted(residual)} outside 1..{p}")
    pis: Dict[str, Optional[Tuple[int, ...]]] = {"pi_e": None, "pi_o": None, "pi_r": None}
    if permutations:
        for name, pi in permutations.items():
            if name not in pis:
                raise InvalidShape(f"unknown permutation slot {name!r}")
            pis[name] = check_permutation(pi, n * m)
    layers = tuple(
        MixerLayerSpec(
            index=k,
            orientation="odd" if k % 2 else "even",
            residual=k in residual,
            pi_e=pis["pi_e"],
            pi_o=pis["pi_o"],
            pi_r=pis["pi_r"],
        )
        for k in range(1, p + 1)
    )
    return ArchSpec("mixer", p, n, m, layers, seed)


def build_linear_transformer(
    p: int,
    n: int,
    m: int,
    H: int,
    d: int = 3,
    transpose_sets: Optional[Sequence[Sequence[int]]] = None,
    residual_set: Sequence[int] = (),
    seed: int = 0,
) -> ArchSpec:
    """Stack of p degree-d linearized attention layers with H heads each.

    transpose_sets gives, per head, the 1-based factor positions taken
    plain; all other factors are transposed.  The default [1..d] for
    every head takes no transposes.  Each set must be nonempty and stay
    inside 1..d.
    """
    if p < 1 or H < 1 or d < 1 or n < 1 or m < 1:
        raise InvalidShape(
            f"need p, H, d, n, m >= 1, got p={p}, H={H}, d={d}, n={n}, m={m}"
        )
    residual = set(residual_set)
    if not residual <= set(range(1, p + 1)):
        raise InvalidShape(f"residual indices {sorted(residual)} outside 1..{p}")
    if transpose_sets is None:
        transpose_sets = [tuple(range(1, d + 1))] * H
    if len(transpose_sets) != H:
        raise InvalidTransposeSet(
            f"expected {H} transpose sets (one per head), got {len(transpose_sets)}"
        )
    cleaned = []
    for t in transpose_sets:
        t = tuple(sorted(set(t)))
        if not t or not all(1 <= j <= d for j in t):
            raise InvalidTransposeSet(
                f"each set needs 1 <= |T| <= {d} entries within 1..{d}, got {t}"
            )
        cleaned.append(t)
    layers = tuple(
        AttentionLayerSpec(
            index=i,
            heads=H,
            degree=d,
            transpose_sets=tuple(cleaned),
            residual=i in residual,
        )
        for i in range(1, p + 1)
    )
    return ArchSpec("linear_transformer", p, n, m, layers, seed)


# ---------------------------------------------------------------------------
# serialization

def spec_to_json(spec: ArchSpec) -> str:
    """Canonical JSON; byte-identical for equal specs."""
    payload: Dict[str, object] = {
        "family": spec.family,
        "p": spec.p,
        "n": spec.n,
        "m": spec.m,
        "residual": sorted(L.index for L in spec.layers if L.residual),
        "seed": spec.seed,
    }
    if spec.family == "mixer":
        pis = {}
        if spec.layers:
            first = spec.layers[0]
            for name in ("pi_e", "pi_o", "pi_r"):
                pi = getattr(first, name)
                if pi is not None:
                    pis[name] = list(pi)
        if pis:
            payload["permutations"] = pis
    else:
        first = spec.layers[0]
        payload["H"] = first.heads
        payload["d"] = first.degree
        payload["transpose_sets"] = [list(t) for t in first.transpose_sets]
    return json.dumps(payload, sort_keys=True)


def spec_from_json(text: str) -> ArchSpec:
    """Parse a spec; p=0 is allowed here and denotes the identity stack."""
    payload = json.loads(text)
    family = payload["family"]
    p = int(payload["p"])
    n = int(payload["n"])
    m = int(payload["m"])
    seed = int(payload.get("seed", 0))
    residual = payload.get("residual", [])
    if p == 0:
        if family not in ("mixer", "linear_transformer"):
            raise InvalidShape(f"unknown family {family!r}")
        return ArchSpec(family, 0, n, m, (), seed)
    if family == "mixer":
        return build_mixer(p, n, m, residual, payload.get("permutations"), seed)
    if family == "linear_transformer":
        return build_linear_transformer(
            p,
            n,
            m,
            int(payload.get("H", 1)),
            int(payload.get("d", 3)),
            payload.get("transpose_sets"),
            residual,
            seed,
        )
    raise InvalidShape(f"unknown family {family!r}")


def spec_digest(spec: ArchSpec) -> str:
    return hashlib.sha256(spec_to_json(spec).encode()).hexdigest()[:16]


def weights_to_json(w: WeightAssignment) -> str:
    layers = []
    for lw in w.layers:
        if isinstance(lw, MixerLayerWeights):
            layers.append({"w": [list(r) for r in lw.w]})
        else:
            layers.append(
                {
                    "heads": [
                        [[list(r) for r in mat] for mat in head] for head in lw.heads
                    ],
                    "w_o": [list(r) for r in lw.w_o],
                }
            )
    return json.dumps({"seed": w.seed, "layers": layers}, sort_keys=True)


def weights_from_json(text: str) -> WeightAssignment:
    payload = json.loads(text)
    layers = []
    for entry in payload["layers"]:
        if "w" in entry:
            layers.append(MixerLayerWeights(tuple(tuple(r) for r in entry["w"])))
        else:
            layers.append(
                AttentionLayerWeights(
                    tuple(
                        tuple(tuple(tuple(r) for r in mat) for mat in head)
                        for head in entry["heads"]
                    ),
                    tuple(tuple(r) for r in entry["w_o"]),
                )
            )
    return WeightAssignment(tuple(layers), payload["seed"])


# ---------------------------------------------------------------------------
# weights

def _sample_matrix(rng: random.Random, rows: int, cols: int) -> IntMatrix:
    return tuple(
        tuple(rng.choice(WEIGHT_RANGE) for _ in range(cols)) for _ in range(rows)
    )


def sample_weights(spec: ArchSpec, seed: int) -> WeightAssignment:
    """Deterministic weights for (spec, seed): nonzero integers in [-9, 9].

    Small exact integers keep downstream elimination fast; excluding
    zero avoids accidental structural rank loss.
    """
    rng = random.Random(f"{spec_digest(spec)}|{seed}")
    layers: list = []
    for layer in spec.layers:
        if isinstance(layer, MixerLayerSpec):
            dim = spec.n if layer.orientation == "odd" else spec.m
            layers.append(MixerLayerWeights(_sample_matrix(rng, dim, dim)))
        else:
            heads = tuple(
                tuple(
                    _sample_matrix(rng, spec.m, spec.n)
                    for _ in range(layer.degree)
                )
                for _ in range(layer.heads)
            )
            w_o = _sample_matrix(rng, spec.n, spec.m)
            layers.append(AttentionLayerWeights(heads, w_o))
    return WeightAssignment(tuple(layers), seed)


# ---------------------------------------------------------------------------
# symbolic evaluation

def output_degree_limit(spec: ArchSpec) -> int:
    """Worst-case output degree: 2^p for mixers, d^p for transformers."""
    if spec.p == 0:
        return 1
    if spec.family == "mixer":
        return 2 ** spec.p
    return spec.layers[0].degree ** spec.p


def _apply_mixer_layer(
    x: PolyMatrix, layer: MixerLayerSpec, w: MixerLayerWeights
) -> PolyMatrix:
    if layer.orientation == "odd":
        h = x if layer.pi_e is None else mat_permute(x, layer.pi_e)
        out = entrywise_square(const_left_mul(w.w, h))
    else:
        h = mat_transpose(x)
        if layer.pi_o is not None:
            h = mat_permute(h, layer.pi_o)
        out = entrywise_square(mat_transpose(const_left_mul(w.w, h)))
    if layer.residual:
        r = x if layer.pi_r is None else mat_permute(x, layer.pi_r)
        out = mat_add(out, r)
    return out


def _apply_attention_layer(
    x: PolyMatrix, layer: AttentionLayerSpec, w: AttentionLayerWeights
) -> PolyMatrix:
    acc = None
    for k in range(layer.heads):
        prod = None
        plain = set(layer.transpose_sets[k])
        for j in range(1, layer.degree + 1):
            factor = const_left_mul(w.heads[k][j - 1], x)
            if j not in plain:
                factor = mat_transpose(factor)
            prod = factor if prod is None else mat_matmul(prod, factor)
        acc = prod if acc is None else mat_add(acc, prod)
    out = const_left_mul(w.w_o, acc)
    if layer.residual:
        out = mat_add(out, x)
    return out


def symbolic_forward(
    spec: ArchSpec, w: WeightAssignment, cap: Optional[int] = None
) -> PolyMatrix:
    """Exact polynomial output of the stack on the symbolic input.

    Refuses up front when the worst-case output degree exceeds the cap
    (default 64, see SRK_DEGREE_CAP); degrees blow up doubly fast in p,
    so the guard sits before any work is done.
    """
    limit = cap if cap is not None else degree_cap()
    predicted = output_degree_limit(spec)
    if predicted > limit:
        raise DegreeCapExceeded(
            f"worst-case output degree {predicted} exceeds cap {limit} "
            "(set SRK_DEGREE_CAP to raise it)"
        )
    if len(w.layers) != len(spec.layers):
        raise InvalidShape(
            f"weight assignment has {len(w.layers)} layers, spec has {len(spec.layers)}"
        )
    x = input_matrix(spec.n, spec.m)
    for layer, lw in zip(spec.layers, w.layers):
        if isinstance(layer, MixerLayerSpec):
            x = _apply_mixer_layer(x, layer, lw)
        else:
            x = _apply_attention_layer(x, layer, lw)
    return x


def param_count(spec: ArchSpec) -> int:
    """Total weight entries; p*d^2 for square mixers with n=m=d."""
    total = 0
    for layer in spec.layers:
        if isinstance(layer, MixerLayerSpec):
            dim = spec.n if layer.orientation == "odd" else spec.m
            total += dim * dim
        else:
            total += layer.heads * layer.degree * spec.m * spec.n + spec.n * spec.m
    return total
