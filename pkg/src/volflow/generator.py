"""Vector fields generated from 2-form fields.

The central map takes a 2-form alpha = (1/2) Q_ij dq^i^dq^j + A^i_j dp_i^dq^j
+ (1/2) P^ij dp_i^dp_j to the vector field

    qdot^i = dP^ij/dq^j + d(tr A)/dp_i - dA^i_j/dp_j
    pdot_i = dQ_ij/dp_j - d(tr A)/dq^i + dA^j_i/dq^j

(sums over repeated j; tr A = A^j_j).  Fields built this way are divergence
free, so their flows preserve phase-space volume.  The Hamiltonian fields
are the special case alpha proportional to the canonical symplectic form.
"""

from __future__ import annotations

from typing import Callable, Optional, Tuple

import numpy as np

from .forms import PhaseState, ScalarField, TwoFormField, as_points, traceless_part, trace_field

__all__ = [
    "GeneratedField",
    "generate",
    "hamiltonian_field",
    "decompose",
    "FengShangTensor",
    "feng_shang_from_alpha",
    "feng_shang_field",
]


class GeneratedField:
    """A vector field on R^{2n}, evaluated batched as shape (..., 2n).

    `kind` records how the field was built ("from-two-form", "hamiltonian",
    "feng-shang", "sum").  Calling the object evaluates it.
    """

    def __init__(self, n: int, eval_fn: Callable, kind: str, source=None):
        self.n = int(n)
        self._eval_fn = eval_fn
        self.kind = kind
        self.source = source

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, 2 * self.n)
        out = np.asarray(self._eval_fn(pts), dtype=float)
        if out.shape != pts.shape:
            raise ValueError(
                f"field evaluation returned shape {out.shape}, expected {pts.shape}"
            )
        return out

    def at_state(self, state: PhaseState) -> Tuple[np.ndarray, np.ndarray]:
        """Evaluate at a PhaseState, returning (qdot, pdot)."""
        v = self(state)
        return v[: self.n], v[self.n :]

    def __add__(self, other: "GeneratedField") -> "GeneratedField":
        if not isinstance(other, GeneratedField) or other.n != self.n:
            raise ValueError("can only add fields on the same space")
        return GeneratedField(
            self.n, lambda pts: self(pts) + other(pts), "sum", (self, other)
        )


def generate(alpha: TwoFormField) -> GeneratedField:
    """The volume-preserving field generated by the 2-form alpha."""
    n = alpha.n

    def eval_fn(pts):
        jet = alpha.jet_at(pts)
        # qdot^i = dP^ij/dq^j + d(trA)/dp_i - dA^i_j/dp_j
        qdot = (
            np.einsum("...ijj->...i", jet.dP_dq)
            + np.einsum("...jji->...i", jet.dA_dp)
            - np.einsum("...ijj->...i", jet.dA_dp)
        )
        # pdot_i = dQ_ij/dp_j - d(trA)/dq^i + dA^j_i/dq^j
        pdot = (
            np.einsum("...ijj->...i", jet.dQ_dp)
            - np.einsum("...jji->...i", jet.dA_dq)
            + np.einsum("...jij->...i", jet.dA_dq)
        )
        return np.concatenate([qdot, pdot], axis=-1)

    return GeneratedField(n, eval_fn, "from-two-form", alpha)


def hamiltonian_field(H: ScalarField, n: int) -> GeneratedField:
    """The Hamiltonian field qdot^i = dH/dp_i, pdot_i = -dH/dq^i."""

    def eval_fn(pts):
        g = H.gradient(pts)
        return np.concatenate([g[..., n:], -g[..., :n]], axis=-1)

    return GeneratedField(n, eval_fn, "hamiltonian", H)


def decompose(alpha: TwoFormField) -> Tuple[GeneratedField, GeneratedField]:
    """Split generate(alpha) into a Hamiltonian part and a remainder.

    Returns (X_H, X_rest) where X_H is the Hamiltonian field of tr(alpha)
    and X_rest = generate(alpha - (tr(alpha)/(n-1)) omega).  Their sum is
    the generated field of alpha.
    """
    H = trace_field(alpha)
    return hamiltonian_field(H, alpha.n), generate(traceless_part(alpha))


class FengShangTensor:
    """An antisymmetric tensor field a^{ij}(x) on R^{2n} producing the
    divergence field X^i = da^{ij}/dx^j.

    Stored as a callable returning the (..., 2n, 2n) tensor values plus a
    callable returning the (..., 2n, 2n, 2n) partials d a^{ij}/dx^k.
    """

    def __init__(self, n: int, tensor_fn: Callable, partial_fn: Callable):
        self.n = int(n)
        self.tensor_fn = tensor_fn
        self.partial_fn = partial_fn

    def tensor(self, x) -> np.ndarray:
        pts = as_points(x, 2 * self.n)
        return np.asarray(self.tensor_fn(pts), dtype=float)

    def partials(self, x) -> np.ndarray:
        pts = as_points(x, 2 * self.n)
        return np.asarray(self.partial_fn(pts), dtype=float)

    def check_antisymmetry(self, x, tol: float = 1e-9) -> float:
        t = self.tensor(x)
        return float(np.max(np.abs(t + np.swapaxes(t, -1, -2))))


def feng_shang_from_alpha(alpha: TwoFormField) -> FengShangTensor:
    """Pack alpha's components into the block tensor [[P, -A], [A^T, Q]].

    Blocks are indexed so that a^{ij} pairs with coordinates ordered
    (q, p): the qq block is P, the qp block is -A, the pq block is A^T,
    and the pp block is Q.  The resulting divergence field agrees with
    generate(alpha) exactly when the trace terms d(trA)/dq and d(trA)/dp
    vanish, and differs otherwise.
    """
    n = alpha.n
    dim = 2 * n

    def tensor_fn(pts):
        jet = alpha.jet_at(pts)
        out = np.zeros(pts.shape[:-1] + (dim, dim))
        out[..., :n, :n] = jet.P
        out[..., :n, n:] = -jet.A
        out[..., n:, :n] = np.swapaxes(jet.A, -1, -2)
        out[..., n:, n:] = jet.Q
        return out

    def partial_fn(pts):
        jet = alpha.jet_at(pts)
        out = np.zeros(pts.shape[:-1] + (dim, dim, dim))
        out[..., :n, :n, :n] = jet.dP_dq
        out[..., :n, :n, n:] = jet.dP_dp
        out[..., :n, n:, :n] = -jet.dA_dq
        out[..., :n, n:, n:] = -jet.dA_dp
        out[..., n:, :n, :n] = np.swapaxes(jet.dA_dq, -3, -2)
        out[..., n:, :n, n:] = np.swapaxes(jet.dA_dp, -3, -2)
        out[..., n:, n:, :n] = jet.dQ_dq
        out[..., n:, n:, n:] = jet.dQ_dp
        return out

    return FengShangTensor(n, tensor_fn, partial_fn)


def feng_shang_field(tensor: FengShangTensor) -> GeneratedField:
    """The divergence field X^i = da^{ij}/dx^j of an antisymmetric tensor."""

    def eval_fn(pts):
        d = tensor.partials(pts)
        return np.einsum("...ijj->...i", d)

    return GeneratedField(tensor.n, eval_fn, "feng-shang", tensor)
