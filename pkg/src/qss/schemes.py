"""Threshold quantum secret sharing: coherent encoding and explicit decoders.

A (t, K) scheme over a prime field F_q distributes a q-dimensional secret
over K qudit shares.  Internally the scheme always evaluates the sharing
polynomial at 2t-1 points; when K < 2t-1 the surplus evaluations become
virtual shares that are generated but never distributed (and are traced
out by every verification).

Encoding maps each basis secret |s⟩ to the uniform superposition, over all
coefficient vectors a in F_q^(t-1), of the share tuples of the polynomial
p(x) = s*x^(t-1) + a_1 + a_2 x + ... + a_{t-1} x^(t-2).

Decoding for a qualified set T picks t witness shares, coherently inverts
the witness sub-Vandermonde (so the witnesses hold the coefficient vector
(s, a)), then adds a secret-controlled translation to the a-registers that
cancels the s-dependence of every non-witness share.  After the circuit
the first witness register holds the secret, in product with the rest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import finite_field as ff
from . import qudit_engine as qe
from .access_structure import CloningViolation


class NotQualified(ValueError):
    """Raised when a decoding set cannot reconstruct the secret."""


class IsQualified(ValueError):
    """Raised when a secrecy check is asked about a qualified set."""


class SingularResidual(ValueError):
    """Raised if the non-witness translation system is singular (distinct points forbid this)."""


@dataclass(frozen=True)
class ThresholdSchemeSpec:
    """Parameters of a (t, K) threshold scheme over F_q with 2t > K >= t."""

    q: int
    t: int
    K: int
    points: tuple[int, ...] = ()

    def __post_init__(self):
        if not ff.is_prime(self.q):
            raise ValueError(f"q = {self.q} is not prime")
        if not 1 <= self.t <= self.K:
            raise ValueError(f"need 1 <= t <= K, got t={self.t}, K={self.K}")
        if 2 * self.t <= self.K:
            raise CloningViolation(
                f"(t={self.t}, K={self.K}) violates no-cloning; need 2t > K"
            )
        if self.q < 2 * self.t - 1:
            raise ValueError(f"q = {self.q} is too small for {2 * self.t - 1} distinct points")
        points = tuple(int(x) % self.q for x in self.points) or tuple(range(2 * self.t - 1))
        if len(points) != 2 * self.t - 1:
            raise ValueError(f"need exactly {2 * self.t - 1} points, got {len(points)}")
        if len(set(points)) != len(points):
            raise ff.DuplicatePoints(f"points {points} are not pairwise distinct")
        object.__setattr__(self, "points", points)

    @property
    def n_shares(self) -> int:
        return 2 * self.t - 1

    @property
    def n_virtual(self) -> int:
        return self.n_shares - self.K

    @property
    def share_labels(self) -> tuple[str, ...]:
        return tuple(f"B{k}" for k in range(1, self.K + 1))

    @property
    def virtual_labels(self) -> tuple[str, ...]:
        return tuple(f"V{i}" for i in range(1, self.n_virtual + 1))

    def point_elements(self) -> tuple[ff.FqElement, ...]:
        return tuple(ff.FqElement(x, self.q) for x in self.points)

    def evaluation_matrix(self) -> ff.FqMatrix:
        """The (2t-1) x t share-evaluation matrix acting on (s, a)."""
        return ff.vandermonde(self.point_elements(), self.t)

    @classmethod
    def from_json(cls, obj: dict) -> "ThresholdSchemeSpec":
        return cls(
            q=int(obj["q"]),
            t=int(obj["t"]),
            K=int(obj["K"]),
            points=tuple(obj.get("points", ())),
        )

    def to_json(self) -> dict:
        return {"q": self.q, "t": self.t, "K": self.K, "points": list(self.points)}


@dataclass(frozen=True, eq=False)
class EncodedSecret:
    """A pure state on (reference..., B1..BK, V...) produced by `encode`."""

    state: qe.PureState
    scheme: ThresholdSchemeSpec
    reference_labels: tuple[str, ...]


def encoding_isometry(scheme: ThresholdSchemeSpec) -> np.ndarray:
    """The q^(2t-1) x q matrix sending |s⟩ to its normalized share superposition."""
    q, t = scheme.q, scheme.t
    m = scheme.evaluation_matrix().data
    iso = np.zeros((q ** scheme.n_shares, q), dtype=np.complex128)
    norm = 1.0 / q ** ((t - 1) / 2.0)
    for s in range(q):
        for a in itertools.product(range(q), repeat=t - 1):
            coeffs = np.array((s,) + a, dtype=np.int64)
            shares = tuple(int(v) for v in (m @ coeffs) % q)
            iso[int(np.ravel_multi_index(shares, (q,) * scheme.n_shares)), s] += norm
    return iso


def encode(
    scheme: ThresholdSchemeSpec,
    secret: qe.PureState,
    secret_register: "int | str | None" = None,
) -> EncodedSecret:
    """Encode the secret register into 2t-1 share registers.

    `secret` may carry additional (reference) registers entangled with the
    secret register; they ride along untouched.  The secret register
    defaults to the last register and must have dimension q.
    """
    shape = secret.shape
    idx = shape.n - 1 if secret_register is None else shape.index(secret_register)
    if shape.dims[idx] != scheme.q:
        raise qe.DimMismatch(
            f"secret register has dimension {shape.dims[idx]}, scheme needs {scheme.q}"
        )
    rest = [i for i in range(shape.n) if i != idx]
    iso = encoding_isometry(scheme)
    t = secret.amplitudes.reshape(shape.dims).transpose(rest + [idx])
    out = t.reshape(-1, scheme.q) @ iso.T
    new_shape = qe.RegisterShape(
        tuple(shape.dims[i] for i in rest) + (scheme.q,) * scheme.n_shares,
        tuple(shape.labels[i] for i in rest)
        + scheme.share_labels
        + scheme.virtual_labels,
    )
    return EncodedSecret(
        qe.PureState(new_shape, out.reshape(-1)),
        scheme,
        tuple(shape.labels[i] for i in rest),
    )


@dataclass(frozen=True, eq=False)
class DecoderCircuit:
    """A permutation unitary on the witness registers of a qualified set.

    Applying `unitary` to the witness registers (in witness order) leaves
    the secret in the first witness register, decoupled from all others.
    """

    scheme: ThresholdSchemeSpec
    members: tuple[int, ...]
    witnesses: tuple[int, ...]
    unitary: np.ndarray
    translation: tuple[int, ...]

    @property
    def secret_label(self) -> str:
        return f"B{self.witnesses[0]}"

    @property
    def witness_labels(self) -> tuple[str, ...]:
        return tuple(f"B{k}" for k in self.witnesses)

    def apply(self, state: "qe.PureState | EncodedSecret") -> qe.PureState:
        if isinstance(state, EncodedSecret):
            state = state.state
        return qe.apply_unitary(state, self.unitary, targets=self.witness_labels)


def build_decoder(
    scheme: ThresholdSchemeSpec,
    members: Sequence[int],
    witnesses: Sequence[int] | None = None,
) -> DecoderCircuit:
    """Construct the explicit decoding circuit for a qualified set of real shares."""
    q, t = scheme.q, scheme.t
    members = tuple(sorted(set(int(k) for k in members)))
    if any(not 1 <= k <= scheme.K for k in members):
        raise NotQualified(f"members {members} must be real shares in [1, {scheme.K}]")
    if len(members) < t:
        raise NotQualified(f"{len(members)} shares cannot meet threshold t={t}")
    witnesses = tuple(members[:t]) if witnesses is None else tuple(int(k) for k in witnesses)
    if len(witnesses) != t or not set(witnesses) <= set(members):
        raise NotQualified(f"witnesses {witnesses} must be {t} members of {members}")

    pts = scheme.point_elements()
    vw = ff.vandermonde([pts[k - 1] for k in witnesses], t)
    coeff_map = ff.mat_inverse(vw)  # witness shares -> (s, a)

    others = [j for j in range(1, scheme.n_shares + 1) if j not in witnesses]
    if t > 1:
        d_rows = [[pow(pts[j - 1].value, i, q) for i in range(t - 1)] for j in others]
        c_vec = [pow(pts[j - 1].value, t - 1, q) for j in others]
        try:
            d_mat = ff.FqMatrix.from_rows(d_rows, q)
            tau = tuple(int(v) for v in ff.solve(d_mat, c_vec))
        except ff.SingularMatrix as exc:  # unreachable for distinct points
            raise SingularResidual(str(exc)) from exc
    else:
        tau = ()

    lmat = coeff_map.data

    def decode_labels(v: tuple[int, ...]) -> tuple[int, ...]:
        coeffs = (lmat @ np.array(v, dtype=np.int64)) % q
        s = int(coeffs[0])
        return (s,) + tuple((int(coeffs[1 + i]) + s * tau[i]) % q for i in range(t - 1))

    unitary = qe.classical_reversible_unitary(decode_labels, (q,) * t)
    return DecoderCircuit(scheme, members, witnesses, unitary, tau)


# The paper's (2,3) qutrit recovery uses two modular additions; the encoding
# is invariant under cyclic share rotation, which extends the circuit to the
# other pairs.  Values are (first operand, second operand); the secret ends
# in the first operand's register.
_CGL99_ORDER = {
    frozenset({1, 2}): (1, 2),
    frozenset({2, 3}): (2, 3),
    frozenset({1, 3}): (3, 1),
}


def cgl99_pair_decode(
    state: "qe.PureState | EncodedSecret", pair: Sequence[int]
) -> tuple[qe.PureState, str]:
    """Recover a (2,3) qutrit secret with two mod-3 additions.

    Step 1: second ← first + second; step 2: first ← second + first.
    Returns the transformed state and the label of the register now
    holding the secret.
    """
    if isinstance(state, EncodedSecret):
        state = state.state
    key = frozenset(int(k) for k in pair)
    if key not in _CGL99_ORDER:
        raise NotQualified(f"pair {sorted(key)} is not a pair of the three shares")
    for k in key:
        if state.shape.dims[state.shape.index(f"B{k}")] != 3:
            raise qe.DimMismatch("pair decoding expects qutrit shares")
    c1, c2 = _CGL99_ORDER[key]
    add = qe.classical_reversible_unitary(lambda v: (v[0], (v[0] + v[1]) % 3), (3, 3))
    state = qe.apply_unitary(state, add, targets=(f"B{c1}", f"B{c2}"))
    state = qe.apply_unitary(state, add, targets=(f"B{c2}", f"B{c1}"))
    return state, f"B{c1}"


def verify_recovery(
    scheme: ThresholdSchemeSpec,
    members: Sequence[int],
    trials: int = 20,
    seed: int = 42,
) -> float:
    """Minimum recovery fidelity over seeded Haar-random secrets plus the
    maximally entangled reference input (entanglement fidelity)."""
    decoder = build_decoder(scheme, members)
    rng = np.random.default_rng(seed)
    fidelities = []

    phi = qe.maximally_entangled(scheme.q, labels=("S'", "S"))
    enc = encode(scheme, phi, secret_register="S")
    decoded = decoder.apply(enc)
    joint = qe.reduced_density(decoded, keep=("S'", decoder.secret_label))
    fidelities.append(qe.fidelity(phi, joint))

    for _ in range(trials):
        psi = qe.haar_random_state((scheme.q,), rng, labels=("S",))
        decoded = decoder.apply(encode(scheme, psi))
        recovered = qe.reduced_density(decoded, keep=decoder.secret_label)
        fidelities.append(qe.fidelity(psi, recovered))
    return float(min(fidelities))


def verify_secrecy(scheme: ThresholdSchemeSpec, subset: Sequence[int]) -> float:
    """Maximum decoupling defect of a non-qualified subset's shares.

    Reports the larger of (i) the trace distance between the joint
    reference/subset state and the product of its marginals, with a
    maximally entangled input, and (ii) the largest trace distance between
    the subset's marginals for different basis secrets.
    """
    subset = tuple(sorted(set(int(k) for k in subset)))
    if any(not 1 <= k <= scheme.K for k in subset):
        raise ValueError(f"subset {subset} must name real shares in [1, {scheme.K}]")
    if len(subset) >= scheme.t:
        raise IsQualified(f"{subset} meets threshold t={scheme.t}")
    if not subset:
        return 0.0
    labels = tuple(f"B{k}" for k in subset)

    phi = qe.maximally_entangled(scheme.q, labels=("S'", "S"))
    enc = encode(scheme, phi, secret_register="S").state
    joint = qe.reduced_density(enc, keep=("S'",) + labels)
    marg_ref = qe.reduced_density(enc, keep="S'")
    marg_sub = qe.reduced_density(enc, keep=labels)
    defect = qe.trace_distance(joint, qe.tensor(marg_ref, marg_sub))

    marginals = []
    for s in range(scheme.q):
        ket = qe.basis_state((scheme.q,), (s,), labels=("S",))
        marginals.append(qe.reduced_density(encode(scheme, ket).state, keep=labels))
    for m in marginals[1:]:
        defect = max(defect, qe.trace_distance(m, marginals[0]))
    return float(defect)
