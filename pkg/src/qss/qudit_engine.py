"""Dense, exact simulation of products of d-level quantum systems.

Pure states and density matrices carry a RegisterShape (per-register
dimensions plus string labels) so operations can address registers by
name.  All values are immutable and every operation is a pure function;
rates and entropies are in bits (base-2 logarithms) throughout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

AMPLITUDE_CAP = 1 << 20

_NORM_TOL = 1e-12
_HERM_TOL = 1e-10
_EIG_FLOOR = -1e-10
_TRACE_TOL = 1e-10


class ShapeCapExceeded(ValueError):
    """Raised when a composite register would exceed the amplitude cap."""


class EmptyKeepSet(ValueError):
    """Raised when a partial trace keeps no registers."""


class NotUnitary(ValueError):
    """Raised when a gate matrix fails the unitarity check."""


class NotBijective(ValueError):
    """Raised when a classical map is not a bijection on basis labels."""


class DimMismatch(ValueError):
    """Raised when operator and register dimensions disagree."""


class ShapeMismatch(ValueError):
    """Raised when two states do not share compatible shapes."""


Registers = "int | str | Sequence[int | str] | None"  # register selector alias


@dataclass(frozen=True)
class RegisterShape:
    """Ordered local dimensions plus unique labels for a register product."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(str(x) for x in self.labels)
        if not dims:
            raise ShapeMismatch("a shape needs at least one register")
        if any(d < 2 for d in dims):
            raise ShapeMismatch(f"register dimensions {dims} must all be >= 2")
        if len(labels) != len(dims):
            raise ShapeMismatch("one label per register required")
        if len(set(labels)) != len(labels):
            raise ShapeMismatch(f"duplicate register labels in {labels}")
        dim = 1
        for d in dims:
            dim *= d
        if dim > AMPLITUDE_CAP:
            raise ShapeCapExceeded(f"total dimension {dim} exceeds {AMPLITUDE_CAP}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, dims: Sequence[int], labels: Sequence[str] | None = None) -> "RegisterShape":
        dims = tuple(int(d) for d in dims)
        if labels is None:
            labels = tuple(f"q{i}" for i in range(len(dims)))
        return cls(dims, tuple(labels))

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def n(self) -> int:
        return len(self.dims)

    def index(self, reg: int | str) -> int:
        if isinstance(reg, str):
            try:
                return self.labels.index(reg)
            except ValueError:
                raise ShapeMismatch(f"no register labeled {reg!r} in {self.labels}") from None
        i = int(reg)
        if not 0 <= i < self.n:
            raise ShapeMismatch(f"register index {i} out of range for {self.n} registers")
        return i

    def resolve(self, regs: "Registers") -> list[int]:
        """Normalize a register selector to an ordered index list."""
        if regs is None:
            return list(range(self.n))
        if isinstance(regs, (int, str)):
            regs = [regs]
        idx = [self.index(r) for r in regs]
        if len(set(idx)) != len(idx):
            raise ShapeMismatch("repeated registers in selector")
        return idx

    def subshape(self, indices: Sequence[int]) -> "RegisterShape":
        return RegisterShape(
            tuple(self.dims[i] for i in indices),
            tuple(self.labels[i] for i in indices),
        )

    def subdim(self, indices: Sequence[int]) -> int:
        return int(np.prod([self.dims[i] for i in indices], dtype=np.int64)) if indices else 1


def _frozen_array(values, dtype=np.complex128) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized amplitude vector over a register product."""

    shape: RegisterShape
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.shape.dim:
            raise ShapeMismatch(
                f"{amps.size} amplitudes for total dimension {self.shape.dim}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ShapeMismatch(f"state norm {norm} is not 1")
        object.__setattr__(self, "amplitudes", _frozen_array(amps))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A Hermitian, positive-semidefinite, unit-trace matrix over a register product."""

    shape: RegisterShape
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        d = self.shape.dim
        if m.shape != (d, d):
            raise ShapeMismatch(f"matrix shape {m.shape} != ({d}, {d})")
        if np.max(np.abs(m - m.conj().T)) > _HERM_TOL:
            raise ShapeMismatch("matrix is not Hermitian within tolerance")
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ShapeMismatch(f"trace {tr} is not 1")
        if float(np.min(np.linalg.eigvalsh(m))) < _EIG_FLOOR:
            raise ShapeMismatch("matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen_array(m))

    def eigenvalues(self) -> np.ndarray:
        return np.clip(np.linalg.eigvalsh(self.matrix), 0.0, None)


State = "PureState | DensityMatrix"


def basis_state(dims: Sequence[int], index: Sequence[int], labels: Sequence[str] | None = None) -> PureState:
    """Computational basis state |index⟩ on the given register dims."""
    shape = RegisterShape.of(dims, labels)
    amps = np.zeros(shape.dim, dtype=np.complex128)
    amps[int(np.ravel_multi_index(tuple(index), shape.dims))] = 1.0
    return PureState(shape, amps)


def haar_random_state(
    dims: Sequence[int], rng: np.random.Generator, labels: Sequence[str] | None = None
) -> PureState:
    """Haar-random pure state via a normalized complex Gaussian vector."""
    shape = RegisterShape.of(dims, labels)
    vec = rng.standard_normal(shape.dim) + 1j * rng.standard_normal(shape.dim)
    return PureState(shape, vec / np.linalg.norm(vec))


def random_density(d: int, rng: np.random.Generator, label: str = "A") -> DensityMatrix:
    """A full-rank random density matrix (Wishart-style G G† normalized)."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    h = g @ g.conj().T
    return DensityMatrix(RegisterShape.of((d,), (label,)), h / np.trace(h))


def tensor(a, b):
    """Kronecker composition; labels must be disjoint."""
    if isinstance(a, PureState) and isinstance(b, PureState):
        shape = RegisterShape(a.shape.dims + b.shape.dims, a.shape.labels + b.shape.labels)
        return PureState(shape, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        shape = RegisterShape(a.shape.dims + b.shape.dims, a.shape.labels + b.shape.labels)
        return DensityMatrix(shape, np.kron(a.matrix, b.matrix))
    raise ShapeMismatch("tensor requires two states of the same kind")


def permute(state, order: "Registers"):
    """Reorder registers; `order` must name every register exactly once."""
    idx = state.shape.resolve(order)
    if len(idx) != state.shape.n:
        raise ShapeMismatch("permutation must mention every register")
    new_shape = state.shape.subshape(idx)
    if isinstance(state, PureState):
        t = state.amplitudes.reshape(state.shape.dims).transpose(idx)
        return PureState(new_shape, t.reshape(-1))
    n = state.shape.n
    axes = idx + [n + i for i in idx]
    m = state.matrix.reshape(state.shape.dims + state.shape.dims).transpose(axes)
    return DensityMatrix(new_shape, m.reshape(new_shape.dim, new_shape.dim))


def reduced_density(psi: PureState, keep: "Registers") -> DensityMatrix:
    """Marginal of a pure state, computed without forming the global density matrix."""
    idx = psi.shape.resolve(keep)
    if not idx:
        raise EmptyKeepSet("keep set must be nonempty")
    idx = sorted(idx)
    rest = [i for i in range(psi.shape.n) if i not in idx]
    t = psi.amplitudes.reshape(psi.shape.dims).transpose(idx + rest)
    a = t.reshape(psi.shape.subdim(idx), -1)
    return DensityMatrix(psi.shape.subshape(idx), a @ a.conj().T)


def partial_trace(rho, keep: "Registers") -> DensityMatrix:
    """Marginal on `keep` (ascending original order); trace is preserved."""
    if isinstance(rho, PureState):
        return reduced_density(rho, keep)
    idx = rho.shape.resolve(keep)
    if not idx:
        raise EmptyKeepSet("keep set must be nonempty")
    idx = sorted(idx)
    rest = [i for i in range(rho.shape.n) if i not in idx]
    n = rho.shape.n
    axes = idx + rest + [n + i for i in idx] + [n + i for i in rest]
    dk = rho.shape.subdim(idx)
    dr = rho.shape.subdim(rest)
    m = rho.matrix.reshape(rho.shape.dims + rho.shape.dims).transpose(axes)
    m = m.reshape(dk, dr, dk, dr)
    return DensityMatrix(rho.shape.subshape(idx), np.einsum("aibi->ab", m))


def _check_unitary(u: np.ndarray, dim: int):
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (dim, dim):
        raise DimMismatch(f"gate shape {u.shape} does not match target dimension {dim}")
    if np.max(np.abs(u @ u.conj().T - np.eye(dim))) > _HERM_TOL:
        raise NotUnitary("gate fails the unitarity check")
    return u


def apply_unitary(state, u: np.ndarray, targets: "Registers" = None):
    """Apply `u` on the target registers (in the given order), identity elsewhere."""
    idx = state.shape.resolve(targets)
    dt = state.shape.subdim(idx)
    u = _check_unitary(u, dt)
    n = state.shape.n
    rest = [i for i in range(n) if i not in idx]
    perm = idx + rest
    inv = np.argsort(perm)
    if isinstance(state, PureState):
        t = state.amplitudes.reshape(state.shape.dims).transpose(perm).reshape(dt, -1)
        out = (u @ t).reshape([state.shape.dims[i] for i in perm]).transpose(inv)
        return PureState(state.shape, out.reshape(-1))
    axes = perm + [n + i for i in perm]
    dr = state.shape.subdim(rest)
    m = state.matrix.reshape(state.shape.dims + state.shape.dims).transpose(axes)
    m = m.reshape(dt, dr, dt, dr)
    out = np.einsum("ab,budv,cd->aucv", u, m, u.conj())
    out = out.reshape([state.shape.dims[i] for i in perm] * 2)
    out = out.transpose(list(inv) + [n + i for i in inv])
    return DensityMatrix(state.shape, out.reshape(state.shape.dim, state.shape.dim))


def classical_reversible_unitary(
    f: Callable[[tuple[int, ...]], Sequence[int]], dims: Sequence[int]
) -> np.ndarray:
    """Permutation matrix |v⟩ ↦ |f(v)⟩ for a bijection f on basis-label tuples."""
    dims = tuple(int(d) for d in dims)
    size = int(np.prod(dims))
    u = np.zeros((size, size), dtype=np.complex128)
    seen = set()
    for v in itertools.product(*[range(d) for d in dims]):
        w = tuple(int(x) for x in f(v))
        if len(w) != len(dims) or any(not 0 <= w[i] < dims[i] for i in range(len(dims))):
            raise NotBijective(f"image {w} leaves the label set of {dims}")
        flat = int(np.ravel_multi_index(w, dims))
        seen.add(flat)
        u[flat, int(np.ravel_multi_index(v, dims))] = 1.0
    if len(seen) != size:
        raise NotBijective("map is not a bijection on basis labels")
    return u


def apply_channel(rho, channel, targets: "Registers" = None) -> DensityMatrix:
    """Apply a Kraus channel to the target registers of a density matrix.

    The channel's output registers replace the target block (inserted at the
    position of the first target register); untouched registers keep their
    labels and relative order.
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    idx = rho.shape.resolve(targets)
    din = rho.shape.subdim(idx)
    if din != channel.in_dim:
        raise DimMismatch(f"target dimension {din} != channel input {channel.in_dim}")
    out_shape: RegisterShape = channel.out_shape
    n = rho.shape.n
    rest = [i for i in range(n) if i not in idx]
    perm = idx + rest
    axes = perm + [n + i for i in perm]
    dr = rho.shape.subdim(rest)
    dout = out_shape.dim
    m = rho.matrix.reshape(rho.shape.dims + rho.shape.dims).transpose(axes)
    m = m.reshape(din, dr, din, dr)
    acc = np.zeros((dout, dr, dout, dr), dtype=np.complex128)
    for k in channel.kraus_ops:
        acc += np.einsum("ab,budv,cd->aucv", k, m, np.conj(k))

    rest_labels = [rho.shape.labels[i] for i in rest]
    if set(out_shape.labels) & set(rest_labels):
        raise ShapeMismatch("channel output labels collide with untouched registers")
    # Rebuild register order: output block sits where the first target was.
    insert_at = sum(1 for i in rest if i < min(idx))
    dims = [rho.shape.dims[i] for i in rest]
    labels = list(rest_labels)
    front = list(range(out_shape.n))
    tail = list(range(out_shape.n, out_shape.n + len(rest)))
    order = tail[:insert_at] + front + tail[insert_at:]
    new_shape = RegisterShape(
        tuple(([*out_shape.dims] + dims)[i] for i in order),
        tuple(([*out_shape.labels] + labels)[i] for i in order),
    )
    full = acc.reshape(tuple(out_shape.dims) + tuple(dims) + tuple(out_shape.dims) + tuple(dims))
    total = out_shape.n + len(rest)
    full = full.transpose(order + [total + i for i in order])
    return DensityMatrix(new_shape, full.reshape(new_shape.dim, new_shape.dim))


def _sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def _as_matrix(state) -> np.ndarray:
    return state.density().matrix if isinstance(state, PureState) else state.matrix


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity: the squared trace norm of sqrt(rho) sqrt(sigma)."""
    if rho.shape.dims != sigma.shape.dims:
        raise ShapeMismatch(f"dims {rho.shape.dims} != {sigma.shape.dims}")
    if isinstance(rho, PureState):
        vec = rho.amplitudes
        val = float(np.real(np.vdot(vec, _as_matrix(sigma) @ vec)))
    elif isinstance(sigma, PureState):
        vec = sigma.amplitudes
        val = float(np.real(np.vdot(vec, rho.matrix @ vec)))
    else:
        sv = np.linalg.svd(_sqrtm_psd(rho.matrix) @ _sqrtm_psd(sigma.matrix), compute_uv=False)
        val = float(np.sum(sv) ** 2)
    return min(max(val, 0.0), 1.0)


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of rho - sigma."""
    if rho.shape.dims != sigma.shape.dims:
        raise ShapeMismatch(f"dims {rho.shape.dims} != {sigma.shape.dims}")
    w = np.linalg.eigvalsh(_as_matrix(rho) - _as_matrix(sigma))
    return float(0.5 * np.sum(np.abs(w)))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits with the 0 log 0 = 0 convention."""
    if isinstance(rho, PureState):
        return 0.0
    w = rho.eigenvalues()
    w = w[w > 0.0]
    return float(-np.sum(w * np.log2(w)))


def coherent_information(rho: DensityMatrix, reference: "Registers") -> float:
    """I(A'⟩B) = H(B) - H(A'B), with A' the `reference` registers."""
    ref_idx = set(rho.shape.resolve(reference))
    b_idx = [i for i in range(rho.shape.n) if i not in ref_idx]
    if not b_idx or not ref_idx:
        raise ShapeMismatch("the cut must leave registers on both sides")
    return von_neumann_entropy(partial_trace(rho, b_idx)) - von_neumann_entropy(rho)


def maximally_entangled(d: int, labels: Sequence[str] = ("S'", "S")) -> PureState:
    """|Φ_d⟩ = (1/√d) Σ_j |j⟩|j⟩ on two d-dimensional registers."""
    if d < 2:
        raise DimMismatch("entanglement needs local dimension >= 2")
    amps = np.zeros((d, d), dtype=np.complex128)
    amps[np.arange(d), np.arange(d)] = 1.0 / np.sqrt(d)
    return PureState(RegisterShape.of((d, d), labels), amps.reshape(-1))


def purify(rho: DensityMatrix, reference_label: str = "R") -> PureState:
    """Canonical purification with the reference register first."""
    if rho.shape.n != 1:
        raise ShapeMismatch("purify expects a single-register density matrix")
    d = rho.shape.dim
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w, 0.0, None)
    amps = (np.sqrt(w)[None, :] * v).T  # amps[i, k] = sqrt(w_i) v[k, i]
    amps = amps.reshape(-1)
    amps = amps / np.linalg.norm(amps)
    shape = RegisterShape((d,) + rho.shape.dims, (reference_label,) + rho.shape.labels)
    return PureState(shape, amps)


def weyl_shift(d: int) -> np.ndarray:
    """Generalized X: |j⟩ ↦ |j+1 mod d⟩."""
    x = np.zeros((d, d), dtype=np.complex128)
    x[(np.arange(d) + 1) % d, np.arange(d)] = 1.0
    return x


def weyl_clock(d: int) -> np.ndarray:
    """Generalized Z: diag(1, ω, ..., ω^(d-1)) with ω = exp(2πi/d)."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


def teleport(rho_in, resource: PureState | None = None) -> DensityMatrix:
    """Ideal qudit teleportation, deterministically summed over all d² outcomes.

    Measures the input and one half of the maximally entangled resource in
    the generalized Bell basis, applies the Weyl correction Z^b X^(-a) per
    outcome, and returns the averaged corrected output.
    """
    if isinstance(rho_in, PureState):
        rho_in = rho_in.density()
    if rho_in.shape.n != 1:
        raise DimMismatch("teleport expects a single-register input")
    d = rho_in.shape.dim
    canonical = maximally_entangled(d, labels=("R1", "R2"))
    if resource is None:
        resource = canonical
    else:
        if resource.shape.dims != (d, d):
            raise DimMismatch(f"resource dims {resource.shape.dims} != ({d}, {d})")
        if abs(abs(np.vdot(resource.amplitudes, canonical.amplitudes)) - 1.0) > 1e-10:
            raise DimMismatch("resource is not the canonical maximally entangled state")
    joint = np.kron(rho_in.matrix, canonical.density().matrix)
    joint4 = joint.reshape(d * d, d, d * d, d)
    x, z = weyl_shift(d), weyl_clock(d)
    omega = np.exp(2j * np.pi / d)
    out = np.zeros((d, d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            bell = np.zeros((d, d), dtype=np.complex128)
            for j in range(d):
                bell[j, (j + a) % d] = omega ** (j * b) / np.sqrt(d)
            bell = bell.reshape(-1)
            collapsed = np.einsum("u,urvs,v->rs", bell.conj(), joint4, bell)
            corr = np.linalg.matrix_power(z, b) @ np.linalg.matrix_power(x, (d - a) % d)
            out += corr @ collapsed @ corr.conj().T
    return DensityMatrix(rho_in.shape, out)
