"""Kraus channels, broadcast channels, and compound families.

A compound family is an indexed set of channels sharing one input; for
secret sharing the members are the marginal channels from the dealer to
each qualified set of receivers (one virtual receiver per qualified set).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qudit_engine as qe
from .access_structure import AccessStructure, from_threshold

_COMPLETE_TOL = 1e-10


class ParamOutOfRange(ValueError):
    """Raised for channel parameters outside their allowed interval."""


class UnknownKind(ValueError):
    """Raised for unrecognized channel kinds in family descriptors."""


class StructureMismatch(ValueError):
    """Raised when an access structure does not match a broadcast output."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A CPTP map given by Kraus operators from one input register to `out_shape`."""

    kraus_ops: tuple[np.ndarray, ...]
    in_dim: int
    out_shape: qe.RegisterShape

    def __post_init__(self):
        ops = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus_ops)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        dout = self.out_shape.dim
        for k in ops:
            if k.shape != (dout, self.in_dim):
                raise qe.DimMismatch(
                    f"Kraus operator shape {k.shape} != ({dout}, {self.in_dim})"
                )
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(self.in_dim))) > _COMPLETE_TOL:
            raise ValueError("Kraus operators do not satisfy completeness")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)

    def apply_to(self, rho, target) -> qe.DensityMatrix:
        return qe.apply_channel(rho, self, targets=target)


@dataclass(frozen=True)
class MarginalChannel:
    """A broadcast channel followed by discarding all but the `keep` outputs.

    Realized operationally (apply then partial-trace); no explicit Kraus
    set is constructed.
    """

    broadcast: KrausChannel
    keep: tuple[str, ...]

    def __post_init__(self):
        keep = tuple(str(x) for x in self.keep)
        unknown = set(keep) - set(self.broadcast.out_shape.labels)
        if not keep or unknown:
            raise StructureMismatch(
                f"keep set {keep} must name broadcast outputs {self.broadcast.out_shape.labels}"
            )
        object.__setattr__(self, "keep", keep)

    @property
    def in_dim(self) -> int:
        return self.broadcast.in_dim

    @property
    def out_shape(self) -> qe.RegisterShape:
        idx = [self.broadcast.out_shape.index(l) for l in self.keep]
        return self.broadcast.out_shape.subshape(sorted(idx))

    def apply_to(self, rho, target) -> qe.DensityMatrix:
        full = self.broadcast.apply_to(rho, target)
        discard = set(self.broadcast.out_shape.labels) - set(self.keep)
        keep_labels = [l for l in full.shape.labels if l not in discard]
        return qe.partial_trace(full, keep=keep_labels)


def identity_channel(d: int, label: str = "B") -> KrausChannel:
    return KrausChannel(
        (np.eye(d, dtype=np.complex128),), d, qe.RegisterShape.of((d,), (label,))
    )


def dephasing(d: int, q: float, label: str = "B") -> KrausChannel:
    """rho ↦ (1-q) rho + q Z rho Z† with Z the clock operator."""
    if d < 2:
        raise ParamOutOfRange(f"dimension {d} must be >= 2")
    if not 0.0 <= q <= 1.0:
        raise ParamOutOfRange(f"dephasing parameter {q} outside [0, 1]")
    ops = (
        np.sqrt(1.0 - q) * np.eye(d, dtype=np.complex128),
        np.sqrt(q) * qe.weyl_clock(d),
    )
    return KrausChannel(ops, d, qe.RegisterShape.of((d,), (label,)))


def depolarizing(d: int, p: float, label: str = "B") -> KrausChannel:
    """rho ↦ (1-p) rho + p I/d, via the uniform Weyl twirl."""
    if d < 2:
        raise ParamOutOfRange(f"dimension {d} must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ParamOutOfRange(f"depolarizing parameter {p} outside [0, 1]")
    x, z = qe.weyl_shift(d), qe.weyl_clock(d)
    ops = [np.sqrt(1.0 - p) * np.eye(d, dtype=np.complex128)]
    for a in range(d):
        for b in range(d):
            ops.append(
                (np.sqrt(p) / d)
                * (np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b))
            )
    return KrausChannel(tuple(ops), d, qe.RegisterShape.of((d,), (label,)))


def tensor_power(ch: KrausChannel, n: int) -> KrausChannel:
    """The n-fold product channel; output labels gain a per-copy suffix."""
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    if n == 1:
        return ch
    dims = ch.out_shape.dims * n
    labels = tuple(
        f"{l}.{i}" for i in range(1, n + 1) for l in ch.out_shape.labels
    )
    out_shape = qe.RegisterShape(dims, labels)
    acc = list(ch.kraus_ops)
    for _ in range(n - 1):
        acc = [np.kron(a, b) for a in acc for b in ch.kraus_ops]
    return KrausChannel(tuple(acc), ch.in_dim ** n, out_shape)


def broadcast_product(per_share: Sequence[KrausChannel]) -> KrausChannel:
    """Independent per-share channels combined into one broadcast channel.

    Share k's output register is labeled Bk.
    """
    if not per_share:
        raise ValueError("need at least one share channel")
    dims: tuple[int, ...] = ()
    for ch in per_share:
        if ch.out_shape.n != 1:
            raise StructureMismatch("per-share channels must have one output register")
        dims = dims + ch.out_shape.dims
    labels = tuple(f"B{k}" for k in range(1, len(per_share) + 1))
    in_dim = int(np.prod([ch.in_dim for ch in per_share]))
    ops = [np.ones((1, 1), dtype=np.complex128)]
    for ch in per_share:
        ops = [np.kron(a, k) for a in ops for k in ch.kraus_ops]
    return KrausChannel(tuple(ops), in_dim, qe.RegisterShape(dims, labels))


@dataclass(frozen=True)
class CompoundFamily:
    """An ordered, label-distinct family of channels with one common input."""

    members: tuple[tuple[str, "KrausChannel | MarginalChannel"], ...]
    input_dim: int

    def __post_init__(self):
        if not self.members:
            raise ValueError("a compound family needs at least one member")
        labels = [label for label, _ in self.members]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate member labels in {labels}")
        for label, ch in self.members:
            if ch.in_dim != self.input_dim:
                raise qe.DimMismatch(
                    f"member {label!r} input {ch.in_dim} != family input {self.input_dim}"
                )

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.members)

    def channel(self, label: str):
        for l, ch in self.members:
            if l == label:
                return ch
        raise KeyError(label)


def compound_from_access(
    broadcast: KrausChannel,
    access: AccessStructure,
    all_qualified: bool = False,
) -> CompoundFamily:
    """One virtual receiver per qualified set of the broadcast's outputs.

    By default the family holds the minimal qualified sets plus the full
    set; with `all_qualified` every qualified set becomes a member.
    """
    if broadcast.out_shape.n != access.K:
        raise StructureMismatch(
            f"broadcast has {broadcast.out_shape.n} outputs, access structure has K={access.K}"
        )
    if all_qualified:
        subsets = access.qualified_sets()
    else:
        subsets = access.minimal_qualified()
        full = frozenset(range(1, access.K + 1))
        if access.is_qualified(full) and full not in subsets:
            subsets.append(full)
    members = []
    for subset in subsets:
        label = "".join(str(k) for k in sorted(subset))
        keep = tuple(broadcast.out_shape.labels[k - 1] for k in sorted(subset))
        members.append((label, MarginalChannel(broadcast, keep)))
    return CompoundFamily(tuple(members), broadcast.in_dim)


def direct_family(d: int, specs: Sequence[dict]) -> CompoundFamily:
    """Build a family from per-member descriptors {label, kind, params}."""
    if not specs:
        raise ValueError("a compound family needs at least one member")
    members = []
    for i, spec in enumerate(specs):
        label = str(spec.get("label", f"m{i}"))
        kind = spec.get("kind")
        if kind == "identity":
            ch = identity_channel(d)
        elif kind == "dephasing":
            ch = dephasing(d, float(spec["q"]))
        elif kind == "depolarizing":
            ch = depolarizing(d, float(spec["p"]))
        else:
            raise UnknownKind(f"unsupported channel kind {kind!r}")
        members.append((label, ch))
    return CompoundFamily(tuple(members), d)


def family_from_descriptor(obj: dict) -> CompoundFamily:
    """Parse the JSON family descriptor.

    Either {"d": int, "members": [{"label", "kind", ...}, ...]} or
    {"broadcast": {"d": int, "per_share": [{"kind", ...}, ...]},
     "access": {"threshold": [t, K]} | {"K", "qualified"}}.
    """
    if "members" in obj:
        return direct_family(int(obj["d"]), obj["members"])
    if "broadcast" in obj:
        b = obj["broadcast"]
        d = int(b["d"])
        per_share = []
        for spec in b["per_share"]:
            kind = spec.get("kind")
            if kind == "identity":
                per_share.append(identity_channel(d))
            elif kind == "dephasing":
                per_share.append(dephasing(d, float(spec["q"])))
            elif kind == "depolarizing":
                per_share.append(depolarizing(d, float(spec["p"])))
            else:
                raise UnknownKind(f"unsupported channel kind {kind!r}")
        acc = obj["access"]
        if "threshold" in acc:
            t, K = acc["threshold"]
            access = from_threshold(int(t), int(K))
        else:
            from .access_structure import from_descriptor

            access = from_descriptor(acc)
        return compound_from_access(
            broadcast_product(per_share), access, bool(obj.get("all_qualified", False))
        )
    raise ValueError("family descriptor needs 'members' or 'broadcast'")
