"""Coherent information over compound families and its max-min optimization.

The central quantity is the worst-case coherent information of a compound
family at a fixed input: purify the input, send it through each member,
and take the minimum of I(A'⟩B).  Maximizing that minimum over input
states lower-bounds the achievable rate; for dephasing families it is
compared against the closed form log2(d) - max H2(q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import qudit_engine as qe
from .channels import CompoundFamily, ParamOutOfRange, tensor_power


class BudgetExceeded(ValueError):
    """Raised when an optimizer budget is not a usable positive number."""


def binary_entropy(q: float) -> float:
    """H2(q) in bits, with H2(0) = H2(1) = 0."""
    if not 0.0 <= q <= 1.0:
        raise ParamOutOfRange(f"binary entropy argument {q} outside [0, 1]")
    if q in (0.0, 1.0):
        return 0.0
    return float(-q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q))


def dephasing_capacity_closed_form(d: int, q_list: "list[float] | tuple[float, ...]") -> float:
    """log2(d) - max H2(q) over the family's dephasing parameters."""
    if d < 2:
        raise ParamOutOfRange(f"dimension {d} must be >= 2")
    if not q_list:
        raise ParamOutOfRange("need at least one dephasing parameter")
    return float(math.log2(d) - max(binary_entropy(float(q)) for q in q_list))


def closed_form_regime(d: int) -> str:
    """Whether the dephasing closed form is a capacity or only an achievable bound."""
    return "capacity" if d in (2, 3) else "lower-bound-only"


def _purified_input(rho_a: qe.DensityMatrix) -> qe.DensityMatrix:
    """Density matrix of the canonical purification on ("A'", input register)."""
    phi = qe.purify(rho_a, reference_label="A'")
    return phi.density()


def coherent_info(channel, rho_a: qe.DensityMatrix) -> float:
    """Coherent information of one channel at input rho_a, in bits."""
    if rho_a.shape.dim != channel.in_dim:
        raise qe.DimMismatch(
            f"input dimension {rho_a.shape.dim} != channel input {channel.in_dim}"
        )
    joint = _purified_input(rho_a)
    sigma = channel.apply_to(joint, target=rho_a.shape.labels[0])
    return qe.coherent_information(sigma, reference="A'")


def compound_objective(
    family: CompoundFamily, rho_a: qe.DensityMatrix
) -> tuple[float, dict[str, float]]:
    """Per-member coherent information and its minimum at a fixed input."""
    if rho_a.shape.dim != family.input_dim:
        raise qe.DimMismatch(
            f"input dimension {rho_a.shape.dim} != family input {family.input_dim}"
        )
    joint = _purified_input(rho_a)
    target = rho_a.shape.labels[0]
    per_member: dict[str, float] = {}
    for label, channel in family.members:
        sigma = channel.apply_to(joint, target=target)
        per_member[label] = qe.coherent_information(sigma, reference="A'")
    return min(per_member.values()), per_member


def product_input_rate(family: CompoundFamily, rho_a: qe.DensityMatrix, n: int) -> float:
    """(1/n) x the compound objective on the n-fold product family and input.

    Coherent information is additive on product inputs, so this equals the
    n = 1 value; the equality is asserted by tests, not assumed here.
    """
    if n not in (1, 2):
        raise ValueError(f"tensor-power level n={n} not in {{1, 2}}")
    if n == 1:
        return compound_objective(family, rho_a)[0]
    members = tuple(
        (label, tensor_power(ch, n)) for label, ch in family.members
    )
    family_n = CompoundFamily(members, family.input_dim ** n)
    shape = qe.RegisterShape.of((rho_a.shape.dim ** n,), ("A",))
    rho_n = qe.DensityMatrix(shape, np.kron(rho_a.matrix, rho_a.matrix))
    return compound_objective(family_n, rho_n)[0] / n


@dataclass(frozen=True, eq=False)
class CapacityReport:
    """Result of a max-min coherent-information computation."""

    value_bits: float
    per_member_bits: dict[str, float]
    argmax_input: qe.DensityMatrix
    method: str
    iterations: int
    evaluations: int
    tolerance: float
    seed: int
    converged: bool

    def __post_init__(self):
        worst = min(self.per_member_bits.values())
        if abs(self.value_bits - worst) > 1e-12:
            raise ValueError("value_bits must equal the per-member minimum")
        if self.value_bits > math.log2(self.argmax_input.shape.dim) + 1e-9:
            raise ValueError("value_bits exceeds log2 of the input dimension")

    def to_json_dict(self) -> dict:
        m = self.argmax_input.matrix
        return {
            "value_bits": float(self.value_bits),
            "per_member_bits": {k: float(v) for k, v in sorted(self.per_member_bits.items())},
            "argmax_input": {
                "real": [[float(x) for x in row] for row in m.real],
                "imag": [[float(x) for x in row] for row in m.imag],
            },
            "method": self.method,
            "iterations": int(self.iterations),
            "evaluations": int(self.evaluations),
            "tolerance": float(self.tolerance),
            "seed": int(self.seed),
            "converged": bool(self.converged),
        }


def _params_to_density(theta: np.ndarray, d: int) -> qe.DensityMatrix:
    """Map an unconstrained real vector to a full-rank density matrix.

    theta parametrizes a Hermitian H (diagonal first, then re/im pairs);
    the state is H² normalized, with a tiny ridge so zero parameters are
    still usable.  The map is surjective onto full-rank states.
    """
    h = np.zeros((d, d), dtype=np.complex128)
    h[np.arange(d), np.arange(d)] = theta[:d]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = theta[k] + 1j * theta[k + 1]
            h[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    m = h @ h + 1e-12 * np.eye(d)
    return qe.DensityMatrix(qe.RegisterShape.of((d,), ("A",)), m / np.trace(m))


def maximize_min_coherent_info(
    family: CompoundFamily,
    tolerance: float = 1e-6,
    max_evals: int = 6000,
    restarts: int = 3,
    seed: int = 42,
) -> CapacityReport:
    """Derivative-free multi-start search for the max-min coherent information.

    Uses Nelder-Mead (the min over members introduces kinks) on the
    unconstrained density parametrization, starting from the maximally
    mixed state plus seeded random points.  Deterministic for a fixed
    seed and options.  The default budget targets input dimension <= 9.
    """
    if max_evals < 1 or restarts < 1:
        raise BudgetExceeded(f"bad budget: max_evals={max_evals}, restarts={restarts}")
    d = family.input_dim
    rng = np.random.default_rng(seed)
    n_params = d * d
    evaluations = 0

    def objective(theta: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        value, _ = compound_objective(family, _params_to_density(theta, d))
        return -value

    starts = [np.concatenate([np.ones(d), np.zeros(n_params - d)])]
    starts += [rng.standard_normal(n_params) for _ in range(restarts - 1)]

    per_start = max(max_evals // restarts, n_params + 2)
    best_theta, best_value, best_success, iterations = None, np.inf, False, 0
    for theta0 in starts:
        res = minimize(
            objective,
            theta0,
            method="Nelder-Mead",
            options={
                "maxfev": per_start,
                "xatol": tolerance * 1e-2,
                "fatol": tolerance * 1e-2,
                "adaptive": True,
            },
        )
        iterations += int(res.nit)
        if res.fun < best_value - 1e-12:
            best_theta, best_value, best_success = res.x, res.fun, bool(res.success)

    rho = _params_to_density(best_theta, d)
    value, per_member = compound_objective(family, rho)
    return CapacityReport(
        value_bits=value,
        per_member_bits=per_member,
        argmax_input=rho,
        method="optimize",
        iterations=iterations,
        evaluations=evaluations,
        tolerance=tolerance,
        seed=seed,
        converged=best_success,
    )
