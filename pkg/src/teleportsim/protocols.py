"""End-to-end teleportation protocols and their closed-form figures of merit.

Particle layout for a three-qubit run: particle 1 carries the unknown input
and is the highest-order factor, particles 2 and 3 are the shared resource
with 3 (Bob) lowest.  A joint measurement on particles (1, 2) therefore acts
as ``kron(M, I_2)`` on the 8-dimensional state.

All protocol functions are pure; Monte Carlo helpers take an explicit seed
and derive per-block generators from a counter-based (Philox) stream keyed
by (seed, block index), so results are independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .linalg import dagger, kron, partial_trace, readonly, sqrt_psd
from .povm import discrimination_povm, is_conclusive_label
from .states import (
    BELL_LABELS,
    DensityMatrix,
    PureState,
    SchmidtPair,
    bell_state,
    fidelity,
    haar_random_qubit,
    mixed_resource,
    partially_entangled,
)

MAX_FILTER_INDEX = 2**63 - 1

_I2 = np.eye(2, dtype=complex)

# The four recovery rotations; every correction table below draws from this set.
_ROT_SWAP_NEG = np.array([[0, 1], [-1, 0]], dtype=complex)
_ROT_SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
_ROT_FLIP = np.array([[-1, 0], [0, 1]], dtype=complex)
_ROT_ID = np.array([[1, 0], [0, 1]], dtype=complex)

# Outcome -> rotation restoring the input, keyed by the Bell state of the
# shared resource.  Rotations restore the input up to a global sign.
_CORRECTIONS = {
    "psi-": {"phi+": _ROT_SWAP_NEG, "phi-": _ROT_SWAP, "psi+": _ROT_FLIP, "psi-": _ROT_ID},
    "phi+": {"phi+": _ROT_ID, "phi-": _ROT_FLIP, "psi+": _ROT_SWAP, "psi-": _ROT_SWAP_NEG},
    "phi-": {"phi+": _ROT_FLIP, "phi-": _ROT_ID, "psi+": _ROT_SWAP_NEG, "psi-": _ROT_SWAP},
    "psi+": {"phi+": _ROT_SWAP, "phi-": _ROT_SWAP_NEG, "psi+": _ROT_ID, "psi-": _ROT_FLIP},
}


def correction_table(resource: str = "psi-") -> dict[str, np.ndarray]:
    """Bell outcome -> 2x2 recovery unitary for teleporting over the given
    Bell resource state."""
    if resource not in _CORRECTIONS:
        raise ValueError(f"unknown resource label {resource!r}; expected one of {BELL_LABELS}")
    return {k: readonly(v.copy()) for k, v in _CORRECTIONS[resource].items()}


def bell_projectors() -> dict[str, np.ndarray]:
    """The four rank-one Bell projectors on two qubits."""
    out = {}
    for label in BELL_LABELS:
        v = bell_state(label).amplitudes
        out[label] = readonly(np.outer(v, v.conj()))
    return out


@dataclass(frozen=True)
class ProtocolRecord:
    """One branch of a protocol run."""

    outcome_label: str
    probability: float
    bob_state_pre: PureState | DensityMatrix | None
    correction: np.ndarray | None
    bob_state_post: PureState | DensityMatrix | None
    fidelity: float
    success: bool
    classical_bits: int = 2


@dataclass(frozen=True)
class FilterParams:
    """Local filter diag(strength, 1) parameterized by the index n = 1/strength^2."""

    n: float
    strength: float

    def __post_init__(self):
        if not (np.isfinite(self.n) and self.n >= 1.0):
            raise ValueError(f"filter index must satisfy n >= 1, got {self.n!r}")
        if not 0.0 < self.strength <= 1.0:
            raise ValueError(f"filter strength must lie in (0, 1], got {self.strength!r}")
        if abs(self.strength**2 - 1.0 / self.n) > 1e-12:
            raise ValueError("strength^2 must equal 1/n within 1e-12")

    @classmethod
    def from_n(cls, n: float) -> "FilterParams":
        return cls(n=float(n), strength=float(1.0 / np.sqrt(n)))

    @classmethod
    def from_strength(cls, strength: float) -> "FilterParams":
        return cls(n=float(1.0 / strength**2), strength=float(strength))


def _bob_conditional_pure(joint: np.ndarray, bra12: np.ndarray) -> tuple[float, PureState | None]:
    """Project particles (1, 2) of an 8-vector onto <bra12| and return the
    branch probability and Bob's normalized state."""
    bob = bra12.conj() @ joint.reshape(4, 2)
    prob = float(np.vdot(bob, bob).real)
    if prob < 1e-12:
        return 0.0, None
    return prob, PureState(bob / np.sqrt(prob))


def _record_pure(label, prob, bob, corr, target, bits) -> ProtocolRecord:
    if bob is None:
        return ProtocolRecord(label, 0.0, None, corr, None, 0.0, False, bits)
    post = PureState(corr @ bob.amplitudes) if corr is not None else bob
    return ProtocolRecord(
        outcome_label=label,
        probability=prob,
        bob_state_pre=bob,
        correction=corr,
        bob_state_post=post,
        fidelity=fidelity(target, post),
        success=True,
        classical_bits=bits,
    )


def standard_teleport(
    phi: PureState,
    resource: PureState | DensityMatrix,
    corrections: Mapping[str, np.ndarray] | None = None,
) -> list[ProtocolRecord]:
    """Teleport ``phi`` over a two-qubit resource via a Bell measurement on
    particles (1, 2) followed by the outcome-dependent recovery rotation.

    With the singlet resource every branch occurs with probability 1/4 and
    reaches fidelity one after correction.  A density-matrix resource runs
    the same protocol in density-matrix form (used after filtering).
    """
    if phi.dim != 2:
        raise ValueError("input state must be a single qubit")
    if resource.dim != 4:
        raise ValueError("resource must be a two-qubit state")
    corr = dict(correction_table("psi-")) if corrections is None else dict(corrections)

    if isinstance(resource, PureState):
        joint = kron(phi.amplitudes, resource.amplitudes)
        records = []
        for label in BELL_LABELS:
            prob, bob = _bob_conditional_pure(joint, bell_state(label).amplitudes)
            records.append(_record_pure(label, prob, bob, corr[label], phi, 2))
        return records

    rho_full = kron(np.outer(phi.amplitudes, phi.amplitudes.conj()), resource.matrix)
    records = []
    for label, proj in bell_projectors().items():
        op = kron(proj, _I2)
        sub = op @ rho_full @ op
        prob = float(np.trace(sub).real)
        if prob < 1e-12:
            records.append(ProtocolRecord(label, 0.0, None, corr[label], None, 0.0, False, 2))
            continue
        rho_bob = partial_trace(sub, (4, 2), trace_out="A") / prob
        u = corr[label]
        rho_post = u @ rho_bob @ dagger(u)
        pre = DensityMatrix(rho_bob)
        post = DensityMatrix(rho_post)
        records.append(
            ProtocolRecord(label, prob, pre, u, post, fidelity(phi, post), True, 2)
        )
    return records


def naive_phi_plus_probability(phi: PureState, s: SchmidtPair) -> float:
    """Closed-form probability of the phi+ branch when teleporting over
    a|00> + b|11> with a plain Bell measurement."""
    aa, bb = abs(phi.amplitudes[0]) ** 2, abs(phi.amplitudes[1]) ** 2
    return (aa * s.a**2 + bb * s.b**2) / 2.0


def naive_phi_plus_fidelity(phi: PureState, s: SchmidtPair) -> float:
    """Closed-form output fidelity of the phi+ branch of the same protocol."""
    aa, bb = abs(phi.amplitudes[0]) ** 2, abs(phi.amplitudes[1]) ** 2
    return (aa * s.a + bb * s.b) ** 2 / (aa * s.a**2 + bb * s.b**2)


def naive_partial_teleport(phi: PureState, s: SchmidtPair) -> list[ProtocolRecord]:
    """Bell-measurement teleportation over the partially entangled resource
    a|00> + b|11>.  Branch statistics depend on the input and the resource;
    the fidelity reaches one only at a = b."""
    return standard_teleport(phi, partially_entangled(s), corrections=correction_table("phi+"))


# Parity subspaces of particles (1, 2): "even" spans {|00>, |11>}, "odd"
# spans {|01>, |10>}.  Isometry columns fix the subspace coordinate order;
# the odd block is ordered (|10>, |01>) so the states to discriminate take
# the same (a, +-b) form in both blocks.
_EVEN_ISOMETRY = np.zeros((4, 2), dtype=complex)
_EVEN_ISOMETRY[0, 0] = 1.0
_EVEN_ISOMETRY[3, 1] = 1.0
_ODD_ISOMETRY = np.zeros((4, 2), dtype=complex)
_ODD_ISOMETRY[2, 0] = 1.0
_ODD_ISOMETRY[1, 1] = 1.0

_SUBSPACES = (("even", _EVEN_ISOMETRY), ("odd", _ODD_ISOMETRY))


def parity_projectors() -> dict[str, np.ndarray]:
    """Projectors onto the even/odd parity subspaces of two qubits."""
    return {name: readonly(t @ dagger(t)) for name, t in _SUBSPACES}


@dataclass(frozen=True)
class StagedBranch:
    subspace: str
    outcome: str
    probability: float
    post_joint: PureState | None


@dataclass(frozen=True)
class TwoStepResult:
    stage_one: tuple[tuple[str, float], ...]
    branches: tuple[StagedBranch, ...]


def two_step_bell(joint: PureState) -> TwoStepResult:
    """Bell measurement on particles (1, 2) split into a parity check
    followed by a projective measurement inside the selected subspace.

    The composed branch statistics are identical to the single-shot Bell
    measurement; the split exists so the second stage can be replaced by a
    discrimination POVM.
    """
    if joint.dim != 8:
        raise ValueError("expected a three-qubit joint state")
    psi = joint.amplitudes
    stage_one = []
    branches = []
    sub_outcomes = {"even": ("phi+", "phi-"), "odd": ("psi+", "psi-")}
    half = np.array([1.0, 1.0]) / np.sqrt(2)
    for name, t in _SUBSPACES:
        proj = kron(t @ dagger(t), _I2)
        stage_vec = proj @ psi
        stage_prob = float(np.vdot(stage_vec, stage_vec).real)
        stage_one.append((name, stage_prob))
        for sign, outcome in zip((1.0, -1.0), sub_outcomes[name]):
            coords = half * np.array([1.0, sign])
            vec12 = t @ coords
            op = kron(np.outer(vec12, vec12.conj()), _I2)
            out_vec = op @ psi
            prob = float(np.vdot(out_vec, out_vec).real)
            post = PureState(out_vec / np.sqrt(prob)) if prob > 1e-12 else None
            branches.append(StagedBranch(name, outcome, prob, post))
    return TwoStepResult(tuple(stage_one), tuple(branches))


def conclusive_success_probability(s: SchmidtPair) -> float:
    """Closed-form success probability 1 - (a^2 - b^2) of the conclusive protocol."""
    return 1.0 - (s.a**2 - s.b**2)


# Recovery rotation per (subspace, discrimination outcome); all entries are
# members of the standard four-rotation set.
_CONCLUSIVE_CORRECTIONS = {
    ("even", "conclusive+"): _ROT_ID,
    ("even", "conclusive-"): _ROT_FLIP,
    ("odd", "conclusive+"): _ROT_SWAP,
    ("odd", "conclusive-"): _ROT_SWAP_NEG,
}


def conclusive_teleport(phi: PureState, s: SchmidtPair) -> list[ProtocolRecord]:
    """Teleportation over a|00> + b|11> that is perfect whenever it succeeds.

    The Bell measurement's second stage is replaced inside each parity
    subspace by the unambiguous discrimination POVM for (a, b) vs (a, -b).
    Conclusive branches deliver the input exactly after the recovery
    rotation; inconclusive branches are flagged unsuccessful and retain
    Bob's (discarded) state for auditing.  The total success probability is
    1 - (a^2 - b^2), independent of the input.
    """
    if phi.dim != 2:
        raise ValueError("input state must be a single qubit")
    joint = kron(phi.amplitudes, partially_entangled(s).amplitudes)
    disc = discrimination_povm(s)
    kraus = [sqrt_psd(a) for a in disc.elements]
    records = []
    for name, t in _SUBSPACES:
        for label, m in zip(disc.labels, kraus):
            op = kron(t @ m @ dagger(t), _I2)
            out_vec = op @ joint
            prob = float(np.vdot(out_vec, out_vec).real)
            full_label = f"{name}:{label}"
            conclusive = is_conclusive_label(label)
            corr = _CONCLUSIVE_CORRECTIONS.get((name, label))
            if prob < 1e-12:
                records.append(
                    ProtocolRecord(full_label, 0.0, None, corr, None, 0.0, False, 3)
                )
                continue
            rho_bob = partial_trace(
                np.outer(out_vec, out_vec.conj()), (4, 2), trace_out="A"
            ) / prob
            bob = DensityMatrix(rho_bob).pure_state()
            post = PureState(corr @ bob.amplitudes) if corr is not None else bob
            records.append(
                ProtocolRecord(
                    outcome_label=full_label,
                    probability=prob,
                    bob_state_pre=bob,
                    correction=corr,
                    bob_state_post=post,
                    fidelity=fidelity(phi, post),
                    success=conclusive,
                    classical_bits=3,
                )
            )
    return records


def p_prime_after_filter(p: float, n: float) -> float:
    """Closed-form singlet fraction after a successful bilocal filter."""
    return 1.0 / (1.0 + (1.0 - p) / (n * p))


def filter_success_probability(p: float, n: float) -> float:
    """Closed-form probability that both local filters succeed."""
    return (1.0 + (n - 1.0) * p) / (n * n)


def bilocal_filter(rho: DensityMatrix, fp: FilterParams) -> tuple[DensityMatrix, float]:
    """Apply diag(strength, 1) locally on both sides and renormalize.

    Returns (post state, success probability).  On the singlet/|00> mixture
    with parameter p the output is the same mixture with parameter
    1 / (1 + (1-p)/(n p)) and the success probability is (1 + (n-1) p) / n^2.
    """
    if rho.dim != 4:
        raise ValueError("bilocal filter expects a two-qubit state")
    v = np.diag([fp.strength, 1.0]).astype(complex)
    k = kron(v, v)
    unnorm = k @ rho.matrix @ dagger(k)
    prob = float(np.trace(unnorm).real)
    if prob < 1e-15:
        raise ValueError("filter success probability vanished")
    return DensityMatrix(unnorm / prob), prob


def max_teleport_fidelity(f: float) -> float:
    """Best average teleportation fidelity (2F + 1) / 3 attainable from a
    resource with singlet fraction F."""
    if not -1e-12 <= f <= 1.0 + 1e-12:
        raise ValueError(f"singlet fraction must lie in [0, 1], got {f!r}")
    return (2.0 * f + 1.0) / 3.0


def _teleport_channel_apply(m: np.ndarray, resource: np.ndarray, corr: dict) -> np.ndarray:
    """Action of the teleportation channel on an arbitrary 2x2 operator."""
    full = kron(m, resource)
    out = np.zeros((2, 2), dtype=complex)
    for label, proj in bell_projectors().items():
        op = kron(proj, _I2)
        sub = op @ full @ op
        rho_bob = partial_trace(sub, (4, 2), trace_out="A")
        u = corr[label]
        out += u @ rho_bob @ dagger(u)
    return out


def teleport_entanglement_fidelity(resource: DensityMatrix) -> float:
    """Entanglement fidelity of the standard teleportation channel over the
    given resource, evaluated by sending half of a maximally entangled pair."""
    corr = correction_table("psi-")
    phi_plus = bell_state("phi+").amplitudes
    out = np.zeros((4, 4), dtype=complex)
    basis = np.eye(2, dtype=complex)
    # (channel (x) id) applied to |phi+><phi+| assembled term by term.
    for i in range(2):
        for j in range(2):
            e_ij = np.outer(basis[i], basis[j].conj())
            out += 0.5 * kron(_teleport_channel_apply(e_ij, resource.matrix, corr), e_ij)
    return float(np.vdot(phi_plus, out @ phi_plus).real)


def teleport_average_fidelity(resource: DensityMatrix) -> float:
    """Average fidelity of standard teleportation over the resource, uniform
    over pure inputs; equals (2 F_e + 1) / 3 with F_e the entanglement
    fidelity, so the average reduces to a fixed weighted trace."""
    return max_teleport_fidelity(teleport_entanglement_fidelity(resource))


def required_filter_index(p: float, epsilon: float) -> int:
    """Smallest integer n whose filtered singlet fraction pushes the average
    teleportation fidelity bound (2F + 1)/3 above 1 - epsilon."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    f_req = 1.0 - 1.5 * epsilon
    if f_req <= p:
        return 1
    if f_req >= 1.0:  # epsilon below float resolution
        raise ValueError(
            f"epsilon={epsilon!r} requires a filter index beyond {MAX_FILTER_INDEX}"
        )
    n_real = f_req * (1.0 - p) / (p * (1.0 - f_req))
    if not np.isfinite(n_real) or n_real > MAX_FILTER_INDEX:
        raise ValueError(
            f"epsilon={epsilon!r} requires a filter index beyond {MAX_FILTER_INDEX}"
        )
    n = max(1, int(np.ceil(n_real)))
    while p_prime_after_filter(p, n) < f_req:  # guard against ceil rounding
        n += 1
    return n


@dataclass(frozen=True)
class QuasiConclusiveResult:
    filter_params: FilterParams
    n: int
    p_prime: float
    filter_success_prob: float
    average_fidelity: float
    records: tuple[ProtocolRecord, ...]

    @property
    def overall_success_prob(self) -> float:
        return self.filter_success_prob


def quasi_conclusive_teleport(phi: PureState, p: float, epsilon: float) -> QuasiConclusiveResult:
    """Filtered teleportation over the singlet/|00> mixture.

    Picks the minimal filter index n whose post-filter singlet fraction
    yields average fidelity at least 1 - epsilon, applies the bilocal filter
    (two-way confirmation assumed free), then teleports over the filtered
    resource.  Higher target fidelity costs success probability: the filter
    success probability decreases toward zero as epsilon shrinks.
    """
    n = required_filter_index(p, epsilon)
    fp = FilterParams.from_n(n)
    post, success = bilocal_filter(mixed_resource(p), fp)
    p_prime = fidelity(bell_state("psi-"), post)
    records = standard_teleport(phi, post)
    return QuasiConclusiveResult(
        filter_params=fp,
        n=n,
        p_prime=p_prime,
        filter_success_prob=success,
        average_fidelity=teleport_average_fidelity(post),
        records=tuple(records),
    )


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator keyed by (seed, index); deterministic and
    safe to evaluate in any order."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class ConclusiveMonteCarlo:
    trials: int
    successes: int
    wrong_outcomes: int
    empirical_rate: float
    min_conclusive_fidelity: float


def conclusive_monte_carlo(
    s: SchmidtPair, trials: int, seed: int, blocks: int = 200
) -> ConclusiveMonteCarlo:
    """Sample the conclusive protocol ``trials`` times.

    Inputs are drawn Haar-uniformly once per block; outcomes are sampled by
    inverse CDF over the branch probabilities.  A wrong outcome is a sampled
    conclusive branch whose post-correction fidelity falls below 1 - 1e-10.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    blocks = min(blocks, trials)
    sizes = [trials // blocks + (1 if i < trials % blocks else 0) for i in range(blocks)]
    successes = 0
    wrong = 0
    min_fid = 1.0
    for b, size in enumerate(sizes):
        rng = trial_rng(seed, b)
        phi = haar_random_qubit(rng)
        records = conclusive_teleport(phi, s)
        probs = np.array([r.probability for r in records])
        cum = np.cumsum(probs)
        draws = rng.random(size) * cum[-1]
        idx = np.searchsorted(cum, draws, side="right")
        idx = np.minimum(idx, len(records) - 1)
        for k in idx:
            r = records[k]
            if r.success:
                successes += 1
                min_fid = min(min_fid, r.fidelity)
                if r.fidelity < 1.0 - 1e-10:
                    wrong += 1
    return ConclusiveMonteCarlo(
        trials=trials,
        successes=successes,
        wrong_outcomes=wrong,
        empirical_rate=successes / trials,
        min_conclusive_fidelity=min_fid,
    )
