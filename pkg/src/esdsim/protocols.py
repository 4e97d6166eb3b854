"""End-to-end protocols built on the discrimination measurement.

Teleportation: one party holds an arbitrary path-encoded qutrit (time-bin a)
plus the b/c photons of a shared entangled triple, runs the discrimination
measurement on those three photons, and announces the result; the other party
recovers the input with one of two diagonal path rotations.

MDI-QKD: Alice encodes a value into a two-photon path-entangled pair, Bob
into a single photon (path basis or its MUB), an untrusted relay measures the
joint three-photon state and announces the outcome, and matched-basis
conclusive trials become the sifted key.

The security-analysis (EDP) picture is implemented as well: conditioning the
shared four-photon system on each conclusive relay outcome and applying the
published correction must leave the two parties holding the maximally
entangled pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

import numpy as np

from .discrimination import (
    POSTSELECT_FAIL,
    DetectionPattern,
    DiscriminationOutcome,
    ParityModel,
    classify,
    derive_rng,
    detect_distribution,
    mc_trial,
    parity_postselect,
)
from .fock import (
    FockBasisState,
    ModeLabel,
    PureState,
    apply_phases,
    inner_product,
    partial_project,
    superpose,
    tensor,
)
from .optics import apply_mode_unitary, build_dft, identity_padded
from .states import OMEGA, build_alice_pair, build_minor, build_psi, mub_state

ESD_PORTS = (0, 1, 2)
BOB_PORTS = (3, 4, 5)

COMPUTATIONAL = "computational"
MUB = "mub"


@dataclass(frozen=True)
class TeleportTarget:
    """An arbitrary normalized path-encoded qutrit, amplitudes (a0, a1, a2)."""

    alphas: tuple[complex, complex, complex]

    def __post_init__(self):
        if len(self.alphas) != 3:
            raise ValueError("target needs exactly three amplitudes")
        norm_sq = sum(abs(a) ** 2 for a in self.alphas)
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(f"target is not normalized (norm^2 = {norm_sq})")

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "TeleportTarget":
        vec = rng.normal(size=3) + 1j * rng.normal(size=3)
        vec /= np.linalg.norm(vec)
        return cls(tuple(complex(a) for a in vec))

    def state(self, ports: Sequence[int]) -> PureState:
        return PureState(
            {
                FockBasisState({ModeLabel(0, ports[j]): 1}): self.alphas[j]
                for j in range(3)
                if self.alphas[j] != 0
            }
        )


class CorrectionOp(Enum):
    """Diagonal path rotations announced-outcome -> receiver's fix-up.

    ROTATE_1 = diag(1, w^2, w) and ROTATE_2 = diag(1, w, w^2) with
    w = exp(2 pi i / 3); ROTATE_2 is the square of ROTATE_1.
    """

    IDENTITY = 0
    ROTATE_1 = 1
    ROTATE_2 = 2

    @property
    def phases(self) -> tuple[complex, complex, complex]:
        if self is CorrectionOp.IDENTITY:
            return (1 + 0j, 1 + 0j, 1 + 0j)
        if self is CorrectionOp.ROTATE_1:
            return (1 + 0j, OMEGA**2, OMEGA)
        return (1 + 0j, OMEGA, OMEGA**2)


def correction_for(outcome_index: int) -> CorrectionOp:
    return (CorrectionOp.IDENTITY, CorrectionOp.ROTATE_1, CorrectionOp.ROTATE_2)[outcome_index]


def apply_correction(state: PureState, op: CorrectionOp, ports: Sequence[int]) -> PureState:
    """Apply the per-port phases of `op` to whatever photons sit on `ports`."""
    ports = tuple(ports)
    phases = op.phases

    def phase_of(mode: ModeLabel) -> complex:
        return phases[ports.index(mode.port)] if mode.port in ports else 1 + 0j

    return apply_phases(state, phase_of)


# -- teleportation ------------------------------------------------------------


@dataclass(frozen=True)
class TeleportBranch:
    """One fine-grained measurement record: probability is conditional on the
    parity post-selection having passed."""

    probability: float
    outcome: DiscriminationOutcome
    bob_state: PureState
    fidelity: float


@dataclass(frozen=True)
class TeleportAnalysis:
    pass_prob: float
    branches: tuple[TeleportBranch, ...]

    def conclusive_probability(self) -> float:
        return self.pass_prob * sum(b.probability for b in self.branches if b.outcome.is_conclusive)

    def outcome_fidelities(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for b in self.branches:
            if b.outcome.is_conclusive:
                out[b.outcome.index] = b.fidelity
        return out


@dataclass(frozen=True)
class TeleportResult:
    outcome: DiscriminationOutcome
    bob_state: PureState | None
    fidelity: float | None


def build_teleport_system(target: TeleportTarget) -> PureState:
    """Target qutrit on the sender's measurement ports, tensored with the
    shared triple whose time-bin-a photon lives on the receiver's ports."""
    shared = build_psi(0, ports=ESD_PORTS, a_ports=BOB_PORTS)
    return tensor(target.state(ESD_PORTS), shared)


def _measured_branches(state: PureState, d: int, measured_ports: Sequence[int]):
    """Group a joint state's terms by the Fock configuration on the measured
    ports.  Each group is one fine-grained detection branch; the remainder
    amplitudes form the conditional state of the unmeasured photons."""
    measured = frozenset(measured_ports)
    groups: dict[FockBasisState, dict[FockBasisState, complex]] = {}
    for basis, amp in state.items():
        inside, outside = basis.split_by_ports(measured)
        groups.setdefault(inside, {})[outside] = amp
    return sorted(groups.items(), key=lambda pair: pair[0].sort_key())


def teleport_analysis(target: TeleportTarget) -> TeleportAnalysis:
    """Deterministic enumeration of every detection branch of one run."""
    system = build_teleport_system(target)
    passed, pass_prob = parity_postselect(system, 3, ports=ESD_PORTS)
    if pass_prob == 0.0:
        return TeleportAnalysis(0.0, ())
    unitary = identity_padded(build_dft(3), extra=len(BOB_PORTS))
    evolved = apply_mode_unitary(passed, unitary, ESD_PORTS + BOB_PORTS)
    target_b = target.state(BOB_PORTS)
    branches = []
    for inside, remainder in _measured_branches(evolved, 3, ESD_PORTS):
        outcome = classify(DetectionPattern(inside.clicks()), 3)
        bob = PureState(remainder)
        prob = bob.norm_sq()
        if outcome.is_conclusive:
            corrected = apply_correction(bob.normalize(), correction_for(outcome.index), BOB_PORTS)
            fid = abs(inner_product(target_b, corrected)) ** 2
        else:
            corrected = bob
            fid = 0.0
        branches.append(TeleportBranch(prob, outcome, corrected, fid))
    return TeleportAnalysis(pass_prob, tuple(branches))


def teleport(target: TeleportTarget, rng_seed: int | np.random.Generator) -> TeleportResult:
    """One sampled teleportation run.

    Samples the parity post-selection, then one detection branch by
    inverse-CDF in canonical branch order; on a conclusive outcome returns
    the corrected receiver state and its overlap with the input.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else derive_rng(int(rng_seed))
    analysis = teleport_analysis(target)
    if rng.random() >= analysis.pass_prob:
        return TeleportResult(POSTSELECT_FAIL, None, None)
    u = rng.random() * sum(b.probability for b in analysis.branches)
    acc = 0.0
    chosen = analysis.branches[-1]
    for branch in analysis.branches:
        acc += branch.probability
        if u < acc:
            chosen = branch
            break
    return TeleportResult(chosen.outcome, chosen.bob_state, chosen.fidelity)


def conditional_outcome_weights(target: TeleportTarget) -> list[float]:
    """Weights of the nine triple-state components of the joint system.

    Each weight is 1/9 for every normalized target: the measurement result
    carries no information about the input.
    """
    system = build_teleport_system(target)
    return [
        partial_project(system, build_psi(i, ESD_PORTS), ESD_PORTS).norm_sq() for i in range(9)
    ]


# -- EDP security picture ------------------------------------------------------


EDP_CHARLIE_PORTS = (0, 1, 2)
EDP_ALICE_PORTS = (3, 4, 5)
EDP_BOB_PORTS = (6, 7, 8)


def _edp_system() -> PureState:
    """Alice's triple (keeping the time-bin-a photon) tensored with Bob's
    maximally entangled pair (keeping one of two time-bin-a photons)."""
    alice = build_psi(0, ports=EDP_CHARLIE_PORTS, a_ports=EDP_ALICE_PORTS)
    bob_terms = []
    for j in range(3):
        pair = PureState(
            {
                FockBasisState(
                    {
                        ModeLabel(0, EDP_CHARLIE_PORTS[j]): 1,
                        ModeLabel(0, EDP_BOB_PORTS[j]): 1,
                    }
                ): 1.0
            }
        )
        bob_terms.append((1 / math.sqrt(3), pair))
    return tensor(alice, superpose(bob_terms))


def maximally_entangled_pair(
    alice_ports: Sequence[int] = EDP_ALICE_PORTS, bob_ports: Sequence[int] = EDP_BOB_PORTS
) -> PureState:
    """(1/sqrt(3)) sum_j |a at alice_ports[j], a at bob_ports[j]>."""
    terms = {
        FockBasisState({ModeLabel(0, alice_ports[j]): 1, ModeLabel(0, bob_ports[j]): 1}): 1
        / math.sqrt(3)
        for j in range(3)
    }
    return PureState(terms)


def edp_shared_state(charlie_outcome: int) -> PureState:
    """Condition the EDP system on a conclusive relay outcome and apply the
    receiver's correction; the result is the maximally entangled pair."""
    if not 0 <= charlie_outcome <= 2:
        raise ValueError(f"conclusive outcome must be 0..2, got {charlie_outcome}")
    system = _edp_system()
    projected = partial_project(
        system, build_psi(charlie_outcome, EDP_CHARLIE_PORTS), EDP_CHARLIE_PORTS
    )
    return apply_correction(projected.normalize(), correction_for(charlie_outcome), EDP_BOB_PORTS)


def edp_outcome_weight(charlie_outcome: int) -> float:
    system = _edp_system()
    return partial_project(
        system, build_psi(charlie_outcome, EDP_CHARLIE_PORTS), EDP_CHARLIE_PORTS
    ).norm_sq()


# -- MDI-QKD -------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseConfig:
    """Toy channel on Bob's photon: each relay input port independently
    picks up a pi phase flip with probability `phase_flip_p`.

    Diagonal in the path basis, so it leaves path-encoded trials untouched
    and shows up as sifted-key errors only through MUB-encoded rounds."""

    phase_flip_p: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.phase_flip_p <= 1.0:
            raise ValueError(f"phase_flip_p must lie in [0, 1], got {self.phase_flip_p}")


@dataclass(frozen=True)
class QkdTrialRecord:
    trial: int
    alice_basis: str
    alice_value: int
    bob_basis: str
    bob_value: int
    outcome: DiscriminationOutcome
    sifted: bool
    alice_symbol: int | None = None
    bob_symbol: int | None = None


@dataclass(frozen=True)
class QkdRunResult:
    records: tuple[QkdTrialRecord, ...]
    sift_rate: float
    qber: float


@lru_cache(maxsize=8)
def _alice_mub_pair(x: int) -> PureState:
    """Alice's MUB-basis pair: project the kept photon of her entangled
    triple onto the MUB bra and renormalize.  Defining it through the actual
    projection keeps the prepare-and-measure protocol statistically identical
    to the EDP picture."""
    tri = build_psi(0, ports=ESD_PORTS, a_ports=BOB_PORTS)
    kept_bra = mub_state(0, x, BOB_PORTS)
    return partial_project(tri, kept_bra, BOB_PORTS).normalize()


@lru_cache(maxsize=16)
def alice_send(basis: str, value: int) -> PureState:
    """Alice's two-photon encoding.

    Path basis: value x selects the pair whose empty relay port is x, i.e.
    build_alice_pair((x + 1) mod 3); with that convention a conclusive
    matched trial satisfies bob_value == alice_value (the EDP correlation).
    """
    if basis == COMPUTATIONAL:
        return build_alice_pair((value + 1) % 3, ESD_PORTS)
    if basis == MUB:
        return _alice_mub_pair(value)
    raise ValueError(f"unknown basis {basis!r}")


@lru_cache(maxsize=16)
def bob_send(basis: str, value: int) -> PureState:
    """Bob's single-photon encoding: a path basis state or a MUB state."""
    if basis == COMPUTATIONAL:
        return PureState.single_photon(ModeLabel(0, ESD_PORTS[value]))
    if basis == MUB:
        return mub_state(0, value, ESD_PORTS)
    raise ValueError(f"unknown basis {basis!r}")


@lru_cache(maxsize=1)
def _decode_table() -> dict[tuple[str, int, int], int]:
    """Analytic decode rule: for each (basis, conclusive index, Bob value)
    exactly one Alice value has nonzero conclusive amplitude in the noiseless
    protocol; the relay announcement plus Bob's own value identify it."""
    table: dict[tuple[str, int, int], int] = {}
    for basis in (COMPUTATIONAL, MUB):
        for i in range(3):
            for y in range(3):
                candidates = []
                for x in range(3):
                    joint = tensor(alice_send(basis, x), bob_send(basis, y))
                    amp = inner_product(build_psi(i, ESD_PORTS), joint)
                    if abs(amp) > 1e-9:
                        candidates.append(x)
                if len(candidates) != 1:
                    raise AssertionError(
                        f"decode rule not unique for {(basis, i, y)}: {candidates}"
                    )
                table[(basis, i, y)] = candidates[0]
    return table


def _apply_phase_flips(state: PureState, flips: Sequence[bool]) -> PureState:
    if not any(flips):
        return state

    def phase_of(mode: ModeLabel) -> complex:
        if mode.port in ESD_PORTS and flips[ESD_PORTS.index(mode.port)]:
            return -1 + 0j
        return 1 + 0j

    return apply_phases(state, phase_of)


def mdi_qkd_run(
    n_trials: int,
    eta: float = 1.0,
    noise: NoiseConfig | None = None,
    seed: int = 0,
) -> QkdRunResult:
    """Simulate the prepare-and-measure protocol trial by trial.

    Each trial draws both parties' bases and values uniformly, feeds the
    joint three-photon state to the relay measurement with per-port device
    efficiency eta, sifts matched-basis conclusive trials, and decodes Bob's
    symbol from (outcome index, Bob value).  Trials use per-index derived
    generators, so batches are order-independent and reproducible.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    noise = noise or NoiseConfig()
    model = ParityModel(eta)
    decode = _decode_table()
    records: list[QkdTrialRecord] = []
    n_sifted = 0
    n_errors = 0
    for trial in range(n_trials):
        rng = derive_rng(seed, trial)
        alice_basis = COMPUTATIONAL if rng.random() < 0.5 else MUB
        bob_basis = COMPUTATIONAL if rng.random() < 0.5 else MUB
        x = int(rng.integers(3))
        y = int(rng.integers(3))
        flips = tuple(bool(f) for f in rng.random(3) < noise.phase_flip_p)
        bob_state = _apply_phase_flips(bob_send(bob_basis, y), flips)
        joint = tensor(alice_send(alice_basis, x), bob_state)
        outcome = mc_trial(joint, model, 3, rng)
        sifted = alice_basis == bob_basis and outcome.is_conclusive
        if sifted:
            bob_symbol = decode[(alice_basis, outcome.index, y)]
            n_sifted += 1
            if bob_symbol != x:
                n_errors += 1
            records.append(
                QkdTrialRecord(trial, alice_basis, x, bob_basis, y, outcome, True, x, bob_symbol)
            )
        else:
            records.append(
                QkdTrialRecord(trial, alice_basis, x, bob_basis, y, outcome, False)
            )
    sift_rate = n_sifted / n_trials
    qber = n_errors / n_sifted if n_sifted else 0.0
    return QkdRunResult(tuple(records), sift_rate, qber)


def generalized_conclusive_probability(d: int) -> float:
    """Analytic conclusive probability for inputs drawn uniformly from the
    d*d encoding combinations of the generalized setup (one (d-1)-photon
    block state from Alice, one time-bin-0 photon from Bob), evaluated
    through the full measurement pipeline.  Equals 1/d."""
    dft = build_dft(d)
    total = 0.0
    for i in range(d):
        block = build_minor(i, d)
        for j in range(d):
            joint = tensor(block, PureState.single_photon(ModeLabel(0, j)))
            passed, pass_prob = parity_postselect(joint, d)
            if pass_prob == 0.0:
                continue
            evolved = apply_mode_unitary(passed, dft, tuple(range(d)))
            for pattern, prob in detect_distribution(evolved).items():
                if classify(pattern, d).is_conclusive:
                    total += pass_prob * prob
    return total / (d * d)
