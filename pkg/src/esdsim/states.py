"""Constructors for the entangled-state families and MUB single-photon states.

Time-bin letters map a -> 0, b -> 1, c -> 2 (and onward for higher d), so the
qutrit triple family (`build_psi`) and the general-d determinant family
(`build_phi`) share one mode representation.

`build_phi` expands the plain (unsigned) d x d determinant of creation
operators: the index-0 member is the fully antisymmetric one-photon-per-port
state, and member i applies the diagonal phase chi^(i*j) to the component
whose time-bin-0 photon sits on the j-th port.  At d = 3 this family equals
the qutrit triple states {psi_0, psi_2, psi_1} term for term; the index swap
1 <-> 2 comes from the two families' conjugate phase conventions
(omega^(2ij) versus chi^(ij)).
"""

from __future__ import annotations

import cmath
import itertools
import math
from typing import Sequence

from .errors import IndexOutOfRange, InvalidDimension
from .fock import DEFAULT_TOLERANCE, FockBasisState, ModeLabel, PureState

OMEGA = cmath.exp(2j * cmath.pi / 3)

_QUTRIT_PORTS = (0, 1, 2)


def _unit_root(d: int, exponent: int) -> complex:
    return cmath.exp(2j * cmath.pi * (exponent % d) / d)


def _check_ports(ports: Sequence[int], n: int) -> tuple[int, ...]:
    ports = tuple(ports)
    if len(ports) != n or len(set(ports)) != n:
        raise ValueError(f"expected {n} distinct port labels, got {ports!r}")
    return ports


def _permutation_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def build_psi(
    index: int,
    ports: Sequence[int] = _QUTRIT_PORTS,
    a_ports: Sequence[int] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PureState:
    """One of the nine tripartite entangled qutrit states.

    Members 0..2 put every photon in a separate port; members 3..8 bunch two
    time-bins into one port.  `a_ports`, when given, relocates the time-bin-a
    photon onto different port labels (used when one party keeps that photon).
    """
    if not 0 <= index <= 8:
        raise IndexOutOfRange(f"qutrit triple index must be 0..8, got {index}")
    ports = _check_ports(ports, 3)
    a_ports = ports if a_ports is None else _check_ports(a_ports, 3)
    family, i = divmod(index, 3)
    # per family: port offsets of the (b, c) photons relative to j, first and
    # second summand of the antisymmetric pair
    bc_offsets = {0: ((1, 2), (2, 1)), 1: ((0, 1), (1, 0)), 2: ((2, 0), (0, 2))}[family]
    amps: dict[FockBasisState, complex] = {}
    scale = 1.0 / math.sqrt(6)
    for j in range(3):
        phase = _unit_root(3, 2 * i * j) * scale
        for sign, (db, dc) in zip((1, -1), bc_offsets):
            basis = FockBasisState(
                {
                    ModeLabel(0, a_ports[j]): 1,
                    ModeLabel(1, ports[(j + db) % 3]): 1,
                    ModeLabel(2, ports[(j + dc) % 3]): 1,
                }
            )
            amps[basis] = amps.get(basis, 0j) + sign * phase
    return PureState(amps, tolerance)


def build_phi(
    index: int,
    dim: int,
    ports: Sequence[int] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PureState:
    """Member `index` of the d-photon determinant family over d ports.

    Amplitude of the arrangement (time-bin t at ports[sigma(t)]) is
    sgn(sigma) * chi^(index * sigma(0)) / sqrt(d!), chi = exp(2 pi i / d).
    The family is orthonormal and has d! basis terms per member.
    """
    if dim < 2:
        raise InvalidDimension(f"determinant family needs d >= 2, got {dim}")
    if not 0 <= index < dim:
        raise IndexOutOfRange(f"index must be 0..{dim - 1}, got {index}")
    ports = _check_ports(ports if ports is not None else range(dim), dim)
    scale = 1.0 / math.sqrt(math.factorial(dim))
    amps: dict[FockBasisState, complex] = {}
    for perm in itertools.permutations(range(dim)):
        basis = FockBasisState({ModeLabel(t, ports[perm[t]]): 1 for t in range(dim)})
        amps[basis] = _permutation_sign(perm) * _unit_root(dim, index * perm[0]) * scale
    return PureState(amps, tolerance)


def build_minor(
    index: int,
    dim: int,
    ports: Sequence[int] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PureState:
    """The (d-1)-photon determinant state over all ports except ports[index].

    Time-bins 1..d-1 are antisymmetrized over the remaining ports in
    ascending order.  These are the states one party sends in the
    generalized key-distribution protocol.
    """
    if dim < 2:
        raise InvalidDimension(f"determinant family needs d >= 2, got {dim}")
    if not 0 <= index < dim:
        raise IndexOutOfRange(f"index must be 0..{dim - 1}, got {index}")
    ports = _check_ports(ports if ports is not None else range(dim), dim)
    remaining = [p for k, p in enumerate(ports) if k != index]
    scale = 1.0 / math.sqrt(math.factorial(dim - 1))
    amps: dict[FockBasisState, complex] = {}
    for perm in itertools.permutations(range(dim - 1)):
        basis = FockBasisState({ModeLabel(t + 1, remaining[perm[t]]): 1 for t in range(dim - 1)})
        amps[basis] = _permutation_sign(perm) * scale
    return PureState(amps, tolerance)


def mub_state(
    timebin: int,
    k: int,
    ports: Sequence[int] = _QUTRIT_PORTS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PureState:
    """Single-photon MUB state (1/sqrt(3)) sum_j omega^(k j) |timebin at ports[j]>.

    Every member has overlap probability 1/3 with every path-basis state.
    """
    if not 0 <= k <= 2:
        raise IndexOutOfRange(f"MUB index must be 0..2, got {k}")
    if not 0 <= timebin <= 2:
        raise IndexOutOfRange(f"time-bin must be 0..2, got {timebin}")
    ports = _check_ports(ports, 3)
    scale = 1.0 / math.sqrt(3)
    amps = {
        FockBasisState({ModeLabel(timebin, ports[j]): 1}): _unit_root(3, k * j) * scale
        for j in range(3)
    }
    return PureState(amps, tolerance)


def build_alice_pair(
    x: int,
    ports: Sequence[int] = _QUTRIT_PORTS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> PureState:
    """The two-photon path-entangled pair
    (1/sqrt(2)) (|b_x, c_(x+1)> - |b_(x+1), c_x>), indices mod 3."""
    if not 0 <= x <= 2:
        raise IndexOutOfRange(f"pair index must be 0..2, got {x}")
    ports = _check_ports(ports, 3)
    scale = 1.0 / math.sqrt(2)
    hi = (x + 1) % 3
    return PureState(
        {
            FockBasisState({ModeLabel(1, ports[x]): 1, ModeLabel(2, ports[hi]): 1}): scale,
            FockBasisState({ModeLabel(1, ports[hi]): 1, ModeLabel(2, ports[x]): 1}): -scale,
        },
        tolerance,
    )
