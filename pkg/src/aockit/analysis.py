"""Closed-form average age of collection for the three access schemes.

Each scheme's transmission process is an absorbing Markov chain over the
states "device i transmits next"; a full collection is the absorption
event.  With D the inter-collection time and A the age of the delivered
set at the collection instant, the renewal-reward average of the sawtooth
is

    avg = E[A] + E[D^2] / (2 E[D])            [slots or rounds]

so everything reduces to the first two hitting-time moments of the chain.
The moments come from small dense linear systems (or explicit suffix sums
where the chain is skip-free), solved with a scaled-partial-pivot LU
elimination that is factored once and shared between the first- and
second-moment right-hand sides.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import HittingMoments, PerVector, SchemeKind, TimingModel

__all__ = [
    "DenseSystem",
    "solve_dense",
    "tdma_nr_moments",
    "tdma_nr_avg_aoc_slots",
    "tdma_r_moments",
    "tdma_r_avg_aoc_slots",
    "fdma_gamma",
    "fdma_avg_aoc_rounds",
    "avg_aoc_ms",
]

# scaled pivots below this are treated as exact zeros
_PIVOT_TOL = 1e-12
# residual guard on every solve, relative to max(1, |rhs|_inf)
_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class DenseSystem:
    """One dense linear system: matrix and right-hand side together."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        rhs = np.array(self.rhs, dtype=float)
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {matrix.shape}")
        if rhs.shape != (matrix.shape[0],):
            raise ValueError(
                f"rhs shape {rhs.shape} does not match matrix of order {matrix.shape[0]}"
            )
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
            raise ValueError("system entries must be finite")


class _LuFactors:
    """P A = L U with row-scaled partial pivoting; factor once, solve many."""

    def __init__(self, a: np.ndarray):
        n = a.shape[0]
        lu = a.astype(float, copy=True)
        perm = np.arange(n)
        scale = np.max(np.abs(a), axis=1)
        if np.any(scale == 0.0):
            raise ValueError("singular system")
        for k in range(n):
            # pivot row: largest entry relative to its own row scale
            col = np.abs(lu[k:, k]) / scale[perm[k:]]
            j = k + int(np.argmax(col))
            if col[j - k] < _PIVOT_TOL:
                raise ValueError("singular system")
            if j != k:
                lu[[k, j]] = lu[[j, k]]
                perm[[k, j]] = perm[[j, k]]
            pivot = lu[k, k]
            for i in range(k + 1, n):
                m = lu[i, k] / pivot
                lu[i, k] = m
                if m != 0.0:
                    lu[i, k + 1:] -= m * lu[k, k + 1:]
        self.a = a
        self.lu = lu
        self.perm = perm

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        n = self.lu.shape[0]
        x = rhs[self.perm].astype(float, copy=True)
        for i in range(1, n):              # forward, unit lower triangle
            x[i] -= self.lu[i, :i] @ x[:i]
        for i in range(n - 1, -1, -1):     # backward
            if i + 1 < n:
                x[i] -= self.lu[i, i + 1:] @ x[i + 1:]
            x[i] /= self.lu[i, i]
        resid = float(np.max(np.abs(self.a @ x - rhs)))
        bound = _RESIDUAL_TOL * max(1.0, float(np.max(np.abs(rhs))))
        if not math.isfinite(resid) or resid > bound:
            raise ValueError(
                f"solve residual {resid:.3e} exceeds tolerance {bound:.3e}"
            )
        return x


def solve_dense(system: DenseSystem) -> np.ndarray:
    """Solve system.matrix @ x = system.rhs by LU elimination with scaled
    partial pivoting.

    The residual max-norm is checked against 1e-9 * max(1, |rhs|_inf); a
    scaled pivot below 1e-12 raises "singular system".
    """
    return _LuFactors(system.matrix).solve(system.rhs)


def tdma_nr_moments(p: PerVector) -> HittingMoments:
    """Hitting-time moments for TDMA without retransmissions.

    From state i the slot succeeds with probability 1 - p_i and moves to
    state i + 1 (past state N is absorption); any failure restarts the
    round at state 1 with fresh packets.  The first moments solve

        T_i = 1 + p_i T_1 + (1 - p_i) T_{i+1},    T_{N+1} = 0

    i.e. row i of M carries -p_i on column 1, +1 on column i and
    -(1 - p_i) on column i + 1, against a right-hand side of ones.  The
    second moments solve the same M against

        r_i = 1 + 2 p_i T_1 + 2 (1 - p_i) T_{i+1}

    so the factorization is shared between the two solves.
    """
    probs = p.as_array()
    n = p.n
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] += 1.0
        m[i, 0] -= probs[i]
        if i + 1 < n:
            m[i, i + 1] -= 1.0 - probs[i]
    factors = _LuFactors(m)
    first = factors.solve(np.ones(n))
    t_next = np.append(first[1:], 0.0)
    rhs2 = 1.0 + 2.0 * probs * first[0] + 2.0 * (1.0 - probs) * t_next
    second = factors.solve(rhs2)
    t2s = float(first[1]) if n >= 2 else 0.0
    return HittingMoments(
        first=tuple(float(v) for v in first),
        second_t1=float(second[0]),
        t2s=t2s,
    )


def tdma_nr_avg_aoc_slots(p: PerVector) -> float:
    """Average AoC of TDMA-NR in slot units.

    Every delivered set was generated at the start of its successful round,
    N slots before completion, so the reset age is exactly N and

        avg = N + E[T_1^2] / (2 E[T_1]).
    """
    mom = tdma_nr_moments(p)
    return p.n + mom.second_t1 / (2.0 * mom.first[0])


def tdma_r_moments(p: PerVector, cross_check: bool = False) -> HittingMoments:
    """Hitting-time moments for TDMA with retransmissions.

    A failed slot at state i >= 2 repeats state i (same packet); a failure
    at state 1 regenerates everything but likewise repeats state 1.  The
    chain is skip-free to the right, so with a_k = 1 / (1 - p_k) the first
    moments are the suffix sums

        T_i = sum_{k=i..N} a_k

    and the second moment from state 1 telescopes to

        E[T_1^2] = (1 + p_1) / (1 - p_1) * T_1 + sum_{i>=2} 2 a_i T_i
                 = (1 + p_1) / (1 - p_1) * T_1
                   + (sum_{i>=2} a_i)^2 + sum_{i>=2} a_i^2.

    The expanded form is evaluated with math.fsum, which returns the
    correctly rounded exact sum, so the moments are bit-identical under
    any reordering of devices 2..N.  cross_check=True verifies the closed
    forms against a dense solve of the chain's own linear equations.
    """
    probs = p.probs
    n = p.n
    a = [1.0 / (1.0 - pi) for pi in probs]
    first = tuple(math.fsum(a[i:]) for i in range(n))
    tail = a[1:]
    t1 = first[0]
    tail_sum = math.fsum(tail)
    second_t1 = (
        (1.0 + probs[0]) / (1.0 - probs[0]) * t1
        + tail_sum * tail_sum
        + math.fsum(x * x for x in tail)
    )
    t2s = first[1] if n >= 2 else 0.0
    if cross_check:
        _tdma_r_check(probs, first, second_t1)
    return HittingMoments(first=first, second_t1=second_t1, t2s=t2s)


def _tdma_r_check(probs, first, second_t1) -> None:
    # independent route: solve the chain equations
    #   (1 - p_i) T_i - (1 - p_i) T_{i+1} = 1
    # for both moments and compare with the explicit sums
    n = len(probs)
    parr = np.asarray(probs, dtype=float)
    m = np.zeros((n, n))
    for i in range(n):
        m[i, i] = 1.0 - parr[i]
        if i + 1 < n:
            m[i, i + 1] = -(1.0 - parr[i])
    factors = _LuFactors(m)
    ref_first = factors.solve(np.ones(n))
    t_next = np.append(ref_first[1:], 0.0)
    # rearranged from S_i = 1 + 2(p_i T_i + (1-p_i) T_{i+1}) + p_i S_i + ...
    rhs2 = 1.0 + 2.0 * parr * ref_first + 2.0 * (1.0 - parr) * t_next
    ref_second = factors.solve(rhs2)
    for got, ref in zip(first, ref_first):
        if abs(got - ref) > 1e-9 * max(1.0, abs(ref)):
            raise AssertionError(
                f"closed-form first moments {first} disagree with chain solve "
                f"{ref_first}"
            )
    if abs(ref_second[0] - second_t1) > 1e-9 * max(1.0, abs(second_t1)):
        raise AssertionError(
            f"closed-form second moment {second_t1} disagrees with chain "
            f"solve {ref_second[0]}"
        )


def tdma_r_avg_aoc_slots(p: PerVector) -> float:
    """Average AoC of TDMA-R in slot units.

    The delivered set is as old as device 1's packet: one slot for its own
    transmission plus the residual time tau through states 2..N, so the
    mean reset age is 1 + T_2 and

        avg = 1 + T_2 + E[T_1^2] / (2 E[T_1]).
    """
    mom = tdma_r_moments(p)
    return 1.0 + mom.t2s + mom.second_t1 / (2.0 * mom.first[0])


def fdma_gamma(p: PerVector) -> float:
    """Probability that one FDMA round delivers every packet."""
    gamma = 1.0
    for pi in p.probs:
        gamma *= 1.0 - pi
    return gamma


def fdma_avg_aoc_rounds(p: PerVector) -> float:
    """Average AoC of FDMA in round units.

    All devices transmit fresh packets each round on disjoint sub-channels,
    so collections arrive as a Bernoulli process with per-round success
    gamma = prod(1 - p_i).  The inter-collection time is geometric with
    E[D] = 1/gamma and E[D^2] = (2 - gamma)/gamma^2, and the reset age is
    one round:

        avg = 1 + (2 - gamma) / (2 gamma).
    """
    gamma = fdma_gamma(p)
    if gamma <= 0.0:
        raise ValueError("unreachable success state")
    return 1.0 + (2.0 - gamma) / (2.0 * gamma)


def avg_aoc_ms(scheme: SchemeKind, p: PerVector, timing: TimingModel) -> float:
    """Average AoC in milliseconds under the given slot/round durations."""
    if scheme is SchemeKind.TDMA_NR:
        return tdma_nr_avg_aoc_slots(p) * timing.tdma_slot_ms
    if scheme is SchemeKind.TDMA_R:
        return tdma_r_avg_aoc_slots(p) * timing.tdma_slot_ms
    if scheme is SchemeKind.FDMA:
        return fdma_avg_aoc_rounds(p) * timing.fdma_round_ms
    raise ValueError(f"unknown scheme {scheme!r}")
