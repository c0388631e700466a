"""Monte Carlo driver and exact expectation oracle for the gambling game.

Reproducibility scheme: round i consumes at most eight uniforms, taken
from row i of an implicit Philox(key=seed) matrix of shape (rounds, 8).
Any contiguous block of rows regenerates bit-identically from the counter
offset, so every round's randomness is a pure function of (seed, round
index) no matter how rounds are partitioned across workers. Worker counts
only change float accumulation order in the reported means.

Abort monitoring and transcript streaming are inherently sequential (the
monitor consumes the ledger in round order), so those paths run single
process regardless of the configured worker count; identical per-round
randomness keeps the outcomes consistent either way.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .protocol import (
    CheckResult,
    Ledger,
    MonitorDecision,
    ProtocolParams,
    RoundKind,
    RoundResult,
    abort_monitor,
    run_round,
)
from .qubit import (
    LABELS,
    born_probabilities,
    check_fail_probability,
    depolarize,
    optimal_povm,
    trine_states,
)
from .strategies import FixedStateCheat, HonestAlice, MixtureCheat

DRAWS_PER_ROUND = 8
_CHUNK = 1 << 16


class DeterministicDivergence(Exception):
    """A zero-variance simulation disagreed with its expected value."""


@dataclass(frozen=True)
class SimConfig:
    rounds: int
    seed: int
    params: ProtocolParams
    alice: object
    bob: object
    workers: int = 1

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError(f"need at least one round, got {self.rounds!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a uint64, got {self.seed!r}")
        if self.workers < 1:
            raise ValueError(f"need at least one worker, got {self.workers!r}")


@dataclass(frozen=True)
class SimResult:
    """Aggregates of one simulation; rounds is the executed count, which is
    short of the request only when the abort monitor tripped."""

    rounds: int
    mean_gain_alice: float
    mean_gain_bob: float
    stderr: float
    win_count: int
    lose_count: int
    check_count: int
    accuse_count: int
    aborted: bool

    def to_record(self) -> dict:
        return {
            "rounds": self.rounds,
            "mean_gain_alice": self.mean_gain_alice,
            "mean_gain_bob": self.mean_gain_bob,
            "stderr": self.stderr,
            "win_count": self.win_count,
            "lose_count": self.lose_count,
            "check_count": self.check_count,
            "accuse_count": self.accuse_count,
            "aborted": self.aborted,
        }


class _RoundRng:
    """Cursor over one round's budgeted uniforms; exposes only random()."""

    __slots__ = ("row", "pos")

    def random(self) -> float:
        v = self.row[self.pos]
        self.pos += 1
        return v


def _round_rows(seed: int, start: int, count: int) -> list:
    bits = np.random.Philox(key=seed, counter=(start * DRAWS_PER_ROUND) // 4)
    return np.random.Generator(bits).random((count, DRAWS_PER_ROUND)).tolist()


def _block_sums(alice, bob, params, seed, start, count):
    """Totals over rounds [start, start + count): (sum, sumsq, wins, losses,
    checks, accusations)."""
    rng = _RoundRng()
    s1 = 0.0
    s2 = 0.0
    wins = losses = checks = accs = 0
    checking = RoundKind.CHECKING
    bob_won = RoundResult.BOB_WON
    accuse = CheckResult.ACCUSE
    done = 0
    while done < count:
        n = min(_CHUNK, count - done)
        rows = _round_rows(seed, start + done, n)
        for row in rows:
            rng.row = row
            rng.pos = 0
            kind, _, _, verdict, check, a_delta, _ = run_round(alice, bob, params, rng)
            s1 += a_delta
            s2 += a_delta * a_delta
            if verdict.result is bob_won:
                wins += 1
            else:
                losses += 1
            if kind is checking:
                checks += 1
                if check is accuse:
                    accs += 1
        done += n
    return s1, s2, wins, losses, checks, accs


def _result_from_sums(n, s1, s2, wins, losses, checks, accs, aborted) -> SimResult:
    mean = s1 / n
    if n > 1:
        var = max(0.0, (s2 - n * mean * mean) / (n - 1))
        stderr = math.sqrt(var / n)
    else:
        stderr = 0.0
    return SimResult(n, mean, -mean, stderr, wins, losses, checks, accs, aborted)


def _run_sequential(config: SimConfig, transcript_sink) -> SimResult:
    params = config.params
    ledger = Ledger()
    rng = _RoundRng()
    s1 = 0.0
    s2 = 0.0
    monitor_on = params.abort_threshold is not None
    checking = RoundKind.CHECKING
    done = 0
    aborted = False
    while done < config.rounds and not aborted:
        n = min(_CHUNK, config.rounds - done)
        rows = _round_rows(config.seed, done, n)
        for row in rows:
            rng.row = row
            rng.pos = 0
            t = run_round(config.alice, config.bob, params, rng)
            ledger.update(t)
            s1 += t.alice_delta
            s2 += t.alice_delta * t.alice_delta
            if transcript_sink is not None:
                transcript_sink(t)
            if monitor_on and t.kind is checking:
                if abort_monitor(ledger, params) is MonitorDecision.ABORT:
                    aborted = True
                    break
        done = ledger.rounds
    ledger.aborted = aborted
    return _result_from_sums(ledger.rounds, s1, s2, ledger.wins, ledger.losses,
                             ledger.checks, ledger.accusations, aborted)


def _worker(args):
    alice, bob, params, seed, start, count = args
    return _block_sums(alice, bob, params, seed, start, count)


def simulate(config: SimConfig, transcript_sink=None) -> SimResult:
    """Run the configured number of rounds and aggregate.

    Per-round randomness depends only on (seed, round index); identical
    configs give bit-identical results. With the abort monitor enabled the
    run stops at the first tripping round and reports the partial totals
    with aborted = True.
    """
    params = config.params
    if transcript_sink is not None or params.abort_threshold is not None:
        return _run_sequential(config, transcript_sink)

    workers = min(config.workers, config.rounds)
    if workers <= 1:
        sums = _block_sums(config.alice, config.bob, params, config.seed, 0, config.rounds)
        s1, s2, wins, losses, checks, accs = sums
    else:
        base, extra = divmod(config.rounds, workers)
        jobs = []
        start = 0
        for w in range(workers):
            count = base + (1 if w < extra else 0)
            jobs.append((config.alice, config.bob, params, config.seed, start, count))
            start += count
        s1 = s2 = 0.0
        wins = losses = checks = accs = 0
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_worker, jobs):
                s1 += part[0]
                s2 += part[1]
                wins += part[2]
                losses += part[3]
                checks += part[4]
                accs += part[5]
    return _result_from_sums(config.rounds, s1, s2, wins, losses, checks, accs, False)


@dataclass(frozen=True)
class ExactExpectation:
    """Exact per-round expectation from full branch enumeration."""

    g_alice: float
    branch_table: tuple

    def __post_init__(self):
        total = math.fsum(prob for _, prob, _ in self.branch_table)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"branch probabilities must sum to 1, got {total!r}")


def enumerate_exact(alice, params: ProtocolParams) -> ExactExpectation:
    """Expected sender gain against the honest receiver, exactly.

    Walks the full discrete outcome tree: mixture component x round kind x
    guess x check outcome. Separable senders only; entangled policies have
    no finite component decomposition here and are rejected (tests evaluate
    them through the joint distribution instead).
    """
    trine = trine_states()
    if isinstance(alice, HonestAlice):
        comps = [(1.0 / 3.0, trine[lab], lab, f"trine:{lab}") for lab in LABELS]
    elif isinstance(alice, FixedStateCheat):
        comps = [(1.0, alice.state, alice.claim, f"fixed:claim={alice.claim}")]
    elif isinstance(alice, MixtureCheat):
        comps = [(p, s, c, f"mix:{i}:claim={c}")
                 for i, (p, s, c) in enumerate(alice.components)]
    else:
        raise ValueError(
            f"exact enumeration supports separable senders only, got {type(alice).__name__}")

    povm = optimal_povm()
    lam = params.noise_lambda
    r = params.r
    win = params.win_payout
    lose = params.lose_payout
    rows = []
    for pc, state, claim, desc in comps:
        eff = depolarize(state.density(), lam) if lam > 0.0 else state
        probs = born_probabilities(eff, povm)
        w_normal = pc * (1.0 - r)
        for k, lab in enumerate(povm.labels):
            payoff = -win if lab == claim else lose
            rows.append((f"{desc}|normal|guess={lab}", w_normal * probs[k], payoff))
        q_fail = check_fail_probability(eff, claim)
        q_pass = 1.0 - q_fail
        w_check = pc * r / 3.0
        for lab in LABELS:
            payoff = -win if lab == claim else lose
            rows.append((f"{desc}|checking|guess={lab}|pass", w_check * q_pass, payoff))
            rows.append((f"{desc}|checking|guess={lab}|accuse", w_check * q_fail, -params.R))
    # fsum keeps the heavy cancellation between win and loss rows from
    # leaking rounding error into tight closed-form comparisons
    g = math.fsum(prob * payoff for _, prob, payoff in rows)
    return ExactExpectation(g, tuple(rows))


def compare_stats(result: SimResult, expected: float) -> float:
    """z-score of the simulated sender mean against an expected value.

    Zero spread is legitimate only when the simulation hit the expectation
    exactly; otherwise something deterministic went wrong and no amount of
    extra rounds would fix it.
    """
    if result.stderr == 0.0:
        if result.mean_gain_alice == expected:
            return 0.0
        raise DeterministicDivergence(
            f"zero-variance run produced {result.mean_gain_alice!r}, expected {expected!r}")
    return (result.mean_gain_alice - expected) / result.stderr
