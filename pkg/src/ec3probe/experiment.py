"""Running the probe-qubit algorithm, its closed-form predictions, and sweeps."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .ec3_core import Assignment, EC3Instance, SpectrumSummary, brute_force_solve, problem_energy
from .evolution import Propagator, PropagatorSpec, probe_decay_probability
from .operators import REFERENCE_ENERGY, HamiltonianParams, build_htilde, prepare_reference

log = logging.getLogger(__name__)

THREADS_ENV = "EC3PROBE_THREADS"
#: Decay probability above which a frequency counts as resonant.
RESONANCE_THRESHOLD = 0.5

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class SimulationParams:
    omega: float = 1.0
    c: float = 0.002
    tau: float = 0.0
    propagator: PropagatorSpec = field(default_factory=PropagatorSpec)
    shots: int | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be a positive integer")

    def with_(self, **changes) -> "SimulationParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        spec = self.propagator
        return {
            "omega": self.omega,
            "c": self.c,
            "tau": self.tau,
            "method": spec.method,
            "trotter_steps": spec.trotter_steps,
            "strang": spec.strang,
            "shots": self.shots,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class DecayResult:
    """Outcome of one run, read directly from the final amplitudes.

    ``register_probs[z]`` is the probability of register assignment ``z``
    given probe = 0 and ancilla = 1.
    """

    p_decay: float
    register_probs: np.ndarray
    ancilla_one_mass: float
    chosen_L: int | None
    n: int
    omega: float
    tau: float
    instance: EC3Instance | None = None
    samples: dict | None = None

    @property
    def conditional_register(self) -> dict[Assignment, float]:
        nz = np.flatnonzero(self.register_probs)
        return {Assignment.from_index(int(i), self.n): float(self.register_probs[i]) for i in nz}


@dataclass(frozen=True)
class AnalyticPrediction:
    q01: float
    p_decay_analytic: float
    err_bound: float
    optimal_tau: float

    def to_dict(self) -> dict:
        return {"q01": self.q01, "err_bound": self.err_bound, "optimal_tau": self.optimal_tau}


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    threads = _thread_count()
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- closed-form predictions -------------------------------------------------


def rabi_decay_probability(
    e_j: float, e_0: float, omega: float, c: float, m_j: int, tau: float
) -> float:
    """Two-level Rabi formula for the channel reference -> level j."""
    if m_j < 1:
        raise ValueError("degeneracy must be >= 1")
    q = 2.0 * c * math.sqrt(m_j)
    detuning = e_j - e_0 - omega
    rabi = math.hypot(q, detuning)
    return math.sin(rabi * tau / 2.0) ** 2 * q**2 / rabi**2


def off_resonance_bound(c: float, m0: int) -> float:
    return 2.0 / 3.0 * m0 * math.pi**2 * c**2


def optimal_tau(c: float, m: int) -> float:
    """First maximum of sin^2(c sqrt(m) tau)."""
    return math.pi / (2.0 * c * math.sqrt(m))


def analytic_prediction(
    inst: EC3Instance,
    sp: SimulationParams,
    m: int,
    spectrum: SpectrumSummary | None = None,
) -> AnalyticPrediction:
    if m < 1:
        raise ValueError("m must be >= 1: without a satisfying assignment there is no resonant channel")
    spectrum = spectrum or brute_force_solve(inst)
    q01 = 2.0 * sp.c * math.sqrt(m)
    return AnalyticPrediction(
        q01=q01,
        p_decay_analytic=math.sin(q01 * sp.tau / 2.0) ** 2,
        err_bound=off_resonance_bound(sp.c, spectrum.max_excited_degeneracy),
        optimal_tau=optimal_tau(sp.c, m),
    )


def single_channel_prediction(spectrum: SpectrumSummary, omega: float, c: float, tau: float) -> float:
    """Rabi prediction from the level closest to resonance alone.

    At omega = 1 on a satisfiable instance this is sin^2(c sqrt(m) tau).
    """
    level = min(spectrum.degeneracies, key=lambda e: (abs(e - REFERENCE_ENERGY - omega), e))
    return rabi_decay_probability(
        level, REFERENCE_ENERGY, omega, c, spectrum.degeneracies[level], tau
    )


# --- running the algorithm ---------------------------------------------------


def hamiltonian_for(inst: EC3Instance, sp: SimulationParams) -> HamiltonianParams:
    return HamiltonianParams(omega=sp.omega, c=sp.c, htilde=build_htilde(inst))


def decay_result(
    psi: np.ndarray,
    n: int,
    omega: float,
    tau: float,
    chosen_L: int | None = None,
    instance: EC3Instance | None = None,
) -> DecayResult:
    blocks = np.asarray(psi).reshape(2, 2, 1 << n)
    p_decay = probe_decay_probability(psi)
    probs = np.abs(blocks[0, 1]) ** 2
    mass = float(probs.sum())
    register = probs / mass if mass > 0 else np.zeros_like(probs)
    return DecayResult(
        p_decay=p_decay,
        register_probs=register,
        ancilla_one_mass=mass / p_decay if p_decay > 0 else 0.0,
        chosen_L=chosen_L,
        n=n,
        omega=omega,
        tau=tau,
        instance=instance,
    )


def _sample(dr: DecayResult, shots: int, seed: int | None) -> dict:
    rng = np.random.default_rng(seed)
    decays = int(rng.binomial(shots, min(max(dr.p_decay, 0.0), 1.0)))
    counts = rng.multinomial(decays, dr.register_probs) if decays and dr.register_probs.sum() else []
    return {
        "shots": shots,
        "decays": decays,
        "register_counts": {
            str(Assignment.from_index(int(i), dr.n)): int(counts[i]) for i in np.flatnonzero(counts)
        },
    }


class Runner:
    """Holds the propagator for one (instance, omega, c, method) combination."""

    def __init__(self, inst: EC3Instance, sp: SimulationParams):
        self.instance = inst
        self.params = sp
        self.hamiltonian = hamiltonian_for(inst, sp)
        self.propagator = Propagator(self.hamiltonian, sp.propagator)
        self.initial = prepare_reference(inst.n)
        self._evolve = self.propagator.bind(self.initial)

    def run(self, tau: float | None = None) -> DecayResult:
        tau = self.params.tau if tau is None else tau
        psi, chosen_L = self._evolve(tau)
        dr = decay_result(psi, self.instance.n, self.params.omega, tau, chosen_L, self.instance)
        if self.params.shots:
            dr = _with_samples(dr, _sample(dr, self.params.shots, self.params.seed))
        return dr


def _with_samples(dr: DecayResult, samples: dict) -> DecayResult:
    return replace(dr, samples=samples)


def run_algorithm(inst: EC3Instance, sp: SimulationParams) -> DecayResult:
    """Prepare the reference state, evolve for ``sp.tau`` and read the probe."""
    return Runner(inst, sp).run()


def tau_guesses(c: float, n: int) -> list[tuple[int, float]]:
    """(m guess, optimal tau) for m = 1, 2, 4, ... up to 2**n."""
    out, m = [], 1
    while m <= (1 << n):
        out.append((m, optimal_tau(c, m)))
        m *= 2
    return out


def search_optimal_tau(
    inst: EC3Instance, sp: SimulationParams, runner: Runner | None = None, stop_at: float = 0.9
) -> tuple[int, DecayResult]:
    """Try tau = pi/(2 c sqrt(m)) for guessed m = 1, 2, 4, ...; keep the best.

    Stops early once a guess yields a decay probability of ``stop_at``.
    """
    runner = runner or Runner(inst, sp)
    best: tuple[int, DecayResult] | None = None
    for m, tau in tau_guesses(sp.c, inst.n):
        dr = runner.run(tau)
        if best is None or dr.p_decay > best[1].p_decay:
            best = (m, dr)
        if dr.p_decay >= stop_at:
            break
    assert best is not None
    return best


def extract_solutions(dr: DecayResult, threshold: float = 0.1) -> list[Assignment]:
    """Register assignments above ``threshold`` after a decay.

    Candidates are re-checked classically: only those whose energy equals
    the level resonant at ``dr.omega`` are kept.
    """
    if not dr.p_decay > 0:
        return []
    idx = np.flatnonzero(dr.register_probs > threshold)
    # rounding keeps ties among equal-weight solutions in encoding order
    order = sorted(idx.tolist(), key=lambda i: (-round(float(dr.register_probs[i]), 9), i))
    found = [Assignment.from_index(i, dr.n) for i in order]
    if dr.instance is None:
        return found
    level = round(dr.omega + REFERENCE_ENERGY)
    kept = [a for a in found if problem_energy(dr.instance, a) == level]
    if len(kept) != len(found):
        log.info("dropped %d off-resonant candidates", len(found) - len(kept))
    return kept


# --- sweeps ------------------------------------------------------------------


@dataclass(frozen=True)
class TauSweep:
    taus: np.ndarray
    p_numeric: np.ndarray
    p_analytic: np.ndarray

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.p_numeric - self.p_analytic)

    def rows(self) -> Iterable[tuple[float, float, float, float]]:
        for row in zip(self.taus, self.p_numeric, self.p_analytic, self.abs_err):
            yield tuple(float(x) for x in row)  # type: ignore[misc]


def sweep_tau(
    inst: EC3Instance,
    sp: SimulationParams,
    tau_grid: Sequence[float],
    spectrum: SpectrumSummary | None = None,
) -> TauSweep:
    taus = np.asarray(tau_grid, dtype=float)
    if taus.size == 0:
        raise ValueError("tau grid is empty")
    if np.any(np.diff(taus) < 0):
        raise ValueError("tau grid must be ascending")
    spectrum = spectrum or brute_force_solve(inst)
    runner = Runner(inst, sp)

    def point(i: int) -> float:
        try:
            return runner.run(float(taus[i])).p_decay
        except Exception as exc:
            raise RuntimeError(f"tau grid point {i} (tau = {taus[i]:g}) failed: {exc}") from exc

    numeric = np.array(_ordered_map(point, list(range(taus.size))))
    analytic = np.array(
        [single_channel_prediction(spectrum, sp.omega, sp.c, t) for t in taus]
    )
    return TauSweep(taus=taus, p_numeric=numeric, p_analytic=analytic)


@dataclass(frozen=True)
class OmegaSweep:
    omegas: np.ndarray
    p_decay: np.ndarray
    taus: np.ndarray
    first_resonant_omega: float | None
    threshold: float = RESONANCE_THRESHOLD
    results: tuple[DecayResult, ...] = ()

    def result_at(self, omega: float) -> DecayResult:
        return self.results[int(np.flatnonzero(self.omegas == omega)[0])]


def sweep_omega(
    inst: EC3Instance,
    sp: SimulationParams,
    omega_grid: Sequence[float],
    tau: float | None = None,
    threshold: float = RESONANCE_THRESHOLD,
) -> OmegaSweep:
    """Probe decay versus probe frequency.

    Without an explicit ``tau`` each frequency is tried at the m-doubling
    guesses pi/(2 c sqrt(m)) and the best one is kept, so a resonant level
    of any degeneracy shows up.
    """
    omegas = np.asarray(omega_grid, dtype=float)
    if omegas.size == 0 or np.any(omegas <= 0):
        raise ValueError("omega grid must be non-empty and positive")
    if np.any(np.diff(omegas) < 0):
        raise ValueError("omega grid must be ascending")

    def point(w: float) -> DecayResult:
        psp = sp.with_(omega=float(w))
        runner = Runner(inst, psp)
        if tau is not None:
            return runner.run(tau)
        return search_optimal_tau(inst, psp, runner)[1]

    results = _ordered_map(point, omegas.tolist())
    p = np.array([r.p_decay for r in results])
    above = np.flatnonzero(p > threshold)
    first = float(omegas[above[0]]) if above.size else None
    return OmegaSweep(
        omegas=omegas,
        p_decay=p,
        taus=np.array([r.tau for r in results]),
        first_resonant_omega=first,
        threshold=threshold,
        results=tuple(results),
    )


# --- end-to-end solve ---------------------------------------------------------


@dataclass
class SolveReport:
    satisfiable: bool
    p_decay: float
    tau: float
    guessed_m: int
    chosen_L: int | None
    solutions: list[Assignment]
    params: SimulationParams
    analytics: AnalyticPrediction | None = None
    first_resonant_omega: float | None = None
    minimal_violation: list[Assignment] = field(default_factory=list)

    def to_dict(self) -> dict:
        params = self.params.to_dict()
        params["tau"] = self.tau
        doc = {
            "params": params,
            "satisfiable": self.satisfiable,
            "p_decay": self.p_decay,
            "chosen_L": self.chosen_L,
            "solutions": [str(a) for a in self.solutions],
            "analytics": self.analytics.to_dict() if self.analytics else None,
        }
        if not self.satisfiable:
            doc["first_resonant_omega"] = self.first_resonant_omega
            doc["minimal_violation"] = [str(a) for a in self.minimal_violation]
        return doc


def solve(
    inst: EC3Instance, sp: SimulationParams, threshold: float | None = None
) -> SolveReport:
    """Decide satisfiability at omega = 1 using the m-doubling tau search.

    For unsatisfiable instances the frequency is then stepped upward to find
    the lowest resonant level and its (minimal-violation) assignments.  The
    default extraction threshold is 1/(4 m_guess), half the smallest uniform
    weight compatible with the guessed degeneracy.
    """
    sp = sp.with_(omega=1.0)
    m, dr = search_optimal_tau(inst, sp)
    if threshold is None:
        threshold = 1.0 / (4 * m)
    satisfiable = dr.p_decay > RESONANCE_THRESHOLD
    report = SolveReport(
        satisfiable=satisfiable,
        p_decay=dr.p_decay,
        tau=dr.tau,
        guessed_m=m,
        chosen_L=dr.chosen_L,
        solutions=extract_solutions(dr, threshold) if satisfiable else [],
        params=sp.with_(tau=dr.tau),
    )
    if satisfiable:
        report.analytics = analytic_prediction(inst, sp.with_(tau=dr.tau), m)
        return report
    grid = np.arange(2.0, inst.num_clauses + 2.0)
    sweep = sweep_omega(inst, sp, grid)
    report.first_resonant_omega = sweep.first_resonant_omega
    if sweep.first_resonant_omega is not None:
        hit = sweep.result_at(sweep.first_resonant_omega)
        guess = round(optimal_tau(sp.c, 1) ** 2 / hit.tau**2)
        report.minimal_violation = extract_solutions(hit, min(threshold, 1.0 / (4 * guess)))
    return report
