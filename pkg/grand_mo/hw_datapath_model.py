"""Modèle fonctionnel, cycle par cycle, du décodeur matériel GRAND-MO à ordre contraint.

Le registre de syndromes préfixes, le contrôleur ``s_comp``, les vérificateurs
XOR/NOR parallèles et l'encodeur de priorité sont représentés par leur
comportement entrée/sortie à chaque pas de temps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Iterator, Tuple

import numpy as np

from .code_constructor import LinearCode
from .gf2_algebra import BitVector
from .grand_decoders import DecodeResult, SyndromeTable, abandoned_result, decoded_result
from .query_order import BurstPattern, constrained_step_count


class Phase(str, Enum):
    SYNDROME_CHECK = "syndrome_check"
    SINGLE_BURSTS = "single_bursts"
    TWO_BURSTS = "two_bursts"
    EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class HwConfig:
    """Paramètres du décodeur : dimensions du code, limites de bursts, horloge."""

    n: int
    k: int
    l1: int
    l2: int
    clock_hz: float = 500e6
    min_rate: float = 0.0

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"Dimensions invalides : (n={self.n}, k={self.k})")
        if not 1 <= self.l1 <= self.n:
            raise ValueError(f"l1={self.l1} hors de [1, n={self.n}]")
        if not 0 <= self.l2 <= self.l1:
            raise ValueError(f"l2={self.l2} hors de [0, l1={self.l1}]")
        if self.clock_hz <= 0:
            raise ValueError(f"Fréquence d'horloge invalide : {self.clock_hz}")

    @classmethod
    def from_code(cls, code: LinearCode, l1: int, l2: int, clock_hz: float = 500e6, min_rate: float = 0.0) -> "HwConfig":
        return cls(n=code.n, k=code.k, l1=l1, l2=l2, clock_hz=clock_hz, min_rate=min_rate)

    @property
    def worst_case_cycles(self) -> int:
        return constrained_step_count(self.n, self.l2)

    def check(self, code: LinearCode) -> None:
        if (code.n, code.k) != (self.n, self.k):
            raise ValueError(f"Code {code.label} incompatible avec le décodeur ({self.n},{self.k})")
        if code.rate < self.min_rate:
            raise ValueError(f"Rendement {code.rate:.3f} inférieur au minimum supporté {self.min_rate}")


@dataclass(frozen=True)
class DatapathState:
    """
    État du chemin de données au début d'un cycle.

    ``prefix_registers[l]`` contient le syndrome du burst 1..l (ligne 0 nulle) ;
    ``s_comp`` vaut s_c ⊕ syndrome du premier burst ancré (début ``p``,
    longueur ``a``) pendant la phase TWO_BURSTS, s_c sinon.
    """

    cfg: HwConfig
    prefix_registers: np.ndarray
    s_comp: np.ndarray
    shift_offset: int = 0
    phase: Phase = Phase.SYNDROME_CHECK
    cycle: int = 0
    a: int = 0
    p: int = 0

    @classmethod
    def initial(cls, cfg: HwConfig, table: SyndromeTable, s_c: np.ndarray) -> "DatapathState":
        return cls(cfg=cfg, prefix_registers=table.prefix, s_comp=s_c)

    def shifted_register(self) -> np.ndarray:
        """Registre décalé de ``shift_offset`` : la ligne j porte le burst offset+1..offset+j."""
        offset = self.shift_offset
        return self.prefix_registers[offset:] ^ self.prefix_registers[offset]

    def anchor(self, a: int, p: int, s_c: np.ndarray) -> "DatapathState":
        """Ancre le premier burst (p, a) : décalage de p+a positions et nouveau s_comp."""
        first = self.prefix_registers[p + a - 1] ^ self.prefix_registers[p - 1]
        return replace(
            self,
            phase=Phase.TWO_BURSTS,
            cycle=self.cycle + 1,
            a=a,
            p=p,
            shift_offset=p + a,
            s_comp=s_c ^ first,
        )


@dataclass(frozen=True)
class StepOutcome:
    """Résultat d'un cycle : motifs testés (dans l'ordre de priorité), succès éventuel, état suivant."""

    state: DatapathState
    runs: np.ndarray
    hit_index: int | None
    next: DatapathState

    @property
    def size(self) -> int:
        return len(self.runs)

    @cached_property
    def checked(self) -> Tuple[BurstPattern, ...]:
        n = self.state.cfg.n
        return tuple(BurstPattern.from_runs(n, runs.tolist()) for runs in self.runs)

    @property
    def hit(self) -> BurstPattern | None:
        if self.hit_index is None:
            return None
        return BurstPattern.from_runs(self.state.cfg.n, self.runs[self.hit_index].tolist())


def _window(n: int, first: int, l1: int) -> Tuple[np.ndarray, np.ndarray]:
    """Bursts de longueur ≤ l1 commençant à ``first`` ou après, dans l'ordre de l'encodeur de priorité."""
    starts, lengths = np.meshgrid(np.arange(first, n + 1), np.arange(1, l1 + 1), indexing="ij")
    valid = starts + lengths - 1 <= n
    return starts[valid], lengths[valid]


def _next_anchor(cfg: HwConfig, a: int, p: int) -> Tuple[int, int] | None:
    """Premier burst suivant (a, p) : p croissant puis a croissant ; None en fin de parcours."""
    if p + 1 <= cfg.n - a - 1:
        return a, p + 1
    a += 1
    if a <= cfg.l2 and cfg.n - a - 1 >= 1:
        return a, 1
    return None


def _advance(state: DatapathState, s_c: np.ndarray) -> DatapathState:
    cfg = state.cfg
    if state.phase is Phase.SYNDROME_CHECK:
        return replace(state, phase=Phase.SINGLE_BURSTS, cycle=state.cycle + 1, s_comp=s_c)
    following = (1, 0) if state.phase is Phase.SINGLE_BURSTS else (state.a, state.p)
    anchor = _next_anchor(cfg, *following) if cfg.l2 >= 1 else None
    if anchor is None:
        return replace(state, phase=Phase.EXHAUSTED, cycle=state.cycle + 1)
    return state.anchor(*anchor, s_c)


def hw_step(state: DatapathState, s_c: np.ndarray) -> StepOutcome:
    """
    Exécute un cycle du décodeur.

    Args:
        state: État courant (phase différente de EXHAUSTED)
        s_c: Syndrome du vecteur reçu

    Returns:
        Les motifs testés pendant ce cycle, le premier succès selon l'encodeur
        de priorité (début le plus bas puis burst le plus court) et l'état suivant
    """
    cfg = state.cfg
    if state.phase is Phase.EXHAUSTED:
        raise ValueError("Le décodeur a déjà parcouru tous ses cycles")

    if state.phase is Phase.SYNDROME_CHECK:
        runs = np.zeros((1, 0, 2), dtype=np.int64)
        hit = 0 if not s_c.any() else None
        return StepOutcome(state, runs, hit, _advance(state, s_c))

    offset = state.shift_offset
    starts, lengths = _window(cfg.n, offset + 1, cfg.l1)
    register = state.shifted_register()
    lanes = starts - offset - 1
    tests = register[lanes + lengths] ^ register[lanes] ^ state.s_comp
    zero = np.flatnonzero(~tests.any(axis=1))
    hit = int(zero[0]) if zero.size else None

    second = np.stack((starts, lengths), axis=-1)
    if state.phase is Phase.SINGLE_BURSTS:
        runs = second[:, None, :]
    else:
        first = np.broadcast_to(np.array([state.p, state.a]), second.shape)
        runs = np.stack((first, second), axis=1)
    return StepOutcome(state, runs, hit, _advance(state, s_c))


def _run(code: LinearCode, received: BitVector, cfg: HwConfig) -> Iterator[StepOutcome]:
    cfg.check(code)
    if received.length != code.n:
        raise ValueError(f"Vecteur reçu de {received.length} bits, {code.n} attendus")
    table = SyndromeTable.for_code(code)
    s_c = table.of(received)
    state = DatapathState.initial(cfg, table, s_c)
    while state.phase is not Phase.EXHAUSTED:
        outcome = hw_step(state, s_c)
        yield outcome
        if outcome.hit_index is not None:
            return
        state = outcome.next


def hw_decode(code: LinearCode, received: BitVector, cfg: HwConfig) -> DecodeResult:
    """
    Décode comme le circuit : un groupe de motifs par cycle.

    Le résultat est identique à ``grand_mo_decode`` avec l'ordre contraint
    (l1, l2) ; ``time_steps`` vaut le cycle du succès + 1.
    """
    queries = 0
    outcome = None
    for outcome in _run(code, received, cfg):
        if outcome.hit_index is not None:
            queries += outcome.hit_index + 1
            return decoded_result(code, received, outcome.hit, queries, outcome.state.cycle + 1)
        queries += outcome.size
    return abandoned_result(queries, outcome.state.cycle + 1)


def _format_hit(pattern: BurstPattern | None) -> str:
    if pattern is None:
        return "-"
    return str(pattern) if pattern.m else "zero"


def trace_decode(code: LinearCode, received: BitVector, cfg: HwConfig) -> Iterator[str]:
    """Une ligne par cycle : ``cycle, phase, a, p, s_comp(hex), hit``."""
    redundancy = code.redundancy
    for outcome in _run(code, received, cfg):
        state = outcome.state
        s_comp = BitVector(redundancy, state.s_comp.copy()).to_hex()
        yield (
            f"{state.cycle}, {state.phase.value}, {state.a}, {state.p}, "
            f"{s_comp}, {_format_hit(outcome.hit)}"
        )


@dataclass(frozen=True)
class TimingReport:
    wc_latency_s: float
    avg_latency_s: float
    wc_throughput_bps: float
    avg_throughput_bps: float

    def wc_latency_gain(self, reference_latency_s: float) -> float:
        """Réduction relative de la latence pire cas face à un décodeur de référence."""
        if reference_latency_s <= 0:
            raise ValueError(f"Latence de référence invalide : {reference_latency_s}")
        return 1 - self.wc_latency_s / reference_latency_s


def timing_report(cfg: HwConfig, avg_steps: float, wc_steps: int | None = None) -> TimingReport:
    """
    Latences et débits d'information : latence = pas / fréquence, débit = k / latence.

    Args:
        cfg: Configuration du décodeur
        avg_steps: Nombre moyen de pas mesuré en simulation
        wc_steps: Pas du pire cas (par défaut ``cfg.worst_case_cycles``)

    Returns:
        Le rapport de temps
    """
    if avg_steps <= 0:
        raise ValueError(f"Nombre moyen de pas invalide : {avg_steps}")
    wc_steps = cfg.worst_case_cycles if wc_steps is None else wc_steps
    if wc_steps < 1:
        raise ValueError(f"Nombre de pas pire cas invalide : {wc_steps}")
    wc_latency = wc_steps / cfg.clock_hz
    avg_latency = avg_steps / cfg.clock_hz
    return TimingReport(
        wc_latency_s=wc_latency,
        avg_latency_s=avg_latency,
        wc_throughput_bps=cfg.k / wc_latency,
        avg_throughput_bps=cfg.k / avg_latency,
    )
