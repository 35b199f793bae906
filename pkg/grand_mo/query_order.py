"""
Ordres de test des motifs d'erreur : ordre de Markov, ordre contraint (m, l1, l2)
pour le matériel, ordre par poids de Hamming, et oracles de dénombrement.

Chaque ordre existe sous deux formes : un flux de blocs numpy contigus
(``order_blocks``), utilisé par les décodeurs pour tester un bloc de syndromes
d'un coup, et le flux de ``BurstPattern`` qui en est l'aplatissement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterator, Sequence, Tuple

import numpy as np

from .gf2_algebra import BitVector

Run = Tuple[int, int]


@dataclass(frozen=True)
class BurstPattern:
    """
    Motif d'erreur décrit par ses bursts : paires (début, longueur), indices à partir de 1.

    Deux bursts consécutifs sont séparés d'au moins un zéro.
    """

    n: int
    runs: Tuple[Run, ...] = ()

    def __post_init__(self):
        previous_end = -1
        for start, length in self.runs:
            if length < 1 or start < 1 or start + length - 1 > self.n:
                raise ValueError(f"Burst ({start}, {length}) hors de [1, {self.n}]")
            if start <= previous_end + 1:
                raise ValueError(f"Bursts non disjoints ou contigus dans {self.runs}")
            previous_end = start + length - 1

    @classmethod
    def zero(cls, n: int) -> "BurstPattern":
        return cls(n, ())

    @classmethod
    def from_positions(cls, n: int, positions: Sequence[int]) -> "BurstPattern":
        """Regroupe des positions (à partir de 1) en bursts maximaux."""
        runs = []
        for position in sorted(set(int(p) for p in positions)):
            if runs and runs[-1][0] + runs[-1][1] == position:
                runs[-1][1] += 1
            else:
                runs.append([position, 1])
        return cls(n, tuple((start, length) for start, length in runs))

    @classmethod
    def from_runs(cls, n: int, runs) -> "BurstPattern":
        """Accepte des bursts éventuellement contigus et les fusionne."""
        positions = [start + offset for start, length in runs for offset in range(int(length))]
        return cls.from_positions(n, positions)

    @classmethod
    def from_bitvector(cls, vector: BitVector) -> "BurstPattern":
        return cls.from_positions(vector.length, (np.flatnonzero(vector.to_bits()) + 1).tolist())

    @property
    def m(self) -> int:
        return len(self.runs)

    @property
    def weight(self) -> int:
        return sum(length for _, length in self.runs)

    def cost(self, dl: int) -> int:
        """Coût de Markov l + (m-1)·Δl."""
        return self.weight + (self.m - 1) * dl if self.runs else 0

    def positions(self) -> Tuple[int, ...]:
        return tuple(start + offset for start, length in self.runs for offset in range(length))

    def to_bitvector(self) -> BitVector:
        bits = np.zeros(self.n, dtype=np.uint8)
        for start, length in self.runs:
            bits[start - 1:start - 1 + length] = 1
        return BitVector.from_bits(bits)

    def __str__(self) -> str:
        return ",".join(f"{start}:{length}" for start, length in self.runs) or "-"


class OrderKind(str, Enum):
    MARKOV = "markov"
    CONSTRAINED = "constrained"
    HAMMING = "hamming"


@dataclass(frozen=True)
class QueryOrderSpec:
    """Choix d'un ordre de test et de ses paramètres."""

    kind: OrderKind
    dl: int = 0
    dmax: int = 0
    l1: int = 0
    l2: int = 0
    ab: int = 0

    def __post_init__(self):
        if self.kind is OrderKind.MARKOV and (self.dl < 1 or self.dmax < 1):
            raise ValueError(f"Ordre de Markov invalide : Δl={self.dl}, dmax={self.dmax}")
        if self.kind is OrderKind.CONSTRAINED and not (self.l1 >= 1 and 0 <= self.l2 <= self.l1):
            raise ValueError(f"Ordre contraint invalide : l1={self.l1}, l2={self.l2}")
        if self.kind is OrderKind.HAMMING and self.ab < 1:
            raise ValueError(f"Ordre de Hamming invalide : AB={self.ab}")

    @classmethod
    def markov(cls, dl: int, dmax: int) -> "QueryOrderSpec":
        return cls(OrderKind.MARKOV, dl=dl, dmax=dmax)

    @classmethod
    def constrained(cls, l1: int, l2: int) -> "QueryOrderSpec":
        return cls(OrderKind.CONSTRAINED, l1=l1, l2=l2)

    @classmethod
    def hamming(cls, ab: int) -> "QueryOrderSpec":
        return cls(OrderKind.HAMMING, ab=ab)

    @property
    def m_max(self) -> int:
        if self.kind is OrderKind.CONSTRAINED:
            return 1 if self.l2 == 0 else 2
        return self.dmax if self.kind is OrderKind.MARKOV else self.ab

    def validate_for(self, n: int) -> None:
        if self.kind is OrderKind.CONSTRAINED and self.l1 > n:
            raise ValueError(f"l1={self.l1} > n={n}")
        if self.kind is OrderKind.HAMMING and self.ab > n:
            raise ValueError(f"AB={self.ab} > n={n}")

    def canonical(self, dl_label: str | None = None) -> str:
        if self.kind is OrderKind.MARKOV:
            return f"markov(dl={dl_label or self.dl},dmax={self.dmax})"
        if self.kind is OrderKind.CONSTRAINED:
            return f"constrained(l1={self.l1},l2={self.l2})"
        return f"hamming(ab={self.ab})"


@dataclass(frozen=True)
class PatternBlock:
    """
    Bloc contigu de motifs : ``runs[i, j] = (début, longueur)`` du j-ème burst du motif i.

    ``step`` est l'indice du pas de temps matériel (ordre contraint), None sinon.
    Dans l'ordre de Hamming les bursts d'un bloc peuvent être contigus.
    """

    runs: np.ndarray
    step: int | None = None

    def __len__(self) -> int:
        return len(self.runs)

    def pattern(self, index: int, n: int) -> BurstPattern:
        return BurstPattern.from_runs(n, self.runs[index].tolist())

    def patterns(self, n: int) -> Iterator[BurstPattern]:
        for index in range(len(self.runs)):
            yield self.pattern(index, n)


def _combinations(size: int, m: int, offset: int = 0) -> Iterator[np.ndarray]:
    """Combinaisons de m éléments de [offset, size) en ordre lexicographique, par tranches."""
    if size - offset < m:
        return
    if m == 1:
        yield np.arange(offset, size)[:, None]
    elif m == 2:
        first, second = np.triu_indices(size - offset, k=1)
        yield np.column_stack((first, second)) + offset
    else:
        for head in range(offset, size - m + 1):
            for tail in _combinations(size, m - 1, head + 1):
                yield np.column_stack((np.full(len(tail), head), tail))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """Compositions de ``total`` en ``parts`` entiers ≥ 1, en ordre lexicographique."""
    for cuts in combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _placement_blocks(n: int, composition: Tuple[int, ...]) -> Iterator[np.ndarray]:
    """Placements des bursts de longueurs ``composition`` en ordre lexicographique des débuts."""
    weight = sum(composition)
    lengths = np.array(composition)
    preceding = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    for slots in _combinations(n - weight + 1, len(composition)):
        starts = slots + preceding + 1
        yield np.stack((starts, np.broadcast_to(lengths, starts.shape)), axis=-1)


def markov_subclasses(n: int, dl: int, dmax: int) -> Iterator[Tuple[int, int]]:
    """Sous-classes (m, l) dans l'ordre d'émission, par coût l + (m-1)·Δl croissant."""
    last_cost = dmax + (dmax - 1) * dl
    for cost in range(1, last_cost + 1):
        for m in range(1, dmax + 1):
            weight = cost - (m - 1) * dl
            if weight < m:
                break
            if weight + m - 1 <= n:
                yield m, weight


def markov_blocks(n: int, dl: int, dmax: int) -> Iterator[PatternBlock]:
    for m, weight in markov_subclasses(n, dl, dmax):
        for composition in _compositions(weight, m):
            for runs in _placement_blocks(n, composition):
                yield PatternBlock(runs)


def _single_bursts(n: int, first_start: int, l1: int) -> np.ndarray:
    """Bursts uniques démarrant à ``first_start`` ou après : début croissant puis longueur croissante."""
    runs = [
        (start, length)
        for start in range(first_start, n + 1)
        for length in range(1, min(l1, n - start + 1) + 1)
    ]
    return np.array(runs, dtype=np.int64).reshape(-1, 2)


def constrained_blocks(n: int, l1: int, l2: int) -> Iterator[PatternBlock]:
    """Groupes par pas de temps (à partir du pas 2 ; le pas 1 est le motif nul)."""
    singles = _single_bursts(n, 1, l1)
    yield PatternBlock(singles[:, None, :], step=2)
    step = 2
    for a in range(1, l2 + 1):
        for p in range(1, n - a):
            seconds = _single_bursts(n, p + a + 1, l1)
            firsts = np.broadcast_to(np.array([p, a]), seconds.shape)
            step += 1
            yield PatternBlock(np.stack((firsts, seconds), axis=1), step=step)


def hamming_blocks(n: int, ab: int) -> Iterator[PatternBlock]:
    for weight in range(1, ab + 1):
        for support in _combinations(n, weight):
            starts = support + 1
            yield PatternBlock(np.stack((starts, np.ones_like(starts)), axis=-1))


def order_blocks(spec: QueryOrderSpec, n: int) -> Iterator[PatternBlock]:
    """Flux de blocs des motifs non nuls de l'ordre ``spec``."""
    spec.validate_for(n)
    if spec.kind is OrderKind.MARKOV:
        return markov_blocks(n, spec.dl, spec.dmax)
    if spec.kind is OrderKind.CONSTRAINED:
        return constrained_blocks(n, spec.l1, spec.l2)
    return hamming_blocks(n, spec.ab)


def iter_patterns(spec: QueryOrderSpec, n: int) -> Iterator[BurstPattern]:
    """Tous les motifs de l'ordre, motif nul en tête."""
    yield BurstPattern.zero(n)
    for block in order_blocks(spec, n):
        yield from block.patterns(n)


def markov_order(n: int, dl: int, dmax: int) -> Iterator[BurstPattern]:
    """
    Ordre de Markov de GRAND-MO.

    Motif nul, puis classes de coût c = l + (m-1)·Δl croissant ; dans une
    classe, m croissant, compositions puis débuts en ordre lexicographique.
    S'arrête après la sous-classe (m = dmax, l = dmax).
    """
    return iter_patterns(QueryOrderSpec.markov(dl, dmax), n)


def constrained_order(n: int, l1: int, l2: int) -> Iterator[Tuple[BurstPattern, ...]]:
    """
    Ordre contraint, groupé par pas de temps matériel.

    Pas 1 : motif nul ; pas 2 : tous les bursts uniques de longueur ≤ l1 ;
    puis un pas par premier burst (début p, longueur a ≤ l2) testant tous les
    seconds bursts de longueur ≤ l1 placés à sa droite.
    """
    spec = QueryOrderSpec.constrained(l1, l2)
    spec.validate_for(n)
    yield (BurstPattern.zero(n),)
    for block in constrained_blocks(n, l1, l2):
        yield tuple(block.patterns(n))


def hamming_order(n: int, ab: int) -> Iterator[BurstPattern]:
    """Motif nul puis tous les motifs de poids 1 à AB, supports en ordre lexicographique."""
    return iter_patterns(QueryOrderSpec.hamming(ab), n)


def count_runs_patterns(n: int, m: int) -> int:
    """Nombre de mots de longueur n ayant exactement m bursts : C(n+1, 2m)."""
    if n < 1 or m < 1:
        raise ValueError(f"Paramètres invalides : n={n}, m={m}")
    return math.comb(n + 1, 2 * m)


def count_subclass(n: int, m: int, weight: int) -> int:
    """Motifs à m bursts de poids total ``weight`` : C(l-1, m-1)·C(n-l+1, m)."""
    return math.comb(weight - 1, m - 1) * math.comb(n - weight + 1, m)


def worst_case_steps(n: int, L: int) -> int:
    """Nombre de pas de temps du pire cas : L·(2n-L-3)/2 + 2."""
    if not 0 <= L <= n - 2:
        raise ValueError(f"L={L} hors de [0, n-2={n - 2}]")
    return L * (2 * n - L - 3) // 2 + 2


def constrained_step_count(n: int, l2: int) -> int:
    """Pas de temps de l'ordre contraint, premiers bursts impossibles exclus."""
    return worst_case_steps(n, min(l2, max(n - 2, 0))) if n >= 2 else 2


def query_count(spec: QueryOrderSpec, n: int) -> int:
    """
    Nombre de motifs non nuls émis (pire cas de requêtes, test du motif nul exclu).

    Args:
        spec: Ordre de test
        n: Longueur du code

    Returns:
        Le nombre de requêtes d'appartenance au code dans le pire cas
    """
    spec.validate_for(n)
    if spec.kind is OrderKind.MARKOV:
        return sum(count_subclass(n, m, weight) for m, weight in markov_subclasses(n, spec.dl, spec.dmax))
    if spec.kind is OrderKind.HAMMING:
        return sum(math.comb(n, weight) for weight in range(1, spec.ab + 1))

    l1 = spec.l1
    singles = sum(n - length + 1 for length in range(1, l1 + 1))

    def seconds(remaining: int) -> int:
        # bursts de longueur ≤ l1 dans une fenêtre de ``remaining`` positions
        return sum(min(l1, t) for t in range(1, remaining + 1))

    window_totals = [0]
    for remaining in range(1, n):
        window_totals.append(window_totals[-1] + seconds(remaining))
    pairs = sum(window_totals[n - a - 1] for a in range(1, spec.l2 + 1) if n - a - 1 >= 1)
    return singles + pairs
