"""Décodeurs : GRAND-MO sous un ordre quelconque, GRANDAB, et décodage à distance bornée."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable

import numpy as np

from .code_constructor import LinearCode
from .gf2_algebra import BitVector, mat_vec_mul
from .query_order import BurstPattern, PatternBlock, QueryOrderSpec, hamming_blocks, order_blocks

# Au-delà, la table syndrome → représentant ne tient plus en mémoire
MAX_TABLE_REDUNDANCY = 24


class DecodeStatus(str, Enum):
    DECODED = "decoded"
    ABANDONED = "abandoned"


@dataclass(frozen=True)
class DecodeResult:
    """Résultat d'un décodage ; un abandon n'est pas une erreur."""

    status: DecodeStatus
    codeword: BitVector | None
    message: BitVector | None
    error_pattern: BurstPattern | None
    queries: int
    time_steps: int

    @property
    def decoded(self) -> bool:
        return self.status is DecodeStatus.DECODED


class SyndromeTable:
    """
    Syndromes des colonnes de H et syndromes préfixes, rangés en mots uint64.

    ``prefix[l]`` est le syndrome du burst 1..l ; le burst i..j a pour syndrome
    ``prefix[j] ^ prefix[i-1]``, ce qui rend chaque requête O(1) après O(n)
    de préparation. Les syndromes de plus de 64 bits occupent plusieurs mots.
    """

    def __init__(self, code: LinearCode):
        self.code = code
        self.columns = np.ascontiguousarray(code.H.transpose().words)
        self.words = self.columns.shape[1]
        self.prefix = np.vstack(
            [np.zeros((1, self.words), dtype=np.uint64), np.bitwise_xor.accumulate(self.columns, axis=0)]
        )
        self.prefix.setflags(write=False)

    @classmethod
    def for_code(cls, code: LinearCode) -> "SyndromeTable":
        return _syndrome_table(code)

    def of(self, word: BitVector) -> np.ndarray:
        return mat_vec_mul(self.code.H, word).words

    def burst(self, start: int, length: int) -> np.ndarray:
        return self.prefix[start + length - 1] ^ self.prefix[start - 1]

    def of_runs(self, runs: np.ndarray) -> np.ndarray:
        """Syndromes d'un bloc de motifs ``(N, m, 2)`` → ``(N, mots)``."""
        starts = runs[..., 0]
        ends = starts + runs[..., 1] - 1
        per_run = self.prefix[ends] ^ self.prefix[starts - 1]
        return np.bitwise_xor.reduce(per_run, axis=1)

    def matches(self, syndromes: np.ndarray, target: np.ndarray) -> np.ndarray:
        """Indices des syndromes égaux à ``target``."""
        if self.words == 1:
            return np.flatnonzero(syndromes[:, 0] == target[0])
        return np.flatnonzero((syndromes == target).all(axis=1))


@lru_cache(maxsize=32)
def _syndrome_table(code: LinearCode) -> SyndromeTable:
    return SyndromeTable(code)


def decoded_result(code: LinearCode, received: BitVector, pattern: BurstPattern, queries: int, steps: int) -> DecodeResult:
    codeword = received ^ pattern.to_bitvector()
    return DecodeResult(
        status=DecodeStatus.DECODED,
        codeword=codeword,
        message=code.extract_message(codeword),
        error_pattern=pattern,
        queries=queries,
        time_steps=steps,
    )


def abandoned_result(queries: int, steps: int) -> DecodeResult:
    return DecodeResult(DecodeStatus.ABANDONED, None, None, None, queries=queries, time_steps=steps)


def search_blocks(code: LinearCode, received: BitVector, blocks: Iterable[PatternBlock]) -> DecodeResult:
    """
    Teste le motif nul puis les blocs dans l'ordre, jusqu'au premier syndrome nul.

    ``queries`` compte chaque requête d'appartenance, motif nul compris ; pour
    les blocs portant un pas de temps, ``time_steps`` est le pas du succès
    (ou du dernier bloc), sinon il vaut ``queries``.
    """
    if received.length != code.n:
        raise ValueError(f"Vecteur reçu de {received.length} bits, {code.n} attendus")
    table = SyndromeTable.for_code(code)
    target = table.of(received)
    queries = 1
    step = 1
    if not target.any():
        return decoded_result(code, received, BurstPattern.zero(code.n), queries, step)

    for block in blocks:
        hits = table.matches(table.of_runs(block.runs), target)
        if block.step is not None:
            step = block.step
        if hits.size:
            index = int(hits[0])
            queries += index + 1
            steps = step if block.step is not None else queries
            return decoded_result(code, received, block.pattern(index, code.n), queries, steps)
        queries += len(block)
        if block.step is None:
            step = queries

    return abandoned_result(queries, step)


def grand_mo_decode(code: LinearCode, received: BitVector, spec: QueryOrderSpec) -> DecodeResult:
    """
    GRAND-MO : applique les motifs de ``spec`` jusqu'à ce que r ⊕ e soit un mot de code.

    Args:
        code: Code à décoder
        received: Vecteur reçu r
        spec: Ordre de test (Markov, contraint ou Hamming)

    Returns:
        Le premier motif e de l'ordre tel que H·(r ⊕ e)⊤ = 0, ou un abandon
    """
    return search_blocks(code, received, order_blocks(spec, code.n))


def grandab_decode(code: LinearCode, received: BitVector, ab: int) -> DecodeResult:
    """GRANDAB : motifs par poids de Hamming croissant jusqu'à AB."""
    return grand_mo_decode(code, received, QueryOrderSpec.hamming(ab))


class BoundedDistanceDecoder:
    """
    Décodeur à distance bornée par table syndrome → représentant de poids ≤ t.

    Même comportement entrée/sortie que Berlekamp-Massey ou PGZ sur un code BCH :
    le mot de code à distance ≤ t s'il existe, un abandon sinon. En cas de
    collision de syndromes (t au-delà de la capacité), le premier motif dans
    l'ordre de Hamming l'emporte.
    """

    def __init__(self, code: LinearCode, t: int):
        if code.redundancy > MAX_TABLE_REDUNDANCY:
            raise ValueError(
                f"Table de 2^{code.redundancy} entrées : limite 2^{MAX_TABLE_REDUNDANCY} dépassée"
            )
        if t < 0 or t > code.n:
            raise ValueError(f"t={t} invalide")
        self.code = code
        self.t = t
        self.leader = np.full(2**code.redundancy, -1, dtype=np.int64)
        self.leader[0] = 0
        self.supports = [np.zeros(t, dtype=np.int64)]

        table = SyndromeTable.for_code(code)
        offset = 1
        for block in hamming_blocks(code.n, t) if t else ():
            keys = table.of_runs(block.runs)[:, 0].astype(np.int64)
            unique, first = np.unique(keys, return_index=True)
            fresh = self.leader[unique] < 0
            self.leader[unique[fresh]] = offset + first[fresh]
            padded = np.zeros((len(block), t), dtype=np.int64)
            padded[:, : block.runs.shape[1]] = block.runs[..., 0]
            self.supports.append(padded)
            offset += len(block)
        self.supports = np.vstack(self.supports)

    def decode(self, received: BitVector) -> DecodeResult:
        if received.length != self.code.n:
            raise ValueError(f"Vecteur reçu de {received.length} bits, {self.code.n} attendus")
        key = int(SyndromeTable.for_code(self.code).of(received)[0])
        index = int(self.leader[key])
        if index < 0:
            return abandoned_result(queries=1, steps=1)
        positions = [int(p) for p in self.supports[index] if p > 0]
        pattern = BurstPattern.from_positions(self.code.n, positions)
        return decoded_result(self.code, received, pattern, queries=1, steps=1)


@lru_cache(maxsize=8)
def _bdd_decoder(code: LinearCode, t: int) -> BoundedDistanceDecoder:
    return BoundedDistanceDecoder(code, t)


def bdd_decode(code: LinearCode, received: BitVector, t: int) -> DecodeResult:
    """
    Décodage à distance bornée (équivalent Berlekamp-Massey / PGZ).

    Args:
        code: Code de distance construite connue
        received: Vecteur reçu
        t: Rayon de décodage, au plus ⌊(d-1)/2⌋

    Returns:
        Le mot de code à distance ≤ t, ou un abandon
    """
    if code.d is None:
        raise ValueError("Le décodage à distance bornée exige une distance minimale connue (code BCH)")
    if t > (code.d - 1) // 2:
        raise ValueError(f"t={t} > ⌊(d-1)/2⌋ = {(code.d - 1) // 2}")
    return _bdd_decoder(code, t).decode(received)
