"""Algèbre linéaire binaire compacte sur GF(2).

Les bits sont rangés dans des mots ``uint64`` (bit ``i`` de l'interface, compté
à partir de 1, au bit ``(i - 1) % 64`` du mot ``(i - 1) // 64``). Les bits au-delà
de la longueur sont toujours nuls.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Tuple

import numpy as np

WORD_BITS = 64


def _word_count(length: int) -> int:
    return max(1, -(-length // WORD_BITS))


def _pack(bits: np.ndarray, length: int) -> np.ndarray:
    """Range un tableau de bits (dernier axe) dans des mots uint64 little-endian."""
    bits = np.asarray(bits, dtype=np.uint8)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    pad = _word_count(length) * 8 - packed.shape[-1]
    if pad:
        widths = [(0, 0)] * (packed.ndim - 1) + [(0, pad)]
        packed = np.pad(packed, widths)
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def _unpack(words: np.ndarray, length: int) -> np.ndarray:
    raw = np.ascontiguousarray(words.astype("<u8")).view(np.uint8)
    return np.unpackbits(raw, axis=-1, bitorder="little")[..., :length]


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class BitVector:
    """Vecteur binaire de longueur fixe, immuable."""

    length: int
    words: np.ndarray

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"Longueur de vecteur invalide : {self.length}")
        if self.words.shape != (_word_count(self.length),):
            raise ValueError("Nombre de mots incompatible avec la longueur")

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, _frozen(np.zeros(_word_count(length), dtype=np.uint64)))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        array = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        if array.ndim != 1 or array.size == 0:
            raise ValueError("Un vecteur binaire attend une séquence 1D non vide")
        if np.any(array > 1):
            raise ValueError("Les bits doivent valoir 0 ou 1")
        return cls(int(array.size), _frozen(_pack(array, int(array.size))))

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        """Construit un vecteur depuis ``"1010..."`` (indice 1 à gauche)."""
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"Chaîne binaire invalide : {text!r}")
        return cls.from_bits(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        """Le bit ``i`` de l'entier (poids 2**(i-1)) devient l'indice ``i``."""
        if value < 0 or value >> length:
            raise ValueError(f"Entier {value} hors de la plage pour {length} bits")
        raw = value.to_bytes(_word_count(length) * 8, "little")
        return cls(length, _frozen(np.frombuffer(raw, dtype="<u8").astype(np.uint64)))

    @classmethod
    def from_text(cls, text: str, length: int) -> "BitVector":
        """
        Lit un vecteur reçu en binaire ou en hexadécimal.

        Args:
            text: ``"0101..."`` ou ``"0x..."``, le caractère le plus à gauche
                correspondant à l'indice 1
            length: Longueur attendue

        Returns:
            Le vecteur décodé
        """
        text = text.strip()
        if text.lower().startswith("0x"):
            value = int(text[2:], 16)
            if value >> length:
                raise ValueError(f"Valeur hexadécimale trop grande pour {length} bits")
            text = format(value, f"0{length}b")
        vector = cls.from_string(text)
        if vector.length != length:
            raise ValueError(f"Longueur {vector.length} reçue, {length} attendue")
        return vector

    @classmethod
    def unit(cls, index: int, length: int) -> "BitVector":
        """Vecteur indicateur dont seul l'indice ``index`` vaut 1."""
        if not 1 <= index <= length:
            raise ValueError(f"Indice {index} hors de [1, {length}]")
        bits = np.zeros(length, dtype=np.uint8)
        bits[index - 1] = 1
        return cls.from_bits(bits)

    def to_bits(self) -> np.ndarray:
        return _unpack(self.words, self.length)

    def to_int(self) -> int:
        return int.from_bytes(self.words.astype("<u8").tobytes(), "little")

    def to_hex(self) -> str:
        """Hexadécimal de la chaîne binaire, indice 1 en bit de poids fort."""
        digits = -(-self.length // 4)
        return format(int(str(self), 2), f"0{digits}x")

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def is_zero(self) -> bool:
        return not self.words.any()

    def __getitem__(self, index: int) -> int:
        if not 1 <= index <= self.length:
            raise IndexError(f"Indice {index} hors de [1, {self.length}]")
        word, bit = divmod(index - 1, WORD_BITS)
        return int((self.words[word] >> np.uint64(bit)) & np.uint64(1))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.length != other.length:
            raise ValueError(f"Longueurs incompatibles : {self.length} et {other.length}")
        return BitVector(self.length, _frozen(self.words ^ other.words))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and bool(np.array_equal(self.words, other.words))

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __str__(self) -> str:
        return "".join("1" if bit else "0" for bit in self.to_bits())

    def __repr__(self) -> str:
        return f"BitVector({self})"


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """Matrice binaire rangée ligne par ligne, immuable."""

    rows: int
    cols: int
    words: np.ndarray

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"Dimensions invalides : {self.rows}x{self.cols}")
        if self.words.shape != (self.rows, _word_count(self.cols)):
            raise ValueError("Tableau de mots incompatible avec les dimensions")

    @classmethod
    def from_bits(cls, bits) -> "BitMatrix":
        array = np.asarray(bits, dtype=np.uint8)
        if array.ndim != 2 or 0 in array.shape:
            raise ValueError("Une matrice binaire attend un tableau 2D non vide")
        if np.any(array > 1):
            raise ValueError("Les coefficients doivent valoir 0 ou 1")
        rows, cols = array.shape
        return cls(rows, cols, _frozen(_pack(array, cols)))

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls.from_bits(np.eye(size, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: Iterable[BitVector]) -> "BitMatrix":
        rows = list(rows)
        return cls.from_bits(np.vstack([row.to_bits() for row in rows]))

    def to_bits(self) -> np.ndarray:
        return _unpack(self.words, self.cols)

    def row(self, index: int) -> BitVector:
        if not 1 <= index <= self.rows:
            raise IndexError(f"Ligne {index} hors de [1, {self.rows}]")
        return BitVector(self.cols, _frozen(self.words[index - 1].copy()))

    def column(self, index: int) -> BitVector:
        if not 1 <= index <= self.cols:
            raise IndexError(f"Colonne {index} hors de [1, {self.cols}]")
        return BitVector.from_bits(self.to_bits()[:, index - 1])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_bits(self.to_bits().T)

    @cached_property
    def rank(self) -> int:
        return row_reduce(self)[1]

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"Produit impossible : {self.rows}x{self.cols} par {other.rows}x{other.cols}"
            )
        product = self.to_bits().astype(np.int64) @ other.to_bits().astype(np.int64)
        return BitMatrix.from_bits(product & 1)

    @cached_property
    def _digest(self) -> int:
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and bool(
            np.array_equal(self.words, other.words)
        )

    def __hash__(self) -> int:
        return self._digest

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def mat_vec_mul(matrix: BitMatrix, vector: BitVector) -> BitVector:
    """
    Calcule ``M · v`` sur GF(2) par ET mot à mot puis parité du popcount.

    Args:
        matrix: Matrice ``rows x cols``
        vector: Vecteur de longueur ``cols``

    Returns:
        Vecteur de longueur ``rows``
    """
    if vector.length != matrix.cols:
        raise ValueError(
            f"Dimensions incompatibles : matrice à {matrix.cols} colonnes, vecteur de {vector.length} bits"
        )
    parity = np.bitwise_count(matrix.words & vector.words).sum(axis=1) & 1
    return BitVector.from_bits(parity.astype(np.uint8))


def syndrome(parity_check: BitMatrix, word: BitVector) -> BitVector:
    """Syndrome ``H · y⊤`` ; nul si et seulement si ``y`` est un mot de code."""
    return mat_vec_mul(parity_check, word)


def row_reduce(matrix: BitMatrix) -> Tuple[BitMatrix, int, Tuple[int, ...]]:
    """
    Forme échelonnée réduite sur GF(2) (élimination de Gauss-Jordan sur les mots).

    Args:
        matrix: Matrice à réduire

    Returns:
        Tuple (matrice réduite, rang, colonnes pivots numérotées à partir de 1)
    """
    words = matrix.words.copy()
    rank = 0
    pivots = []
    for col in range(matrix.cols):
        if rank == matrix.rows:
            break
        word, bit = divmod(col, WORD_BITS)
        mask = np.uint64(1) << np.uint64(bit)
        candidates = np.flatnonzero(words[rank:, word] & mask)
        if not candidates.size:
            continue
        pivot = rank + int(candidates[0])
        if pivot != rank:
            words[[rank, pivot]] = words[[pivot, rank]]
        others = np.flatnonzero(words[:, word] & mask)
        others = others[others != rank]
        words[others] ^= words[rank]
        pivots.append(col + 1)
        rank += 1
    reduced = BitMatrix(matrix.rows, matrix.cols, _frozen(words))
    return reduced, rank, tuple(pivots)


def right_inverse(generator: BitMatrix) -> BitMatrix:
    """
    Construit ``G⁻¹`` (n x k) tel que ``G · G⁻¹ = I_k``.

    Les lignes de ``G⁻¹`` hors des colonnes pivots de ``G`` sont nulles ; sur les
    pivots on place l'inverse du bloc carré ``G[:, pivots]``.

    Args:
        generator: Matrice génératrice ``k x n`` de rang plein

    Returns:
        Matrice ``n x k``
    """
    k, n = generator.rows, generator.cols
    _, rank, pivots = row_reduce(generator)
    if rank < k:
        raise ValueError(f"Matrice génératrice de rang {rank} < {k} : pas d'inverse à droite")

    columns = [p - 1 for p in pivots]
    square = generator.to_bits()[:, columns]
    augmented = BitMatrix.from_bits(np.hstack([square, np.eye(k, dtype=np.uint8)]))
    reduced, _, _ = row_reduce(augmented)
    inverse = reduced.to_bits()[:, k:]

    result = np.zeros((n, k), dtype=np.uint8)
    result[columns, :] = inverse
    return BitMatrix.from_bits(result)
