"""Construction des codes linéaires : codes aléatoires, BCH (raccourcis), matrices H chargées."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import List

import galois
import numpy as np

from .gf2_algebra import BitMatrix, BitVector, mat_vec_mul, right_inverse, row_reduce

# Polynômes primitifs utilisés pour GF(2^m), indexés par m
PRIMITIVE_POLYNOMIALS = {
    3: "x^3 + x + 1",
    4: "x^4 + x + 1",
    5: "x^5 + x^2 + 1",
    6: "x^6 + x + 1",
    7: "x^7 + x^3 + 1",
    8: "x^8 + x^4 + x^3 + x^2 + 1",
    9: "x^9 + x^4 + 1",
    10: "x^10 + x^3 + 1",
}


@dataclass(frozen=True)
class LinearCode:
    """
    Code linéaire binaire (n, k) prêt pour le décodage.

    Les invariants H·G⊤ = 0, G·G⁻¹ = I_k et rang(H) = n-k sont vérifiés à la
    construction. ``d`` vaut None lorsque la distance minimale n'est pas connue
    (codes aléatoires, matrices chargées).
    """

    n: int
    k: int
    H: BitMatrix
    G: BitMatrix
    G_inv: BitMatrix
    d: int | None = None
    name: str = "code"

    def __post_init__(self):
        if not 1 <= self.k < self.n:
            raise ValueError(f"Dimensions invalides : (n={self.n}, k={self.k}), 1 ≤ k < n requis")
        if (self.H.rows, self.H.cols) != (self.n - self.k, self.n):
            raise ValueError(f"H doit être {self.n - self.k}x{self.n}")
        if (self.G.rows, self.G.cols) != (self.k, self.n):
            raise ValueError(f"G doit être {self.k}x{self.n}")
        if (self.G_inv.rows, self.G_inv.cols) != (self.n, self.k):
            raise ValueError(f"G⁻¹ doit être {self.n}x{self.k}")
        if self.d is not None and self.d < 1:
            raise ValueError(f"Distance minimale invalide : {self.d}")
        if (self.H @ self.G.transpose()).words.any():
            raise ValueError("H·G⊤ ≠ 0 : G n'engendre pas le noyau de H")
        if self.G @ self.G_inv != BitMatrix.identity(self.k):
            raise ValueError("G·G⁻¹ ≠ I")
        if self.H.rank != self.n - self.k:
            raise ValueError(f"rang(H) = {self.H.rank} < n-k = {self.n - self.k}")

    @property
    def redundancy(self) -> int:
        return self.n - self.k

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def label(self) -> str:
        return f"{self.name}({self.n},{self.k})"

    @cached_property
    def G_t(self) -> BitMatrix:
        return self.G.transpose()

    @cached_property
    def G_inv_t(self) -> BitMatrix:
        return self.G_inv.transpose()

    def extract_message(self, codeword: BitVector) -> BitVector:
        """Retrouve ``u = c · G⁻¹``."""
        return mat_vec_mul(self.G_inv_t, codeword)


def _systematic_code(parity: np.ndarray, d: int | None, name: str) -> LinearCode:
    """Assemble G = [I_k | P], H = [P⊤ | I_{n-k}] et G⁻¹ par sélection des k premiers bits."""
    k, redundancy = parity.shape
    n = k + redundancy
    generator = np.hstack([np.eye(k, dtype=np.uint8), parity])
    parity_check = np.hstack([parity.T, np.eye(redundancy, dtype=np.uint8)])
    G = BitMatrix.from_bits(generator)
    return LinearCode(
        n=n,
        k=k,
        H=BitMatrix.from_bits(parity_check),
        G=G,
        G_inv=right_inverse(G),
        d=d,
        name=name,
    )


def make_rlc(n: int, k: int, seed: int) -> LinearCode:
    """
    Code linéaire aléatoire systématique.

    Args:
        n: Longueur du code
        k: Nombre de bits d'information
        seed: Graine du générateur (même graine, même code)

    Returns:
        Le code, sans distance minimale connue
    """
    if not 1 <= k < n:
        raise ValueError(f"Dimensions invalides : (n={n}, k={k}), 1 ≤ k < n requis")
    rng = np.random.default_rng(seed)
    parity = rng.integers(0, 2, size=(k, n - k), dtype=np.uint8)
    return _systematic_code(parity, d=None, name="rlc")


def bch_generator_polynomial(field_degree: int, t: int, expurgate: bool = False) -> galois.Poly:
    """
    Polynôme générateur du BCH binaire au sens strict de longueur 2^m - 1.

    C'est le ppcm des polynômes minimaux de α, α², ..., α^{2t} ; avec
    ``expurgate`` on ajoute la racine α⁰ (facteur x + 1).
    """
    if field_degree not in PRIMITIVE_POLYNOMIALS:
        raise ValueError(f"Degré de corps non supporté : {field_degree} (3 à 10)")
    if t < 1:
        raise ValueError(f"Capacité de correction invalide : t={t}")
    field = galois.GF(2**field_degree, irreducible_poly=PRIMITIVE_POLYNOMIALS[field_degree])
    alpha = field(2)
    first = 0 if expurgate else 1
    minimal = [(alpha**power).minimal_poly() for power in range(first, 2 * t + 1)]
    return galois.lcm(*minimal)


def make_bch(field_degree: int, t: int, shorten_by: int = 0, expurgate: bool = False) -> LinearCode:
    """
    Code BCH binaire systématique, éventuellement raccourci.

    La position 1 du mot de code porte le coefficient de x^{n-1}, de sorte que
    les k premières positions sont les bits d'information et les bursts du canal
    restent des bursts du code cyclique. Le raccourcissement supprime les
    ``shorten_by`` premières positions d'information.

    Args:
        field_degree: m, avec n = 2^m - 1
        t: Capacité de correction visée (distance construite 2t+1)
        shorten_by: Nombre de positions d'information retirées
        expurgate: Ajoute le facteur (x+1) (sous-code de poids pair, distance 2t+2)

    Returns:
        Le code construit
    """
    generator = bch_generator_polynomial(field_degree, t, expurgate)
    n = 2**field_degree - 1
    redundancy = generator.degree
    k = n - redundancy
    if k < 1:
        raise ValueError(f"t={t} trop grand pour n={n} : aucun bit d'information")
    if not 0 <= shorten_by < k:
        raise ValueError(f"Raccourcissement invalide : {shorten_by} (0 ≤ s < {k})")

    # Ligne i : x^{n-1-i} + (x^{n-1-i} mod g), partie redondante rangée de x^{r-1} à x^0
    parity = np.zeros((k, redundancy), dtype=np.uint8)
    for i in range(k):
        remainder = int(galois.Poly.Degrees([n - 1 - i]) % generator)
        for column in range(redundancy):
            parity[i, column] = (remainder >> (redundancy - 1 - column)) & 1

    designed_distance = 2 * t + 2 if expurgate else 2 * t + 1
    return _systematic_code(parity[shorten_by:], d=designed_distance, name="bch")


def encode(code: LinearCode, message: BitVector) -> BitVector:
    """Encode ``c = u · G``."""
    if message.length != code.k:
        raise ValueError(f"Message de {message.length} bits, {code.k} attendus")
    return mat_vec_mul(code.G_t, message)


def code_from_parity_check(H: BitMatrix, d: int | None = None, name: str = "code") -> LinearCode:
    """
    Complète une matrice de parité en code : G est une base du noyau de H.

    Chaque colonne libre de la forme réduite de H donne une ligne de G ; G⁻¹
    vient de ``right_inverse``.
    """
    reduced, rank, pivots = row_reduce(H)
    if rank < H.rows:
        raise ValueError(f"Matrice H de rang {rank} < {H.rows} lignes : lignes dépendantes")
    n = H.cols
    pivot_columns = [p - 1 for p in pivots]
    free_columns = [c for c in range(n) if c not in set(pivot_columns)]
    if not free_columns:
        raise ValueError("H de rang plein en colonnes : le code ne contient que le mot nul")

    reduced_bits = reduced.to_bits()
    generator = np.zeros((len(free_columns), n), dtype=np.uint8)
    for row, free in enumerate(free_columns):
        generator[row, free] = 1
        generator[row, pivot_columns] = reduced_bits[:rank, free]
    G = BitMatrix.from_bits(generator)
    return LinearCode(n=n, k=n - rank, H=H, G=G, G_inv=right_inverse(G), d=d, name=name)


def load_parity_check(source: str) -> LinearCode:
    """
    Charge un code depuis le format texte de matrice H.

    Ligne 1 : ``n k`` ; puis n-k lignes de n caractères 0/1. Les lignes de
    commentaire ``#`` en tête de fichier sont ignorées.

    Args:
        source: Contenu du fichier

    Returns:
        Le code complété (G, G⁻¹), distance minimale inconnue
    """
    lines = source.splitlines()
    while lines and lines[0].startswith("#"):
        lines.pop(0)
    if lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ValueError("Fichier H vide")

    header = lines[0].split()
    if len(header) != 2 or not all(field.isdigit() for field in header):
        raise ValueError(f"En-tête invalide : {lines[0]!r} (attendu 'n k')")
    n, k = (int(field) for field in header)
    if not 1 <= k < n:
        raise ValueError(f"Dimensions invalides : (n={n}, k={k})")

    rows: List[str] = lines[1:]
    if len(rows) != n - k:
        raise ValueError(f"{len(rows)} lignes de H trouvées, {n - k} attendues")
    for number, row in enumerate(rows, start=2):
        if len(row) != n or set(row) - {"0", "1"}:
            raise ValueError(f"Ligne {number} invalide : {n} caractères 0/1 attendus")

    bits = np.array([[int(char) for char in row] for row in rows], dtype=np.uint8)
    code = code_from_parity_check(BitMatrix.from_bits(bits), name="file")
    if code.k != k:
        raise ValueError(f"rang(H) insuffisant : k={code.k} au lieu de {k}")
    return code


def dump_parity_check(code: LinearCode, provenance: str | None = None) -> str:
    """Sérialise H au format texte, précédé d'une éventuelle ligne de provenance."""
    lines = []
    if provenance:
        lines.append(provenance if provenance.startswith("#") else f"# {provenance}")
    lines.append(f"{code.n} {code.k}")
    lines.extend("".join(str(bit) for bit in row) for row in code.H.to_bits())
    return "\n".join(lines) + "\n"
