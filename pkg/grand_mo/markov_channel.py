"""Canal de Markov à deux états (Gilbert) : paramètres, tirage du bruit et Δl."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .gf2_algebra import BitVector


@dataclass(frozen=True)
class GilbertElliottParams:
    """
    Paramètres du canal : ``b`` = P(G→B), ``g`` = P(B→G).

    La probabilité stationnaire de basculement ``p = b / (b + g)`` est recalculée,
    jamais stockée.
    """

    b: float
    g: float

    def __post_init__(self):
        if not 0 < self.b < 1:
            raise ValueError(f"b={self.b} hors de ]0, 1[")
        if not 0 < self.g <= 1:
            raise ValueError(f"g={self.g} hors de ]0, 1]")

    @classmethod
    def from_stationary(cls, p: float, g: float) -> "GilbertElliottParams":
        """Paramètres donnant la probabilité stationnaire ``p`` : b = p·g/(1-p)."""
        if not 0 < p < 1:
            raise ValueError(f"p={p} hors de ]0, 1[")
        return cls(b=p * g / (1 - p), g=g)

    @property
    def p(self) -> float:
        return self.b / (self.b + self.g)

    @property
    def mean_burst_length(self) -> float:
        return 1 / self.g

    @property
    def burst_length_variance(self) -> float:
        return (1 - self.g) / self.g**2

    @property
    def is_memoryless(self) -> bool:
        return math.isclose(self.b + self.g, 1.0, rel_tol=0, abs_tol=1e-12)


def qfunc(x: float) -> float:
    """Queue de la gaussienne Q(x) = erfc(x/√2) / 2."""
    return float(0.5 * erfc(x / math.sqrt(2)))


def params_from_snr(g: float, ebn0_db: float, rate: float) -> GilbertElliottParams:
    """
    Paramètres du canal pour un Eb/N0 donné : p = Q(√(2R·Eb/N0)), b = p·g/(1-p).

    Args:
        g: Probabilité de sortie de l'état mauvais (1/longueur moyenne des bursts)
        ebn0_db: Eb/N0 en dB
        rate: Rendement du code R = k/n

    Returns:
        Paramètres validés
    """
    if not 0 < g <= 1:
        raise ValueError(f"g={g} hors de ]0, 1]")
    if not 0 < rate <= 1:
        raise ValueError(f"Rendement R={rate} hors de ]0, 1]")
    p = qfunc(math.sqrt(2 * rate * 10 ** (ebn0_db / 10)))
    if not 0 < p < 0.5:
        raise ValueError(
            f"p={p:.3g} à {ebn0_db} dB hors du régime de bursts valide (0 < p < 0.5)"
        )
    b = p * g / (1 - p)
    if b >= 1:
        raise ValueError(f"b={b:.3g} ≥ 1 pour g={g} et {ebn0_db} dB")
    return GilbertElliottParams(b=b, g=g)


def delta_l(b: float, g: float, n_cap: int | None = None) -> int:
    """
    Constante Δl = ⌊log(b/g) / log((1-g)/(1-b))⌋, bornée à [1, n_cap].

    Args:
        b: Probabilité G→B
        g: Probabilité B→G (g = 1 donne la limite 0, donc 1 après bornage)
        n_cap: Borne supérieure (en pratique la longueur du code)

    Returns:
        Le nombre de bits de burst équivalent à un burst supplémentaire
    """
    if not 0 < b < 1:
        raise ValueError(f"b={b} hors de ]0, 1[")
    if not 0 < g <= 1:
        raise ValueError(f"g={g} hors de ]0, 1]")
    if g == 1:
        value = 0
    else:
        denominator = math.log((1 - g) / (1 - b))
        if b == g or denominator == 0:
            raise ValueError(
                f"Δl indéfini pour b={b}, g={g} (0/0) : fixer Δl explicitement"
            )
        value = math.floor(math.log(b / g) / denominator)
    value = max(1, value)
    if n_cap is not None:
        value = min(value, n_cap)
    return value


def frame_rng(seed: int, frame_index: int) -> np.random.Generator:
    """Flux Philox indépendant pour la trame ``frame_index`` (clé = graine, compteur = indice)."""
    return np.random.Generator(np.random.Philox(key=seed, counter=frame_index << 64))


def sample_noise(params: GilbertElliottParams, n: int, rng: np.random.Generator) -> BitVector:
    """
    Tire ``n`` bits de bruit : 1 tant que la chaîne est dans l'état mauvais.

    L'état initial suit la loi stationnaire ; les durées de séjour sont
    géométriques (moyenne 1/b en G, 1/g en B).
    """
    if n < 1:
        raise ValueError(f"Longueur invalide : {n}")
    noise = np.zeros(n, dtype=np.uint8)
    bad = rng.random() < params.p
    position = 0
    while position < n:
        sojourn = int(rng.geometric(params.g if bad else params.b))
        if bad:
            noise[position:position + sojourn] = 1
        position += sojourn
        bad = not bad
    return BitVector.from_bits(noise)
