"""Campagnes Monte Carlo de taux d'erreur trame (FER) sur des grilles Eb/N0."""

from __future__ import annotations

import csv
import io
import sys
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import islice, product
from typing import Callable, Iterable, Iterator, List, Sequence, TextIO, Tuple

import numpy as np
from scipy.stats import binomtest

from .code_constructor import LinearCode, encode
from .gf2_algebra import BitVector
from .grand_decoders import DecodeResult, bdd_decode, grand_mo_decode
from .markov_channel import GilbertElliottParams, delta_l, frame_rng, params_from_snr, sample_noise
from .query_order import OrderKind, QueryOrderSpec

CSV_HEADER = "n,k,decoder,order,g,ebn0_db,p,b,frames,frame_errors,fer,avg_queries,max_queries,avg_steps,seed"


@dataclass(frozen=True)
class StoppingRule:
    """Arrêt d'un point : ``max_frame_errors`` erreurs ou ``max_frames`` trames, au premier atteint."""

    max_frame_errors: int = 100
    max_frames: int = 1_000_000

    def __post_init__(self):
        if self.max_frame_errors < 1 or self.max_frames < 1:
            raise ValueError(
                f"Règle d'arrêt invalide : {self.max_frame_errors} erreurs, {self.max_frames} trames"
            )


class DecoderKind(str, Enum):
    GRAND_MO = "grand-mo"
    GRANDAB = "grandab"
    BDD = "bdd"


_PARAMETERS = {
    "markov": ({"dl", "dmax"}, set()),
    "constrained": ({"l1", "l2"}, {"l1", "l2"}),
    "grandab": ({"ab"}, {"ab"}),
    "bdd": ({"t"}, {"t"}),
}


@dataclass(frozen=True)
class DecoderConfig:
    """
    Décodeur d'une campagne et paramètres de son ordre de test.

    Pour l'ordre de Markov, ``dl=None`` calcule Δl à chaque point depuis les
    paramètres du canal, et ``dmax=None`` prend ⌊d/2⌋ si la distance du code
    est connue, la profondeur par défaut sinon.
    """

    kind: DecoderKind
    order: OrderKind | None = None
    dl: int | None = None
    dmax: int | None = None
    l1: int = 0
    l2: int = 0
    ab: int = 0
    t: int = 0

    @classmethod
    def parse(cls, text: str) -> "DecoderConfig":
        """
        Lit ``markov:dmax=3``, ``markov:dl=2,dmax=3``, ``constrained:l1=32,l2=16``,
        ``grandab:ab=3`` ou ``bdd:t=3``.
        """
        name, _, body = text.strip().partition(":")
        if name not in _PARAMETERS:
            raise ValueError(f"Décodeur inconnu : {name!r} (markov, constrained, grandab, bdd)")
        allowed, required = _PARAMETERS[name]

        values = {}
        for item in filter(None, (part.strip() for part in body.split(","))):
            key, sep, value = item.partition("=")
            if not sep or not value.isdigit():
                raise ValueError(f"Paramètre invalide dans {text!r} : {item!r} (attendu clé=entier)")
            if key not in allowed:
                raise ValueError(f"Paramètre {key!r} non reconnu pour {name}")
            values[key] = int(value)
        missing = required - values.keys()
        if missing:
            raise ValueError(f"Paramètre(s) manquant(s) pour {name} : {', '.join(sorted(missing))}")

        if name == "markov":
            config = cls(DecoderKind.GRAND_MO, OrderKind.MARKOV, dl=values.get("dl"), dmax=values.get("dmax"))
        elif name == "constrained":
            config = cls(DecoderKind.GRAND_MO, OrderKind.CONSTRAINED, l1=values["l1"], l2=values["l2"])
        elif name == "grandab":
            config = cls(DecoderKind.GRANDAB, OrderKind.HAMMING, ab=values["ab"])
        else:
            config = cls(DecoderKind.BDD, t=values["t"])

        if config.dl is not None and config.dl < 1:
            raise ValueError(f"Δl={config.dl} invalide (≥ 1)")
        if config.dmax is not None and config.dmax < 1:
            raise ValueError(f"dmax={config.dmax} invalide (≥ 1)")
        if config.order is OrderKind.CONSTRAINED:
            QueryOrderSpec.constrained(config.l1, config.l2)
        if config.order is OrderKind.HAMMING:
            QueryOrderSpec.hamming(config.ab)
        return config

    @property
    def label(self) -> str:
        return self.kind.value

    def resolved_dmax(self, code: LinearCode, default_dmax: int) -> int:
        if self.dmax is not None:
            return self.dmax
        return max(1, code.d // 2) if code.d is not None else default_dmax

    def order_label(self, code: LinearCode, default_dmax: int) -> str:
        if self.kind is DecoderKind.BDD:
            return f"bdd(t={self.t})"
        if self.order is OrderKind.MARKOV:
            dmax = self.resolved_dmax(code, default_dmax)
            return QueryOrderSpec.markov(self.dl or 1, dmax).canonical(None if self.dl else "auto")
        return self.query_order(code, None, default_dmax).canonical()

    def validate(self, code: LinearCode) -> None:
        """Vérifie la compatibilité avec le code avant tout calcul."""
        if self.kind is DecoderKind.BDD:
            if code.d is None:
                raise ValueError(
                    f"bdd:t={self.t} exige une distance minimale connue (code BCH), pas {code.label}"
                )
            if self.t > (code.d - 1) // 2:
                raise ValueError(f"bdd:t={self.t} dépasse ⌊(d-1)/2⌋ = {(code.d - 1) // 2} pour {code.label}")
            return
        if self.order is OrderKind.CONSTRAINED:
            QueryOrderSpec.constrained(self.l1, self.l2).validate_for(code.n)
        elif self.order is OrderKind.HAMMING:
            QueryOrderSpec.hamming(self.ab).validate_for(code.n)

    def query_order(
        self, code: LinearCode, channel: GilbertElliottParams | None, default_dmax: int
    ) -> QueryOrderSpec | None:
        """Ordre de test effectif au point de canal ``channel`` ; None pour le décodage à distance bornée."""
        if self.kind is DecoderKind.BDD:
            return None
        if self.order is OrderKind.CONSTRAINED:
            return QueryOrderSpec.constrained(self.l1, self.l2)
        if self.order is OrderKind.HAMMING:
            return QueryOrderSpec.hamming(self.ab)
        dl = self.dl
        if dl is None:
            if channel is None:
                raise ValueError("Δl automatique : paramètres du canal requis")
            dl = delta_l(channel.b, channel.g, n_cap=code.n)
        return QueryOrderSpec.markov(dl, self.resolved_dmax(code, default_dmax))

    def decode(self, code: LinearCode, received: BitVector, spec: QueryOrderSpec | None) -> DecodeResult:
        if self.kind is DecoderKind.BDD:
            return bdd_decode(code, received, self.t)
        return grand_mo_decode(code, received, spec)


@dataclass(frozen=True)
class FerRecord:
    """Statistiques d'un point (code, décodeur, g, Eb/N0)."""

    n: int
    k: int
    decoder: str
    order: str
    g: float
    ebn0_db: float
    p: float
    b: float
    frames: int
    frame_errors: int
    avg_queries: float
    max_queries: int
    avg_steps: float
    seed: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    def confidence_interval(self, level: float = 0.95) -> Tuple[float, float]:
        """Intervalle de Clopper-Pearson exact sur le FER."""
        interval = binomtest(self.frame_errors, self.frames).proportion_ci(
            confidence_level=level, method="exact"
        )
        return float(interval.low), float(interval.high)

    def to_fields(self) -> List[str]:
        values = [
            self.n,
            self.k,
            self.decoder,
            self.order,
            _number(self.g),
            _number(self.ebn0_db),
            _number(self.p),
            _number(self.b),
            self.frames,
            self.frame_errors,
            _number(self.fer),
            _number(self.avg_queries),
            self.max_queries,
            _number(self.avg_steps),
            self.seed,
        ]
        return [str(value) for value in values]

    def to_row(self) -> str:
        """Ligne CSV ; l'ordre, qui contient des virgules, est mis entre guillemets."""
        buffer = io.StringIO()
        csv.writer(buffer, lineterminator="").writerow(self.to_fields())
        return buffer.getvalue()


def _number(value: float) -> str:
    return format(value, ".6g")


@dataclass(frozen=True)
class FrameBatch:
    """Issues de trames consécutives à partir de ``start``."""

    start: int
    errors: np.ndarray
    queries: np.ndarray
    steps: np.ndarray


@dataclass(frozen=True)
class PointJob:
    """Tout ce qu'un processus de calcul doit connaître pour simuler un lot de trames."""

    code: LinearCode
    decoder: DecoderConfig
    spec: QueryOrderSpec | None
    channel: GilbertElliottParams
    seed: int

    def frame(self, index: int) -> Tuple[bool, int, int]:
        rng = frame_rng(self.seed, index)
        message = BitVector.from_bits(rng.integers(0, 2, size=self.code.k, dtype=np.uint8))
        noise = sample_noise(self.channel, self.code.n, rng)
        result = self.decoder.decode(self.code, encode(self.code, message) ^ noise, self.spec)
        error = not result.decoded or result.message != message
        return error, result.queries, result.time_steps

    def run(self, start: int, count: int) -> FrameBatch:
        outcomes = np.array([self.frame(index) for index in range(start, start + count)], dtype=np.int64)
        return FrameBatch(
            start=start,
            errors=outcomes[:, 0].astype(bool),
            queries=outcomes[:, 1],
            steps=outcomes[:, 2],
        )


@dataclass
class _Tally:
    stop: StoppingRule
    frames: int = 0
    frame_errors: int = 0
    queries: int = 0
    max_queries: int = 0
    steps: int = 0

    @property
    def done(self) -> bool:
        return self.frame_errors >= self.stop.max_frame_errors or self.frames >= self.stop.max_frames

    def absorb(self, batch: FrameBatch) -> bool:
        """Ajoute les trames du lot jusqu'à la condition d'arrêt ; True si le point est terminé."""
        needed = self.stop.max_frame_errors - self.frame_errors
        reached = np.flatnonzero(np.cumsum(batch.errors) >= needed)
        end = int(reached[0]) + 1 if reached.size else len(batch.errors)
        end = min(end, self.stop.max_frames - self.frames)
        self.frames += end
        self.frame_errors += int(batch.errors[:end].sum())
        self.queries += int(batch.queries[:end].sum())
        self.steps += int(batch.steps[:end].sum())
        if end:
            self.max_queries = max(self.max_queries, int(batch.queries[:end].max()))
        return self.done


def _frame_batches(stop: StoppingRule, batch_size: int) -> Iterator[Tuple[int, int]]:
    for start in range(0, stop.max_frames, batch_size):
        yield start, min(batch_size, stop.max_frames - start)


def run_point(
    code: LinearCode,
    decoder: DecoderConfig,
    g: float,
    ebn0_db: float,
    stop: StoppingRule = StoppingRule(),
    seed: int = 1,
    executor: Executor | None = None,
    workers: int = 1,
    batch_size: int = 256,
    default_dmax: int = 3,
) -> FerRecord:
    """
    Simule un point : message aléatoire, codage, bruit de Markov, décodage, classement.

    Les trames sont traitées par lots ; avec un ``executor``, ``workers`` lots
    sont calculés en parallèle puis absorbés dans l'ordre des indices de trame,
    de sorte que le résultat ne dépend pas du nombre de processus.

    Args:
        code: Code simulé
        decoder: Décodeur et ordre de test
        g: Probabilité B→G du canal
        ebn0_db: Eb/N0 en dB
        stop: Règle d'arrêt
        seed: Graine du point (flux Philox, compteur = indice de trame)
        executor: Pool de processus, None pour un calcul séquentiel
        workers: Nombre de lots soumis simultanément au pool
        batch_size: Trames par lot
        default_dmax: Profondeur de l'ordre de Markov si la distance du code est inconnue

    Returns:
        L'enregistrement FER du point
    """
    if batch_size < 1:
        raise ValueError(f"Taille de lot invalide : {batch_size}")
    channel = params_from_snr(g, ebn0_db, code.rate)
    decoder.validate(code)
    spec = decoder.query_order(code, channel, default_dmax)
    if spec is not None:
        spec.validate_for(code.n)
    job = PointJob(code=code, decoder=decoder, spec=spec, channel=channel, seed=seed)

    tally = _Tally(stop)
    batches = _frame_batches(stop, batch_size)
    if executor is None:
        for start, count in batches:
            if tally.absorb(job.run(start, count)):
                break
    else:
        while not tally.done:
            window = list(islice(batches, max(1, workers)))
            if not window:
                break
            futures = [executor.submit(job.run, start, count) for start, count in window]
            for future in futures:
                if tally.done:
                    future.cancel()
                    continue
                tally.absorb(future.result())

    return FerRecord(
        n=code.n,
        k=code.k,
        decoder=decoder.label,
        order=decoder.order_label(code, default_dmax),
        g=g,
        ebn0_db=ebn0_db,
        p=channel.p,
        b=channel.b,
        frames=tally.frames,
        frame_errors=tally.frame_errors,
        avg_queries=tally.queries / tally.frames,
        max_queries=tally.max_queries,
        avg_steps=tally.steps / tally.frames,
        seed=seed,
    )


def point_seed(campaign_seed: int, index: int) -> int:
    """Graine dérivée du point ``index`` de la campagne."""
    state = np.random.SeedSequence(campaign_seed, spawn_key=(index,)).generate_state(2, np.uint64)
    return int(state[0]) | int(state[1]) << 64


@dataclass(frozen=True)
class PointFailure:
    decoder: str
    order: str
    g: float
    ebn0_db: float
    reason: str

    def to_comment(self) -> str:
        return (
            f"# failed: decoder={self.decoder} order={self.order} g={_number(self.g)} "
            f"ebn0_db={_number(self.ebn0_db)}: {self.reason}"
        )


@dataclass
class GridResult:
    records: List[FerRecord] = field(default_factory=list)
    failures: List[PointFailure] = field(default_factory=list)


def run_grid(
    code: LinearCode,
    decoders: Sequence[DecoderConfig],
    g_values: Sequence[float],
    ebn0_grid: Sequence[float],
    stop: StoppingRule = StoppingRule(),
    seed: int = 1,
    workers: int = 1,
    batch_size: int = 256,
    default_dmax: int = 3,
    on_point: Callable[[FerRecord], None] | None = None,
) -> GridResult:
    """
    Produit cartésien décodeurs × g × Eb/N0, chaque point avec sa graine dérivée.

    Un point en échec est signalé et consigné ; les autres sont calculés. Les
    enregistrements sont triés par (décodeur, ordre, g, Eb/N0).
    """
    points = list(product(decoders, g_values, ebn0_grid))
    result = GridResult()
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 and points else None
    try:
        for index, (decoder, g, ebn0_db) in enumerate(points):
            try:
                record = run_point(
                    code,
                    decoder,
                    g,
                    ebn0_db,
                    stop=stop,
                    seed=point_seed(seed, index),
                    executor=executor,
                    workers=workers,
                    batch_size=batch_size,
                    default_dmax=default_dmax,
                )
            except ValueError as e:
                failure = PointFailure(decoder.label, decoder.order_label(code, default_dmax), g, ebn0_db, str(e))
                print(f"   ⚠️  Point en échec ({failure.order}, g={g}, {ebn0_db} dB) : {e}", file=sys.stderr)
                result.failures.append(failure)
                continue
            result.records.append(record)
            if on_point is not None:
                on_point(record)
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)

    result.records.sort(key=lambda r: (r.decoder, r.order, r.g, r.ebn0_db))
    return result


def write_csv(
    records: Iterable[FerRecord],
    stream: TextIO,
    provenance: str | None = None,
    failures: Iterable[PointFailure] = (),
) -> None:
    """Écrit la ligne de provenance, l'en-tête, une ligne par point puis les points en échec."""
    if provenance:
        stream.write(f"{provenance}\n")
    stream.write(f"{CSV_HEADER}\n")
    writer = csv.writer(stream, lineterminator="\n")
    for record in records:
        writer.writerow(record.to_fields())
    for failure in failures:
        stream.write(f"{failure.to_comment()}\n")
