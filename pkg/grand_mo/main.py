"""Interface en ligne de commande : génération de codes, simulations, énumération, trace matérielle."""

import argparse
import math
import os
import shlex
import sys
from contextlib import contextmanager, nullcontext
from pathlib import Path

from dotenv import load_dotenv

from . import __version__
from .code_constructor import LinearCode, dump_parity_check, load_parity_check, make_bch, make_rlc
from .gf2_algebra import BitVector
from .hw_datapath_model import HwConfig, timing_report, trace_decode
from .query_order import (
    OrderKind,
    QueryOrderSpec,
    constrained_order,
    constrained_step_count,
    iter_patterns,
    query_count,
)
from .sim_harness import DecoderConfig, FerRecord, StoppingRule, run_grid, write_csv

# Options sans effet sur le contenu produit, exclues de la ligne de provenance
_UNRECORDED_FLAGS = {"--workers": True, "--quiet": False, "-o": True, "--output": True}


def load_config():
    """
    Charge la configuration depuis les variables d'environnement.

    Returns:
        Dictionnaire avec la configuration
    """
    # Chercher le fichier .env dans le répertoire du projet
    env_path = Path(__file__).parent.parent / '.env'
    load_dotenv(env_path)

    return {
        # Reproductibilité et parallélisme
        'seed': int(os.getenv('GRANDMO_SEED', '1')),
        'workers': int(os.getenv('GRANDMO_WORKERS', '1')),
        'batch_size': int(os.getenv('GRANDMO_BATCH_SIZE', '256')),

        # Règle d'arrêt des points de simulation
        'max_frame_errors': int(os.getenv('GRANDMO_MAX_FRAME_ERRORS', '100')),
        'max_frames': int(os.getenv('GRANDMO_MAX_FRAMES', '1000000')),

        # Profondeur de l'ordre de Markov pour les codes sans distance connue
        'dmax': int(os.getenv('GRANDMO_DMAX', '3')),

        # Horloge du modèle matériel
        'clock_hz': float(os.getenv('GRANDMO_CLOCK_HZ', '500e6')),
    }


def validate_config(config):
    """
    Valide la configuration.

    Args:
        config: Dictionnaire de configuration

    Returns:
        Tuple (bool, str) : (est_valide, message_erreur)
    """
    positive_fields = ['workers', 'batch_size', 'max_frame_errors', 'max_frames', 'dmax', 'clock_hz']
    invalid_fields = [field for field in positive_fields if not config.get(field, 0) > 0]

    if invalid_fields:
        return False, f"Configuration invalide. Valeurs non positives : {', '.join(invalid_fields)}"

    if config['seed'] < 0:
        return False, f"Graine négative : {config['seed']}"

    return True, ""


class _Parser(argparse.ArgumentParser):
    """Analyseur dont les erreurs d'usage sortent avec le code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"✗ Erreur : {message}", file=sys.stderr)
        sys.exit(1)


def parse_grid(text: str) -> list:
    """
    Lit une grille de valeurs : liste ``4,5,6`` ou plage ``début:fin:pas`` (fin incluse).

    Args:
        text: Grille au format texte

    Returns:
        Liste de flottants
    """
    text = text.strip()
    if not text:
        return []
    try:
        if ':' in text:
            start, stop, step = (float(part) for part in text.split(':'))
            if step <= 0 or stop < start:
                raise ValueError
            count = math.floor((stop - start) / step + 1e-9) + 1
            return [round(start + index * step, 10) for index in range(count)]
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise ValueError(f"Grille invalide : {text!r} (liste 'a,b,c' ou plage 'début:fin:pas')") from None


def provenance_line(argv, seed) -> str:
    """Ligne ``# grand-mo <version> argv=<arguments> seed=<graine>`` (``seed=-`` sans graine)."""
    recorded = []
    skip = False
    for arg in argv:
        if skip:
            skip = False
            continue
        name = arg.split('=', 1)[0]
        if name in _UNRECORDED_FLAGS:
            skip = _UNRECORDED_FLAGS[name] and '=' not in arg
            continue
        recorded.append(arg)
    return f"# grand-mo {__version__} argv={shlex.join(recorded)} seed={'-' if seed is None else seed}"


def _say(args, message=""):
    if not getattr(args, 'quiet', False):
        print(message, file=sys.stderr)


def _add_code_source(parser, seed_flags):
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--code-file', metavar='PATH', help="Fichier de matrice H")
    source.add_argument('--rlc', action='store_true', help="Code linéaire aléatoire")
    source.add_argument('--bch', action='store_true', help="Code BCH binaire")
    parser.add_argument('-n', type=int, help="Longueur du code (RLC)")
    parser.add_argument('-k', type=int, help="Dimension du code (RLC)")
    parser.add_argument(*seed_flags, dest='code_seed', type=int, default=1, help="Graine du code aléatoire")
    parser.add_argument('-m', type=int, help="Degré du corps GF(2^m) (BCH)")
    parser.add_argument('-t', type=int, help="Capacité de correction (BCH)")
    parser.add_argument('--shorten', type=int, default=0, help="Positions d'information retirées (BCH)")
    parser.add_argument('--expurgate', action='store_true', help="Ajoute le facteur (x+1) (BCH)")


def build_code(args) -> LinearCode:
    """Construit le code décrit par les options ; ValueError si elles sont incomplètes."""
    if args.code_file:
        try:
            text = Path(args.code_file).read_text()
        except OSError as e:
            raise ValueError(f"Lecture de {args.code_file} impossible : {e}") from None
        return load_parity_check(text)
    if args.rlc:
        if args.n is None or args.k is None:
            raise ValueError("--rlc exige -n et -k")
        return make_rlc(args.n, args.k, args.code_seed)
    if args.m is None or args.t is None:
        raise ValueError("--bch exige -m et -t")
    return make_bch(args.m, args.t, args.shorten, args.expurgate)


def _write_output(args, content: str) -> None:
    if args.output:
        Path(args.output).write_text(content)
    else:
        sys.stdout.write(content)


@contextmanager
def _listing_output(args, argv, seed):
    """Flux de sortie d'un listing : le fichier ``-o`` commence par la ligne de provenance."""
    if not args.output:
        yield sys.stdout
        return
    with open(args.output, 'w') as stream:
        stream.write(provenance_line(argv, seed) + "\n")
        yield stream


def cmd_gen_code(args, config, argv):
    """Écrit la matrice H du code demandé."""
    try:
        code = build_code(args)
    except ValueError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 1

    distance = code.d if code.d is not None else "inconnue"
    _say(args, f"✓ Code {code.label} : n={code.n}, k={code.k}, n-k={code.redundancy}, d={distance}")
    try:
        _write_output(args, dump_parity_check(code, provenance_line(argv, args.code_seed)))
    except OSError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 2
    return 0


def _report_point(args, record: FerRecord):
    _say(
        args,
        f"   ✓ {record.decoder} {record.order} g={record.g} {record.ebn0_db} dB : "
        f"FER={record.fer:.3g} ({record.frame_errors}/{record.frames} trames)",
    )


def cmd_simulate(args, config, argv):
    """Lance une campagne FER et écrit le CSV."""
    _say(args, "=" * 60)
    _say(args, "  GRAND-MO - Campagne de simulation FER")
    _say(args, "=" * 60)
    _say(args)

    _say(args, "📋 Chargement de la configuration...")
    try:
        code = build_code(args)
        decoders = [DecoderConfig.parse(text) for text in args.decoder]
        g_values = parse_grid(args.g)
        ebn0_grid = parse_grid(args.ebn0)
        stop = StoppingRule(args.max_frame_errors, args.max_frames)
        for decoder in decoders:
            decoder.validate(code)
        if args.workers < 1 or args.batch_size < 1:
            raise ValueError("--workers et --batch-size doivent être positifs")
    except ValueError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 1

    _say(args, f"   Code : {code.label}")
    _say(args, f"   Décodeurs : {', '.join(d.order_label(code, args.dmax) for d in decoders)}")
    _say(args, f"   Points : {len(decoders) * len(g_values) * len(ebn0_grid)}")
    _say(args, f"   Arrêt : {stop.max_frame_errors} erreurs ou {stop.max_frames} trames")
    _say(args, f"   Graine : {args.seed}, processus : {args.workers}")
    _say(args)

    _say(args, "🎲 Simulation...")
    try:
        result = run_grid(
            code,
            decoders,
            g_values,
            ebn0_grid,
            stop=stop,
            seed=args.seed,
            workers=args.workers,
            batch_size=args.batch_size,
            default_dmax=args.dmax,
            on_point=lambda record: _report_point(args, record),
        )
        with (open(args.output, 'w') if args.output else nullcontext(sys.stdout)) as stream:
            write_csv(result.records, stream, provenance_line(argv, args.seed), result.failures)
    except (ValueError, OSError) as e:
        print(f"   ✗ Erreur : {e}", file=sys.stderr)
        return 2

    _say(args)
    if result.failures:
        _say(args, f"⚠️  {len(result.failures)} point(s) en échec, {len(result.records)} point(s) calculé(s)")
        return 2
    _say(args, f"✓ {len(result.records)} point(s) calculé(s)")
    return 0


def _order_from_args(args) -> QueryOrderSpec:
    if args.markov:
        if args.dl is None or args.dmax is None:
            raise ValueError("--markov exige --dl et --dmax")
        return QueryOrderSpec.markov(args.dl, args.dmax)
    if args.constrained:
        if args.l1 is None or args.l2 is None:
            raise ValueError("--constrained exige --l1 et --l2")
        return QueryOrderSpec.constrained(args.l1, args.l2)
    if args.ab is None:
        raise ValueError("--hamming exige --ab")
    return QueryOrderSpec.hamming(args.ab)


def _enumerate_lines(args, spec):
    constrained = spec.kind is OrderKind.CONSTRAINED
    if args.steps:
        yield f"{constrained_step_count(args.n, spec.l2)}"
    elif args.count_only:
        yield f"{query_count(spec, args.n)}"
        if constrained:
            yield f"{constrained_step_count(args.n, spec.l2)}"
    elif constrained:
        for step, group in enumerate(constrained_order(args.n, spec.l1, spec.l2), start=1):
            if step == 1:
                continue
            for pattern in group:
                yield f"{step} {pattern}"
    else:
        patterns = iter_patterns(spec, args.n)
        next(patterns)
        for pattern in patterns:
            yield str(pattern)


def cmd_enumerate(args, config, argv):
    """Liste les motifs d'un ordre, ou leurs nombres."""
    try:
        spec = _order_from_args(args)
        if args.n < 1:
            raise ValueError(f"n={args.n} invalide")
        spec.validate_for(args.n)
        if args.steps and spec.kind is not OrderKind.CONSTRAINED:
            raise ValueError("--steps ne s'applique qu'à l'ordre contraint")
    except ValueError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 1

    try:
        with _listing_output(args, argv, None) as stream:
            for line in _enumerate_lines(args, spec):
                stream.write(line + "\n")
    except OSError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 2
    return 0


def cmd_hwtrace(args, config, argv):
    """Trace cycle par cycle du modèle matériel."""
    try:
        code = build_code(args)
        cfg = HwConfig.from_code(code, args.l1, args.l2, clock_hz=args.clock_hz)
        cfg.check(code)
        received = BitVector.from_text(args.received, code.n)
    except ValueError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 1

    try:
        with _listing_output(args, argv, args.code_seed if args.rlc else None) as stream:
            for line in trace_decode(code, received, cfg):
                stream.write(line + "\n")
    except OSError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 2
    return 0


def cmd_timing(args, config, argv):
    """Latences et débits pire cas et moyens du décodeur matériel."""
    try:
        l1 = args.l1 if args.l1 is not None else max(args.l2, 1)
        cfg = HwConfig(args.n, args.k, l1, args.l2, clock_hz=args.clock_hz)
        report = timing_report(cfg, args.avg_steps, args.wc_steps)
    except ValueError as e:
        print(f"✗ Erreur : {e}", file=sys.stderr)
        return 1

    wc_steps = args.wc_steps if args.wc_steps is not None else cfg.worst_case_cycles
    print(f"wc_steps {wc_steps}")
    print(f"wc_latency_ns {report.wc_latency_s * 1e9:.6g}")
    print(f"avg_latency_ns {report.avg_latency_s * 1e9:.6g}")
    print(f"wc_throughput_mbps {report.wc_throughput_bps / 1e6:.6g}")
    print(f"avg_throughput_gbps {report.avg_throughput_bps / 1e9:.6g}")
    if args.reference_latency_ns is not None:
        gain = report.wc_latency_gain(args.reference_latency_ns * 1e-9)
        print(f"wc_latency_gain {gain:.6g}")
    return 0


def build_parser(config) -> argparse.ArgumentParser:
    parser = _Parser(prog='grand-mo', description="Décodage GRAND-MO pour canaux à bursts")
    parser.add_argument('--version', action='version', version=f"grand-mo {__version__}")
    commands = parser.add_subparsers(dest='command', required=True)

    gen_code = commands.add_parser('gen-code', help="Génère la matrice H d'un code")
    _add_code_source(gen_code, ('--seed', '--code-seed'))
    gen_code.add_argument('-o', '--output', help="Fichier de sortie (sortie standard par défaut)")
    gen_code.add_argument('--quiet', action='store_true')
    gen_code.set_defaults(handler=cmd_gen_code)

    simulate = commands.add_parser('simulate', help="Campagne FER sur une grille Eb/N0")
    _add_code_source(simulate, ('--code-seed',))
    simulate.add_argument('--decoder', action='append', required=True,
                          help="markov:dmax=3 | markov:dl=2,dmax=3 | constrained:l1=32,l2=16 | grandab:ab=3 | bdd:t=3")
    simulate.add_argument('--g', required=True, help="Valeurs de g (liste ou plage)")
    simulate.add_argument('--ebn0', required=True, help="Grille Eb/N0 en dB (liste ou plage)")
    simulate.add_argument('--max-frame-errors', type=int, default=config['max_frame_errors'])
    simulate.add_argument('--max-frames', type=int, default=config['max_frames'])
    simulate.add_argument('--seed', type=int, default=config['seed'])
    simulate.add_argument('--workers', type=int, default=config['workers'])
    simulate.add_argument('--batch-size', type=int, default=config['batch_size'])
    simulate.add_argument('--dmax', type=int, default=config['dmax'],
                          help="Profondeur de l'ordre de Markov si d est inconnue")
    simulate.add_argument('-o', '--output', help="Fichier CSV (sortie standard par défaut)")
    simulate.add_argument('--quiet', action='store_true')
    simulate.set_defaults(handler=cmd_simulate)

    enumerate_ = commands.add_parser('enumerate', help="Liste ou compte les motifs d'un ordre")
    order = enumerate_.add_mutually_exclusive_group(required=True)
    order.add_argument('--markov', action='store_true')
    order.add_argument('--constrained', action='store_true')
    order.add_argument('--hamming', action='store_true')
    enumerate_.add_argument('--n', type=int, required=True)
    enumerate_.add_argument('--dl', type=int)
    enumerate_.add_argument('--dmax', type=int)
    enumerate_.add_argument('--l1', type=int)
    enumerate_.add_argument('--l2', type=int)
    enumerate_.add_argument('--ab', type=int)
    listing = enumerate_.add_mutually_exclusive_group()
    listing.add_argument('--count-only', action='store_true')
    listing.add_argument('--steps', action='store_true')
    enumerate_.add_argument('-o', '--output', help="Fichier de sortie (sortie standard par défaut)")
    enumerate_.set_defaults(handler=cmd_enumerate)

    hwtrace = commands.add_parser('hwtrace', help="Trace cycle par cycle du décodeur matériel")
    _add_code_source(hwtrace, ('--code-seed',))
    hwtrace.add_argument('--l1', type=int, required=True)
    hwtrace.add_argument('--l2', type=int, required=True)
    hwtrace.add_argument('--received', required=True, help="Vecteur reçu (binaire ou 0x...)")
    hwtrace.add_argument('--clock-hz', type=float, default=config['clock_hz'])
    hwtrace.add_argument('-o', '--output', help="Fichier de sortie (sortie standard par défaut)")
    hwtrace.set_defaults(handler=cmd_hwtrace)

    timing = commands.add_parser('timing', help="Latence et débit du décodeur matériel")
    timing.add_argument('-n', type=int, required=True)
    timing.add_argument('-k', type=int, required=True)
    timing.add_argument('--l2', type=int, required=True)
    timing.add_argument('--l1', type=int)
    timing.add_argument('--clock-hz', type=float, default=config['clock_hz'])
    timing.add_argument('--avg-steps', type=float, default=1.0)
    timing.add_argument('--wc-steps', type=int)
    timing.add_argument('--reference-latency-ns', type=float)
    timing.set_defaults(handler=cmd_timing)

    return parser


def main(argv=None):
    """Point d'entrée principal du script."""
    argv = list(sys.argv[1:] if argv is None else argv)

    try:
        config = load_config()
    except ValueError as e:
        print(f"✗ Erreur : configuration illisible ({e})", file=sys.stderr)
        return 1
    is_valid, error_msg = validate_config(config)
    if not is_valid:
        print(f"✗ Erreur : {error_msg}", file=sys.stderr)
        print("💡 Voir .env.example pour les variables GRANDMO_*", file=sys.stderr)
        return 1

    args = build_parser(config).parse_args(argv)
    return args.handler(args, config, argv)


if __name__ == "__main__":
    sys.exit(main())
