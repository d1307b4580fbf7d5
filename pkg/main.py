"""
Script principal del esqueleto mecanizado de la prueba de los Facts 1 y 2.

Subcomandos:
1. expand / fact1: expansión de los núcleos y verificación del Fact 1
2. find-cert / verify-cert / rec2-check: certificado WZ y recurrencia de orden 3
3. extract-squares / guess / symsquare / unroll: estructura cuadrada y recurrencias
4. prove-fact2: pipeline completo con informe JSON

Ejemplo: python main.py --nmax 12 --out reports prove-fact2
"""

import sys
import logging
import time
import argparse
from pathlib import Path

# Agregar el directorio raíz al path para importaciones
sys.path.append(str(Path(__file__).parent))

from src.config import PipelineConfig, configure_logging, load_config
from src.errors import BieberbachError
from src.exact_core import Poly
from src.gen_tables import C_VARS, EXPONENTS, expand_A, expand_B
from src.holonomic import guess_with_schedule, symmetric_square, unroll
from src.pipeline import run_fact1, run_prove_fact2
from src.serialization import (certificate_from_json, certificate_to_json, read_json,
                               recurrence_from_json, recurrence_to_json, table_to_csv,
                               table_to_json, write_json)
from src.square_cert import extract_table, root_column
from src.wz_engine import (find_certificate, rec2_from_certificate, rec2_window_failures,
                           verify_certificate)

logger = logging.getLogger(__name__)


def cmd_expand(args, config):
    """Expande el núcleo pedido y guarda la tabla."""
    table = expand_B(config.n_max) if args.exponent == '-1/2' else expand_A(config.n_max)
    name = 'B' if args.exponent == '-1/2' else 'A'
    target = Path(args.target) if args.target else config.out_dir / f"table_{name}.{config.fmt}"
    if config.fmt == 'csv':
        table_to_csv(table, target)
    else:
        write_json(target, table_to_json(table))
    print(f"Tabla {name} (exponente {args.exponent}, n_max={config.n_max}) -> {target}")
    return 0


def cmd_fact1(args, config):
    """Verifica el Fact 1 hasta el orden pedido."""
    sign = args.sign if args.sign == 'auto' else int(args.sign)
    report = run_fact1(config, order=args.order, mode=args.mode, sign=sign)
    status = 'nulo' if report.vanishes else f"primer orden no nulo {report.first_nonzero_order}"
    print(f"Fact 1 ({report.mode}, signo {report.sign:+d}, N={report.order}): residuo {status}")
    return 0


def cmd_find_cert(args, config):
    """Resuelve el sistema lineal del certificado WZ."""
    cert = find_certificate(seed=config.seed, spot_checks=config.spot_checks)
    target = Path(args.target) if args.target else config.out_dir / 'certificate.json'
    write_json(target, certificate_to_json(cert))
    for attempt in cert.attempts:
        print(f"  {attempt['support']}: {attempt['unknowns']} incógnitas -> {attempt['result']}")
    print(f"Certificado (dimensión {cert.solution_dimension}) -> {target}")
    return 0


def cmd_verify_cert(args, config):
    """Verifica un certificado importado con el comprobador independiente."""
    cert = certificate_from_json(read_json(args.path))
    result = verify_certificate(cert, seed=config.seed, spot_checks=config.spot_checks)
    if not result:
        logger.error(f"Certificado rechazado: {result.detail}")
        print(f"RECHAZADO: {result.detail}")
        return 1
    print(f"Certificado válido ({result.spot_checks} puntos aleatorios)")
    return 0


def _load_or_find_certificate(path, config):
    if path:
        return certificate_from_json(read_json(path))
    return find_certificate(seed=config.seed, spot_checks=config.spot_checks)


def cmd_rec2_check(args, config):
    """Comprueba la recurrencia del certificado sobre la tabla B expandida."""
    rec = rec2_from_certificate(_load_or_find_certificate(args.cert, config))
    failures = rec2_window_failures(rec, expand_B(config.n_max))
    write_json(config.out_dir / 'rec2.json', recurrence_to_json(rec))
    if failures:
        print(f"Ventanas no nulas: {failures}")
        return 1
    print(f"La recurrencia anula todas las ventanas hasta n_max={config.n_max}")
    return 0


def cmd_extract_squares(args, config):
    """Certifica la estructura cuadrada de toda la tabla B."""
    certs = extract_table(expand_B(config.n_max), n_jobs=config.n_jobs)
    target = Path(args.target) if args.target else config.out_dir / 'squares.json'
    write_json(target, {'certificates': certs.to_list(), 'patterns': certs.patterns})
    print(f"{len(certs.certificates)} entradas certificadas -> {target}")
    return 0


def cmd_guess(args, config):
    """Adivina la recurrencia de orden 2 de la columna raíz k."""
    n_max = config.guess_n_max
    table = root_column(expand_B(n_max), args.k)
    rec = guess_with_schedule(table, args.order, config.degree_schedule, ks=[args.k])
    target = Path(args.target) if args.target else config.out_dir / f"rec_k{args.k}.json"
    write_json(target, recurrence_to_json(rec))
    print(f"Recurrencia conjeturada para k={args.k}: {rec}")
    return 0


def cmd_symsquare(args, config):
    """Cuadrado simétrico de una recurrencia de orden 2 guardada en JSON."""
    rec = symmetric_square(recurrence_from_json(read_json(args.rec)))
    target = Path(args.target) if args.target else config.out_dir / 'symsquare.json'
    write_json(target, recurrence_to_json(rec))
    print(f"Cuadrado simétrico: {rec}")
    return 0


def cmd_unroll(args, config):
    """Desenrolla una recurrencia guardada desde valores iniciales en forma textual."""
    rec = recurrence_from_json(read_json(args.rec))
    initials = [Poly.parse(text, C_VARS) for text in args.initials]
    table = unroll(rec, initials, args.until, {'k': args.k}, start=args.start)
    for n, value in table.column(args.k).items():
        print(f"n={n}: {value}")
    return 0


COMMANDS = {
    'expand': cmd_expand,
    'fact1': cmd_fact1,
    'find-cert': cmd_find_cert,
    'verify-cert': cmd_verify_cert,
    'rec2-check': cmd_rec2_check,
    'extract-squares': cmd_extract_squares,
    'guess': cmd_guess,
    'symsquare': cmd_symsquare,
    'unroll': cmd_unroll,
}


def build_parser():
    """Construye el parser de argumentos con todos los subcomandos."""
    parser = argparse.ArgumentParser(description='Esqueleto mecanizado de la prueba de los Facts 1 y 2')

    # Parámetros globales
    parser.add_argument('--nmax', type=int, default=None, help='Último índice n de las tablas (12 por defecto)')
    parser.add_argument('--guess-nmax', type=int, default=None,
                        help='Último n de los datos de adivinación (20 por defecto; con --nmax, escalado)')
    parser.add_argument('--seed', type=int, default=None, help='Semilla de las comprobaciones aleatorias')
    parser.add_argument('--out', default=None, help='Directorio de salida (reports por defecto)')
    parser.add_argument('--format', choices=['json', 'csv'], default=None, help='Formato de las tablas')
    parser.add_argument('--n-jobs', type=int, default=None, help='Hilos para los pasos paralelizables')
    parser.add_argument('--log-file', default=None, help='Fichero adicional de registro')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('expand', help='Expandir Q^(-1) o Q^(-1/2)')
    p.add_argument('--exponent', choices=EXPONENTS, default='-1/2', help="Exponente (usar --exponent=-1/2)")
    p.add_argument('--target', default=None, help='Fichero de salida')

    p = sub.add_parser('fact1', help='Verificar el Fact 1')
    p.add_argument('--order', type=int, default=None, help='Orden de truncamiento N >= 1')
    p.add_argument('--mode', choices=['partial', 'total'], default='total')
    p.add_argument('--sign', choices=['+1', '-1', 'auto'], default='auto')

    p = sub.add_parser('find-cert', help='Buscar el certificado WZ')
    p.add_argument('--target', default=None, help='Fichero de salida')

    p = sub.add_parser('verify-cert', help='Verificar un certificado WZ en JSON')
    p.add_argument('path', help='Certificado exportado')

    p = sub.add_parser('rec2-check', help='Comprobar la recurrencia de orden 3 sobre la tabla B')
    p.add_argument('--cert', default=None, help='Certificado exportado (si no, se busca)')

    p = sub.add_parser('extract-squares', help='Certificados de cuadrado de la tabla B')
    p.add_argument('--target', default=None, help='Fichero de salida')

    p = sub.add_parser('guess', help='Adivinar la recurrencia de la columna raíz k')
    p.add_argument('--k', type=int, required=True)
    p.add_argument('--order', type=int, default=2)
    p.add_argument('--guess-nmax', type=int, default=argparse.SUPPRESS, help='Como el parámetro global')
    p.add_argument('--target', default=None, help='Fichero de salida')

    p = sub.add_parser('symsquare', help='Cuadrado simétrico de una recurrencia')
    p.add_argument('--rec', required=True, help='Recurrencia en JSON')
    p.add_argument('--target', default=None, help='Fichero de salida')

    p = sub.add_parser('unroll', help='Desenrollar una recurrencia')
    p.add_argument('--rec', required=True, help='Recurrencia en JSON')
    p.add_argument('--initials', nargs='+', required=True, help="Valores iniciales, p. ej. 1 'c'")
    p.add_argument('--k', type=int, default=0)
    p.add_argument('--start', type=int, default=0)
    p.add_argument('--until', type=int, default=10)

    sub.add_parser('prove-fact2', help='Ejecutar la prueba completa del Fact 2')
    return parser


def parse_arguments(argv=None):
    """Parsear los argumentos de línea de comandos."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == 'fact1' and args.order is not None and args.order < 1:
        parser.error("--order debe ser >= 1")
    return args


def build_config(args):
    """
    Configuración de la ejecución a partir de los argumentos.

    Si se da --nmax sin --guess-nmax, los datos de adivinación se escalan en
    la misma proporción que las tablas (sin superar el valor por defecto).
    """
    config = load_config(n_max=args.nmax, guess_n_max=args.guess_nmax, seed=args.seed,
                         out_dir=args.out, fmt=args.format, n_jobs=args.n_jobs)
    if args.nmax is not None and args.guess_nmax is None:
        scaled = config.guess_n_max * config.n_max // PipelineConfig.n_max
        config.guess_n_max = min(config.guess_n_max, scaled)
    return config


def main(argv=None):
    """Ejecutar el subcomando pedido y devolver el código de salida."""
    start_time = time.time()
    args = parse_arguments(argv)
    config = build_config(args)
    configure_logging(args.log_file)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    logger.info(f"Iniciando '{args.command}' con n_max={config.n_max}, semilla {config.seed}")

    if args.command == 'prove-fact2':
        report = run_prove_fact2(config)
        exit_code = report.exit_code
        execution_time = (time.time() - start_time) / 60
        print("\n" + "=" * 80)
        print("RESULTADO DE LA PRUEBA DEL FACT 2")
        print("=" * 80)
        for step in report.steps:
            print(f"{step.status:>11}  {step.name}")
        print(f"\nTiempo de ejecución: {execution_time:.2f} minutos")
        print(f"Informe: {config.out_dir / 'report.json'}")
        if report.failed_steps:
            print(f"Pasos fallidos: {', '.join(report.failed_steps)}")
        print("=" * 80)
        return exit_code

    try:
        exit_code = COMMANDS[args.command](args, config)
    except BieberbachError as e:
        logger.error(f"Error en '{args.command}': {str(e)}", exc_info=True)
        print(f"ERROR ({type(e).__name__}): {e}")
        exit_code = 1
    logger.info(f"'{args.command}' completado en {time.time() - start_time:.2f} s")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
