"""
Pipeline completo de la prueba del Fact 2 y ejecución del Fact 1.

Cada paso se ejecuta, se cronometra y se registra en un ``ProofReport``. Un
paso fallido no detiene el pipeline: los pasos que dependen de él quedan como
'skipped' y los artefactos parciales se escriben igualmente. El descubrimiento
(resolver, adivinar) y la comprobación van por caminos de código distintos.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from joblib import Parallel, delayed

from src.errors import BieberbachError, InsufficientData
from src.fact1_verifier import verify_fact1
from src.gen_tables import (check_A_from_B, expand_A, expand_B, kernel_series, sample_nonneg,
                            structural_checks, table_from_series)
from src.holonomic import (SequenceTable, guess_with_schedule, gauge_transform, match_initials,
                           nonnegative_integer_roots, operator_equal_up_to_scalar, symmetric_square,
                           unroll)
from src.serialization import (certificate_from_json, certificate_to_json, read_json,
                               recurrence_to_json, table_to_csv, table_to_json, write_json)
from src.square_cert import extract_table, root_column, root_gauge_ratio, root_to_entry
from src.wz_engine import (find_certificate, rec2_from_certificate, rec2_window_failures,
                           verify_certificate)

logger = logging.getLogger(__name__)

STATUSES = ('proved', 'conjectured', 'checked', 'failed', 'skipped')
REC_ORDER = 2


@dataclass
class StepResult:
    """Estado de un paso del pipeline."""
    name: str
    status: str
    detail: str = ''
    payload: dict = field(default_factory=dict)
    required: bool = True

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"estado desconocido: {self.status}")

    def to_dict(self):
        return {'name': self.name, 'status': self.status, 'detail': self.detail,
                'payload': self.payload, 'required': self.required}


@dataclass
class ProofReport:
    """Informe del pipeline: pasos, eco de la configuración y tiempos."""
    config: dict
    steps: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    def add(self, step, seconds=None):
        self.steps.append(step)
        if seconds is not None:
            self.timings[step.name] = round(seconds, 3)
        log = logger.error if step.status == 'failed' else logger.info
        log(f"[{step.status.upper():>11}] {step.name} {step.detail}")
        return step

    def step(self, name):
        for s in self.steps:
            if s.name == name:
                return s
        raise KeyError(name)

    def status(self, name):
        try:
            return self.step(name).status
        except KeyError:
            return None

    @property
    def failed_steps(self):
        return [s.name for s in self.steps if s.status == 'failed' and s.required]

    @property
    def exit_code(self):
        return 1 if self.failed_steps else 0

    def to_dict(self, include_timings=False):
        data = {'config': self.config, 'steps': [s.to_dict() for s in self.steps],
                'failed_steps': self.failed_steps, 'exit_code': self.exit_code}
        if include_timings:
            data['timings'] = self.timings
        return data


class _Runner:
    """Ejecuta pasos con captura de errores, dependencias y cronometraje."""

    def __init__(self, report):
        self.report = report

    def run(self, name, fn, requires=(), required=True):
        missing = [r for r in requires if self.report.status(r) in (None, 'failed', 'skipped')]
        if missing:
            return self.report.add(StepResult(name, 'skipped', f"depende de {missing}", required=required))
        start = time.time()
        try:
            status, detail, payload = fn()
        except BieberbachError as e:
            logger.error(f"Paso {name}: {e}", exc_info=True)
            status, detail, payload = 'failed', f"{type(e).__name__}: {e}", {}
        except Exception as e:
            logger.error(f"Error inesperado en el paso {name}: {str(e)}", exc_info=True)
            status, detail, payload = 'failed', f"{type(e).__name__}: {e}", {}
        return self.report.add(StepResult(name, status, detail, payload, required), time.time() - start)


def _banner(title):
    logger.info("=" * 80)
    logger.info(title)
    logger.info("=" * 80)


def run_fact1(config, order=None, mode='total', sign='auto', write=True):
    """
    Verifica el Fact 1 y guarda el informe JSON.

    Returns:
        Fact1Report: informe del verificador.
    """
    order = config.fact1_order if order is None else order
    _banner(f"FACT 1: ORDEN {order}, MODO {mode}, SIGNO {sign}")
    report = verify_fact1(order, mode, sign, n_jobs=config.n_jobs)
    if write:
        write_json(Path(config.out_dir) / 'fact1.json', report.to_dict())
    return report


def _guess_one(k, table, schedule):
    try:
        return k, guess_with_schedule(table, REC_ORDER, schedule, ks=[k]), None
    except BieberbachError as e:
        return k, None, e


def run_prove_fact2(config):
    """
    Ejecuta toda la cadena de la prueba del Fact 2.

    Args:
        config (PipelineConfig): parámetros (n_max, k_checks, escalada de grados, malla, semilla...).

    Returns:
        ProofReport: informe con un estado por paso; ``exit_code`` es 0 si no falló
        ningún paso obligatorio.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = ProofReport(config=config.echo())
    runner = _Runner(report)
    state = {}
    n_max = config.n_max
    ks = list(config.k_checks)

    _banner("FASE 1: IDENTIDAD DE LÖWNER (FACT 1)")

    def fact1_step():
        result = run_fact1(config, write=True)
        status = 'checked' if result.vanishes else 'failed'
        return status, f"modo {result.mode}, signo {result.sign:+d}, N={result.order}", result.to_dict()

    runner.run('fact1', fact1_step)

    _banner("FASE 2: EXPANSIÓN DE LOS NÚCLEOS")

    def expand_step():
        state['b_series'] = kernel_series(n_max, '-1/2')
        state['a_series'] = kernel_series(n_max, '-1')
        state['B'] = table_from_series(state['b_series'], '-1/2', n_max)
        state['A'] = table_from_series(state['a_series'], '-1', n_max)
        checks = {
            'B': structural_checks(state['B'], state['b_series']),
            'A': structural_checks(state['A'], state['a_series']),
        }
        for name in ('A', 'B'):
            table = state[name]
            write_json(out / f"table_{name}.json", table_to_json(table))
            if config.fmt == 'csv':
                table_to_csv(table, out / f"table_{name}.csv")
        ok = all(v for group in checks.values() for v in group.values())
        return ('checked' if ok else 'failed'), f"n_max={n_max}", checks

    runner.run('expand', expand_step)

    def a_from_b_step():
        ok = check_A_from_B(n_max, state['a_series'], state['b_series'])
        return ('checked' if ok else 'failed'), 'A = (B)^2 en la rejilla completa', {}

    runner.run('a_from_b', a_from_b_step, requires=['expand'])

    _banner("FASE 3: CERTIFICADO WZ Y RECURRENCIA DE ORDEN 3")

    def cert_found_step():
        cert = find_certificate(seed=config.seed, spot_checks=config.spot_checks)
        state['cert'] = cert
        write_json(out / 'certificate.json', certificate_to_json(cert))
        found = cert.attempts[-1]['support'] if cert.attempts else ''
        return 'checked', f"{found}; dimensión del espacio de soluciones {cert.solution_dimension}", {
            'solution_dimension': cert.solution_dimension, 'path': 'certificate.json',
            'divisors': [list(pair) for pair in cert.divisors], 'attempts': cert.attempts}

    runner.run('cert_found', cert_found_step)

    def cert_verified_step():
        cert = certificate_from_json(read_json(out / 'certificate.json'))
        result = verify_certificate(cert, seed=config.seed, spot_checks=config.spot_checks)
        if not result:
            return 'failed', result.detail, {}
        return 'proved', f"identidad exacta + {result.spot_checks} puntos aleatorios", {
            'spot_checks': result.spot_checks}

    runner.run('cert_verified', cert_verified_step, requires=['cert_found'])

    def rec2_step():
        rec2 = rec2_from_certificate(state['cert'])
        state['rec2'] = rec2
        write_json(out / 'rec2.json', recurrence_to_json(rec2))
        B = state['B']
        failures = rec2_window_failures(rec2, B)
        if failures:
            return 'failed', f"ventanas no nulas: {failures[:5]}", {'failures': failures}
        ranges = {}
        for k in ks:
            roots = nonnegative_integer_roots(rec2, {'k': k}, start=k)
            start = max(roots) + 1 if roots else k
            if start + rec2.order - 1 > n_max:
                ranges[str(k)] = {'roots': roots, 'skipped': 'sin valores iniciales en la tabla'}
                continue
            initials = [B.entry(k, start + i) for i in range(rec2.order)]
            generated = unroll(rec2, initials, n_max, {'k': k}, start=start).column(k)
            if any(generated[n] != B.entry(k, n) for n in range(start, n_max + 1)):
                return 'failed', f"el desenrollado no reproduce la columna k={k}", {}
            ranges[str(k)] = {
                'symbolic': f"n >= {start}",
                'roots': roots,
                'numeric': [start, n_max - rec2.order],
            }
        return 'proved', f"{len(rec2.coeffs)} coeficientes, ventanas nulas en 0 <= k <= {n_max}", {
            'leading_nonvanishing': ranges, 'path': 'rec2.json'}

    runner.run('rec2_checked', rec2_step, requires=['cert_verified', 'expand'])

    _banner("FASE 4: CERTIFICADOS DE CUADRADOS")

    def squares_step():
        certs = extract_table(state['B'], n_jobs=config.n_jobs)
        state['squares'] = certs
        write_json(out / 'squares.json', {'certificates': certs.to_list(), 'patterns': certs.patterns})
        return 'checked', f"{len(certs.certificates)} entradas certificadas", {'patterns': certs.patterns}

    runner.run('squares_extracted', squares_step, requires=['expand'])

    _banner("FASE 5: RECURRENCIA DE ORDEN 2 Y CUADRADO SIMÉTRICO")

    def guess_table_step():
        B_guess = state['B'] if config.guess_n_max == n_max else expand_B(config.guess_n_max)
        state['B_guess'] = B_guess
        roots = {}
        for k in ks:
            if k <= config.guess_n_max:
                roots.update(root_column(B_guess, k).values)
        state['roots'] = SequenceTable(roots, 'extracted')
        return 'checked', f"columnas raíz k={ks} hasta n={config.guess_n_max}", {}

    runner.run('root_columns', guess_table_step, requires=['expand'])

    guesses = {}

    def guess_all():
        if not state['roots'].values:
            raise InsufficientData("tabla de raíces vacía")
        results = Parallel(n_jobs=config.n_jobs, prefer='threads')(
            delayed(_guess_one)(k, state['roots'], config.degree_schedule) for k in ks)
        for k, rec, error in results:
            guesses[k] = (rec, error)

    try:
        if report.status('root_columns') == 'checked':
            guess_all()
    except BieberbachError as e:
        logger.error(f"Adivinación: {e}", exc_info=True)
        for k in ks:
            guesses[k] = (None, e)

    for k in ks:
        def guess_step(k=k):
            rec, error = guesses.get(k, (None, None))
            if error is not None:
                raise error
            state.setdefault('rec', {})[k] = rec
            write_json(out / f"rec_k{k}.json", recurrence_to_json(rec))
            return 'conjectured', str(rec), {'degrees': rec.meta.get('degrees'),
                                             'heldout_windows': rec.meta.get('heldout_windows')}

        runner.run(f"rec_guessed/k={k}", guess_step, requires=['root_columns'])

    def uniform_guess_step():
        rec = guess_with_schedule(state['roots'], REC_ORDER, config.degree_schedule, ks=ks)
        state['rec_uniform'] = rec
        write_json(out / 'rec_uniform.json', recurrence_to_json(rec))
        return 'conjectured', str(rec), {'degrees': rec.meta.get('degrees')}

    runner.run('rec_guessed/uniform', uniform_guess_step, requires=['root_columns'], required=False)

    for k in ks:
        def symsquare_step(k=k):
            gauged = gauge_transform(symmetric_square(state['rec'][k]), root_gauge_ratio(k))
            target = state['rec2'].specialize(k=k)
            if not operator_equal_up_to_scalar(gauged, target):
                return 'failed', f"Sym^2 no coincide con la recurrencia WZ en k={k}", {}
            return 'checked', f"Sym^2 proporcional a la recurrencia WZ en k={k}", {}

        runner.run(f"symsquare_matched/k={k}", symsquare_step,
                   requires=[f"rec_guessed/k={k}", 'rec2_checked'])

    def uniform_symsquare_step():
        gauged = gauge_transform(symmetric_square(state['rec_uniform']), root_gauge_ratio())
        if not operator_equal_up_to_scalar(gauged, state['rec2']):
            return 'failed', "Sym^2 uniforme no coincide con la recurrencia WZ", {}
        return 'checked', "Sym^2 uniforme proporcional a la recurrencia WZ", {}

    runner.run('symsquare_matched/uniform', uniform_symsquare_step,
               requires=['rec_guessed/uniform', 'rec2_checked'], required=False)

    def initials_step():
        reference = SequenceTable.from_coeff_table(state['B_guess'], ks)
        matched = {}
        for k in ks:
            if report.status(f"symsquare_matched/k={k}") != 'checked':
                matched[str(k)] = None
                continue
            matched[str(k)] = match_initials(state['rec'][k], state['roots'], reference, {'k': k},
                                             count=3, transform=root_to_entry(k))
        if not all(matched.values()):
            return 'failed', f"valores iniciales: {matched}", {'matched': matched}
        return 'proved', f"tres valores iniciales coinciden para k={ks}", {'matched': matched}

    runner.run('initials_matched', initials_step,
               requires=[f"symsquare_matched/k={k}" for k in ks])

    _banner("FASE 6: MUESTREO DE NO NEGATIVIDAD")

    def nonneg_step():
        grid = config.grid_values()
        reports = {name: sample_nonneg(state[name], grid, n_jobs=config.n_jobs) for name in ('A', 'B')}
        ok = all(r.ok for r in reports.values())
        return ('checked' if ok else 'failed'), f"malla de {len(grid)} puntos", {
            name: r.to_dict() for name, r in reports.items()}

    runner.run('nonneg_sampled', nonneg_step, requires=['expand'])

    write_json(out / 'report.json', report.to_dict())
    write_json(out / 'timings.json', report.timings)
    logger.info(f"Informe guardado en {out / 'report.json'} (código de salida {report.exit_code})")
    return report
