"""
Configuración del proyecto y del registro (logging).

Los valores por defecto pueden sobrescribirse con variables de entorno
(admite un fichero ``.env`` gracias a python-dotenv) y, por encima de ellas,
con los argumentos de la línea de comandos.
"""

import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

from dotenv import load_dotenv

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVEL_ENV = 'BIEBERBACH_LOG_LEVEL'

DEFAULT_DEGREE_SCHEDULE = ((2, 2, 2), (4, 4, 4), (6, 6, 6))
DEFAULT_SAMPLE_GRID = tuple(f"{i}/10" for i in range(11))


@dataclass
class PipelineConfig:
    """Parámetros del pipeline completo de la prueba del Fact 2."""
    n_max: int = 12
    guess_n_max: int = 20
    k_checks: tuple = (0, 1, 2, 3)
    degree_schedule: tuple = DEFAULT_DEGREE_SCHEDULE
    sample_grid: tuple = DEFAULT_SAMPLE_GRID
    seed: int = 0
    out_dir: Path = field(default_factory=lambda: Path('reports'))
    fmt: str = 'json'
    n_jobs: int = 1
    spot_checks: int = 20
    fact1_order: int = 6

    def grid_values(self):
        """Devuelve la malla de muestreo como racionales exactos."""
        from src.exact_core import rational
        return [rational(v) for v in self.sample_grid]

    def echo(self):
        """Copia serializable de la configuración para el informe."""
        data = asdict(self)
        data['out_dir'] = str(self.out_dir)
        data['k_checks'] = list(self.k_checks)
        data['degree_schedule'] = [list(d) for d in self.degree_schedule]
        data['sample_grid'] = list(self.sample_grid)
        return data


def load_config(**overrides):
    """
    Construye la configuración: valores por defecto < entorno < overrides.

    Args:
        **overrides: valores explícitos (normalmente de argparse); los None se ignoran.

    Returns:
        PipelineConfig: configuración resultante.
    """
    load_dotenv()
    config = PipelineConfig()
    env_map = {
        'BIEBERBACH_NMAX': ('n_max', int),
        'BIEBERBACH_GUESS_NMAX': ('guess_n_max', int),
        'BIEBERBACH_SEED': ('seed', int),
        'BIEBERBACH_OUT': ('out_dir', Path),
        'BIEBERBACH_N_JOBS': ('n_jobs', int),
    }
    for env_name, (attr, cast) in env_map.items():
        value = os.getenv(env_name)
        if value:
            setattr(config, attr, cast(value))
    for attr, value in overrides.items():
        if value is None:
            continue
        if not hasattr(config, attr):
            raise TypeError(f"parámetro de configuración desconocido: {attr}")
        setattr(config, attr, Path(value) if attr == 'out_dir' else value)
    return config


def configure_logging(log_file=None):
    """
    Configura el registro con el formato del proyecto.

    El nivel se lee de la variable de entorno BIEBERBACH_LOG_LEVEL (INFO por defecto).

    Args:
        log_file (Path | None): fichero adicional donde volcar el registro.
    """
    load_dotenv()
    level_name = os.getenv(LOG_LEVEL_ENV, 'INFO').upper()
    level = getattr(logging, level_name, logging.INFO)
    handlers = [logging.StreamHandler()]
    if log_file is not None:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)
    return level
