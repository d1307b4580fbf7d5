import logging
from pathlib import Path

import pytest

from src.config import LOG_FORMAT, PipelineConfig, configure_logging, load_config
from src.exact_core import rational


def test_defaults():
    config = PipelineConfig()
    assert config.n_max == 12
    assert config.guess_n_max == 20
    assert config.degree_schedule[0] == (2, 2, 2)
    assert config.grid_values()[1] == rational('1/10')


def test_environment_and_overrides(monkeypatch):
    monkeypatch.setenv('BIEBERBACH_NMAX', '8')
    monkeypatch.setenv('BIEBERBACH_OUT', 'salida')
    config = load_config(seed=7, n_jobs=None)
    assert config.n_max == 8
    assert config.out_dir == Path('salida')
    assert config.seed == 7
    assert config.n_jobs == 1
    assert load_config(n_max=5).n_max == 5


def test_unknown_override():
    with pytest.raises(TypeError):
        load_config(max_degree=3)


def test_echo_is_serializable():
    data = load_config(out_dir='informes').echo()
    assert data['out_dir'] == 'informes'
    assert data['degree_schedule'][0] == [2, 2, 2]
    assert data['sample_grid'][-1] == '10/10'


def test_configure_logging(monkeypatch, tmp_path):
    monkeypatch.setenv('BIEBERBACH_LOG_LEVEL', 'debug')
    log_file = tmp_path / 'logs' / 'run.log'
    assert configure_logging(log_file) == logging.DEBUG
    logging.getLogger('src.test').debug('mensaje de prueba')
    assert 'mensaje de prueba' in log_file.read_text(encoding='utf-8')
    assert ' - ' in LOG_FORMAT
