# config.py - evaluation settings
# coding: utf-8
#
# Copyright (C) 2024-2025 The python-cdm developers
#
# This library is free software; you can redistribute it and/or
# modify it under the terms of the GNU Lesser General Public
# License as published by the Free Software Foundation; either
# version 2.1 of the License, or (at your option) any later version.
#
# This library is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the GNU
# Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public
# License along with this library; if not, write to the Free Software
# Foundation, Inc., 51 Franklin Street, Fifth Floor, Boston, MA
# 02110-1301 USA

"""Evaluation settings.

Settings are read from an INI file with the sections render, weights,
ransac, localize, metrics, doc and pipeline. For example::

    [render]
    engine = stub
    dpi = 300

    [ransac]
    tol = 0.05
    rounds = 4

Keyword arguments named <section>_<option> override the file and the
CDM_CACHE_DIR environment variable overrides the cache directory from the
file. Rendered formulas are cached in a per-user directory unless the
cache_dir option is set to off.

>>> cfg = read_config(render_engine='stub', ransac_tol=0.1)
>>> cfg.render.engine, cfg.ransac.inlier_tol, cfg.weights.w_p
('stub', 0.1, 0.25)
>>> read_config(ransac_rounds='many')
Traceback (most recent call last):
    ...
ConfigError: ...
"""

import configparser
import dataclasses
import functools
import os

from cdm import equiv as equivdb
from cdm.exceptions import *
from cdm.matcher import CostWeights
from cdm.render import DEFAULT_ENGINE_COMMAND, DEFAULT_RASTER_COMMAND, RenderConfig
from cdm.validator import RansacParams


METRICS = ('cdm', 'bleu', 'edit_distance', 'exprate')


def _boolean(value):
    if isinstance(value, bool):
        return value
    try:
        return configparser.ConfigParser.BOOLEAN_STATES[str(value).lower()]
    except KeyError:
        raise ValueError('not a boolean: %r' % value)


def _metrics(value):
    if isinstance(value, str):
        value = [v.strip() for v in value.split(',') if v.strip()]
    value = frozenset(value)
    unknown = value - set(METRICS)
    if unknown:
        raise ValueError('unknown metrics: %s' % ', '.join(sorted(unknown)))
    return value


def _path(value):
    return os.path.expanduser(value) if value else None


def default_cache_dir():
    """Return the per-user directory of the render cache."""
    base = os.environ.get('XDG_CACHE_HOME') or os.path.join(os.path.expanduser('~'), '.cache')
    return os.path.join(base, 'python-cdm')


def _cache_dir(value):
    if value is None:
        return default_cache_dir()
    if str(value).strip().lower() in ('', 'none', 'off'):
        return None
    return os.path.expanduser(value)


# section -> option -> (conversion, default)
_SCHEMA = {
    'render': {
        'engine': (str, 'tex'),
        'engine_command': (str, DEFAULT_ENGINE_COMMAND),
        'raster_command': (str, DEFAULT_RASTER_COMMAND),
        'dpi': (int, 300),
        'timeout': (float, 30.0),
        'page_width': (str, '200cm'),
        'antialias': (_boolean, False),
        'cache_dir': (_cache_dir, None),
    },
    'weights': {
        'token': (float, 1.0),
        'position': (float, 0.25),
        'order': (float, 0.25),
    },
    'ransac': {
        'tol': (float, 0.05),
        'min_inliers': (int, 2),
        'iters': (int, 200),
        'rounds': (int, 4),
        'seed': (int, 0),
    },
    'localize': {
        'tolerance': (int, 7),
        'min_pixels': (int, 2),
    },
    'metrics': {
        'enabled': (_metrics, ','.join(METRICS)),
        'bleu_smoothing': (_boolean, False),
        'edit_level': (str, 'char'),
        'equiv_table': (_path, None),
    },
    'doc': {
        'round1': (float, 0.4),
        'round2': (float, 0.8),
    },
    'pipeline': {
        'jobs': (int, 0),
        'debug_dir': (_path, None),
    },
}


@dataclasses.dataclass
class EvalConfig():
    """All settings of an evaluation run."""

    render: RenderConfig = dataclasses.field(default_factory=RenderConfig)
    weights: CostWeights = dataclasses.field(default_factory=CostWeights)
    ransac: RansacParams = dataclasses.field(default_factory=RansacParams)
    equiv_table: str = None
    tolerance: int = 7
    min_pixels: int = 2
    metrics: frozenset = frozenset(METRICS)
    bleu_smoothing: bool = False
    edit_level: str = 'char'
    round1: float = 0.4
    round2: float = 0.8
    jobs: int = 0
    debug_dir: str = None

    def __post_init__(self):
        if self.equiv_table and not os.path.exists(self.equiv_table):
            raise ConfigError('Equivalence table %s does not exist.' % self.equiv_table)
        if self.edit_level not in ('token', 'char'):
            raise ConfigError('Unknown edit distance level %r.' % self.edit_level)
        if not 0 <= self.tolerance <= 7:
            raise ConfigError('The color tolerance must be between 0 and 7.')
        if not 0 < self.round1 <= self.round2 <= 1:
            raise ConfigError('Matching thresholds must satisfy 0 < round1 <= round2 <= 1.')

    @functools.cached_property
    def table(self):
        """The render equivalence table."""
        if self.equiv_table:
            return equivdb.read_file(self.equiv_table)
        return equivdb.get()

    @property
    def workers(self):
        """The number of parallel workers to use."""
        return self.jobs if self.jobs and self.jobs > 0 else (os.cpu_count() or 1)


def _read_file(path):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, 'r', encoding='utf-8') as fp:
            parser.read_file(fp)
    except OSError as e:
        raise ConfigError('Cannot read configuration %s: %s' % (path, e))
    except configparser.Error as e:
        raise ConfigError('Invalid configuration %s: %s' % (path, e))
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError('Unknown configuration section [%s].' % section)
        for option, value in parser.items(section):
            if option not in _SCHEMA[section]:
                raise ConfigError('Unknown option %s in section [%s].' % (option, section))
            values[section, option] = value
    return values


def _split_override(key):
    section, _sep, option = key.partition('_')
    if section not in _SCHEMA or option not in _SCHEMA[section]:
        raise ConfigError('Unknown configuration override %s.' % key)
    return section, option


def read_config(path=None, **overrides):
    """Read the configuration file and apply the overrides.

    Keyword arguments are named <section>_<option>, None values are
    ignored."""
    values = _read_file(path) if path else {}
    if os.environ.get('CDM_CACHE_DIR'):
        values['render', 'cache_dir'] = os.environ['CDM_CACHE_DIR']
    for key, value in overrides.items():
        if value is not None:
            values[_split_override(key)] = value
    settings = {}
    for section, options in _SCHEMA.items():
        for option, (conversion, default) in options.items():
            value = values.get((section, option), default)
            try:
                settings[section, option] = conversion(value)
            except (TypeError, ValueError) as e:
                raise ConfigError('Invalid value for %s.%s: %s' % (section, option, e))
    return EvalConfig(
        render=RenderConfig(
            engine=settings['render', 'engine'],
            engine_command=settings['render', 'engine_command'],
            raster_command=settings['render', 'raster_command'],
            dpi=settings['render', 'dpi'],
            timeout=settings['render', 'timeout'],
            page_width=settings['render', 'page_width'],
            antialias=settings['render', 'antialias'],
            cache_dir=settings['render', 'cache_dir']),
        weights=CostWeights(
            w_t=settings['weights', 'token'],
            w_p=settings['weights', 'position'],
            w_o=settings['weights', 'order']),
        ransac=RansacParams(
            inlier_tol=settings['ransac', 'tol'],
            min_inliers=settings['ransac', 'min_inliers'],
            iterations=settings['ransac', 'iters'],
            max_rounds=settings['ransac', 'rounds'],
            seed=settings['ransac', 'seed']),
        equiv_table=settings['metrics', 'equiv_table'],
        tolerance=settings['localize', 'tolerance'],
        min_pixels=settings['localize', 'min_pixels'],
        metrics=settings['metrics', 'enabled'],
        bleu_smoothing=settings['metrics', 'bleu_smoothing'],
        edit_level=settings['metrics', 'edit_level'],
        round1=settings['doc', 'round1'],
        round2=settings['doc', 'round2'],
        jobs=settings['pipeline', 'jobs'],
        debug_dir=settings['pipeline', 'debug_dir'])
