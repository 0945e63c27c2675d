# test_config.py - tests for reading the configuration
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

"""Tests for the cdm.config module."""

import os
import tempfile
import unittest
from unittest import mock

from cdm.config import EvalConfig, default_cache_dir, read_config
from cdm.exceptions import *


class TestReadConfig(unittest.TestCase):
    """Test the configuration file and overrides."""

    def setUp(self):
        """Prepare the test."""
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        patcher = mock.patch.dict(os.environ)
        patcher.start()
        self.addCleanup(patcher.stop)
        os.environ.pop('CDM_CACHE_DIR', None)

    def write(self, content, name='cdm.ini'):
        """Write a file in the temporary directory."""
        filename = os.path.join(self.directory.name, name)
        with open(filename, 'w', encoding='utf-8') as fp:
            fp.write(content)
        return filename

    def test_defaults(self):
        """Test the default settings."""
        cfg = read_config()
        self.assertEqual(cfg.render.engine, 'tex')
        self.assertEqual(cfg.render.dpi, 300)
        self.assertEqual(cfg.render.cache_dir, default_cache_dir())
        self.assertEqual((cfg.weights.w_t, cfg.weights.w_p, cfg.weights.w_o), (1.0, 0.25, 0.25))
        self.assertEqual(cfg.ransac.inlier_tol, 0.05)
        self.assertEqual(cfg.ransac.max_rounds, 4)
        self.assertEqual((cfg.round1, cfg.round2), (0.4, 0.8))
        self.assertEqual(cfg.metrics, frozenset(['cdm', 'bleu', 'edit_distance', 'exprate']))
        self.assertEqual(cfg.edit_level, 'char')
        self.assertGreaterEqual(cfg.workers, 1)
        self.assertEqual(EvalConfig().round1, cfg.round1)

    def test_file(self):
        """Test reading settings from a file."""
        filename = self.write('\n'.join([
            '[render]', 'engine = stub', 'dpi = 150', 'cache_dir = ~/cdm-cache',
            '[weights]', 'position = 0.5',
            '[ransac]', 'tol = 0.1', 'seed = 3',
            '[metrics]', 'enabled = cdm, bleu', 'bleu_smoothing = yes',
            '[doc]', 'round1 = 0.3',
            '[pipeline]', 'jobs = 3', '']))
        cfg = read_config(filename)
        self.assertEqual(cfg.render.engine, 'stub')
        self.assertEqual(cfg.render.dpi, 150)
        self.assertEqual(cfg.render.cache_dir, os.path.expanduser('~/cdm-cache'))
        self.assertEqual(cfg.weights.w_p, 0.5)
        self.assertEqual(cfg.ransac.inlier_tol, 0.1)
        self.assertEqual(cfg.ransac.seed, 3)
        self.assertEqual(cfg.metrics, frozenset(['cdm', 'bleu']))
        self.assertTrue(cfg.bleu_smoothing)
        self.assertEqual(cfg.round1, 0.3)
        self.assertEqual(cfg.workers, 3)

    def test_cache_dir(self):
        """Test that the render cache is on by default."""
        os.environ['XDG_CACHE_HOME'] = self.directory.name
        self.assertEqual(
            read_config().render.cache_dir, os.path.join(self.directory.name, 'python-cdm'))
        os.environ.pop('XDG_CACHE_HOME')
        self.assertEqual(
            read_config().render.cache_dir,
            os.path.join(os.path.expanduser('~'), '.cache', 'python-cdm'))
        self.assertIsNone(read_config(render_cache_dir='off').render.cache_dir)
        filename = self.write('[render]\ncache_dir = none\n')
        self.assertIsNone(read_config(filename).render.cache_dir)

    def test_precedence(self):
        """Test that overrides beat the environment which beats the file."""
        filename = self.write('[render]\ncache_dir = /from/file\nengine = tex\n')
        self.assertEqual(read_config(filename).render.cache_dir, '/from/file')
        os.environ['CDM_CACHE_DIR'] = '/from/env'
        self.assertEqual(read_config(filename).render.cache_dir, '/from/env')
        cfg = read_config(filename, render_cache_dir='/from/flag', render_engine=None)
        self.assertEqual(cfg.render.cache_dir, '/from/flag')
        self.assertEqual(cfg.render.engine, 'tex')

    def test_invalid(self):
        """Test that configuration problems raise ConfigError."""
        with self.assertRaises(ConfigError):
            read_config(os.path.join(self.directory.name, 'missing.ini'))
        with self.assertRaises(ConfigError):
            read_config(self.write('[colors]\nred = 1\n'))
        with self.assertRaises(ConfigError):
            read_config(self.write('[render]\nfonts = 1\n'))
        with self.assertRaises(ConfigError):
            read_config(self.write('no section\n'))
        with self.assertRaises(ConfigError):
            read_config(render_dpi='many')
        with self.assertRaises(ConfigError):
            read_config(render_engine='troff')
        with self.assertRaises(ConfigError):
            read_config(weights_token=-1)
        with self.assertRaises(ConfigError):
            read_config(ransac_tol=0)
        with self.assertRaises(ConfigError):
            read_config(doc_round1=0.9, doc_round2=0.5)
        with self.assertRaises(ConfigError):
            read_config(metrics_enabled='cdm,rouge')
        with self.assertRaises(ConfigError):
            read_config(metrics_edit_level='word')
        with self.assertRaises(ConfigError):
            read_config(metrics_equiv_table=os.path.join(self.directory.name, 'missing.dat'))
        with self.assertRaises(ConfigError):
            read_config(unknown_option=1)

    def test_equiv_table(self):
        """Test loading a custom equivalence table."""
        filename = self.write('\\le \\leq \\leqslant\n', 'equiv.dat')
        cfg = read_config(metrics_equiv_table=filename)
        self.assertEqual(cfg.table.lookup('\\leqslant'), '\\le')
        self.assertEqual(cfg.table.lookup('\\ne'), '\\ne')
        with self.assertRaises(InvalidEquivTable):
            read_config(metrics_equiv_table=self.write('a b\nb c\n', 'bad.dat')).table
