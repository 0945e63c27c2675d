# test_pipeline.py - tests for the evaluation pipeline
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

"""Tests for the cdm.pipeline module."""

import os
import tempfile
import unittest
from unittest import mock

from cdm.config import read_config
from cdm.exceptions import *
from cdm.pipeline import (
    EvalRecord, Sample, baseline_scores, evaluate_batch, evaluate_pair, summarize)


CASE1_GT = r'\left(x+y\right)+z=x+\left(y+z\right)'
CASE1_PRED = r'(x+y)+z=x+(y+z)'
CASE2_PRED = r'(x+y)+2=x+(y+z)'
TRUNCATED_ARRAY = r'z = \left( \begin{array}{cc} x \\ y'


def stub_config(**kwargs):
    """Return a configuration that renders with the built-in engine."""
    return read_config(render_engine='stub', pipeline_jobs=2, **kwargs)


class TestEvaluatePair(unittest.TestCase):
    """Test the scoring of single formula pairs."""

    def setUp(self):
        """Prepare the test."""
        self.cfg = stub_config()

    def test_delimiter_sizers(self):
        """Test that dropping \\left and \\right does not cost anything."""
        record = evaluate_pair(CASE1_GT, CASE1_PRED, self.cfg)
        self.assertEqual(record.cdm.f1, 1.0)
        self.assertEqual((record.cdm.tp, record.cdm.fp, record.cdm.fn), (15, 0, 0))
        self.assertTrue(record.cdm.render_ok)
        self.assertIs(record.baselines.exact_match, False)
        # both sides have 15 tokens of which 11, 8, 5 and 2 of the
        # 1 to 4-grams of the prediction occur in the ground truth
        self.assertAlmostEqual(record.baselines.bleu, 0.4048, places=4)
        self.assertLess(abs(record.baselines.bleu - 0.449), 0.05)
        # the prediction is the ground truth with 22 of 37 characters removed
        self.assertAlmostEqual(record.baselines.edit_distance, 22 / 37)
        self.assertLess(abs(record.baselines.edit_distance - 0.571), 0.1)

    def test_misrecognized_glyph(self):
        """Test that a single wrong glyph is counted on both sides."""
        # 15 glyphs per side; z and 2 are paired by position and then
        # dropped by the token check: 14 matches, 1 extra, 1 missing
        record = evaluate_pair(CASE1_GT, CASE2_PRED, self.cfg)
        self.assertEqual((record.cdm.tp, record.cdm.fp, record.cdm.fn), (14, 1, 1))
        self.assertAlmostEqual(record.cdm.f1, 28 / 30)
        self.assertLess(record.cdm.f1, evaluate_pair(CASE1_GT, CASE1_PRED, self.cfg).cdm.f1)

    def test_prediction_fails_to_render(self):
        """Test that a truncated array scores 0 with CompileError."""
        record = evaluate_pair('z = x + y', TRUNCATED_ARRAY, self.cfg, id='t')
        self.assertEqual(record.cdm.f1, 0.0)
        self.assertFalse(record.cdm.render_ok)
        self.assertEqual(record.cdm.failure, 'CompileError')
        self.assertEqual(record.cdm.failed_side, 'pred')
        self.assertEqual(record.cdm.tp, 0)
        self.assertEqual(record.cdm.fn, 5)
        # baselines are computed regardless of the render outcome
        self.assertIsNotNone(record.baselines.bleu)
        self.assertIsNotNone(record.baselines.edit_distance)

    def test_ground_truth_fails_to_render(self):
        """Test that a broken ground truth is flagged as a data error."""
        with self.assertLogs('cdm.pipeline', level='WARNING'):
            record = evaluate_pair(TRUNCATED_ARRAY, 'z = x', self.cfg, id='g')
        self.assertEqual(record.cdm.f1, 0.0)
        self.assertEqual(record.cdm.failed_side, 'gt')

    def test_unbalanced_braces(self):
        """Test that unbalanced braces are scored as a compile error."""
        record = evaluate_pair('x^{2}', 'x^{2', self.cfg)
        self.assertEqual(record.cdm.f1, 0.0)
        self.assertEqual(record.cdm.failure, 'CompileError')

    def test_empty_formulas(self):
        """Test that two empty formulas match perfectly."""
        record = evaluate_pair('', '', self.cfg)
        self.assertEqual(record.cdm.f1, 1.0)
        self.assertIs(record.baselines.exact_match, True)

    def test_empty_prediction(self):
        """Test that an empty prediction misses every glyph."""
        record = evaluate_pair('a+b', '', self.cfg)
        self.assertEqual((record.cdm.tp, record.cdm.fp, record.cdm.fn), (0, 0, 3))
        self.assertEqual(record.cdm.f1, 0.0)

    def test_metric_selection(self):
        """Test that disabled metrics are not computed."""
        record = evaluate_pair('a+b', 'a+b', stub_config(metrics_enabled='bleu'))
        self.assertIsNone(record.cdm)
        self.assertEqual(record.baselines.bleu, 1.0)
        self.assertIsNone(record.baselines.edit_distance)
        self.assertIsNone(record.baselines.exact_match)

    def test_timings(self):
        """Test that the time of every stage is recorded."""
        record = evaluate_pair('a+b', 'a-b', self.cfg)
        for stage in ('tokenize', 'render_gt', 'render_pred', 'localize', 'match', 'validate'):
            self.assertIn(stage, record.timings)
            self.assertGreaterEqual(record.timings[stage], 0.0)

    def test_debug_artifacts(self):
        """Test that renders and overlays are written to the debug directory."""
        with tempfile.TemporaryDirectory() as directory:
            cfg = stub_config(pipeline_debug_dir=directory)
            record = evaluate_pair(CASE1_GT, CASE2_PRED, cfg, id='case2')
            for name in ('gt_image', 'pred_image', 'gt_elements', 'pred_elements', 'overlay'):
                self.assertTrue(os.path.exists(record.artifacts[name]), name)
            self.assertEqual(
                os.path.dirname(record.artifacts['overlay']), os.path.join(directory, 'case2'))

    def test_moved_glyph(self):
        """Test that a single matching glyph survives a shifted layout."""
        # a is matched at another position, 1 and 2 are dropped by the
        # token check
        record = evaluate_pair('a1', '2a', self.cfg)
        self.assertEqual((record.cdm.tp, record.cdm.fp, record.cdm.fn), (1, 1, 1))
        self.assertEqual(record.cdm.f1, 0.5)

    def test_swap(self):
        """Test that swapping ground truth and prediction keeps the score."""
        gt = r'\frac{i r ^{\sigma j }}{\frac{p }{o B }} h'
        pred = r'j s _{m _{\beta } c \frac{p F E }{\omega }}'
        forward = evaluate_pair(gt, pred, self.cfg).cdm
        backward = evaluate_pair(pred, gt, self.cfg).cdm
        self.assertEqual(backward.f1, forward.f1)
        self.assertEqual((backward.tp, backward.fp, backward.fn), (forward.tp, forward.fn, forward.fp))

    def test_palette_exhausted(self):
        """Test that a formula with more glyphs than colors fails to render."""
        record = evaluate_pair('a+b', ' '.join(['x'] * 5832), self.cfg)
        self.assertFalse(record.cdm.render_ok)
        self.assertEqual(record.cdm.failure, 'CompileError')
        self.assertEqual(record.cdm.failed_side, 'pred')
        self.assertEqual(record.cdm.f1, 0.0)

    def test_baselines_table(self):
        """Test that the text metrics use the configured equivalence table."""
        with tempfile.TemporaryDirectory() as directory:
            filename = os.path.join(directory, 'table.dat')
            with open(filename, 'w', encoding='utf-8') as fp:
                fp.write('\\le \\leqslant\n')
            cfg = stub_config(metrics_equiv_table=filename)
            cfg.table
            with mock.patch('cdm.equiv.get', side_effect=AssertionError('default table used')):
                scores = baseline_scores('a \\le b', 'a \\le b', cfg)
        self.assertIs(scores.exact_match, True)
        self.assertEqual(scores.edit_distance, 0.0)

    def test_record_round_trip(self):
        """Test that a record survives conversion to a dict."""
        record = evaluate_pair(CASE1_GT, CASE2_PRED, self.cfg, id='1', subset='printed')
        self.assertEqual(EvalRecord.from_dict(record.to_dict()), record)


class TestEvaluateBatch(unittest.TestCase):
    """Test the evaluation of a batch of samples."""

    def setUp(self):
        """Prepare the test."""
        self.cfg = stub_config()

    def test_render_success_rate(self):
        """Test that one failure in 100 samples gives a rate of 0.99."""
        samples = [Sample(str(i), 'x_{%d}' % i, 'x_{%d}' % i) for i in range(99)]
        samples.append(Sample('broken', 'z = x', TRUNCATED_ARRAY))
        records, summary = evaluate_batch(samples, self.cfg)
        self.assertEqual([r.id for r in records], [s.id for s in samples])
        self.assertEqual(summary.count, 100)
        self.assertAlmostEqual(summary.render_success_rate, 0.99)
        self.assertAlmostEqual(summary.mean_cdm, 0.99)
        self.assertAlmostEqual(summary.exprate_at_cdm, 0.99)
        self.assertEqual(summary.gt_failures, 0)
        self.assertEqual(summary.histogram['1'], 99)
        self.assertEqual(summary.histogram['0'], 1)

    def test_summary(self):
        """Test the summary of a small batch with subsets."""
        records, summary = evaluate_batch([
            ('1', CASE1_GT, CASE1_PRED, 'printed'),
            {'id': '2', 'gt': CASE1_GT, 'pred': CASE2_PRED, 'subset': 'handwritten'},
            ('3', 'a+b', 'a+b', 'printed'),
        ], self.cfg)
        self.assertAlmostEqual(summary.mean_cdm, (1 + 28 / 30 + 1) / 3)
        self.assertAlmostEqual(summary.exprate_at_cdm, 2 / 3)
        self.assertAlmostEqual(summary.exprate, 1 / 3)
        self.assertEqual(summary.render_success_rate, 1.0)
        self.assertEqual(sorted(summary.subsets), ['handwritten', 'printed'])
        self.assertEqual(summary.subsets['printed']['count'], 2)
        self.assertEqual(summary.subsets['printed']['mean_cdm'], 1.0)
        self.assertAlmostEqual(summary.subsets['handwritten']['mean_cdm'], 28 / 30)
        self.assertEqual(summarize(records).to_dict(), summary.to_dict())

    def test_mean_cdm_not_below_exprate(self):
        """Test that the mean CDM is never below ExpRate@CDM."""
        _records, summary = evaluate_batch([
            ('a', 'a+b', 'a-b'), ('b', 'x^2', 'x^{2}'), ('c', r'\frac12', r'\frac21')], self.cfg)
        self.assertGreaterEqual(summary.mean_cdm, summary.exprate_at_cdm)

    def test_errors(self):
        """Test the input errors of a batch."""
        with self.assertRaises(EmptyInput):
            evaluate_batch([], self.cfg)
        with self.assertRaises(DuplicateId):
            evaluate_batch([('1', 'a', 'a'), ('1', 'b', 'b')], self.cfg)
        with self.assertRaises(InputError):
            evaluate_batch([{'id': '1', 'gt': 'a'}], self.cfg)
        with self.assertRaises(EmptyInput):
            summarize([])
