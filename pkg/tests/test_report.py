# test_report.py - tests for reading and writing reports
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

"""Tests for the cdm.report module."""

import csv
import io
import json
import unittest

from cdm.config import read_config
from cdm.exceptions import *
from cdm.pipeline import EvalRecord, Sample, evaluate_batch
from cdm.report import load_report, mine, read_samples, write_csv, write_report, write_samples


SAMPLES = [
    Sample('1', r'\left(x+y\right)+z', '(x+y)+z', 'printed'),
    Sample('2', 'x^{2}+y', 'x^{2}+g', 'printed'),
    Sample('3', r'\frac{a}{b}', 'a/b', 'handwritten'),
    Sample('4', 'a+b', 'a+b', 'handwritten'),
]


class TestReport(unittest.TestCase):
    """Test writing and reading back a report."""

    @classmethod
    def setUpClass(cls):
        """Evaluate the samples shared by the tests."""
        cls.records, cls.summary = evaluate_batch(SAMPLES, read_config(render_engine='stub'))

    def report(self):
        """Return the written report as a stream."""
        fp = io.StringIO()
        write_report(self.records, self.summary, fp)
        fp.seek(0)
        return fp

    def test_round_trip(self):
        """Test that the records and summary are read back unchanged."""
        records, summary = load_report(self.report())
        self.assertEqual(records, self.records)
        self.assertEqual(summary.to_dict(), self.summary.to_dict())

    def test_contents(self):
        """Test the structure of the written report."""
        data = json.load(self.report())
        self.assertTrue(data['generator'].startswith('python-cdm '))
        self.assertEqual(data['summary']['count'], 4)
        self.assertEqual([r['id'] for r in data['records']], ['1', '2', '3', '4'])
        self.assertEqual(data['records'][0]['cdm']['f1'], 1.0)
        self.assertEqual(sorted(data['summary']['subsets']), ['handwritten', 'printed'])

    def test_tampered_summary(self):
        """Test that a summary that does not match the records is refused."""
        data = json.load(self.report())
        data['summary']['mean_cdm'] = 0.99
        with self.assertRaises(InvalidReport):
            load_report(io.StringIO(json.dumps(data)))
        data = json.load(self.report())
        del data['records'][0]
        with self.assertRaises(InvalidReport):
            load_report(io.StringIO(json.dumps(data)))

    def test_invalid(self):
        """Test reading something that is not a report."""
        with self.assertRaises(InputError):
            load_report(io.StringIO('not json'))
        with self.assertRaises(InputError):
            load_report(io.StringIO('{"records": []}'))

    def test_csv(self):
        """Test the CSV export of the summary."""
        fp = io.StringIO()
        write_csv(self.summary, fp)
        fp.seek(0)
        rows = list(csv.DictReader(fp))
        self.assertEqual([row['subset'] for row in rows], ['all', 'handwritten', 'printed'])
        self.assertEqual([row['count'] for row in rows], ['4', '2', '2'])
        self.assertEqual(float(rows[0]['mean_cdm']), self.summary.mean_cdm)
        self.assertEqual(float(rows[0]['render_success_rate']), 1.0)


class TestMine(unittest.TestCase):
    """Test selection of hard cases from a report."""

    @classmethod
    def setUpClass(cls):
        """Evaluate the samples shared by the tests."""
        cls.records, _summary = evaluate_batch(SAMPLES, read_config(render_engine='stub'))

    def test_threshold(self):
        """Test that only samples below the threshold are selected."""
        scores = dict((r.id, r.cdm.f1) for r in self.records)
        # the misread glyph and the division slash do not score 1
        self.assertEqual(scores['1'], 1.0)
        self.assertEqual(scores['4'], 1.0)
        self.assertLess(scores['2'], 1.0)
        self.assertLess(scores['3'], 1.0)
        self.assertEqual([s.id for s in mine(self.records)], ['2', '3'])
        self.assertEqual(mine(self.records)[0], SAMPLES[1])
        self.assertEqual([s.id for s in mine(self.records, threshold=0.0)], [])
        self.assertEqual([s.id for s in mine(self.records, exclude=['3'])], ['2'])

    def test_missing_artifacts(self):
        """Test records that cannot be mined."""
        with self.assertRaises(MissingArtifacts):
            mine([EvalRecord(id='x')])
        records = [EvalRecord.from_dict(dict(self.records[1].to_dict(), gt=None))]
        with self.assertRaises(MissingArtifacts):
            mine(records)

    def test_skips_unpaired(self):
        """Test that missing and redundant document formulas are skipped."""
        records = [EvalRecord.from_dict(dict(r.to_dict(), kind='missing')) for r in self.records]
        self.assertEqual(mine(records), [])
        records[1].kind = 'matched'
        self.assertEqual([s.id for s in mine(records)], ['2'])


class TestSamples(unittest.TestCase):
    """Test the JSON Lines sample files."""

    def test_write_and_read(self):
        """Test that samples are written in the same format as read."""
        fp = io.StringIO()
        write_samples(SAMPLES, fp)
        fp.seek(0)
        self.assertEqual(read_samples(fp), SAMPLES)

    def test_errors(self):
        """Test the errors of invalid sample files."""
        with self.assertRaises(InputError):
            read_samples(io.StringIO('{"id": 1, "gt": "x", "pred": "y"}\n{broken\n'))
        with self.assertRaises(InputError):
            read_samples(io.StringIO('[1, 2, 3]\n'))
        with self.assertRaises(InputError):
            read_samples(io.StringIO('{"id": 1, "gt": 2, "pred": "y"}\n'))
        samples = read_samples(io.StringIO('{"id": 1, "gt": "x", "pred": "y"}\n'))
        self.assertEqual(samples[0].id, '1')
