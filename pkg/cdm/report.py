# report.py - read and write evaluation reports and sample files
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

"""Read and write evaluation reports and sample files.

Samples are read from JSON Lines files with one object per line:

>>> import io
>>> samples = read_samples(io.StringIO(
...     '{"id": "a", "gt": "x^2", "pred": "x^{2}"}\\n'
...     '\\n'
...     '{"id": "b", "gt": "y", "pred": "y", "subset": "printed"}\\n'))
>>> [(s.id, s.subset) for s in samples]
[('a', None), ('b', 'printed')]
>>> read_samples(io.StringIO('{"id": "a", "gt": "x"}\\n'))
Traceback (most recent call last):
    ...
InputError: line 1: missing field 'pred'

A report holds the summary and all records. The summary is checked
against the records when the report is read back.
"""

import csv
import json
import logging

from cdm import __version__
from cdm.exceptions import *
from cdm.pipeline import EvalRecord, Sample, summarize


_log = logging.getLogger(__name__)


# the summary columns of the CSV export
CSV_FIELDS = (
    'subset', 'count', 'mean_cdm', 'exprate_at_cdm', 'mean_bleu',
    'mean_edit_distance', 'exprate', 'render_success_rate', 'gt_failures')


def read_samples(fp):
    """Read samples from a JSON Lines stream."""
    samples = []
    for number, line in enumerate(fp, 1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except ValueError as e:
            raise InputError('line %d: %s' % (number, e))
        if not isinstance(data, dict):
            raise InputError('line %d: not a JSON object' % number)
        for field in ('id', 'gt', 'pred'):
            if field not in data:
                raise InputError('line %d: missing field %r' % (number, field))
        if not isinstance(data['gt'], str) or not isinstance(data['pred'], str):
            raise InputError('line %d: gt and pred must be strings' % number)
        samples.append(Sample(str(data['id']), data['gt'], data['pred'], data.get('subset')))
    return samples


def write_samples(samples, fp):
    """Write samples as JSON Lines."""
    for sample in samples:
        data = {'id': sample.id, 'gt': sample.gt, 'pred': sample.pred}
        if sample.subset is not None:
            data['subset'] = sample.subset
        fp.write(json.dumps(data, ensure_ascii=False) + '\n')


def write_report(records, summary, fp):
    """Write the summary and records as JSON."""
    json.dump({
        'generator': 'python-cdm %s' % __version__,
        'summary': summary.to_dict(),
        'records': [record.to_dict() for record in records],
    }, fp, indent=2, ensure_ascii=False)
    fp.write('\n')


def load_report(fp):
    """Read a report, returns the records and the summary.

    Raises InvalidReport when the summary cannot be computed from the
    records."""
    try:
        data = json.load(fp)
        records = [EvalRecord.from_dict(record) for record in data['records']]
        stored = dict(data['summary'])
    except (ValueError, KeyError, TypeError) as e:
        raise InputError('Cannot read report: %s' % e)
    summary = summarize(records)
    summary.unmatched_review = stored.get('unmatched_review', [])
    if summary.to_dict() != stored:
        raise InvalidReport()
    return records, summary


def write_csv(summary, fp):
    """Write the overall and per subset summary as CSV."""
    writer = csv.DictWriter(fp, CSV_FIELDS, extrasaction='ignore', lineterminator='\n')
    writer.writeheader()
    writer.writerow(dict(summary.to_dict(), subset='all'))
    for name, values in sorted(summary.subsets.items()):
        writer.writerow(dict(values, subset=name))


def mine(records, threshold=1.0, exclude=()):
    """Select the samples with a CDM score below the threshold.

    Samples with an id in exclude are skipped. Raises MissingArtifacts when
    a selected record lacks the formula texts."""
    exclude = set(exclude)
    records = [record for record in records if record.kind == 'matched']
    if records and all(record.cdm is None for record in records):
        raise MissingArtifacts('The report does not contain CDM scores.')
    samples = []
    for record in records:
        if record.cdm is None or record.cdm.f1 >= threshold or record.id in exclude:
            continue
        if record.gt is None or record.pred is None:
            raise MissingArtifacts('Record %s lacks the formula texts.' % record.id)
        samples.append(Sample(record.id, record.gt, record.pred, record.subset))
    _log.info('selected %d of %d samples below %s', len(samples), len(records), threshold)
    return samples
