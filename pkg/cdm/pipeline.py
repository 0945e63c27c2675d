# pipeline.py - evaluate formula pairs end to end
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

"""Evaluate formula pairs end to end.

Both formulas are tokenized, colorized, rendered and localized, the glyphs
are matched and the matching validated before the CDM score is computed.
The text baselines are computed on the same token sequences.

>>> from cdm.config import read_config
>>> cfg = read_config(render_engine='stub')
>>> record = evaluate_pair('x^2+1', 'x^{2}+1', cfg)
>>> record.cdm.f1, record.baselines.exact_match
(1.0, True)
>>> record = evaluate_pair('x^2+1', 'x^2+l', cfg)
>>> record.cdm.tp, record.cdm.fp, record.cdm.fn
(3, 1, 1)

Failures to render the prediction result in a score of 0:

>>> record = evaluate_pair('x', '\\\\begin{array}{c} x', cfg)
>>> record.cdm.f1, record.cdm.failure
(0.0, 'CompileError')
"""

import collections
import concurrent.futures
import contextlib
import dataclasses
import logging
import os
import time

from cdm import debug
from cdm.color import assign_colors
from cdm.config import EvalConfig
from cdm.exceptions import *
from cdm.latex import tokenize, tokenize_lenient
from cdm.localize import dump_elements, localize
from cdm.matcher import MatchSet, assign
from cdm.metrics import (
    BaselineScores, CdmScore, bleu, cdm_histogram, cdm_score, edit_distance,
    exprate, exprate_at_cdm)
from cdm.render import render
from cdm.validator import validate


_log = logging.getLogger(__name__)


Sample = collections.namedtuple('Sample', 'id gt pred subset')
Sample.__new__.__defaults__ = (None,)


@dataclasses.dataclass
class EvalRecord():
    """The complete result of one formula pair."""

    id: str
    gt: str = None
    pred: str = None
    subset: str = None
    cdm: CdmScore = None
    baselines: BaselineScores = dataclasses.field(default_factory=BaselineScores)
    timings: dict = dataclasses.field(default_factory=dict)
    artifacts: dict = dataclasses.field(default_factory=dict)
    kind: str = 'matched'
    doc_id: str = None

    def to_dict(self):
        """Return the record as a JSON compatible dict."""
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        """Build a record from a dict as produced by to_dict()."""
        data = dict(data)
        if data.get('cdm') is not None:
            data['cdm'] = CdmScore(**data['cdm'])
        data['baselines'] = BaselineScores(**(data.get('baselines') or {}))
        known = set(f.name for f in dataclasses.fields(cls))
        return cls(**dict((k, v) for k, v in data.items() if k in known))


@dataclasses.dataclass
class Summary():
    """Aggregated scores of a set of records."""

    count: int
    mean_cdm: float = None
    exprate_at_cdm: float = None
    mean_bleu: float = None
    mean_edit_distance: float = None
    exprate: float = None
    render_success_rate: float = None
    gt_failures: int = 0
    histogram: dict = None
    subsets: dict = dataclasses.field(default_factory=dict)
    unmatched_review: list = dataclasses.field(default_factory=list)

    def to_dict(self):
        """Return the summary as a JSON compatible dict."""
        return dataclasses.asdict(self)


def _mean(values):
    values = list(values)
    if not values:
        return None
    return sum(values) / len(values)


def _summarize(records):
    scores = [r.cdm for r in records if r.cdm is not None]
    rendered = [r.cdm for r in records if r.cdm is not None and r.kind == 'matched']
    summary = Summary(count=len(records))
    if scores:
        summary.mean_cdm = _mean(s.f1 for s in scores)
        summary.exprate_at_cdm = exprate_at_cdm(scores)
        summary.histogram = cdm_histogram(scores)
        summary.gt_failures = sum(1 for s in scores if s.failed_side == 'gt')
    if rendered:
        summary.render_success_rate = _mean(1.0 if s.render_ok else 0.0 for s in rendered)
    summary.mean_bleu = _mean(r.baselines.bleu for r in records if r.baselines.bleu is not None)
    summary.mean_edit_distance = _mean(
        r.baselines.edit_distance for r in records if r.baselines.edit_distance is not None)
    matches = [r.baselines.exact_match for r in records if r.baselines.exact_match is not None]
    if matches:
        summary.exprate = exprate(matches)
    return summary


def summarize(records):
    """Aggregate the records, overall and per subset."""
    records = list(records)
    if not records:
        raise EmptyInput()
    summary = _summarize(records)
    subsets = collections.OrderedDict()
    for record in records:
        if record.subset is not None:
            subsets.setdefault(record.subset, []).append(record)
    summary.subsets = dict((name, _summarize(group).to_dict()) for name, group in subsets.items())
    return summary


class _Deadline():
    """Wall clock budget of one sample."""

    def __init__(self, seconds):
        self.end = time.monotonic() + seconds

    def check(self):
        if time.monotonic() > self.end:
            raise RenderFailure('Timeout', 'The sample exceeded its time budget.')


@contextlib.contextmanager
def _timed(timings, stage):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + (time.perf_counter() - start) * 1000


def _failure_reason(e):
    """Map an exception to the render failure reason of the sample."""
    if isinstance(e, RenderFailure):
        return e.reason
    if isinstance(e, ImageEmpty):
        return 'RasterError'
    return 'CompileError'


def _elements(source, side, cfg, timings, deadline):
    """Run tokenize, color, render and localize for one side."""
    with _timed(timings, 'tokenize'):
        seq = tokenize(source, cfg.table)
        src = assign_colors(seq)
    deadline.check()
    with _timed(timings, 'render_' + side):
        image = render(src, cfg.render)
    deadline.check()
    with _timed(timings, 'localize'):
        elements = localize(image, src, cfg.tolerance, cfg.min_pixels)
    return src, image, elements


def baseline_scores(gt, pred, cfg):
    """Compute the enabled text metrics of the pair."""
    gt_tokens = tokenize_lenient(gt, cfg.table)
    pred_tokens = tokenize_lenient(pred, cfg.table)
    return BaselineScores(
        bleu=bleu(gt_tokens, pred_tokens, cfg.bleu_smoothing) if 'bleu' in cfg.metrics else None,
        edit_distance=(
            edit_distance(gt_tokens, pred_tokens, cfg.edit_level)
            if 'edit_distance' in cfg.metrics else None),
        exact_match=(list(gt_tokens) == list(pred_tokens)) if 'exprate' in cfg.metrics else None)


def _dump(record, sides, match, cfg):
    """Write the debug artifacts of the record."""
    directory = os.path.join(cfg.debug_dir, str(record.id))
    os.makedirs(directory, exist_ok=True)
    for side, (src, image, elements) in sides.items():
        path = os.path.join(directory, side + '.png')
        image.save(path)
        record.artifacts[side + '_image'] = path
        path = os.path.join(directory, side + '_elements.json')
        dump_elements(elements, path)
        record.artifacts[side + '_elements'] = path
    if match is not None and len(sides) == 2:
        path = os.path.join(directory, 'overlay.png')
        debug.write_overlay(sides['gt'][1], sides['pred'][1], match, path)
        record.artifacts['overlay'] = path


def _score(gt, pred, cfg, record):
    """Compute the CDM score of the record."""
    timings = record.timings
    deadline = _Deadline(cfg.render.timeout * 2 + 5)
    sides = {}
    match = None
    side = 'gt'
    try:
        sides['gt'] = _elements(gt, 'gt', cfg, timings, deadline)
        side = 'pred'
        sides['pred'] = _elements(pred, 'pred', cfg, timings, deadline)
        deadline.check()
        with _timed(timings, 'match'):
            match = assign(sides['gt'][2], sides['pred'][2], cfg.weights, cfg.table)
        with _timed(timings, 'validate'):
            match = validate(match, cfg.ransac, cfg.table)
        score = cdm_score(match)
    except (UnbalancedBraces, PaletteExhausted, RenderFailure, ImageEmpty) as e:
        reason = _failure_reason(e)
        if side == 'gt':
            _log.warning('ground truth of %s cannot be rendered (%s): %s', record.id, reason, e)
        else:
            _log.debug('prediction of %s cannot be rendered (%s): %s', record.id, reason, e)
        partial = MatchSet(unmatched_gt=list(sides['gt'][2]) if 'gt' in sides else [])
        score = cdm_score(partial, render_ok=False, failure=reason, failed_side=side)
    if cfg.debug_dir and sides:
        _dump(record, sides, match, cfg)
    return score


def evaluate_pair(gt, pred, cfg=None, id=None, subset=None):
    """Evaluate one formula pair.

    Failures to process a formula are recorded in the result, only
    configuration problems raise an exception."""
    if cfg is None:
        cfg = EvalConfig()
    record = EvalRecord(id=id, gt=gt, pred=pred, subset=subset)
    with _timed(record.timings, 'baselines'):
        record.baselines = baseline_scores(gt, pred, cfg)
    if 'cdm' in cfg.metrics:
        record.cdm = _score(gt, pred, cfg, record)
    return record


def _sample(sample):
    if isinstance(sample, dict):
        try:
            return Sample(sample['id'], sample['gt'], sample['pred'], sample.get('subset'))
        except KeyError as e:
            raise InputError('Sample without %s field.' % e)
    return Sample(*sample)


def evaluate_batch(samples, cfg=None):
    """Evaluate a list of (id, gt, pred[, subset]) samples in parallel.

    Returns the records in input order and the summary."""
    if cfg is None:
        cfg = EvalConfig()
    samples = [_sample(sample) for sample in samples]
    if not samples:
        raise EmptyInput()
    seen = set()
    for sample in samples:
        if sample.id in seen:
            raise DuplicateId('Duplicate sample id %r.' % sample.id)
        seen.add(sample.id)
    # load the table before starting the workers
    cfg.table
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        records = list(executor.map(
            lambda s: evaluate_pair(s.gt, s.pred, cfg, id=s.id, subset=s.subset),
            samples))
    return records, summarize(records)
