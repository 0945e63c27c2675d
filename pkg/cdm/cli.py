# cli.py - command line interface
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

"""Command line interface.

The cdm command has the following sub-commands:

eval      evaluate a JSON Lines file of formula pairs
doc-eval  evaluate the displayed formulas of a set of documents
mine      select the samples of a report that score below a threshold
extract   write the displayed formulas of a LaTeX document, one per line

The exit code is 0 on success, 2 when the configuration is wrong and 3 when
an input file cannot be read.
"""

import argparse
import contextlib
import logging
import os
import sys

from cdm import __version__
from cdm.config import read_config
from cdm.doc import Dialect, evaluate_corpus, format_formula_lines, prepare_gt, read_formula_lines
from cdm.exceptions import *
from cdm.pipeline import evaluate_batch
from cdm.report import load_report, mine, read_samples, write_csv, write_report, write_samples


_log = logging.getLogger(__name__)


# the option overrides that can be given on the command line
_OVERRIDES = (
    ('renderer', 'render_engine'),
    ('cache_dir', 'render_cache_dir'),
    ('jobs', 'pipeline_jobs'),
    ('dump_debug', 'pipeline_debug_dir'),
    ('w_token', 'weights_token'),
    ('w_pos', 'weights_position'),
    ('w_order', 'weights_order'),
    ('round1', 'doc_round1'),
    ('round2', 'doc_round2'),
    ('metrics', 'metrics_enabled'),
)

# extensions of the ground truth files: LaTeX sources or prepared formulas
_GT_EXTENSIONS = ('.tex', '.txt')


def _common_arguments(parser):
    parser.add_argument('--config', metavar='FILE', help='read settings from the INI file')
    parser.add_argument('--renderer', choices=('tex', 'stub'), help='rendering engine')
    parser.add_argument('--jobs', type=int, metavar='N', help='number of parallel workers')
    parser.add_argument('--w-token', type=float, metavar='W', help='weight of the token cost')
    parser.add_argument('--w-pos', type=float, metavar='W', help='weight of the position cost')
    parser.add_argument('--w-order', type=float, metavar='W', help='weight of the order cost')
    parser.add_argument('--metrics', metavar='LIST', help='comma separated metrics to compute')
    parser.add_argument('--dump-debug', metavar='DIR', help='write renders and match overlays')
    parser.add_argument('--cache-dir', metavar='DIR', help='directory of the render cache, off to disable')
    parser.add_argument('-o', '--output', default='-', metavar='FILE', help='write the report to FILE')
    parser.add_argument('--csv', metavar='FILE', help='write the summary as CSV')


def _parser():
    parser = argparse.ArgumentParser(
        prog='cdm', description='Evaluate formula recognition by matching rendered glyphs.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('-v', '--verbose', action='count', default=0, help='log more details')
    parser.add_argument('-q', '--quiet', action='store_true', help='only log errors')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True
    cmd = commands.add_parser('eval', help='evaluate formula pairs')
    cmd.add_argument('input', help='JSON Lines file with id, gt and pred fields')
    _common_arguments(cmd)
    cmd = commands.add_parser('doc-eval', help='evaluate documents')
    cmd.add_argument('gt_dir', help='directory with .tex sources or prepared .txt files')
    cmd.add_argument('pred_dir', help='directory with the model output per document')
    cmd.add_argument(
        '--dialect', default='markdown', choices=[d.value for d in Dialect],
        help='the way the model output delimits formulas')
    cmd.add_argument('--round1', type=float, metavar='T', help='first round matching threshold')
    cmd.add_argument('--round2', type=float, metavar='T', help='second round matching threshold')
    _common_arguments(cmd)
    cmd = commands.add_parser('mine', help='select hard cases from a report')
    cmd.add_argument('report', help='report written by eval')
    cmd.add_argument('--threshold', type=float, default=1.0, help='select samples scoring below this')
    cmd.add_argument('--exclude', metavar='FILE', help='JSON Lines file of samples to skip')
    cmd.add_argument('-o', '--output', default='-', metavar='FILE', help='write the samples to FILE')
    cmd = commands.add_parser('extract', help='extract displayed formulas from a LaTeX document')
    cmd.add_argument('source', help='LaTeX document')
    cmd.add_argument('-o', '--output', default='-', metavar='FILE', help='write the formulas to FILE')
    return parser


@contextlib.contextmanager
def _open_output(filename):
    if filename == '-':
        yield sys.stdout
    else:
        with open(filename, 'w', encoding='utf-8', newline='') as fp:
            yield fp


def _read_text(filename):
    try:
        with open(filename, 'r', encoding='utf-8') as fp:
            return fp.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError('Cannot read %s: %s' % (filename, e))


def _config(args):
    overrides = dict(
        (option, getattr(args, name)) for name, option in _OVERRIDES
        if getattr(args, name, None) is not None)
    return read_config(args.config, **overrides)


def _print_summary(summary):
    for name in ('count', 'mean_cdm', 'exprate_at_cdm', 'mean_bleu', 'mean_edit_distance',
                 'exprate', 'render_success_rate', 'gt_failures'):
        value = getattr(summary, name)
        if value is not None:
            print('%-20s %s' % (name, round(value, 4) if isinstance(value, float) else value),
                  file=sys.stderr)


def _write_results(args, records, summary):
    with _open_output(args.output) as fp:
        write_report(records, summary, fp)
    if args.csv:
        with _open_output(args.csv) as fp:
            write_csv(summary, fp)
    _print_summary(summary)


def cmd_eval(args):
    """Evaluate the formula pairs of a JSON Lines file."""
    cfg = _config(args)
    try:
        with open(args.input, 'r', encoding='utf-8') as fp:
            samples = read_samples(fp)
    except (OSError, UnicodeDecodeError) as e:
        raise InputError('Cannot read %s: %s' % (args.input, e))
    records, summary = evaluate_batch(samples, cfg)
    _write_results(args, records, summary)


def _documents(gt_dir, pred_dir):
    """List the (doc_id, gt, pred) documents of the directories."""
    try:
        gt_files = sorted(
            name for name in os.listdir(gt_dir)
            if os.path.splitext(name)[1] in _GT_EXTENSIONS)
        pred_files = dict(
            (os.path.splitext(name)[0], name) for name in sorted(os.listdir(pred_dir)))
    except OSError as e:
        raise InputError(str(e))
    for name in gt_files:
        doc_id, extension = os.path.splitext(name)
        text = _read_text(os.path.join(gt_dir, name))
        if extension == '.tex':
            gt = prepare_gt(text, doc_id)
        else:
            gt = read_formula_lines(text, doc_id)
        pred = None
        if doc_id in pred_files:
            pred = _read_text(os.path.join(pred_dir, pred_files[doc_id]))
        else:
            _log.warning('no prediction for document %s', doc_id)
        yield doc_id, gt, pred


def cmd_doc_eval(args):
    """Evaluate the displayed formulas of the documents."""
    cfg = _config(args)
    records, summary = evaluate_corpus(
        list(_documents(args.gt_dir, args.pred_dir)), Dialect(args.dialect), cfg)
    _write_results(args, records, summary)


def cmd_mine(args):
    """Write the samples of the report that score below the threshold."""
    try:
        with open(args.report, 'r', encoding='utf-8') as fp:
            records, _summary = load_report(fp)
        exclude = []
        if args.exclude:
            with open(args.exclude, 'r', encoding='utf-8') as fp:
                exclude = [sample.id for sample in read_samples(fp)]
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(str(e))
    samples = mine(records, args.threshold, exclude)
    with _open_output(args.output) as fp:
        write_samples(samples, fp)


def cmd_extract(args):
    """Write the displayed formulas of the LaTeX document."""
    formulas = prepare_gt(_read_text(args.source))
    with _open_output(args.output) as fp:
        fp.write(format_formula_lines(formulas))


_COMMANDS = {
    'eval': cmd_eval,
    'doc-eval': cmd_doc_eval,
    'mine': cmd_mine,
    'extract': cmd_extract,
}


def main(argv=None):
    """Run the command line interface, returns the exit code."""
    args = _parser().parse_args(argv)
    level = logging.ERROR if args.quiet else (
        logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(format='%(levelname)s: %(message)s', level=level)
    try:
        _COMMANDS[args.command](args)
    except ConfigError as e:
        print('cdm: configuration error: %s' % e, file=sys.stderr)
        return 2
    except (InputError, DuplicateId, EmptyInput) as e:
        print('cdm: %s' % e, file=sys.stderr)
        return 3
    return 0
