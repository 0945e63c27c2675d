# doc.py - document level evaluation of displayed formulas
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

"""Document level evaluation of displayed formulas.

The ground truth formulas are extracted from the LaTeX source of a
document, the predicted formulas from the text a model produced for the
rendered document. Both lists are paired in two rounds by normalized edit
distance after which every pair is scored as a formula pair.

The LaTeX source is first stripped of comments and preamble and the
aliases the author defined are expanded:

>>> doc = '''\\\\documentclass{article}
... \\\\newcommand{\\\\R}{\\\\mathbb{R}}
... \\\\begin{document}
... Let % the domain
... \\\\begin{equation}x \\\\in \\\\R \\\\label{eq:x}\\\\end{equation}
... \\\\end{document}'''
>>> [f.body for f in prepare_gt(doc)]
['x \\\\in \\\\mathbb{R}']

Model output is read in one of the dialects:

>>> out = 'Let $$x \\\\in \\\\mathbb{R}$$ and $$y$$'
>>> [f.body for f in extract_displayed(out, Dialect.MarkdownOutput)]
['x \\\\in \\\\mathbb{R}', 'y']

Pairing keeps the ground truth order, predictions that cannot be paired
are appended at the end:

>>> gt = read_formula_lines('a+b=c\\nx^{2}')
>>> pred = read_formula_lines('a+b=c\\n\\\\alpha\\\\beta\\\\gamma')
>>> [(p.gt and p.gt.body, p.pred and p.pred.body) for p in match_two_round(gt, pred)]
[('a+b=c', 'a+b=c'), ('x^{2}', None), (None, '\\\\alpha\\\\beta\\\\gamma')]
"""

import collections
import concurrent.futures
import dataclasses
import enum
import logging
import re

from cdm.config import EvalConfig
from cdm.exceptions import *
from cdm.latex import tokenize
from cdm.metrics import CdmScore, levenshtein
from cdm.pipeline import EvalRecord, baseline_scores, evaluate_pair, summarize


_log = logging.getLogger(__name__)


class Dialect(enum.Enum):
    """The way displayed formulas are delimited in a document."""

    LatexSource = 'latex'
    MarkdownOutput = 'markdown'
    BracketOutput = 'bracket'


@dataclasses.dataclass(frozen=True)
class DocFormula():
    """A displayed formula of a document."""

    doc_id: str
    line_no: int
    body: str
    raw: str = ''

    @property
    def latex(self):
        """The body in a form that can be typeset inside $...$."""
        if ('&' in self.body or '\\\\' in self.body) and not self.body.startswith('\\begin'):
            return '\\begin{aligned}%s\\end{aligned}' % self.body
        return self.body


@dataclasses.dataclass(frozen=True)
class MatchThresholds():
    """Maximum normalized edit distances of the two matching rounds."""

    round1: float = 0.4
    round2: float = 0.8

    def __post_init__(self):
        if not 0 < self.round1 <= self.round2 <= 1:
            raise ConfigError('Matching thresholds must satisfy 0 < round1 <= round2 <= 1.')


DocPair = collections.namedtuple('DocPair', 'gt pred distance round')


# comments: an unescaped % up to the end of the line
_COMMENT = re.compile(r'((?:^|[^\\])(?:\\\\)*?)[ \t]*%.*$', re.M)
_IFFALSE = re.compile(r'\\iffalse(?![A-Za-z]).*?\\fi(?![A-Za-z])', re.S)
_COMMENT_ENVIRONMENT = re.compile(r'\\begin\{comment\}.*?\\end\{comment\}', re.S)
_BEGIN_DOCUMENT = re.compile(r'\\begin\{document\}')

_DEFINITION = re.compile(
    r'\\(newcommand|renewcommand|providecommand|DeclareRobustCommand|DeclareMathOperator|def)'
    r'(?![A-Za-z])(\*?)')
_COMMAND_NAME = re.compile(r'\s*(?:\{\s*(\\(?:[A-Za-z]+|.))\s*\}|(\\(?:[A-Za-z]+|.)))')
_DEF_NAME = re.compile(r'\s*(\\(?:[A-Za-z]+|.))((?:#\d)*)\s*(?=\{)')
_OPTIONAL = re.compile(r'\s*\[([^\]]*)\]')

# aliases that expand to further aliases are expanded this many times
EXPANSION_ROUNDS = 3

_Macro = collections.namedtuple('_Macro', 'name nargs default body')

_ENVIRONMENTS = (
    'equation', 'align', 'alignat', 'flalign', 'gather', 'multline',
    'displaymath', 'eqnarray')

_ENVIRONMENT = (
    r'\\begin\{(?P<env>%s)(?P<star>\*?)\}(?:\{\d+\})?(?P<env_body>.*?)'
    r'\\end\{(?P=env)(?P=star)\}' % '|'.join(_ENVIRONMENTS))
_BRACKETS = r'(?<!\\)\\\[(?P<bracket_body>.*?)(?<!\\)\\\]'
_DOLLARS = r'(?<![\\$])\$\$(?P<dollar_body>.*?)(?<!\\)\$\$'

_DISPLAYS = {
    Dialect.LatexSource: re.compile('|'.join((_ENVIRONMENT, _BRACKETS, _DOLLARS)), re.S),
    Dialect.MarkdownOutput: re.compile('|'.join((_ENVIRONMENT, _DOLLARS)), re.S),
    Dialect.BracketOutput: re.compile('|'.join((_ENVIRONMENT, _BRACKETS)), re.S),
}

_LABEL = re.compile(r'\\(?:label|tag\*?)\s*\{[^{}]*\}|\\(?:nonumber|notag)(?![A-Za-z])')
_WHITESPACE = re.compile(r'\s+')


def strip_comments(doc):
    """Remove % comments, \\iffalse blocks and comment environments.

    >>> print(strip_comments('a \\\\% b % comment'))
    a \\% b
    """
    # a commented out \fi does not end an \iffalse block
    doc = _COMMENT.sub(r'\1', doc)
    doc = _IFFALSE.sub('', doc)
    return _COMMENT_ENVIRONMENT.sub('', doc)


def _read_group(text, pos):
    """Read the balanced {...} group at pos, returns content and end."""
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text) or text[pos] != '{':
        return None
    depth = 0
    i = pos
    while i < len(text):
        if text[i] == '\\':
            i += 2
            continue
        if text[i] == '{':
            depth += 1
        elif text[i] == '}':
            depth -= 1
            if depth == 0:
                return text[pos + 1:i], i + 1
        i += 1
    return None


def _read_argument(text, pos):
    """Read a macro argument: a group, a command or a single character."""
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos >= len(text) or text[pos] == '}':
        return None
    if text[pos] == '{':
        return _read_group(text, pos)
    if text[pos] == '\\':
        m = re.compile(r'\\(?:[A-Za-z]+|.)', re.S).match(text, pos)
        return m.group(), m.end()
    return text[pos], pos + 1


def _read_definition(text, m):
    """Parse the alias definition that starts with match m."""
    kind, star = m.groups()
    if kind == 'def':
        name = _DEF_NAME.match(text, m.end())
        if not name:
            return None
        body = _read_group(text, name.end())
        if body is None:
            return None
        return _Macro(name.group(1), len(name.group(2)) // 2, None, body[0]), body[1]
    name = _COMMAND_NAME.match(text, m.end())
    if not name:
        return None
    command = name.group(1) or name.group(2)
    pos = name.end()
    if kind == 'DeclareMathOperator':
        body = _read_group(text, pos)
        if body is None:
            return None
        return _Macro(command, 0, None, '\\operatorname%s{%s}' % (star, body[0])), body[1]
    nargs = 0
    default = None
    optional = _OPTIONAL.match(text, pos)
    if optional:
        if not optional.group(1).strip().isdigit():
            return None
        nargs = int(optional.group(1))
        pos = optional.end()
        optional = _OPTIONAL.match(text, pos)
        if optional:
            default = optional.group(1)
            pos = optional.end()
    body = _read_group(text, pos)
    if body is None:
        return None
    return _Macro(command, nargs, default, body[0]), body[1]


def _collect_definitions(doc):
    """Remove the alias definitions from the document.

    Returns the remaining text and the aliases by name."""
    macros = {}
    result = []
    pos = 0
    for m in _DEFINITION.finditer(doc):
        if m.start() < pos:
            continue
        definition = _read_definition(doc, m)
        if definition is None:
            _log.info('cannot parse definition: %s', doc[m.start():m.start() + 60].split('\n')[0])
            continue
        macro, end = definition
        if macro.name in ('\\begin', '\\end'):
            continue
        macros[macro.name] = macro
        result.append(doc[pos:m.start()])
        pos = end
    result.append(doc[pos:])
    return ''.join(result), macros


def _substitute(body, args):
    def replace(m):
        index = int(m.group(1))
        if 0 < index <= len(args):
            return args[index - 1]
        return m.group()
    return re.sub(r'#(\d)', replace, body)


def _expand_once(text, macros, pattern):
    result = []
    pos = 0
    while True:
        m = pattern.search(text, pos)
        if not m:
            break
        macro = macros[m.group()]
        args = []
        end = m.end()
        if macro.nargs and macro.default is not None:
            optional = _OPTIONAL.match(text, end)
            if optional:
                args.append(optional.group(1))
                end = optional.end()
            else:
                args.append(macro.default)
        while len(args) < macro.nargs:
            arg = _read_argument(text, end)
            if arg is None:
                break
            args.append(arg[0])
            end = arg[1]
        if len(args) < macro.nargs:
            result.append(text[pos:m.end()])
            pos = m.end()
            continue
        result.append(text[pos:m.start()])
        result.append(_substitute(macro.body, args))
        pos = end
    result.append(text[pos:])
    return ''.join(result)


def expand_aliases(text, macros):
    """Replace uses of the aliases with their definition.

    >>> macros = {'\\\\vv': _Macro('\\\\vv', 1, None, '\\\\mathbf{#1}')}
    >>> print(expand_aliases('\\\\vv{x} + \\\\vv y', macros))
    \\mathbf{x} + \\mathbf{y}
    """
    if not macros:
        return text
    names = sorted(macros, key=len, reverse=True)
    pattern = re.compile('|'.join(
        re.escape(name) + ('(?![A-Za-z])' if name[-1].isalpha() else '')
        for name in names))
    for _i in range(EXPANSION_ROUNDS):
        expanded = _expand_once(text, macros, pattern)
        if expanded == text:
            return text
        text = expanded
    if pattern.search(text):
        _log.info('aliases still present after %d expansions', EXPANSION_ROUNDS)
    return text


def preprocess_source(doc):
    """Prepare a LaTeX document for formula extraction.

    Comments are removed, aliases are expanded and everything before
    \\begin{document} is dropped."""
    doc = strip_comments(doc)
    doc, macros = _collect_definitions(doc)
    m = _BEGIN_DOCUMENT.search(doc)
    if m:
        doc = doc[m.end():]
    return expand_aliases(doc, macros)


def clean_body(body):
    """Remove labels and tags and collapse whitespace."""
    return _WHITESPACE.sub(' ', _LABEL.sub('', body)).strip()


def extract_displayed(doc, dialect=Dialect.LatexSource, doc_id=None):
    """Return the displayed formulas of the document in document order."""
    if not isinstance(dialect, Dialect):
        dialect = Dialect(dialect)
    formulas = []
    for m in _DISPLAYS[dialect].finditer(doc):
        body = clean_body(next(
            value for name, value in m.groupdict().items()
            if name.endswith('_body') and value is not None))
        if body:
            formulas.append(DocFormula(
                doc_id=doc_id, line_no=doc.count('\n', 0, m.start()) + 1,
                body=body, raw=m.group()))
    return formulas


def prepare_gt(source, doc_id=None):
    """Extract the ground truth formulas of a LaTeX document."""
    return extract_displayed(preprocess_source(source), Dialect.LatexSource, doc_id)


def read_formula_lines(text, doc_id=None):
    """Read the one-formula-per-line format."""
    return [
        DocFormula(doc_id=doc_id, line_no=number, body=line.strip(), raw=line)
        for number, line in enumerate(text.splitlines(), 1)
        if line.strip()]


def format_formula_lines(formulas):
    """Write the formulas in the one-formula-per-line format."""
    return ''.join(formula.body + '\n' for formula in formulas)


def distance(a, b):
    """Return the edit distance divided by the longest length.

    >>> distance('abcd', 'abce')
    0.25
    """
    longest = max(len(a), len(b))
    if not longest:
        return 0.0
    return levenshtein(a, b) / longest


def match_two_round(gt, pred, th=None):
    """Pair the ground truth and predicted formulas.

    Every ground truth formula in turn is paired with the closest unpaired
    prediction if the distance is within the first threshold, the
    remaining ones are paired in a second round with the second threshold.
    Returns DocPair tuples: one per ground truth formula in order followed
    by the unpaired predictions."""
    if th is None:
        th = MatchThresholds()
    distances = {}

    def dist(i, j):
        if (i, j) not in distances:
            distances[i, j] = distance(gt[i].body, pred[j].body)
        return distances[i, j]

    matched = {}
    used = set()
    for round_no, threshold in ((1, th.round1), (2, th.round2)):
        for i in range(len(gt)):
            if i in matched:
                continue
            candidates = [j for j in range(len(pred)) if j not in used]
            if not candidates:
                break
            best = min(candidates, key=lambda j: (dist(i, j), j))
            if dist(i, best) <= threshold:
                matched[i] = (best, round_no)
                used.add(best)
    pairs = []
    for i, formula in enumerate(gt):
        if i in matched:
            j, round_no = matched[i]
            pairs.append(DocPair(formula, pred[j], dist(i, j), round_no))
        else:
            pairs.append(DocPair(formula, None, None, None))
    pairs.extend(
        DocPair(None, formula, None, None)
        for j, formula in enumerate(pred) if j not in used)
    return pairs


def _glyphs(body, cfg):
    try:
        return tokenize(body, cfg.table).colorable_count
    except CDMError:
        return 0


def _record(doc_id, index, pair, cfg):
    """Score one entry of the document pairing."""
    record_id = '%s:%d' % (doc_id, index)
    if pair.gt is not None and pair.pred is not None:
        record = evaluate_pair(pair.gt.latex, pair.pred.latex, cfg, id=record_id)
        record.doc_id = doc_id
        return record
    if pair.gt is not None:
        gt, pred, kind = pair.gt.body, '', 'missing'
        score = CdmScore(tp=0, fp=0, fn=_glyphs(gt, cfg), f1=0.0, render_ok=False, failure='Missing')
    else:
        gt, pred, kind = '', pair.pred.body, 'redundant'
        score = CdmScore(tp=0, fp=_glyphs(pred, cfg), fn=0, f1=0.0, render_ok=False, failure='Redundant')
    return EvalRecord(
        id=record_id, gt=gt or None, pred=pred or None,
        cdm=score if 'cdm' in cfg.metrics else None,
        baselines=baseline_scores(gt, pred, cfg), kind=kind, doc_id=doc_id)


def _review(doc_id, pairs):
    """List the unpaired formulas with the closest candidate."""
    redundant = [p.pred for p in pairs if p.gt is None]
    review = []
    for pair in pairs:
        if pair.gt is None or pair.pred is not None:
            continue
        entry = {
            'doc_id': doc_id, 'gt': pair.gt.body, 'gt_line': pair.gt.line_no,
            'pred': None, 'pred_line': None, 'distance': None}
        if redundant:
            closest = min(redundant, key=lambda f: distance(pair.gt.body, f.body))
            entry.update(
                pred=closest.body, pred_line=closest.line_no,
                distance=distance(pair.gt.body, closest.body))
        review.append(entry)
    return review


def _formulas(source, dialect, doc_id):
    if source is None:
        return []
    if isinstance(source, str):
        if dialect == Dialect.LatexSource:
            return prepare_gt(source, doc_id)
        return extract_displayed(source, dialect, doc_id)
    return list(source)


def evaluate_corpus(documents, dialect=Dialect.MarkdownOutput, cfg=None):
    """Evaluate a list of (doc_id, gt, pred) documents.

    The ground truth is either the LaTeX source or a list of DocFormula
    (as read by read_formula_lines()), the prediction the model output in
    the given dialect. A prediction of None counts every ground truth
    formula as missing. Returns the records and the summary."""
    if cfg is None:
        cfg = EvalConfig()
    if not isinstance(dialect, Dialect):
        dialect = Dialect(dialect)
    th = MatchThresholds(cfg.round1, cfg.round2)
    jobs = []
    review = []
    seen = set()
    for doc_id, gt_source, pred_output in documents:
        if doc_id in seen:
            raise DuplicateId('Duplicate document id %r.' % doc_id)
        seen.add(doc_id)
        gt = _formulas(gt_source, Dialect.LatexSource, doc_id)
        pred = _formulas(pred_output, dialect, doc_id)
        pairs = match_two_round(gt, pred, th)
        _log.debug(
            '%s: %d ground truth formulas, %d predicted, %d paired', doc_id, len(gt), len(pred),
            sum(1 for p in pairs if p.gt is not None and p.pred is not None))
        jobs.extend((doc_id, index, pair) for index, pair in enumerate(pairs, 1))
        review.extend(_review(doc_id, pairs))
    # load the table before starting the workers
    cfg.table
    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as executor:
        records = list(executor.map(lambda job: _record(*job, cfg), jobs))
    summary = summarize(records)
    summary.unmatched_review = review
    return records, summary


def evaluate_document(gt_source, pred_output, dialect=Dialect.MarkdownOutput, cfg=None, doc_id='doc'):
    """Evaluate the formulas of a single document."""
    return evaluate_corpus([(doc_id, gt_source, pred_output)], dialect, cfg)
