# render.py - turn a colorized formula into an RGB raster
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

"""Turn a colorized formula into an RGB raster.

Two engines are available. The tex engine writes a small standalone LaTeX
document, compiles it with an external TeX engine and rasterizes the result
with an external tool (by default pdflatex and pdftoppm). The stub engine
is a deterministic layout engine that draws every glyph as a solid block;
it needs no TeX installation and is used by the test suite.

>>> from cdm.color import assign_colors
>>> from cdm.latex import tokenize
>>> cfg = RenderConfig(engine='stub')
>>> image = render(assign_colors(tokenize('a+b')), cfg)
>>> image.width, image.height
(32, 12)
>>> [tuple(int(c) for c in image.pixels[5, x]) for x in (0, 12, 24)]
[(0, 0, 15), (0, 0, 30), (0, 0, 45)]

Formulas that TeX would refuse to compile are rejected by the stub engine
too:

>>> render(assign_colors(tokenize('\\\\left( x')), cfg)
Traceback (most recent call last):
    ...
RenderFailure: ...
"""

import collections
import dataclasses
import hashlib
import json
import logging
import os
import shlex
import subprocess
import tempfile
import threading

import numpy as np
from PIL import Image

from cdm.exceptions import *
from cdm.latex import (
    ACCENTS, BINOMIALS, FRACTIONS, STACKING_COMMANDS, UNDER_ACCENTS, Group,
    Leaf, Macro, parse, split_sizer)


_log = logging.getLogger(__name__)

DEFAULT_ENGINE_COMMAND = (
    'pdflatex -interaction=nonstopmode -halt-on-error '
    '-output-directory {outdir} {tex}')

DEFAULT_RASTER_COMMAND = (
    'pdftoppm -r {dpi} -png -singlefile -aa {aa} -aaVector {aa} {pdf} {stem}')

_DOCUMENT = r'''\documentclass[varwidth=%(page_width)s,border=2pt]{standalone}
\usepackage{amsmath}
\usepackage{amssymb}
\usepackage{bm}
\usepackage{xcolor}
\def\mathcolor[#1]#2#3{{\color[#1]{#2}#3}}
\begin{document}
$\displaystyle %(latex)s$
\end{document}
'''


@dataclasses.dataclass(frozen=True)
class RenderConfig():
    """Settings for turning formulas into images."""

    engine: str = 'tex'
    engine_command: str = DEFAULT_ENGINE_COMMAND
    raster_command: str = DEFAULT_RASTER_COMMAND
    dpi: int = 300
    timeout: float = 30.0
    page_width: str = '200cm'
    antialias: bool = False
    cache_dir: str = None

    def __post_init__(self):
        if self.engine not in ('tex', 'stub'):
            raise ConfigError('Unknown render engine %r.' % self.engine)
        if self.dpi < 72:
            raise ConfigError('The rendering resolution must be at least 72 dpi.')
        if self.timeout <= 0:
            raise ConfigError('The render timeout must be positive.')


@dataclasses.dataclass(frozen=True, eq=False)
class RasterImage():
    """A rendered page, pixels is a height x width x 3 array of uint8."""

    width: int
    height: int
    pixels: np.ndarray
    dpi: int = 300

    @classmethod
    def from_array(cls, pixels, dpi=300):
        """Wrap an RGB array."""
        pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
        return cls(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels, dpi=dpi)

    @classmethod
    def blank(cls, dpi=300):
        """Return a single white pixel."""
        return cls.from_array(np.full((1, 1, 3), 255, dtype=np.uint8), dpi)

    @classmethod
    def load(cls, filename, dpi=300):
        """Read a PNG (or other image) file."""
        with Image.open(filename) as image:
            return cls.from_array(np.asarray(image.convert('RGB')), dpi)

    def save(self, filename):
        """Write the image as PNG."""
        Image.fromarray(self.pixels).save(filename, format='PNG')

    def __eq__(self, other):
        return (
            isinstance(other, RasterImage) and self.dpi == other.dpi and
            np.array_equal(self.pixels, other.pixels))


def _environment(text):
    """Return the environment name of a \\begin or \\end token."""
    if '{' in text:
        return text.split('{', 2)[1].split('}', 1)[0]
    return None


def check_compilable(seq):
    """Check the conditions that make TeX abort: every \\begin needs a
    matching \\end and every \\left a matching \\right within the same
    group.

    >>> from cdm.latex import tokenize
    >>> check_compilable(tokenize('\\\\left( \\\\begin{matrix} x \\\\end{matrix} \\\\right)'))
    >>> check_compilable(tokenize('z = \\\\left( \\\\begin{array}{cc} x \\\\\\\\ y'))
    Traceback (most recent call last):
        ...
    RenderFailure: ...
    """
    stack = []
    for token in seq.tokens:
        text = token.text
        if text == '{':
            stack.append('{')
        elif text == '}':
            if not stack or stack.pop() != '{':
                raise RenderFailure('CompileError', 'Group closed inside an open construct.')
        elif text.startswith('\\begin'):
            if _environment(text) is None:
                raise RenderFailure('CompileError', 'Missing environment name.')
            stack.append(('begin', _environment(text)))
        elif text.startswith('\\end'):
            if not stack or stack.pop() != ('begin', _environment(text)):
                raise RenderFailure('CompileError', r'Unmatched \end{%s}.' % _environment(text))
        elif text in ('\\left', '\\right', '\\middle'):
            raise RenderFailure('CompileError', 'Missing delimiter after %s.' % text)
        else:
            sizer = split_sizer(text)
            if sizer and sizer[0] == '\\left':
                stack.append('left')
            elif sizer and sizer[0] in ('\\right', '\\middle'):
                if not stack or stack[-1] != 'left':
                    raise RenderFailure('CompileError', r'Unmatched %s.' % sizer[0])
                if sizer[0] == '\\right':
                    stack.pop()
    if stack:
        raise RenderFailure('CompileError', 'Construct never closed.')


# layout constants of the stub engine, in pixels at scale 1
_BLOCK_WIDTH = 8
_BLOCK_HEIGHT = 12
_GAP = 4
_SCRIPT_SHIFT = 6
_SCRIPT_SCALE = 0.6
_MIN_SCALE = 0.36
_RULE = 2
_CLEARANCE = 2
_ROW_GAP = 4

# rects are (x0, y0, x1, y1, color) with exclusive ends, y grows downwards
# and the baseline is at y = 0
_Box = collections.namedtuple('_Box', 'rects width top bottom')


def _px(value, scale):
    return max(1, int(round(value * scale)))


def _box(rects, width):
    top = min([0] + [r[1] for r in rects])
    bottom = max([0] + [r[3] for r in rects])
    return _Box(rects, width, top, bottom)


def _place(box, dx, dy):
    return [(x0 + dx, y0 + dy, x1 + dx, y1 + dy, c) for x0, y0, x1, y1, c in box.rects]


def _script_scale(scale):
    return max(_MIN_SCALE, scale * _SCRIPT_SCALE)


def _block(color, scale):
    width = _px(_BLOCK_WIDTH, scale)
    return _box([(0, -_px(_BLOCK_HEIGHT, scale), width, 0, color)], width)


def _row(boxes, scale):
    """Place boxes left to right."""
    rects = []
    x = 0
    for box in boxes:
        if box.width == 0 and not box.rects:
            continue
        if x > 0:
            x += _px(_GAP, scale)
        rects.extend(_place(box, x, 0))
        x += box.width
    return _box(rects, x)


def _stack(boxes):
    """Place boxes below each other, left aligned."""
    rects = []
    baseline = 0
    width = 0
    for index, box in enumerate(boxes):
        if index:
            baseline += _ROW_GAP - box.top
        rects.extend(_place(box, 0, baseline))
        baseline += box.bottom
        width = max(width, box.width)
    return _box(rects, width)


def _layout_stacked(upper, lower, colors, scale):
    """Layout two groups centered above and below a rule on the math
    axis, returning the box with the y and thickness of the rule."""
    num = _layout_nodes(upper.children, colors, scale)
    den = _layout_nodes(lower.children, colors, scale)
    width = max(num.width, den.width) or _px(_BLOCK_WIDTH, scale)
    axis = -_px(_SCRIPT_SHIFT, scale)
    rule = _px(_RULE, scale)
    rects = _place(num, (width - num.width) // 2, axis - _CLEARANCE - num.bottom)
    rects += _place(den, (width - den.width) // 2, axis + rule + _CLEARANCE - den.top)
    return _box(rects, width), axis, rule


def _layout_macro(node, colors, scale):
    name = node.name.text
    color = colors.get(node.name.order_index)
    if name in FRACTIONS or name in BINOMIALS:
        box, axis, rule = _layout_stacked(node.args[0], node.args[1], colors, scale)
        if name in FRACTIONS:
            return _box(box.rects + [(0, axis, box.width, axis + rule, color)], box.width)
        # parentheses around the stack
        paren = _px(_BLOCK_WIDTH / 2, scale)
        gap = _px(_GAP, scale)
        rects = [(0, box.top, paren, box.bottom, color)]
        rects += _place(box, paren + gap, 0)
        right = paren + gap + box.width + gap
        rects.append((right, box.top, right + paren, box.bottom, color))
        return _box(rects, right + paren)
    if name == '\\sqrt':
        content = _layout_nodes(node.args[0].children, colors, scale)
        rects = []
        x = 0
        if node.opt is not None:
            index = _layout_nodes(node.opt.children, colors, _script_scale(scale))
            rects += _place(index, 0, -_px(_SCRIPT_SHIFT, scale) - index.bottom)
            x = index.width
        radical = _px(_BLOCK_WIDTH, scale)
        gap = _px(_GAP, scale)
        rule = _px(_RULE, scale)
        top = min(content.top, -_px(_BLOCK_HEIGHT, scale)) - _CLEARANCE - rule
        rects.append((x, top, x + radical, content.bottom, color))
        rects.append((x + radical, top, x + radical + gap + content.width, top + rule, color))
        rects += _place(content, x + radical + gap, 0)
        return _box(rects, x + radical + gap + content.width)
    if name in ACCENTS or name in UNDER_ACCENTS:
        content = _layout_nodes(node.args[0].children, colors, scale)
        width = max(content.width, _px(_BLOCK_WIDTH, scale))
        rule = _px(_RULE, scale)
        rects = _place(content, (width - content.width) // 2, 0)
        if name in ACCENTS:
            y = min(content.top, -_px(_BLOCK_HEIGHT, scale)) - _CLEARANCE - rule
        else:
            y = content.bottom + _CLEARANCE
        rects.append((0, y, width, y + rule, color))
        return _box(rects, width)
    if name in STACKING_COMMANDS:
        if name == '\\underset':
            main = _layout_nodes(node.args[1].children, colors, scale)
            other = _layout_nodes(node.args[0].children, colors, _script_scale(scale))
            dy = main.bottom + _CLEARANCE - other.top
        else:
            main = _layout_nodes(node.args[1].children, colors, scale)
            other = _layout_nodes(node.args[0].children, colors, _script_scale(scale))
            dy = main.top - _CLEARANCE - other.bottom
        width = max(main.width, other.width)
        rects = _place(main, (width - main.width) // 2, 0)
        rects += _place(other, (width - other.width) // 2, dy)
        return _box(rects, width)
    # style commands, \not and unknown commands with arguments
    boxes = [_layout_nodes(arg.children, colors, scale) for arg in node.args]
    if color is not None:
        bar = _px(_RULE, scale)
        boxes.insert(0, _box([(0, -_px(_BLOCK_HEIGHT, scale), bar, 0, color)], bar))
    return _row(boxes, scale)


def _layout_script(node, colors, scale):
    if node.base is not None:
        base = _layout_node(node.base, colors, scale)
    else:
        base = _Box([], 0, 0, 0)
    rects = list(base.rects)
    width = 0
    shift = _px(_SCRIPT_SHIFT, scale)
    sup_bottom = None
    if node.sup_mark is not None:
        sup = _layout_nodes(node.sup.children, colors, _script_scale(scale))
        dy = -shift - sup.bottom
        rects += _place(sup, base.width, dy)
        sup_bottom = dy + sup.bottom
        width = sup.width
    if node.sub_mark is not None:
        sub = _layout_nodes(node.sub.children, colors, _script_scale(scale))
        dy = shift
        if sup_bottom is not None:
            dy = max(dy, sup_bottom - sub.top)
        rects += _place(sub, base.width, dy)
        width = max(width, sub.width)
    return _box(rects, base.width + width)


def _layout_node(node, colors, scale):
    if isinstance(node, Leaf):
        color = colors.get(node.atom.order_index)
        if color is not None:
            return _block(color, scale)
        if node.atom.text == '&':
            return _Box([], _px(_GAP, scale), 0, 0)
        return _Box([], 0, 0, 0)
    if isinstance(node, Group):
        return _layout_nodes(node.children, colors, scale)
    if isinstance(node, Macro):
        return _layout_macro(node, colors, scale)
    return _layout_script(node, colors, scale)


def _is_leaf(node, prefix):
    return isinstance(node, Leaf) and node.atom.text.startswith(prefix)


def _layout_nodes(nodes, colors, scale):
    """Layout a list of nodes, stacking rows separated by \\\\ and
    environments."""
    rows = [[]]
    index = 0
    while index < len(nodes):
        node = nodes[index]
        if _is_leaf(node, '\\begin'):
            depth = 0
            end = len(nodes)
            for other in range(index, len(nodes)):
                if _is_leaf(nodes[other], '\\begin'):
                    depth += 1
                elif _is_leaf(nodes[other], '\\end'):
                    depth -= 1
                    if depth == 0:
                        end = other
                        break
            box = _layout_nodes(nodes[index + 1:end], colors, scale)
            # center the environment on the math axis
            dy = -_px(_SCRIPT_SHIFT, scale) - (box.top + box.bottom) // 2
            rows[-1].append(_box(_place(box, 0, dy), box.width))
            index = end + 1
            continue
        if isinstance(node, Leaf) and node.atom.text == '\\\\':
            rows.append([])
        else:
            rows[-1].append(_layout_node(node, colors, scale))
        index += 1
    boxes = [_row(row, scale) for row in rows]
    if len(boxes) == 1:
        return boxes[0]
    return _stack(boxes)


def stub_render(src, cfg=None):
    """Render the colorized formula with the built-in block layout.

    Every glyph is drawn as a solid block of its color: 8x12 pixels at
    4 pixel spacing, scripts at 60% scale raised or lowered 6 pixels and
    fractions stacked around a rule."""
    dpi = cfg.dpi if cfg is not None else 300
    if src.sequence is None or not src.assignment:
        return RasterImage.blank(dpi)
    box = _layout_nodes(parse(src.sequence.tokens), src.colors_by_order(), 1.0)
    if not box.rects:
        return RasterImage.blank(dpi)
    left = min(r[0] for r in box.rects)
    top = min(r[1] for r in box.rects)
    width = max(r[2] for r in box.rects) - left
    height = max(r[3] for r in box.rects) - top
    pixels = np.full((height, width, 3), 255, dtype=np.uint8)
    for x0, y0, x1, y1, color in box.rects:
        pixels[y0 - top:y1 - top, x0 - left:x1 - left] = color
    return RasterImage.from_array(pixels, dpi)


def _run(args, cwd, timeout, reason):
    """Run one toolchain step."""
    try:
        result = subprocess.run(
            args, cwd=cwd, stdout=subprocess.PIPE, stderr=subprocess.STDOUT,
            stdin=subprocess.DEVNULL, timeout=timeout, check=False)
    except FileNotFoundError:
        raise ConfigError('Cannot find the %s executable.' % args[0])
    except subprocess.TimeoutExpired:
        raise RenderFailure('Timeout', '%s did not finish within %s seconds.' % (args[0], timeout))
    if result.returncode != 0:
        output = result.stdout.decode('utf-8', 'replace').strip().splitlines()
        raise RenderFailure(reason, '\n'.join(output[-10:]))


def _command(template, **kwargs):
    return [arg.format(**kwargs) for arg in shlex.split(template)]


def tex_render(src, cfg):
    """Render the colorized formula with the external TeX toolchain."""
    if not src.latex.strip():
        return RasterImage.blank(cfg.dpi)
    with tempfile.TemporaryDirectory(prefix='cdm-') as outdir:
        tex = os.path.join(outdir, 'formula.tex')
        with open(tex, 'w', encoding='utf-8') as fp:
            fp.write(_DOCUMENT % dict(page_width=cfg.page_width, latex=src.latex))
        _run(
            _command(cfg.engine_command, outdir=outdir, tex=tex, dpi=cfg.dpi),
            outdir, cfg.timeout, 'CompileError')
        pdf = os.path.join(outdir, 'formula.pdf')
        if not os.path.exists(pdf):
            raise RenderFailure('CompileError', 'No output was produced.')
        stem = os.path.join(outdir, 'formula')
        _run(
            _command(
                cfg.raster_command, pdf=pdf, stem=stem, dpi=cfg.dpi,
                aa='yes' if cfg.antialias else 'no', outdir=outdir),
            outdir, cfg.timeout, 'RasterError')
        try:
            return RasterImage.load(stem + '.png', cfg.dpi)
        except OSError as e:
            raise RenderFailure('RasterError', str(e))


def cache_key(src, cfg):
    """Return the cache key of the colorized source under the config."""
    digest = hashlib.sha256()
    for part in (
            src.latex, cfg.engine, cfg.engine_command, cfg.raster_command,
            str(cfg.dpi), cfg.page_width, str(cfg.antialias)):
        digest.update(part.encode('utf-8'))
        digest.update(b'\0')
    return digest.hexdigest()


class RenderCache():
    """On-disk cache of rendered formulas.

    Each entry is stored as <dir>/<key[:2]>/<key>.png with a <key>.json
    sidecar that maps colors to tokens. Compile errors are cached as a
    sidecar without image."""

    def __init__(self, directory):
        self.directory = directory
        self._lock = threading.Lock()
        self._locks = collections.defaultdict(threading.Lock)

    def _paths(self, key):
        base = os.path.join(self.directory, key[:2], key)
        return base + '.png', base + '.json'

    def lock(self, key):
        """Return the lock that serializes writers of the key."""
        with self._lock:
            return self._locks[key]

    def get(self, key, dpi=300):
        """Return the cached image, None if the key is unknown. A cached
        compile error is raised as RenderFailure."""
        png, sidecar = self._paths(key)
        try:
            with open(sidecar, 'r', encoding='utf-8') as fp:
                meta = json.load(fp)
        except (OSError, ValueError):
            return None
        if meta.get('failure'):
            raise RenderFailure(meta['failure']['reason'], meta['failure'].get('detail', ''))
        try:
            image = RasterImage.load(png, meta.get('dpi', dpi))
        except OSError:
            return None
        _log.debug('render cache hit %s', key)
        return image

    def _write(self, filename, write):
        os.makedirs(os.path.dirname(filename), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(filename), suffix='.tmp')
        try:
            with os.fdopen(fd, 'wb') as fp:
                write(fp)
            os.replace(tmp, filename)
        except BaseException:
            os.unlink(tmp)
            raise

    def put(self, key, image, assignment=None):
        """Store a rendered image with the color to token map."""
        png, sidecar = self._paths(key)
        meta = {
            'dpi': image.dpi,
            'colors': dict(
                ('%d,%d,%d' % color, list(token))
                for color, token in (assignment or {}).items()),
        }
        with self.lock(key):
            self._write(png, lambda fp: Image.fromarray(image.pixels).save(fp, format='PNG'))
            self._write(sidecar, lambda fp: fp.write(json.dumps(meta, sort_keys=True).encode('utf-8')))

    def put_failure(self, key, failure):
        """Store a render failure."""
        meta = {'failure': {'reason': failure.reason, 'detail': failure.detail}}
        with self.lock(key):
            self._write(self._paths(key)[1], lambda fp: fp.write(json.dumps(meta).encode('utf-8')))


# caches by directory, shared between threads
_caches = {}
_caches_lock = threading.Lock()


def get_cache(directory):
    """Return the cache object for the directory."""
    with _caches_lock:
        if directory not in _caches:
            _caches[directory] = RenderCache(directory)
        return _caches[directory]


def render(src, cfg):
    """Render the colorized formula to a raster.

    Raises RenderFailure with reason CompileError, Timeout or RasterError
    when no image could be produced."""
    if cfg.engine == 'stub':
        if src.sequence is not None:
            check_compilable(src.sequence)
        return stub_render(src, cfg)
    cache = get_cache(cfg.cache_dir) if cfg.cache_dir else None
    key = cache_key(src, cfg)
    if cache is not None:
        image = cache.get(key, cfg.dpi)
        if image is not None:
            return image
    try:
        image = tex_render(src, cfg)
    except RenderFailure as e:
        _log.info('rendering failed (%s): %s', e.reason, e.detail)
        if cache is not None and e.reason == 'CompileError':
            cache.put_failure(key, e)
        raise
    if cache is not None:
        cache.put(key, image, src.assignment)
    return image
