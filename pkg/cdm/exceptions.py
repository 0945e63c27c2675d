# exceptions.py - collection of cdm exceptions
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

"""Collection of exceptions.

The functions in cdm raise one of the below exceptions when a formula,
an image or an input file cannot be processed. The evaluation pipeline
catches them per sample and records the failure on the sample instead of
aborting a batch.

>>> str(RenderFailure('CompileError'))
'The formula could not be rendered (CompileError).'
>>> RenderFailure('Timeout', 'pdflatex took too long').reason
'Timeout'
>>> str(EmptyInput())
'No input to evaluate.'
"""


__all__ = ['CDMError', 'UnbalancedBraces', 'InvalidEquivTable',
           'PaletteExhausted', 'RenderFailure', 'ImageEmpty',
           'LocalizationAnomaly', 'DegenerateSample', 'EmptyInput',
           'DuplicateId', 'ConfigError', 'InputError', 'MissingArtifacts',
           'InvalidReport']


class CDMError(ValueError):
    """Top-level error for formula evaluation.

    This exception should normally not be raised, only subclasses of this
    exception."""

    def __str__(self):
        """Return the exception message."""
        return ''.join(self.args[:1]) or getattr(self, 'message', '')


class UnbalancedBraces(CDMError):  # noqa N818
    """The brace nesting of the LaTeX source never closes (or closes a
    group that was never opened)."""

    message = 'The formula has unbalanced braces.'


class InvalidEquivTable(CDMError):  # noqa N818
    """The render equivalence table cannot be used.

    This generally means a token is listed in more than one class, which
    would break the partition of the token universe."""

    message = 'The equivalence table is invalid.'


class PaletteExhausted(CDMError):  # noqa N818
    """The formula has more colorable tokens than there are colors."""

    message = 'The formula has more tokens than the palette has colors.'


class RenderFailure(CDMError):  # noqa N818
    """The colorized formula could not be turned into an image.

    The reason attribute is one of CompileError, Timeout or RasterError."""

    reasons = ('CompileError', 'Timeout', 'RasterError')

    def __init__(self, reason='CompileError', detail=''):
        super(RenderFailure, self).__init__(detail)
        self.reason = reason
        self.detail = detail

    def __str__(self):
        """Return the exception message."""
        return self.detail or 'The formula could not be rendered (%s).' % self.reason


class ImageEmpty(CDMError):  # noqa N818
    """The rendered image contains nothing but background."""

    message = 'The rendered image is empty.'


class LocalizationAnomaly(ImageEmpty):  # noqa N818
    """The rendered image is empty although the formula has glyphs."""

    message = 'No colored pixels found for a formula with colorable tokens.'


class DegenerateSample(CDMError):  # noqa N818
    """The sample of matched pairs does not determine a transformation."""

    message = 'The sample does not determine a transformation.'


class EmptyInput(CDMError):  # noqa N818
    """An aggregate was requested over no samples at all."""

    message = 'No input to evaluate.'


class DuplicateId(CDMError):  # noqa N818
    """Two samples in one batch share an identifier."""

    message = 'The sample identifiers are not unique.'


class ConfigError(CDMError):  # noqa N818
    """The configuration file or one of the options is wrong."""

    message = 'The configuration is invalid.'


class InputError(CDMError):  # noqa N818
    """An input file cannot be read or parsed."""

    message = 'The input cannot be read.'


class MissingArtifacts(InputError):  # noqa N818
    """A report lacks the formula texts needed to re-use its samples."""

    message = 'The report does not contain the formula texts.'


class InvalidReport(InputError):  # noqa N818
    """The summary of a report does not agree with its records."""

    message = 'The report summary does not match its records.'
