# -*- coding: utf-8 -*-
# vim: ts=4 sw=4 et ai si
#
# License: GPLv2
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU General Public License, version 2,
# as published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful, but
# WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE. See the GNU
# General Public License for more details.

"""
This module renders embeddings as static SVG scatterplot matrices.

A d-dimensional embedding gives a d x d grid of panels. The panel in row 'i'
and column 'j' plots dimension 'j' (horizontal) against dimension 'i'
(vertical), so the panels above the diagonal mirror the ones below it. The
diagonal panels carry the dimension names.

Points are shaded by the quantile of their outlier score: the least outlying
point is light, the most outlying one is dark red. Without scores all points
get the same shade. Labeled outliers are drawn as triangles, everything else
as circles.

The output is plain text with fixed number formatting, so the same input
always produces the same bytes.
"""

import logging
from xml.sax.saxutils import escape
from scipy import stats

_log = logging.getLogger(__name__)  # pylint: disable=C0103

# Panel geometry in SVG user units
PANEL_SIZE = 120
PANEL_GAP = 8
PANEL_PAD = 6
POINT_RADIUS = 2.2

# Shade of all the points when there are no scores
UNIFORM_SHADE = "#4a6fa5"


class Error(Exception):
    """
    A class for exceptions generated by this module. We currently support only
    one type of exceptions, and we basically throw human-readable problem
    description in case of errors.
    """
    pass


def _shades(scores, count):
    """Return the fill color of every point."""

    if scores is None:
        return [UNIFORM_SHADE] * count

    quantiles = (stats.rankdata(scores, method="average") - 1) / \
                max(count - 1, 1)
    shades = []
    for quantile in quantiles:
        # From light yellow (255, 237, 160) to dark red (189, 0, 38)
        red = int(round(255 - 66 * quantile))
        green = int(round(237 - 237 * quantile))
        blue = int(round(160 - 122 * quantile))
        shades.append("#%02x%02x%02x" % (red, green, blue))
    return shades


def _scale(values):
    """Map 'values' to [PANEL_PAD, PANEL_SIZE - PANEL_PAD]."""

    low = values.min()
    span = values.max() - low
    inner = PANEL_SIZE - 2 * PANEL_PAD
    if span == 0:
        return [PANEL_SIZE / 2.0] * len(values)
    return [PANEL_PAD + inner * (value - low) / span for value in values]


def _marker(x, y, fill, outlier):
    """Return the SVG element of one point."""

    if outlier:
        size = POINT_RADIUS * 1.6
        return ('<polygon class="outlier" points="%.2f,%.2f %.2f,%.2f '
                '%.2f,%.2f" fill="%s"/>'
                % (x, y - size, x - size, y + size, x + size, y + size,
                   fill))
    return ('<circle class="inlier" cx="%.2f" cy="%.2f" r="%.1f" fill="%s"/>'
            % (x, y, POINT_RADIUS, fill))


def render_svg(embedding, scores=None, labels=None, title=None):
    """
    Return the SVG scatterplot matrix of 'Embed.Embedding' object
    'embedding' as a string. The optional 'scores' ('Lof.ScoreVector') shade
    the points, the optional 'labels' ('Functional.LabelVector') select the
    point shapes.
    """

    n = embedding.n
    d1 = embedding.d1

    if scores is not None and len(scores) != n:
        raise Error("%d scores for an embedding of %d observations"
                    % (len(scores), n))
    if labels is not None and len(labels) != n:
        raise Error("%d labels for an embedding of %d observations"
                    % (len(labels), n))

    fills = _shades(None if scores is None else scores.scores, n)
    outliers = [False] * n if labels is None else list(labels.flags)
    scaled = [_scale(embedding.coords[:, dim]) for dim in range(d1)]

    size = d1 * PANEL_SIZE + (d1 + 1) * PANEL_GAP
    lines = ['<?xml version="1.0" encoding="UTF-8"?>',
             '<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
             'height="%d" viewBox="0 0 %d %d">' % (size, size, size, size)]
    if title:
        lines.append("<title>%s</title>" % escape(title))
    lines.append('<rect width="100%" height="100%" fill="white"/>')

    for row in range(d1):
        for col in range(d1):
            left = PANEL_GAP + col * (PANEL_SIZE + PANEL_GAP)
            top = PANEL_GAP + row * (PANEL_SIZE + PANEL_GAP)
            lines.append('<g class="panel" data-row="%d" data-col="%d" '
                         'transform="translate(%d,%d)">'
                         % (row + 1, col + 1, left, top))
            lines.append('<rect width="%d" height="%d" fill="none" '
                         'stroke="#999999"/>' % (PANEL_SIZE, PANEL_SIZE))

            if row == col:
                lines.append('<text x="%d" y="%d" text-anchor="middle" '
                             'font-family="sans-serif" font-size="14">'
                             'y%d</text>'
                             % (PANEL_SIZE // 2, PANEL_SIZE // 2 + 5,
                                row + 1))
            else:
                # The SVG vertical axis points down
                for idx in range(n):
                    lines.append(_marker(scaled[col][idx],
                                         PANEL_SIZE - scaled[row][idx],
                                         fills[idx], outliers[idx]))
            lines.append("</g>")

    lines.append("</svg>")

    _log.debug("rendered a %d x %d scatterplot matrix of %d points"
               % (d1, d1, n))
    return "\n".join(lines) + "\n"


def write_svg(embedding, file_obj, scores=None, labels=None, title=None):
    """Render the scatterplot matrix and write it to 'file_obj'."""
    file_obj.write(render_svg(embedding, scores, labels, title))
