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
This module contains various shared helper functions.
"""

import os
import math


def human_time(seconds):
    """Transform time in seconds to the HH:MM:SS format."""
    (minutes, seconds) = divmod(seconds, 60)
    (hours, minutes) = divmod(minutes, 60)

    result = ""
    if hours:
        result = "%dh " % hours
    if minutes:
        result += "%dm " % minutes

    return result + "%.1fs" % seconds


def format_float(value):
    """
    Return the shortest decimal representation of 'value' which reads back
    as exactly the same double. This is what all the CSV writers use.
    """

    return repr(float(value))


def round_half_away(value):
    """
    Round 'value' to the nearest integer, halves are rounded away from zero
    (Python's 'round()' rounds halves to even).
    """

    if value < 0:
        return -int(math.floor(-value + 0.5))
    return int(math.floor(value + 0.5))


def outlier_count(ratio, count):
    """Number of outliers for outlier ratio 'ratio' among 'count' curves."""
    return round_half_away(ratio * count)


def check_output_path(path):
    """
    Make sure file 'path' can be created or overwritten. Errors are indicated
    by the 'IOError' exception.
    """

    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise IOError("directory '%s' does not exist" % directory)
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise IOError("file '%s' is not writable" % path)
    if not os.path.exists(path) and not os.access(directory, os.W_OK):
        raise IOError("directory '%s' is not writable" % directory)


def sidecar_path(path, suffix):
    """
    Return the path of a sidecar file for output file 'path': the extension
    of 'path' is replaced with 'suffix', e.g. "data.csv" -> "data.meta.json".
    """

    root, _ = os.path.splitext(path)
    return root + suffix
