# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Logging, manifests, process pools and plots for the entry scripts."""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function
