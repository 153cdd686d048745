"""Wavelet-type random series simulation of generalized Hermite processes."""

from __future__ import annotations

__version__ = "0.1.0"
