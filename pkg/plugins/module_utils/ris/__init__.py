# -*- coding: utf-8 -*-
"""Analytical core of a dual-band reconfigurable intelligent surface."""

__version__ = "0.1.0"
