#!/usr/bin/env python3

# pytest setup: repository root on the import path, slow marker

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


def pytest_configure(config):
    config.addinivalue_line('markers', 'slow: full-size runs (q up to 221, Voronoi tables)')
