#!/usr/bin/env python3

# command line entry point

import sys

from moment_adapter.cli import main

if __name__ == '__main__':
    sys.exit(main(sys.argv[1:]))
