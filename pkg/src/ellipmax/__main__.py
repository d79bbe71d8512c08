"""Module entry point: python -m ellipmax."""
import sys

from .cli import main

sys.exit(main())
