import os

from superoptimizer import debug

__version__ = "1.0.0"
