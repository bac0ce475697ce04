"""Figure generation for qcpop benchmark output.

Reads only the documented samples.csv column contract; no physics is
recomputed here.
"""

__version__ = "0.1.0"

from .figures import KINDS, FigureSpec, MissingColumnsError, render
