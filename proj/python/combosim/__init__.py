"""Discrete-event simulator and analysis toolkit for a combined
spatio-temporal optical random number generator.

The heavy lifting lives in the `_combosim` extension; this package
re-exports its surface. Durations cross the boundary in picoseconds unless
an argument name says otherwise (the `simulate` wrapper takes nanoseconds
for the hardware-scale knobs).
"""

try:
    from ._combosim import *  # noqa: F401,F403
    from ._combosim import __version__  # noqa: F401
except ImportError:  # in-tree test runs put the extension on sys.path
    from _combosim import *  # noqa: F401,F403
    from _combosim import __version__  # noqa: F401
