"""Python interface to the wearable rhythm-disruption detection core."""

try:
    from covidrhythm._core import *  # noqa: F401,F403  installed layout
    from covidrhythm._core import __version__  # noqa: F401
except ImportError:  # build-tree layout: _core.so sits directly on sys.path
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
