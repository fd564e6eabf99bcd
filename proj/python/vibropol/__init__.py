"""Lindblad dynamics and heterodyne spectra of cavity-coupled molecular
vibrations under two-state solvent disorder."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
