"""Wavelet-leader multifractal analysis: generators, spectra and oracles."""

from ._mflab import *  # noqa: F401,F403
from ._mflab import __doc__ as _core_doc

__doc__ = _core_doc
