# SPDX-License-Identifier: Apache-2.0
"""mmWave hybrid beamforming: hierarchical multi-beam search and low-complexity
hybrid precoding, backed by the C++ core."""

try:
    from ._mmbeam import *  # noqa: F401,F403
    from ._mmbeam import __version__  # noqa: F401
except ImportError:  # core built out-of-package (plain CMake build)
    from _mmbeam import *  # noqa: F401,F403
    from _mmbeam import __version__  # noqa: F401
