"""pinchlab: pinching thresholds and fiberwise harmonic identities.

Subpackages by topic:

* ``multilinear`` -- exterior/symmetric algebra, curvature models, the
  centered-curvature split and its sharp bound;
* ``harmonics``   -- polynomial spherical harmonics, exact sphere quadrature,
  vertical calculus, constrained subspaces;
* ``pestov``      -- the exact fiberwise energy identities and the
  Cauchy-Schwarz chain;
* ``thresholds``  -- closed-form constants and pinching thresholds;
* ``classify``    -- Radon-Hurwitz numbers, structure menus, verdicts;
* ``sharpness``   -- Monte-Carlo search for the optimal coupling constant;
* ``cli``         -- the ``pinchlab`` command-line tool.
"""

__version__ = "0.1.0"

from . import classify, harmonics, multilinear, pestov, sharpness, thresholds  # noqa: E402,F401
