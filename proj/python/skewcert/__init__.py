"""Box-chain models and Axiom A certificates for quadratic skew products."""

from ._skewcert import *  # noqa: F401,F403
from ._skewcert import __doc__  # noqa: F401
