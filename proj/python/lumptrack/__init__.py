"""Lumped-error robotic tool tracking: SE(3) kinematics, cylinder silhouette
projection, and the particle filter, exposed from the C++ core."""

from lumptrack._lumptrack import *  # noqa: F401,F403
from lumptrack._lumptrack import __doc__ as _core_doc  # noqa: F401
