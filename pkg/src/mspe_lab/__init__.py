"""
mspe-lab: estimation of the conditional mean squared prediction error of
least-squares submodels, selection criteria, finite-sample bounds and the
simulations that exercise them
"""

__version__ = "0.1.0"

from . import errors
from . import models
from . import config
from . import parallel
from . import regression
from . import criteria
from . import oracle
from . import bounds
from . import search
from . import simulation
from . import verification
from . import artifacts

__all__ = [
    '__version__',
    'errors',
    'models',
    'config',
    'parallel',
    'regression',
    'criteria',
    'oracle',
    'bounds',
    'search',
    'simulation',
    'verification',
    'artifacts',
]
