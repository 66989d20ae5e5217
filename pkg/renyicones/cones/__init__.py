from .cone_base import *
from .cone_nonneg import *
from .cone_psd import *
from .cone_renyi import *
from .cone_perspective import *
