from .qcqp import *
from .qp import *
from .sqp import *
