from .weights import *
from .layout import *
from .objective import *
from .constraints import *
from .problem import *
