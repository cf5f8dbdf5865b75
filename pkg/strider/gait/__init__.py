from .plan import *
from .references import *
from .swing import *
