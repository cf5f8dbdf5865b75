from .json import *
from .catalog import *
