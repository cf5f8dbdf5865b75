from .logs import *
