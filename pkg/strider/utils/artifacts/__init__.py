from .savetrajectory import *
from .saveproblem import *
