from .workflows import *
from .episode import *
from .pushes import *
from .timing import *
