from .pendulum import *
