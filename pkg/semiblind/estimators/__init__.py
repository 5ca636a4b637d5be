from .least_squares import *
from .tracking import *
