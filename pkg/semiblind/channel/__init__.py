from .geometry import *
from .model import *
