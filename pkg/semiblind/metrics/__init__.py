from .measures import *
