from .timing import *
from .constellation import *
from .frame import *
