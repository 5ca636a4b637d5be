from .config import *
from .app import *
from .stages import *
from .ledger import *
from .campaign import *
from .bench import *
