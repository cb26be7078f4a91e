__version__ = "0.1.0"

from . import fuchs_accessor
from . import util
