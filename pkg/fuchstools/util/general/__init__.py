from .general_util import *
from .datetime_util import *
from .pandas_util import *
