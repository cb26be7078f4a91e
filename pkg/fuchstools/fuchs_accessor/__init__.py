__all__ = ["series_accessor", "dataframe_accessor"]

from .accessor_base import AccessorBase
from .series_accessor import Fuchs_SeriesUtil
from .dataframe_accessor import Fuchs_DataFrameUtil
