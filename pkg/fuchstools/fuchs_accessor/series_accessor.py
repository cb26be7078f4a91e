import pandas as pd

from pandas.api.extensions import register_series_accessor

from .accessor_base import AccessorBase
from ..util.errors import tv_from_uniform, worst_signed_slack


@register_series_accessor("fuchs")
class Fuchs_SeriesUtil(AccessorBase):
    def __init__(self, data):
        super().__init__(data)

    def normalize(self) -> pd.Series:
        """Scales the series to total 1."""
        total = self._data.sum()
        if total == 0:
            raise ValueError("Cannot normalize a series with zero total")
        return self._data / total

    def tv_from_uniform(self) -> float:
        """Total-variation distance of binned masses from the uniform bins."""
        return tv_from_uniform(self._data.to_numpy())

    def worst_slack(self) -> float:
        return worst_signed_slack(self._data.to_numpy())

    def is_nonincreasing(self, tol: float = 0.0) -> bool:
        """True when each value exceeds its predecessor by at most `tol`."""
        return self._nonincreasing(self._data.to_numpy(), tol)

    def below(self, val: float) -> pd.Series:
        """The sub-Series strictly below `val`."""
        return self._data[self._data < val]
