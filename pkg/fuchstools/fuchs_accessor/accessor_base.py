from functools import partial
from typing import Any

import numpy as np
import pandas as pd

from ..util.general import check_not_none, listify


class AccessorBase(object):
    def __init__(self, data):
        self._data = data

    def _make_picker(self, attr_name: str, field: str = None, **kwargs) -> None:
        """Attaches `attr_name` as a row picker on column `field`, so that
        `df.fuchs.k_pick(3)` keeps the rank-3 rows of a sweep."""
        check_not_none([attr_name, field])

        setattr(
            self, attr_name, partial(self.pick, field=field, return_df=True, **kwargs)
        )

        docstring = f"""
        Rows whose '{field}' value is in `val` (one value or a list);
        `invert=True` keeps the others.
        """
        setattr(getattr(self, attr_name), "__doc__", docstring)

    def true_pick(self) -> pd.Series:
        """All-True boolean Series on the index of the data."""
        return pd.Series(data=True, index=self._data.index)

    def pick(
        self,
        val: Any,
        field: str = None,
        invert: bool = False,
        return_df=False,
    ) -> pd.Series:
        """Rows whose `field` value is in `val`."""
        check_not_none([val, field])
        the_pick = self._data[field].isin(listify(val))
        return self.generic_pick(pick=the_pick, invert=invert, return_df=return_df)

    def generic_pick(
        self,
        pick: pd.Series = None,
        invert: bool = False,
        return_df=False,
    ) -> pd.Series:
        if pick is None:
            pick = self.true_pick()

        the_pick = pick.copy()
        if invert:
            the_pick = ~the_pick

        if not return_df:
            return the_pick
        return self._data.loc[the_pick]

    @staticmethod
    def _nonincreasing(values, tol: float = 0.0) -> bool:
        values = np.asarray(values, dtype=float)
        return bool(np.all(np.diff(values) <= tol))

    @property
    def length(self):
        return len(self._data)
