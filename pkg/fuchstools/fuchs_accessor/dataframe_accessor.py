import pandas as pd
from typing import Iterable, List, Union

from .accessor_base import AccessorBase
from ..util.errors import max_abs_error
from ..util.general import check_not_none, listify

from pandas.api.extensions import register_dataframe_accessor

OneOrMoreCols = Union[str, Iterable[str]]


@register_dataframe_accessor("fuchs")
class Fuchs_DataFrameUtil(AccessorBase):
    def __init__(self, data):
        super().__init__(data)
        if "k" in data.columns:
            self._make_picker("k_pick", "k")

    # Columns
    @property
    def check_cols(self) -> List[str]:
        """Boolean verdict columns (`satisfies_*`)."""
        return [c for c in self._data.columns if c.startswith("satisfies_")]

    @property
    def displacement_cols(self) -> List[str]:
        return [c for c in self._data.columns if c.startswith("d_") and c[2:].isdigit()]

    # Verdicts
    def passes(self) -> pd.Series:
        """Boolean Series, True where every `satisfies_*` column holds."""
        cols = self.check_cols
        if not cols:
            return self.true_pick()
        return self._data[cols].astype(bool).all(axis=1)

    def violations(self) -> pd.DataFrame:
        """Rows where at least one `satisfies_*` column is False."""
        return self.generic_pick(self.passes(), invert=True, return_df=True)

    def worst(self, col: str = "defect", n: int = 1, largest: bool = False) -> pd.DataFrame:
        """The `n` rows with the smallest (or largest) value in `col`."""
        check_not_none(col)
        if largest:
            return self._data.nlargest(n, col)
        return self._data.nsmallest(n, col)

    def is_nonincreasing(self, col: str, by: str = None, tol: float = 0.0) -> bool:
        """Trend check on `col`, rows ordered by `by` (default: as stored)."""
        data = self._data if by is None else self._data.sort_values(by)
        return self._nonincreasing(data[col].to_numpy(), tol)

    def max_abs_diff(self, col_a: str, col_b: str) -> float:
        return float(max_abs_error(self._data[col_a], self._data[col_b]))

    # Pretty printing
    def tabu(
        self,
        num: int = None,
        clip: int = 50,
        cols: OneOrMoreCols = None,
        quiet: bool = False,
        show: bool = True,
        **kwargs,
    ) -> str:
        """Plain-text table of the report (or of `cols`) through tabulate.

        `num` rows are shown if given, otherwise at most `clip` rows (None for
        all) with a note unless `quiet`. `show=False` only returns the text;
        extra kwargs go to tabulate().
        """
        from tabulate import tabulate

        opts_dict = dict(headers="keys", tablefmt="simple")
        opts_dict.update(kwargs)

        if cols is None:
            data = self._data
        else:
            data = self._data[listify(cols)]

        if (num is None) and (clip is not None):
            length = len(self._data)
            if length > clip:
                n = clip
                if not quiet:
                    print(f"Note: Only showing {n} / {length} rows")
            else:
                n = length
        else:
            n = num

        text = tabulate(data[:n], **opts_dict)
        if show:
            print(text)
        return text
