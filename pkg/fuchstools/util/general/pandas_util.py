import pandas as pd

# Shortest float text that round-trips a double; keeps CSV output
# byte-identical for identical inputs.
CSV_FLOAT_FORMAT = "%.17g"


def convert_cols(
    df: pd.DataFrame,
    strcols=None,
    intcols=None,
    floatcols=None,
    boolcols=None,
    skipcols=None,
) -> pd.DataFrame:
    """Converts specified columns in a DataFrame to appropriate data types.

    Columns that are not specified are assumed to be floats.

    Args:
        df (pd.DataFrame): The input DataFrame to be worked on
        strcols (list, optional): Columns to be converted to strings
        intcols (list, optional): Columns to be converted to integers
        floatcols (list, optional): Columns to be converted to floats. If
            None, all columns not named elsewhere are floats.
        boolcols (list, optional): Columns to be converted to boolean values
        skipcols (list, optional): Columns excluded from automatic float
            detection when floatcols=None.

    Returns:
        pd.DataFrame: The modified DataFrame with converted column types

    Notes:
        - Columns in `floatcols` are coerced into numeric values, replacing
            invalid entries with NaN
        - Columns in `boolcols` are converted to False if in the list of values
             (`"N"`, `"False"`, `False`, `"false"`, `"0"`, `0`)
    """
    if strcols is None:
        strcols = []
    if intcols is None:
        intcols = []
    if boolcols is None:
        boolcols = []
    if skipcols is None:
        skipcols = []
    if floatcols is None:
        floatcols = [
            x
            for x in df.columns
            if (x not in (intcols + strcols + boolcols + skipcols))
        ]
    for c in floatcols:
        df[c] = pd.to_numeric(df[c], errors="coerce")
    for c in intcols:
        df[c] = pd.to_numeric(df[c], errors="raise").astype(int)
    for c in strcols:
        df[c] = df[c].astype(str)
    for c in boolcols:
        df[c] = df[c].apply(
            lambda x: False if x in ["N", "False", False, "false", "0", 0] else True
        )
    return df


def write_report_csv(df: pd.DataFrame, filename: str) -> str:
    """Writes a report frame without the index and with a fixed float format."""
    df.to_csv(filename, index=False, float_format=CSV_FLOAT_FORMAT)
    return filename


def read_report_csv(filename: str, intcols=None, boolcols=None) -> pd.DataFrame:
    """Reads a CSV written by `write_report_csv`. Columns starting with
    `satisfies_` are booleans and `k` is an integer unless told otherwise."""
    df = pd.read_csv(filename)
    if intcols is None:
        intcols = [c for c in ("k", "bin_index", "word_length") if c in df.columns]
    if boolcols is None:
        boolcols = [c for c in df.columns if c.startswith("satisfies_")]
    return convert_cols(df, intcols=intcols, boolcols=boolcols)
