import pandas                                                           as _pd
import math

class DataFrameUtils():

    def __init__(self):
        '''
        Helpers for loading and saving the CSV artifacts of a run, and for telling missing values apart in
        DataFrames read back from them
        '''
        pass

    # Fixed float rendering so that two identical runs produce byte-identical CSV artifacts
    FLOAT_FORMAT                                = "%.10g"

    def is_nan(self, val):
        '''
        Returns a boolean. True if `val` is a float that is nan, and False otherwise.
        '''
        if isinstance(val, float) and math.isnan(val):
            return True
        elif type(val)==type(_pd.NaT):
            return True
        else:
            return False

    def _drop_spurious_columns(self, input_df):
        '''
        Creates and returns a DataFrame obtained from `input_df` by dropping columns that Pandas creates
        at various times, such as the "Unnamed: 0" column of a CSV written with its index, and by removing a
        byte-order mark that some editors prefix to the first column name.
        '''
        SPURIOUS_COLUMNS                    = ["Unnamed: 0", "Unnamed: 0.1", "\ufeff"]
        columns_to_drop                     = [col for col in SPURIOUS_COLUMNS if col in input_df.columns]

        result_df                           = input_df.drop(columns=columns_to_drop)

        cleaned_columns                     = []
        for col in result_df.columns:
            if type(col) == str:
                col                         = col.lstrip("\ufeff").strip()
            cleaned_columns.append(col)

        result_df.columns                   = cleaned_columns

        return result_df

    def load_csv(self, path):
        '''
        Creates and returns a DataFrame by loading an CSV file, removing any spurious columns if needed.
        '''
        df0                                 = _pd.read_csv(path, encoding='utf-8')
        df1                                 = self._drop_spurious_columns(df0)
        return df1

    def save_csv(self, df, path):
        '''
        Writes ``df`` without its index, with a fixed float format and Unix line endings.
        '''
        df.to_csv(path, index=False, float_format=DataFrameUtils.FLOAT_FORMAT, lineterminator="\n")

