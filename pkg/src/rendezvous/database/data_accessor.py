from pathlib                                                        import Path
import os                                                           as _os
import pandas                                                       as _pd

from rendezvous.util.dataframe_utils                                import DataFrameUtils
from rendezvous.util.errors                                         import ArtifactError

class DataAccessor():

    '''
    Context manager to provide safe functionality to load and persist the tabular artifacts of the rendezvous
    engine: trajectory tables, loss audits, plot data and recorded leader tracks.

    All tables are CSV files. Persisting goes through :meth:`DataFrameUtils.save_csv` so that floats are rendered
    identically across runs.

    :param str url: path to the CSV file, with or without its ``.csv`` suffix
    '''
    def __init__(self, url):

        self.url                            = str(url)
        self.ACTION                         = None # Must be populated by specific methods; used to provide context in error messages

    def __enter__(self):
        '''
        Returns self after initializing internal state
        '''
        return self

    def __exit__(self, exc_type, exc_value, exc_tb):
        '''
        Frees resources, translating permission problems into a user-facing error.
        '''
        if isinstance(exc_value, PermissionError):
            raise ArtifactError("Please close file(s) under " + self.url + " so system can " + str(self.ACTION)
                                + " it. Thanks.") from exc_value
        return False

    def retrieve(self, fail_if_not_found=False, required_columns=None):
        '''
        Creates and returns a DataFrame by loading a CSV file, removing any spurious columns if needed.

        :param bool fail_if_not_found: when True then method raises an :class:`ArtifactError` if the dataset is not
            found. Else method returns ``None`` when dataset is not found.
        :param list required_columns: optional list of column names that must be present
        '''
        self.ACTION                         = "retrieve"

        DFU                                 = DataFrameUtils()
        csv_path                            = self._url_to_csv(self.url)
        if not Path(csv_path).exists():
            if fail_if_not_found:
                raise ArtifactError("Dataset '" + str(csv_path) + "' does not exist")
            else:
                return None

        try:
            result_df                       = DFU.load_csv(csv_path)
        except Exception as ex:
            raise ArtifactError(f"Unable to retrieve {csv_path} because of this error: '{ex}'") from ex

        if not required_columns is None:
            missing                         = [col for col in required_columns if not col in result_df.columns]
            if len(missing) > 0:
                raise ArtifactError("Dataset '" + str(csv_path) + "' is missing columns '" + "', '".join(missing) + "'")

        return result_df

    def _url_to_csv(self, some_url):
        '''
        Given a filename for a dataset, it returns the CSV-equivalent filename.

        For example, if ``some_url`` is ``C:/foo/bar/dataset`` or ``C:/foo/bar/dataset.csv``,
        this method returns ``C:/foo/bar/dataset.csv``.
        '''
        if some_url.endswith(".csv"):
            result                          = some_url
        else:
            result                          = some_url + ".csv"
        return result

    def persist(self, data_df: _pd.DataFrame):
        '''
        Writes ``data_df`` as CSV at this accessor's url, creating parent folders as needed.
        '''
        self.ACTION                         = "persist"
        csv_path                            = self._url_to_csv(self.url)
        folder                              = _os.path.dirname(csv_path)
        if len(folder) > 0:
            Path(folder).mkdir(parents=True, exist_ok=True)
        DataFrameUtils().save_csv(data_df, csv_path)
