import abc
import pandas                                                      as _pd

from rendezvous.util.errors                                         import ArtifactError

class Field(abc.ABC):

    '''
    One column of a tabular artifact.

    :param str name: column name as written in the CSV header
    :param str field_type: one of :attr:`TYPES`
    '''
    def __init__(self, name: str, field_type: str):
        if not field_type in Field.TYPES:
            raise ValueError("Unknown field type '" + str(field_type) + "' for column '" + str(name) + "'")
        self.name                                   = name
        self.field_type                             = field_type

    INT                                             = "int"
    FLOAT                                           = "float"
    STR                                             = "str"

    TYPES                                           = [INT, FLOAT, STR]

    @abc.abstractmethod
    def check(self, column: _pd.Series, artifact: str):
        '''
        :raises ArtifactError: if the values of ``column`` cannot belong to this field
        '''

class ValueField(Field):

    '''
    Column whose values are unrestricted apart from their type. Float columns may be empty (NaN), e.g. the input
    columns of a leader row.
    '''
    def __init__(self, name: str, field_type: str):
        super().__init__(name, field_type)

    def check(self, column, artifact):
        if self.field_type == Field.STR:
            return
        values                                      = _pd.to_numeric(column, errors="coerce")
        if self.field_type == Field.INT and values.isna().any():
            raise ArtifactError("Column '" + self.name + "' of " + artifact + " must hold integers")

class EnumField(Field):

    '''
    Column restricted to a fixed vocabulary, e.g. the agent modes.

    :param list values: admissible values
    '''
    def __init__(self, name: str, values: list):
        super().__init__(name, Field.STR)
        self.values                                 = list(values)

    def check(self, column, artifact):
        unexpected                                  = sorted(set(str(v) for v in column.dropna()) - set(self.values))
        if len(unexpected) > 0:
            raise ArtifactError("Column '" + self.name + "' of " + artifact + " has unexpected values "
                                + str(unexpected) + "; expected one of " + str(self.values))
