import json                                             as _json
import numpy                                            as _np

from rendezvous.util.errors                             import ArtifactError

class _NumpyEncoder(_json.JSONEncoder):

    def default(self, obj):
        if isinstance(obj, _np.integer):
            return int(obj)
        if isinstance(obj, _np.floating):
            return float(obj)
        if isinstance(obj, _np.bool_):
            return bool(obj)
        if isinstance(obj, _np.ndarray):
            return obj.tolist()
        return super().default(obj)

class JSON_Utils():

    '''
    Class used to aggregate a number of helper methods to manipulate strings and files adhering to the JSON format.
    numpy scalars and arrays are written as plain JSON numbers and lists.
    '''
    def __init__(self):
        pass

    def nice(json_content: str|list|dict):
        '''
        Returns a nice rendering of a JSON object that can then be displayed to an end-user.
        It is "nice" because it uses indentation to reflect nested structures, and uses a new line for
        each field.

        :param str|list|dict json_object: JSON-formatted data
        :returns: a nice string represention or `json_content`
        :rtype: str
        '''
        if type(json_content) == str:
            json_object                         = _json.loads(json_content)
        else:
            json_object                         = json_content

        json_formatted_str                      = _json.dumps(json_object, indent=2, cls=_NumpyEncoder)
        return json_formatted_str

    def save(self, json_object, path):
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(JSON_Utils.nice(json_object) + "\n")

    def load(self, path):
        '''
        :raises ArtifactError: if the file is missing or is not valid JSON
        '''
        try:
            with open(path, "r", encoding="utf-8") as file:
                return _json.load(file)
        except FileNotFoundError as ex:
            raise ArtifactError("JSON file '" + str(path) + "' does not exist") from ex
        except _json.JSONDecodeError as ex:
            raise ArtifactError("Invalid JSON in '" + str(path) + "' at line " + str(ex.lineno) + ": " + ex.msg) from ex

    def append_line(self, json_object, file):
        '''
        Writes ``json_object`` as one line of a JSON Lines stream, with keys in insertion order.

        :param file: text file open for writing
        '''
        file.write(_json.dumps(json_object, cls=_NumpyEncoder, separators=(",", ":")) + "\n")

    def save_lines(self, json_objects, path):
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            for json_object in json_objects:
                self.append_line(json_object, file)

    def load_lines(self, path):
        '''
        :return: one object per non-blank line of a JSON Lines file
        :raises ArtifactError: if the file is missing or a line is not valid JSON
        '''
        result                                  = []
        try:
            with open(path, "r", encoding="utf-8") as file:
                for line_nb, line in enumerate(file, start=1):
                    if len(line.strip()) == 0:
                        continue
                    try:
                        result.append(_json.loads(line))
                    except _json.JSONDecodeError as ex:
                        raise ArtifactError("Invalid JSON in '" + str(path) + "' at line " + str(line_nb) + ": "
                                            + ex.msg) from ex
        except FileNotFoundError as ex:
            raise ArtifactError("JSON Lines file '" + str(path) + "' does not exist") from ex
        return result
