import os
import json
import hashlib


def read_source(source):
    """ Text of a path or of an open stream """
    if hasattr(source, 'read'):
        return source.read()
    with open(source, 'r', encoding='utf-8') as f:
        return f.read()


def sha256_digest(text):
    """ Hex sha256 of a text """
    return 'sha256:' + hashlib.sha256(text.encode('utf-8')).hexdigest()


def dumps(data):
    """ Canonical JSON: sorted keys, stable separators, trailing newline """
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


def write_text(text, fout):
    """ Write text to a path, or to a stream such as sys.stdout """
    if hasattr(fout, 'write'):
        fout.write(text)
        return fout
    with open(fout, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    return fout


def extension(filename):
    """ Lower-case extension without the dot """
    return os.path.splitext(str(filename))[1].lower().lstrip('.')
