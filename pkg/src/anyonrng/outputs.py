import csv
import json
import logging
import os

import ciopath.gpath
import numpy as np

LOG = logging.getLogger(__name__)

FORMAT_VERSION = 1
SIDECAR_SUFFIX = ".meta.json"


def normalize_path(path):
    return ciopath.gpath.Path(os.path.abspath(path)).fslash(with_drive=True)


def sidecar_path(path):
    return "{}{}".format(path, SIDECAR_SUFFIX)


def _to_builtin(value):

    if isinstance(value, np.integer):
        return int(value)

    if isinstance(value, np.floating):
        return float(value)

    if isinstance(value, np.ndarray):
        return value.tolist()

    raise TypeError("Cannot serialize {!r}".format(value))


def write_json(path, payload, config):
    '''
    Write ``payload`` with the format version and the run configuration.
    Keys are sorted, so the same inputs always give the same bytes.
    '''

    document = {"format_version": FORMAT_VERSION, "config": config.to_dict()}
    document.update(payload)

    with open(path, "w", newline="\n") as handle:
        handle.write(json.dumps(document, indent=2, sort_keys=True, default=_to_builtin))
        handle.write("\n")

    LOG.info("Wrote {}".format(path))

    return path


def write_csv(path, header, rows, config, metadata=None):
    '''
    Write a numeric CSV plus a ``<path>.meta.json`` sidecar carrying the format
    version and run configuration.
    '''

    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)

    payload = {"file": os.path.basename(path), "columns": list(header)}
    if metadata:
        payload["metadata"] = metadata

    write_json(sidecar_path(path), payload, config)
    LOG.info("Wrote {}".format(path))

    return path


def read_json(path):
    with open(path) as handle:
        return json.load(handle)


def read_csv(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def write_bits(path, bits):
    with open(path, "wb") as handle:
        handle.write(np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes())

    return path
