#
# MIT License
#
# (C) Copyright 2025-2026 The rolling-dazzle Authors
#
# Permission is hereby granted, free of charge, to any person obtaining a
# copy of this software and associated documentation files (the "Software"),
# to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense,
# and/or sell copies of the Software, and to permit persons to whom the
# Software is furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included
# in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR
# OTHER LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE,
# ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR
# OTHER DEALINGS IN THE SOFTWARE.
#

"""
Run manifests: the configuration, seeds, file digests and results of one
harness command, written as YAML next to the command's outputs.
"""

from dataclasses import dataclass, field
import datetime
import hashlib
from importlib import metadata
import logging
import os

import yaml

from rolling_dazzle.constants import MANIFEST_FILE_NAME

LOGGER = logging.getLogger(__name__)

DISTRIBUTION_NAME = 'rolling-dazzle'
UNKNOWN_VERSION = '0.0.0+unknown'


def tool_version():
    """Return the installed version of the rolling-dazzle distribution."""
    try:
        return metadata.version(DISTRIBUTION_NAME)
    except metadata.PackageNotFoundError:
        return UNKNOWN_VERSION


def file_digest(path):
    """Return the sha256 hex digest of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as data_file:
        for chunk in iter(lambda: data_file.read(1 << 16), b''):
            digest.update(chunk)
    return digest.hexdigest()


def _digests(paths):
    return {os.path.basename(path): file_digest(path) for path in sorted(paths)}


@dataclass
class RunManifest:
    """Everything needed to reproduce one harness command.

    Attributes:
        command (str): the harness subcommand.
        config (dict): the full configuration the command ran with.
        seeds (dict): seed name to value.
        inputs (list of str): input file paths; digested when written.
        outputs (list of str): output file paths; digested when written.
        results (dict): command-specific results.
    """
    command: str
    config: dict
    seeds: dict = field(default_factory=dict)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def as_dict(self):
        """dict: the manifest content, with digests and a UTC timestamp."""
        return {
            'tool_version': tool_version(),
            'command': self.command,
            'timestamp': datetime.datetime.now(datetime.timezone.utc).isoformat(),
            'seeds': dict(self.seeds),
            'config': dict(self.config),
            'inputs': _digests(self.inputs),
            'outputs': _digests(self.outputs),
            'results': self.results,
        }

    def write(self, out_dir):
        """Write the manifest to out_dir, creating the directory, and return its path."""
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, MANIFEST_FILE_NAME)
        with open(path, 'w', encoding='utf-8') as manifest_file:
            yaml.safe_dump(self.as_dict(), manifest_file, sort_keys=False, default_flow_style=False)
        LOGGER.info('Wrote run manifest to %s', path)
        return path


def read_manifest(path):
    """Return the content of a manifest file."""
    with open(path, encoding='utf-8') as manifest_file:
        return yaml.safe_load(manifest_file)
