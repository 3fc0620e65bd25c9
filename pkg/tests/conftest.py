import os

import pytest


def pytest_collection_modifyitems(config, items):
    if os.environ.get("HIERARCHON_ACCEPT_EXTENDED") == "1":
        return
    skip = pytest.mark.skip(reason="set HIERARCHON_ACCEPT_EXTENDED=1 to run")
    for item in items:
        if "extended" in item.keywords:
            item.add_marker(skip)
