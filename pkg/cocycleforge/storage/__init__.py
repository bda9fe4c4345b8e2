from . import paths
from . import fs
from . import manifest
