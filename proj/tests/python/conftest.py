import os
import sys

ext_dir = os.environ.get("WEIGHTDYN_EXT_DIR")
src = os.environ.get("WEIGHTDYN_SRC")
if ext_dir:
    sys.path.insert(0, ext_dir)
if src:
    sys.path.insert(0, os.path.join(src, "python"))
