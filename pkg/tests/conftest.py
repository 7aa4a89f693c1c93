import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))

DATA_DIR = pathlib.Path(__file__).parent.parent / "src" / "regrasp" / "data"
BIPED_PATH = DATA_DIR / "robots" / "biped.json"
SCENARIO_DIR = DATA_DIR / "scenarios"
