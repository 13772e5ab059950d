import sys
from pathlib import Path

# the synthetic corpus builders live with the pipeline package's tests
sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))
