from pathlib import Path

from dlcm import parse_kb

KBS = Path(__file__).parent / "kbs"


def load(name):
    return parse_kb((KBS / name).read_text())


def banner(text):
    print()
    print(text)
    print("-" * len(text))
