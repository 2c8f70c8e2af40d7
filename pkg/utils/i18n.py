"""
Translation catalogue helper around ``pybabel``.

Usage:
  uv run python utils/i18n.py pot
  uv run python utils/i18n.py po --lang es_ES
  uv run python utils/i18n.py mo
"""
import argparse
import subprocess
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
LOCALES_ROOT = ROOT / "src" / "omv_tools" / "locales"
POT_PATH = LOCALES_ROOT / "messages.pot"


def extract_translations():
    """Extract the messages marked with ``_()`` into the POT template."""
    LOCALES_ROOT.mkdir(parents=True, exist_ok=True)
    subprocess.run(["pybabel", "extract", "-F", str(ROOT / "babel.cfg"), "-o", str(POT_PATH), str(ROOT)],
                   check=True)
    print(f"✅ POT template written to {POT_PATH}")


def init_translation(lang: str = "en_GB"):
    """Create the PO catalogue of ``lang``, or update it from the POT template when it exists."""
    po_file = LOCALES_ROOT / lang / "LC_MESSAGES" / "messages.po"
    action = "update" if po_file.exists() else "init"
    subprocess.run(["pybabel", action, "-i", str(POT_PATH), "-d", str(LOCALES_ROOT), "-l", lang], check=True)
    print(f"✅ PO catalogue {action}d for '{lang}' at {po_file}")


def compile_translations():
    """Compile every PO catalogue to MO."""
    subprocess.run(["pybabel", "compile", "-d", str(LOCALES_ROOT)], check=True)
    print(f"✅ Catalogues compiled in {LOCALES_ROOT}")


def main():
    parser = argparse.ArgumentParser(description="Manage the command-line translations with Babel.")
    parser.add_argument("action", choices=["pot", "po", "mo"],
                        help="'pot' extracts messages, 'po' creates or updates a catalogue, 'mo' compiles.")
    parser.add_argument("--lang", "-l", default="en_GB", help="Catalogue language (only used with 'po').")
    args = parser.parse_args()

    if args.action == "pot":
        extract_translations()
    elif args.action == "po":
        init_translation(args.lang)
    else:
        compile_translations()


if __name__ == "__main__":
    main()
