import logging

from pcog.cli import cli


# --- Main Execution ---
def main_entry():
    logging.debug("pcog command line started")
    cli(prog_name="pcog")


if __name__ == "__main__":
    main_entry()
