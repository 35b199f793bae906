import sys

from grand_mo.main import main


if __name__ == "__main__":
    sys.exit(main())
