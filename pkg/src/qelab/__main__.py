"""Enable running as python -m qelab."""

from qelab.main import main

if __name__ == "__main__":
    main()
