# __main__.py

from qsg.cli import main

if __name__ == "__main__":
    main()
