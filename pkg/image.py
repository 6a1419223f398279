#! /usr/bin/env python3
# vim:fenc=utf-8
#
# Distributed under terms of the MIT license.

from bootstrap.cli import main

if __name__ == "__main__":
    main("image")
