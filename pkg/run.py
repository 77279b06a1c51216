#!/usr/bin/env python3
"""
Development runner.

    python run.py simulate --scenario mst --gen cycle,8,1 --gen-batches weights,2,5,1
    python run.py serve
"""

import sys

import uvicorn


def run_server():
    """Run the API with auto-reload."""
    uvicorn.run("app.main:app", host="0.0.0.0", port=8000, reload=True)


def main():
    """Dispatch on the first argument."""
    if len(sys.argv) > 1 and sys.argv[1] == "simulate":
        from app.cli import main as cli_main

        sys.exit(cli_main(sys.argv[1:]))
    elif len(sys.argv) > 1 and sys.argv[1] != "serve":
        print("Usage: python run.py [command]")
        print("Commands:")
        print("  simulate ... - Run one experiment (see `python run.py simulate --help`)")
        print("  serve        - Run the API server (default)")
        sys.exit(2)
    run_server()


if __name__ == "__main__":
    main()
