from tlchain.cli import run

run()
