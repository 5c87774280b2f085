"""Application entry point; forwards to the vehicle-api-tester CLI."""

from apps.tester.cli.main import main

if __name__ == "__main__":
    raise SystemExit(main())
