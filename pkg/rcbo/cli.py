from .commands import cli, execute, parse_args

__all__ = ["cli", "execute", "parse_args"]

if __name__ == "__main__":
    cli()
