#!/usr/bin/env python3
import sys
import asyncio
import argparse
from dotenv import load_dotenv
from cocycleforge.run_once import EXIT_CONFIG, run
from cocycleforge.logging_config import setup_logging

# Load environment variables from .env file
load_dotenv()

def print_registry(registry_file):
    from cocycleforge.dynamics.registry import list_registry
    rows = list_registry(registry_file)
    widths = [max(len(getattr(r, f)) for r in rows) for f in ("category", "name", "params")]
    for r in rows:
        print(f"{r.category:<{widths[0]}}  {r.name:<{widths[1]}}  {r.params:<{widths[2]}}  {r.description}")

def main():
    parser = argparse.ArgumentParser(prog="cocycle-forge", description="Twisted cohomological equations over isometric cocycles")
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                       default='INFO', help='Set logging level')
    parser.add_argument('--log-file', help='Optional log file path')
    parser.add_argument('--no-colors', action='store_true', help='Disable colored output')

    subparsers = parser.add_subparsers(dest='command')
    run_parser = subparsers.add_parser('run', help='Run the experiment named in a config file')
    run_parser.add_argument('config', nargs='?', default='config.yaml', help='YAML config file')
    run_parser.add_argument('--threads', type=int, help='Worker threads for grid evaluation')
    run_parser.add_argument('--out', help='Output root directory')
    list_parser = subparsers.add_parser('list', help='List base systems, Ψ and ρ entries')
    list_parser.add_argument('--registry', help='YAML file with extra ρ entries')

    args = parser.parse_args()

    # Setup logging
    logger, progress_logger = setup_logging(
        level=args.log_level,
        log_file=args.log_file,
        enable_colors=not args.no_colors
    )

    if args.command == 'run':
        logger.info(f"Starting cocycle-forge run with {args.config}")
        sys.exit(asyncio.run(run(args.config, out_root=args.out, threads=args.threads,
                                 logger=logger, progress_logger=progress_logger)))
    elif args.command == 'list':
        try:
            print_registry(args.registry)
        except (FileNotFoundError, ValueError) as e:
            logger.error(f"Cannot read registry: {e}")
            sys.exit(EXIT_CONFIG)
        sys.exit(0)
    else:
        parser.print_help()
        sys.exit(1)

if __name__ == '__main__':
    main()
