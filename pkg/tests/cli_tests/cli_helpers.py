from copula_survival.cli.main import main


def run_command(command: str, output_dir: str, *args: str) -> int:
    return main([command, "--output-dir", output_dir, "--verbose", "0", *args])


def run_generate(output_dir: str, *args: str) -> int:
    return run_command("generate", output_dir, *args)
