"""
Shared pytest fixtures: corpus location, run configurations and small
pipeline helpers over inline source text
"""
from pathlib import Path

import pytest

from minidafny.cli.verify import verify_file
from minidafny.config.settings_loader import RunConfig
from minidafny.frontend import ast, parse_source
from minidafny.ir import lower_function, lower_method
from minidafny.typecheck import resolve_and_check
from minidafny.vcgen import build_callgraph, build_function_table, generate_vcs

CORPUS_DIR = Path(__file__).parent / "corpus"


@pytest.fixture
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture
def castle_source() -> str:
    return (CORPUS_DIR / "edinburgh_castle.mdfy").read_text()


@pytest.fixture
def run_config():
    """Builtin backend with replay, independent of settings files and the environment"""
    return RunConfig(replay=True).validate()


@pytest.fixture
def typed():
    def build(source: str, path: str = "test.mdfy"):
        return resolve_and_check(parse_source(source, path))
    return build


@pytest.fixture
def conditions(typed):
    """source, declaration name -> (typed program, decl, graph, verification conditions)"""
    def build(source: str, name: str, fuel: int = 2):
        tp = typed(source)
        decl = tp.decls[name].decl
        callgraph = build_callgraph(tp)
        if isinstance(decl, ast.FunctionDecl):
            graph = lower_function(decl, tp, callgraph)
        else:
            graph = lower_method(decl, tp, callgraph)
        vcs = generate_vcs(graph, build_function_table(tp), fuel)
        return tp, decl, graph, vcs
    return build


@pytest.fixture
def verify_text(tmp_path, run_config):
    """Write source to a file and verify it; returns the FileReport"""
    def run(source: str, name: str = "program.mdfy", config: RunConfig = None):
        path = tmp_path / name
        path.write_text(source)
        return verify_file(str(path), config or run_config)
    return run
