import pytest

from rpys import (
    ScriptExecutionError,
    ScriptSemanticError,
    ScriptSyntaxError,
    execute,
    format_script,
    parse_script,
    run_script_text,
)

from conftest import PART_FILES, SCRIPTS

PUBLISHED_SCRIPTS = ["journal_of_informetrics.cre-script", "altmetrics_topic.cre-script", "ludo_waltman.cre-script"]

FIG1_BINDINGS = {
    "Journal_of_Informetrics_pt1.txt": "corpus_part1.txt",
    "Journal_of_Informetrics_pt2.txt": "corpus_part2.txt",
    "Journal_of_Informetrics_pt3.txt": "corpus_part3.txt",
}
FIG2_BINDINGS = {
    "topic_search_altmetrics_pt1.txt": "corpus_part1.txt",
    "topic_search_altmetrics_pt2.txt": "corpus_part2.txt",
}
FIG3_BINDINGS = {"Ludo_Waltman.txt": "corpus_part1.txt"}


class TestParse:
    @pytest.mark.parametrize("name", PUBLISHED_SCRIPTS)
    def test_published_scripts_have_seven_commands(self, name):
        commands = parse_script((SCRIPTS / name).read_text("utf-8"))
        assert [c.name for c in commands] == [
            "importFile",
            "cluster",
            "merge",
            "removeCR",
            "exportFile",
            "exportFile",
            "saveFile",
        ]

    def test_journal_script_arguments(self):
        commands = parse_script((SCRIPTS / "journal_of_informetrics.cre-script").read_text("utf-8"))
        imp = commands[0]
        assert imp.args["files"] == [
            "Journal_of_Informetrics_pt1.txt",
            "Journal_of_Informetrics_pt2.txt",
            "Journal_of_Informetrics_pt3.txt",
        ]
        assert imp.args["type"] == "WOS"
        assert imp.args["RPY"] == [1000, 2021, True]
        assert imp.args["PY"] == [1900, 2021, True]
        assert imp.args["maxCR"] == 0
        assert commands[1].args == {
            "threshold": 0.75,
            "volume": True,
            "page": True,
            "DOI": False,
        }
        assert commands[2].args == {}
        assert commands[3].args == {"N_CR": [0, 9]}

    def test_altmetrics_script_remove_bounds(self):
        commands = parse_script((SCRIPTS / "altmetrics_topic.cre-script").read_text("utf-8"))
        assert commands[3].args == {"N_CR": [0, 4]}

    def test_waltman_script_single_file_import(self):
        commands = parse_script((SCRIPTS / "ludo_waltman.cre-script").read_text("utf-8"))
        assert commands[0].args["file"] == "Ludo_Waltman.txt"
        assert commands[3].args == {"N_CR": [0, 1]}

    def test_merge_alone(self):
        commands = parse_script("merge()")
        assert len(commands) == 1
        assert commands[0].name == "merge" and commands[0].args == {}

    def test_empty_script(self):
        assert parse_script("") == []
        assert parse_script("  \n\n  ") == []

    def test_commands_span_lines(self):
        commands = parse_script('importFile(\n  file:\n  "x.txt"\n)')
        assert commands[0].args == {"file": "x.txt"}

    def test_mixed_array_values(self):
        commands = parse_script("importFile(file: \"x\", RPY: [1000, 2021, true])")
        assert commands[0].args["RPY"] == [1000, 2021, True]

    def test_unknown_command(self):
        with pytest.raises(ScriptSemanticError, match="unknownCmd"):
            parse_script('unknownCmd(file: "x")')

    def test_unknown_argument(self):
        with pytest.raises(ScriptSemanticError, match="colour"):
            parse_script("cluster(colour: true)")

    def test_duplicate_argument(self):
        with pytest.raises(ScriptSemanticError, match="duplicate"):
            parse_script("cluster(threshold: 0.5, threshold: 0.6)")

    def test_syntax_error_carries_position(self):
        with pytest.raises(ScriptSyntaxError) as err:
            parse_script('importFile(file: "x.txt"')
        assert err.value.line == 1 and err.value.col == 25

    def test_unterminated_string_position(self):
        with pytest.raises(ScriptSyntaxError) as err:
            parse_script('merge()\nexportFile(file: "broken)')
        assert err.value.line == 2

    def test_bad_character(self):
        with pytest.raises(ScriptSyntaxError):
            parse_script("merge(); exportFile()")

    def test_string_escapes(self):
        commands = parse_script('saveFile(file: "a \\"quoted\\" name.cre")')
        assert commands[0].args["file"] == 'a "quoted" name.cre'


class TestPrettyPrinter:
    @pytest.mark.parametrize("name", PUBLISHED_SCRIPTS)
    def test_roundtrip_published_scripts(self, name):
        commands = parse_script((SCRIPTS / name).read_text("utf-8"))
        printed = format_script(commands)
        assert parse_script(printed) == commands

    def test_roundtrip_escapes(self):
        commands = parse_script('saveFile(file: "a \\"b\\" c")')
        assert parse_script(format_script(commands)) == commands


@pytest.fixture()
def script_workdir(tmp_path, fixtures_dir):
    for name in PART_FILES:
        (tmp_path / name).write_bytes((fixtures_dir / name).read_bytes())
    return tmp_path


class TestExecute:
    def test_journal_script_pipeline(self, script_workdir, manifest):
        text = (SCRIPTS / "journal_of_informetrics.cre-script").read_text("utf-8")
        report = run_script_text(text, script_workdir, FIG1_BINDINGS)
        assert len(report.steps) == 7
        outputs = report.outputs
        assert len(outputs) == 3
        csv_cr = script_workdir / "Journal_of_Informetrics_rpy_minrcr_10_script_CR.csv"
        csv_graph = script_workdir / "Journal_of_Informetrics_rpy_minrcr_10_script_GRAPH.csv"
        cre = script_workdir / "Journal_of_Informetrics_rpy_minrcr_10_script.cre"
        assert csv_cr.is_file() and csv_graph.is_file() and cre.is_file()
        lines = csv_cr.read_text("utf-8").strip().split("\n")
        assert len(lines) - 1 == manifest["script_survivors"]["journal_of_informetrics"]
        for line in lines[1:]:
            assert int(line.rsplit(",")[-6]) >= 10  # N_CR column

    def test_stats_monotonic_along_script(self, script_workdir):
        text = (SCRIPTS / "journal_of_informetrics.cre-script").read_text("utf-8")
        report = run_script_text(text, script_workdir, FIG1_BINDINGS)
        distinct = [s.stats.n_distinct_crs for s in report.steps if s.stats]
        assert all(b <= a for a, b in zip(distinct, distinct[1:]))

    def test_replay_is_byte_identical(self, fixtures_dir, tmp_path):
        text = (SCRIPTS / "altmetrics_topic.cre-script").read_text("utf-8")
        digests = []
        for run in ("one", "two"):
            workdir = tmp_path / run
            workdir.mkdir()
            for name in PART_FILES:
                (workdir / name).write_bytes((fixtures_dir / name).read_bytes())
            run_script_text(text, workdir, FIG2_BINDINGS)
            digests.append(
                [
                    (p.name, p.read_bytes())
                    for p in sorted(workdir.glob("topic_search_*"))
                ]
            )
        assert digests[0] == digests[1]

    def test_empty_script(self, tmp_path):
        report = execute([], tmp_path)
        assert report.steps == []

    def test_merge_first_fails_at_index_zero(self, tmp_path):
        with pytest.raises(ScriptExecutionError) as err:
            run_script_text("merge()", tmp_path)
        assert err.value.index == 0

    def test_merge_without_cluster(self, script_workdir):
        text = 'importFile(file: "corpus_part1.txt")\nmerge()'
        with pytest.raises(ScriptExecutionError) as err:
            run_script_text(text, script_workdir)
        assert err.value.index == 1
        assert "cluster" in str(err.value)

    def test_missing_input_file(self, tmp_path):
        with pytest.raises(ScriptExecutionError) as err:
            run_script_text('importFile(file: "nowhere.txt")', tmp_path)
        assert "nowhere.txt" in str(err.value)

    def test_unsupported_import_type(self, script_workdir):
        text = 'importFile(file: "corpus_part1.txt", type: "SCOPUS")'
        with pytest.raises(ScriptExecutionError, match="SCOPUS"):
            run_script_text(text, script_workdir)

    def test_export_before_import_is_ordering_error(self, script_workdir):
        text = 'exportFile(file: "x.csv", type: "CSV_CR")'
        with pytest.raises(ScriptExecutionError) as err:
            run_script_text(text, script_workdir)
        assert err.value.index == 0

    def test_file_and_files_both_given(self, script_workdir):
        text = 'importFile(file: "corpus_part1.txt", files: ["corpus_part2.txt"])'
        with pytest.raises(ScriptExecutionError, match="exactly one"):
            run_script_text(text, script_workdir)

    def test_report_carries_timings_and_stats(self, script_workdir):
        text = 'importFile(file: "corpus_part1.txt")'
        report = run_script_text(text, script_workdir)
        step = report.steps[0]
        assert step.elapsed_s >= 0
        assert step.stats is not None and step.stats.n_citing_pubs == 10
        assert report.as_dict()["steps"][0]["stats"]["n_citing_pubs"] == 10
