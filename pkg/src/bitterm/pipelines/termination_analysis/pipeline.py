from kedro.pipeline import Pipeline, node

from .nodes import analyze_program, load_program, report_verdict


def create_pipeline(**kwargs):
    return Pipeline(
        [
            node(
                load_program,
                inputs=["program_source", "params:source_name", "params:analysis"],
                outputs="program",
                name="load_program_node",
            ),
            node(
                analyze_program,
                inputs=["program", "params:analysis"],
                outputs="verdict",
                name="analyze_program_node",
            ),
            node(
                report_verdict,
                inputs=["verdict", "params:source_name"],
                outputs="termination_report",
                name="report_verdict_node",
            ),
        ]
    )
