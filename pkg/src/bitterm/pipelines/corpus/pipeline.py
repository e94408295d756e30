from kedro.pipeline import Pipeline, node

from .nodes import analyze_corpus, compare_corpus_modes, summarize_corpus


def create_pipeline(**kwargs):
    return Pipeline(
        [
            node(
                analyze_corpus,
                inputs=["corpus_sources", "params:corpus", "params:analysis"],
                outputs="corpus_results",
                name="analyze_corpus_node",
            ),
            node(
                compare_corpus_modes,
                inputs="corpus_results",
                outputs="mode_comparison",
                name="compare_modes_node",
            ),
            node(
                summarize_corpus,
                inputs="mode_comparison",
                outputs="mode_summary",
                name="summarize_corpus_node",
            ),
        ]
    )
